"""Tests for the ball-indicator function algebra and its Fourier transform."""

import random
from fractions import Fraction

import pytest

from padicwavelets.functions import (
    DEFAULT_TOL,
    NotLizorkinError,
    SchwartzFunction,
    TermBudgetError,
    indicator,
    unit_ball_indicator,
)
from padicwavelets.padic import Ball, power


def random_function(rng, p, n=1, nterms=3, depth=2, span=2):
    """Random small function: integer-or-p-power-denominator centers."""
    terms = []
    for _ in range(nterms):
        center = tuple(
            Fraction(rng.randint(-6, 6), p ** rng.randint(0, depth))
            for _ in range(n)
        )
        scale = rng.randint(-span, span)
        coeff = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        terms.append((Ball(p, center, scale), coeff))
    return SchwartzFunction(p, n, terms)


class TestNormalForm:
    def test_zero_function(self):
        f = SchwartzFunction.zero(2, 1)
        assert f.is_zero()
        assert f.integrate() == 0
        assert f.evaluate((Fraction(1, 2),)) == 0

    def test_sibling_merge(self):
        p = 3
        parts = Ball(p, (0,), 0).children()
        f = SchwartzFunction(p, 1, [(b, 2.0) for b in parts])
        assert f.terms == ((Ball(p, (0,), 0), 2.0 + 0j),)

    def test_refinement_identity(self):
        # the unit ball indicator equals the sum of its one-scale-down copies
        for p in (2, 3, 5):
            omega = unit_ball_indicator(p)
            pieces = SchwartzFunction.zero(p, 1)
            for r in range(p):
                pieces = pieces + omega.affine_pullback(
                    (-1,), (Fraction(r, p),))
            assert pieces == omega

    def test_overlapping_scales(self):
        p = 2
        f = unit_ball_indicator(p) + indicator(Ball(p, (0,), -2), 1.0)
        # value 2 on the deep ball, 1 elsewhere in the unit ball
        assert f.evaluate((0,)) == 2
        assert f.evaluate((4,)) == 2
        assert f.evaluate((1,)) == 1
        assert f.evaluate((2,)) == 1
        assert f.evaluate((Fraction(1, 4),)) == 0  # |1/4|_2 = 4, outside
        assert f.integrate() == pytest.approx(1 + 0.25)
        # siblings at each scale stay separate (unequal coefficients)
        assert len(f.terms) == 3

    def test_normalize_idempotent(self):
        rng = random.Random(10)
        for _ in range(30):
            p = rng.choice([2, 3])
            f = random_function(rng, p)
            again = SchwartzFunction(p, 1, f.terms)
            assert again == f

    def test_cancellation(self):
        p = 2
        f = unit_ball_indicator(p) - unit_ball_indicator(p)
        assert f.is_zero()

    def test_deterministic_order(self):
        rng = random.Random(11)
        f = random_function(rng, 3, nterms=5)
        shuffled = list(f.terms)
        rng.shuffle(shuffled)
        assert SchwartzFunction(3, 1, shuffled) == f


class TestPointwiseOps:
    def test_evaluate_outside_support(self):
        omega = unit_ball_indicator(2)
        assert omega.evaluate((Fraction(1, 2),)) == 0

    def test_mul_nested(self):
        p = 2
        inner = indicator(Ball(p, (0,), -1))
        assert unit_ball_indicator(p) * inner == inner

    def test_translate_by_integer_fixes_unit_ball(self):
        omega = unit_ball_indicator(2)
        assert omega.translate((1,)) == omega

    def test_translate_difference_is_zero_mean(self):
        rng = random.Random(12)
        for _ in range(20):
            p = rng.choice([2, 3])
            f = random_function(rng, p)
            t = (Fraction(rng.randint(-3, 3), p),)
            g = f - f.translate(t)
            assert g.is_lizorkin()

    def test_scalar_and_linearity(self):
        rng = random.Random(13)
        f = random_function(rng, 3)
        g = random_function(rng, 3)
        total = (f + g).integrate()
        assert total == pytest.approx(f.integrate() + g.integrate())
        assert (2j * f).integrate() == pytest.approx(2j * f.integrate())

    def test_dilate_scales_measure(self):
        # substituting y = p̂^j x scales the Haar measure by p^{+|j|}
        rng = random.Random(14)
        for _ in range(20):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2])
            f = random_function(rng, p, n=n, nterms=2)
            j = tuple(rng.randint(-2, 2) for _ in range(n))
            lhs = f.dilate(j).integrate()
            rhs = f.integrate() * float(power(p, sum(j)))
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_prime_mismatch(self):
        from padicwavelets.padic import PrimeMismatchError

        with pytest.raises(PrimeMismatchError):
            unit_ball_indicator(2) + unit_ball_indicator(3)


class TestIntegration:
    def test_unit_ball_measure_one(self):
        for p in (2, 3, 5):
            for n in (1, 2):
                assert unit_ball_indicator(p, n).integrate() == 1

    def test_dilated_shifts(self):
        # integral of the indicator of {|p^j x - a| <= 1} is p^j
        p = 3
        omega = unit_ball_indicator(p)
        for j in (-2, 0, 2):
            for a in (Fraction(0), Fraction(1, 3), Fraction(2, 9)):
                f = omega.affine_pullback((j,), (a,))
                assert f.integrate() == pytest.approx(float(power(p, j)))

    def test_inner_product_self(self):
        p = 2
        omega = unit_ball_indicator(p)
        assert omega.inner_product(omega) == pytest.approx(1.0)
        half = indicator(Ball(p, (1,), -1), 2.0)
        assert half.inner_product(half) == pytest.approx(4 * 0.5)
        assert omega.inner_product(half) == pytest.approx(2 * 0.5)

    def test_lizorkin_membership(self):
        assert not unit_ball_indicator(2).is_lizorkin()
        f = indicator(Ball(2, (0,), -1)) - indicator(Ball(2, (1,), -1))
        assert f.is_lizorkin()


class TestFourier:
    def test_unit_ball_fixed_point(self):
        for p in (2, 3, 5):
            omega = unit_ball_indicator(p)
            assert omega.fourier() == omega
        omega2 = unit_ball_indicator(2, 2)
        assert omega2.fourier() == omega2

    def test_small_ball(self):
        # indicator of B_{-k} transforms to p^{-k} on B_k
        for p, k in ((2, 2), (3, 1)):
            f = indicator(Ball(p, (0,), -k))
            g = f.fourier()
            expected = indicator(Ball(p, (0,), k), float(power(p, -k)))
            assert g.isclose(expected, 1e-12)

    def test_shifted_ball_phases(self):
        # F of the ball at 1 (p=2, radius 1/2) is (1/2) chi(xi) on B_1
        f = indicator(Ball(2, (1,), -1))
        g = f.fourier()
        assert g.evaluate((0,)) == pytest.approx(0.5)
        assert g.evaluate((Fraction(1, 2),)) == pytest.approx(-0.5)
        assert g.evaluate((2,)) == pytest.approx(0.5)
        assert g.evaluate((4,)) == pytest.approx(0.5)

    def test_round_trip_identity(self):
        rng = random.Random(15)
        for _ in range(25):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2])
            f = random_function(rng, p, n=n, nterms=3)
            assert f.fourier().fourier_inverse().isclose(f, 1e-9)
            assert f.fourier_inverse().fourier().isclose(f, 1e-9)

    def test_double_transform_reflects(self):
        rng = random.Random(16)
        for _ in range(15):
            p = rng.choice([2, 3])
            f = random_function(rng, p, nterms=3)
            assert f.fourier().fourier().isclose(f.reflect(), 1e-9)

    def test_parseval(self):
        rng = random.Random(17)
        for _ in range(15):
            p = rng.choice([2, 3])
            f = random_function(rng, p, nterms=2)
            g = random_function(rng, p, nterms=2)
            lhs = f.inner_product(g)
            rhs = f.fourier().inner_product(g.fourier())
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_budget_guard(self):
        f = indicator(Ball(2, (Fraction(1, 2**12),), -12))
        with pytest.raises(TermBudgetError):
            f.fourier(budget=1000)


class TestSerialization:
    def test_round_trip(self):
        rng = random.Random(18)
        for _ in range(10):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2])
            f = random_function(rng, p, n=n)
            g = SchwartzFunction.from_json(f.to_json())
            assert g == f

    def test_accepts_unordered_terms(self):
        f = unit_ball_indicator(2) + indicator(Ball(2, (3,), 0), 2.0)
        data = f.to_dict()
        data["terms"].reverse()
        assert SchwartzFunction.from_dict(data) == f

    def test_schema_fields(self):
        f = indicator(Ball(5, (Fraction(1, 5), 2), -1), 1 + 2j)
        data = f.to_dict()
        assert data["p"] == 5 and data["n"] == 2
        term = data["terms"][0]
        assert term["center"] == ["1/5", "2/1"]
        assert term["radius_exp"] == -1
        assert term["coeff"] == {"re": 1.0, "im": 2.0}
