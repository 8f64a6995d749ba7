"""Tests for exact p-adic arithmetic."""

import math
import random
from fractions import Fraction

import pytest

from padicwavelets.padic import (
    INF,
    Ball,
    PadicRational,
    PadicVector,
    PrimeMismatchError,
    UnitPhase,
    character,
    decompose_ball,
    enumerate_frequencies,
    enumerate_frequencies_1d,
    enumerate_shifts,
    enumerate_shifts_1d,
    frac_part,
    norm,
    power,
    reduce_mod_scale,
    valuation,
)


def digit_expansion_frac_part(x: Fraction, p: int) -> Fraction:
    """Independent oracle: long division in base p down to depth |gamma|.

    Writes x = p**gamma * u with u a p-adic unit, extracts the first |gamma|
    digits of u by repeated 'divide the unit part by p' steps, and sums the
    negative-power digits.
    """
    x = Fraction(x)
    if x == 0:
        return Fraction(0)
    gamma = 0
    u = x
    while u.numerator % p == 0:
        u /= p
        gamma += 1
    while u.denominator % p == 0:
        u *= p
        gamma -= 1
    if gamma >= 0:
        return Fraction(0)
    digits = []
    for _ in range(-gamma):
        d = u.numerator * pow(u.denominator, -1, p) % p
        digits.append(d)
        u = (u - d) / p
    return sum(
        Fraction(d, p**i) for i, d in enumerate(reversed(digits), start=1)
    )


def random_rational(rng, span=400):
    num = rng.randint(-span, span)
    den = rng.randint(1, span)
    return Fraction(num, den)


class TestValuationNorm:
    def test_zero(self):
        assert valuation(0, 3) == INF
        assert norm(0, 3) == 0

    def test_one_third(self):
        assert valuation(Fraction(1, 3), 3) == -1
        assert norm(Fraction(1, 3), 3) == 3

    def test_twelve_fifths(self):
        # 12 = 2^2 * 3 and 5 is coprime to 2
        assert valuation(Fraction(12, 5), 2) == 2
        assert norm(Fraction(12, 5), 2) == Fraction(1, 4)

    def test_vector_norms(self):
        assert PadicVector(3, (Fraction(1, 9), 3)).norm() == 9
        assert PadicVector(2, (0, 0)).norm() == 0
        assert PadicVector(5, (2, Fraction(1, 5), 25)).norm() == 5

    def test_ultrametric_inequality(self):
        rng = random.Random(0)
        for p in (2, 3, 5):
            for _ in range(200):
                x, y = random_rational(rng), random_rational(rng)
                nx, ny, nxy = norm(x, p), norm(y, p), norm(x + y, p)
                assert nxy <= max(nx, ny)
                if nx != ny:
                    assert nxy == max(nx, ny)


class TestFracPart:
    def test_integer_is_zero(self):
        assert frac_part(7, 5) == 0

    def test_examples(self):
        assert frac_part(Fraction(3, 2), 2) == Fraction(1, 2)
        assert frac_part(Fraction(1, 6), 2) == Fraction(1, 2)

    def test_matches_digit_expansion_oracle(self):
        rng = random.Random(1)
        for _ in range(1000):
            p = rng.choice([2, 3, 5, 7])
            x = random_rational(rng)
            assert frac_part(x, p) == digit_expansion_frac_part(x, p)

    def test_additivity_mod_one(self):
        rng = random.Random(2)
        for _ in range(300):
            p = rng.choice([2, 3, 5])
            x, y = random_rational(rng), random_rational(rng)
            assert frac_part(x + y, p) == (frac_part(x, p) + frac_part(y, p)) % 1

    def test_zero_iff_nonnegative_valuation(self):
        rng = random.Random(3)
        for _ in range(300):
            p = rng.choice([2, 3, 5])
            x = random_rational(rng)
            assert (frac_part(x, p) == 0) == (valuation(x, p) >= 0)


class TestCharacter:
    def test_unit_ball_is_trivial(self):
        assert character(3, 7).q == 0
        assert character(3, 7).to_complex() == pytest.approx(1.0)

    def test_minus_one(self):
        ph = character(Fraction(1, 2), 2)
        assert ph.q == Fraction(1, 2)
        assert ph.to_complex() == pytest.approx(-1.0)

    def test_multiplicativity(self):
        rng = random.Random(4)
        for _ in range(100):
            p = rng.choice([2, 3, 5])
            x, y = random_rational(rng), random_rational(rng)
            lhs = character(x, p) * character(y, p)
            assert lhs == character(x + y, p)

    def test_phase_wraps(self):
        assert UnitPhase(Fraction(5, 4)).q == Fraction(1, 4)
        assert (UnitPhase(Fraction(2, 3)) * UnitPhase(Fraction(2, 3))).q == Fraction(1, 3)


class TestPadicRational:
    def test_arithmetic_and_reduction(self):
        x = PadicRational(3, Fraction(2, 6))
        assert (x.numerator, x.denominator) == (1, 3)
        y = x + PadicRational(3, Fraction(2, 3))
        assert y.value == 1
        assert (x * 3).value == 1

    def test_prime_mixing_rejected(self):
        with pytest.raises(PrimeMismatchError):
            PadicRational(2, 1) + PadicRational(3, 1)

    def test_string_round_trip(self):
        x = PadicRational(5, Fraction(-7, 25))
        assert str(x) == "-7/25"
        assert Fraction(str(x)) == x.value


class TestBall:
    def test_canonical_center(self):
        b = Ball(2, (Fraction(7, 4),), -1)
        # digits of 7/4 = 1/4 + 1/2 + 1 below scale 1/2: keep 1/4 + 1/2... scale
        # exponent -1 keeps digits at powers < 1, i.e. 1/4 + 1/2 + 1 itself < 2
        assert b.center == (Fraction(7, 4),)
        coarse = Ball(2, (Fraction(7, 4),), 0)
        assert coarse.center == (Fraction(3, 4),)
        unit = Ball(2, (Fraction(7, 4),), 2)
        assert unit.center == (0,)

    def test_every_point_is_a_center(self):
        rng = random.Random(5)
        for _ in range(100):
            p = rng.choice([2, 3, 5])
            g = rng.randint(-3, 3)
            x = random_rational(rng)
            b = Ball(p, (x,), g)
            assert b.contains_point((Fraction(x),))
            # translating the center by something small gives the same ball
            eps = Fraction(rng.randint(0, p - 1)) * power(p, -g)
            assert Ball(p, (x + eps,), g) == b

    def test_reduce_mod_scale_agrees_with_frac_part(self):
        rng = random.Random(6)
        for _ in range(200):
            p = rng.choice([2, 3])
            g = rng.randint(-4, 4)
            x = random_rational(rng)
            r = reduce_mod_scale(x, p, g)
            assert 0 <= r < power(p, -g)
            assert valuation(x - r, p) is INF or valuation(x - r, p) >= -g

    def test_nest_or_disjoint(self):
        rng = random.Random(7)
        for _ in range(200):
            p = rng.choice([2, 3])
            b1 = Ball(p, (random_rational(rng),), rng.randint(-3, 3))
            b2 = Ball(p, (random_rational(rng),), rng.randint(-3, 3))
            nested = b1.contains_ball(b2) or b2.contains_ball(b1)
            assert b1.intersects(b2) == nested


class TestDecomposeBall:
    def test_unit_ball_three_pieces(self):
        b = Ball(3, (0,), 0)
        parts = decompose_ball(b, -1)
        assert [q.center[0] for q in parts] == [0, 1, 2]
        assert all(q.radius_exp == -1 for q in parts)

    def test_not_a_refinement(self):
        b = Ball(3, (0,), 0)
        with pytest.raises(ValueError):
            decompose_ball(b, 0)

    def test_two_dimensional(self):
        b = Ball(2, (0, 0), 0)
        parts = decompose_ball(b, -1)
        assert [q.center for q in parts] == [
            (0, 0),
            (0, 1),
            (1, 0),
            (1, 1),
        ]

    def test_partition_properties(self):
        rng = random.Random(8)
        for _ in range(50):
            p = rng.choice([2, 3])
            n = rng.choice([1, 2])
            g = rng.randint(-2, 2)
            gp = g - rng.randint(1, 2)
            b = Ball(p, tuple(random_rational(rng) for _ in range(n)), g)
            parts = decompose_ball(b, gp)
            assert len(parts) == p ** (n * (g - gp))
            # disjoint, inside the parent, measures sum to the parent's
            for i, q in enumerate(parts):
                assert b.contains_ball(q)
                for r in parts[i + 1 :]:
                    assert not q.intersects(r)
            total = sum(power(p, q.measure_exp()) for q in parts)
            assert total == power(p, b.measure_exp())


class TestEnumerations:
    def test_shift_counts(self):
        for p in (2, 3, 5):
            for depth in (0, 1, 2, 3):
                shifts = enumerate_shifts_1d(p, depth)
                assert len(shifts) == p**depth
                assert len(set(shifts)) == len(shifts)

    def test_shift_membership(self):
        shifts = enumerate_shifts_1d(2, 2)
        assert set(shifts) == {
            Fraction(0),
            Fraction(1, 2),
            Fraction(1, 4),
            Fraction(3, 4),
        }

    def test_frequency_sets(self):
        assert enumerate_frequencies_1d(2, 1) == [Fraction(1, 2)]
        assert enumerate_frequencies_1d(3, 1) == [Fraction(1, 3), Fraction(2, 3)]
        assert enumerate_frequencies_1d(2, 3) == [
            Fraction(1, 8),
            Fraction(3, 8),
            Fraction(5, 8),
            Fraction(7, 8),
        ]

    def test_counts_multidimensional(self):
        freqs = enumerate_frequencies(3, (1, 2))
        assert len(freqs) == 2 * 6
        shifts = enumerate_shifts(2, 2, 1)
        assert len(shifts) == 4
        assert all(isinstance(v, PadicVector) for v in shifts)

    def test_frequency_norms(self):
        for p, m in ((2, 3), (3, 2)):
            for s in enumerate_frequencies_1d(p, m):
                assert norm(s, p) == p**m
