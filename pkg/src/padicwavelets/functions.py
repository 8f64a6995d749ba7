"""The algebra of compactly supported locally constant functions Q_p^n -> C.

Every function here is a finite linear combination of indicator functions of
p-adic balls, kept in a canonical normal form: pairwise disjoint balls, no
(numerically) zero coefficients, full sets of p^n equal-coefficient sibling
balls merged into their parent, and terms sorted by radius descending then
center.  Normal form makes equality decidable and keeps every operation a
finite exact computation.

The Fourier transform exploits that a function constant at scale gamma and
supported in B_N has a transform constant at scale -N and supported in
B_{-gamma}; on those two ball lattices the character kernel is exactly the
radix-p discrete Fourier kernel, so the transform is a (multidimensional)
FFT over the ball indices.  All character phases enter as exact fractions of
the lattice; no accumulated phase drift occurs.
"""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import cached_property
from itertools import product as _cartesian
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .padic import (
    INF,
    Ball,
    PrimeMismatchError,
    decompose_ball,
    power,
    valuation,
)

#: Absolute tolerance below which a complex coefficient counts as zero.
DEFAULT_TOL = 1e-10

#: Hard cap on intermediate ball counts in the Fourier transform.
DEFAULT_TERM_BUDGET = 10**6


class TermBudgetError(RuntimeError):
    """A transform would expand past the configured term budget."""


class NotLizorkinError(ValueError):
    """Operation requires a function with (numerically) zero integral."""


Term = tuple  # (Ball, complex)


def _term_sort_key(term: Term):
    ball = term[0]
    return (-ball.radius_exp, ball.center)


def _merge_siblings(p: int, n: int, acc: dict, tol: float) -> dict:
    """Bottom-up merge of complete equal-coefficient sibling sets."""
    full = p**n
    by_scale: dict[int, dict] = {}
    for ball, coeff in acc.items():
        by_scale.setdefault(ball.radius_exp, {})[ball] = coeff
    gamma = min(by_scale)
    while gamma <= max(by_scale):
        level = by_scale.get(gamma, {})
        groups: dict[Ball, list] = {}
        for ball in level:
            groups.setdefault(ball.ancestor(gamma + 1), []).append(ball)
        for parent, siblings in groups.items():
            if len(siblings) != full:
                continue
            coeffs = [level[b] for b in siblings]
            if max(abs(a - b) for a in coeffs for b in coeffs) <= tol:
                for b in siblings:
                    del level[b]
                up = by_scale.setdefault(gamma + 1, {})
                up[parent] = sum(coeffs) / full
        gamma += 1
    out = {}
    for level in by_scale.values():
        for ball, coeff in level.items():
            if abs(coeff) > tol:
                out[ball] = coeff
    return out


def _flatten_overlaps(p: int, n: int, acc: dict) -> dict:
    """Rewrite overlapping terms of mixed scales as a disjoint family.

    Builds the containment forest of the distinct balls and splits each ball
    one scale at a time toward its descendants, so a deep lone sub-ball costs
    O(depth * p^n) pieces rather than a full refinement.
    """
    scales = sorted({b.radius_exp for b in acc}, reverse=True)
    ball_set = set(acc)
    children: dict[Ball, list] = {b: [] for b in acc}
    roots = []
    for ball in acc:
        parent = None
        for g in scales[::-1]:  # nearest (finest) candidate ancestor first
            if g <= ball.radius_exp:
                continue
            cand = ball.ancestor(g)
            if cand in ball_set:
                parent = cand
                break
        if parent is None:
            roots.append(ball)
        else:
            children[parent].append(ball)

    out: dict[Ball, complex] = {}

    def walk(ball: Ball, base: complex, kids: list) -> None:
        if not kids:
            out[ball] = out.get(ball, 0) + base
            return
        target = ball.radius_exp - 1
        buckets: dict[Ball, list] = {}
        extra: dict[Ball, complex] = {}
        for kid in kids:
            slot = kid.ancestor(target)
            if kid.radius_exp == target:
                extra[slot] = extra.get(slot, 0) + acc[kid]
                buckets.setdefault(slot, []).extend(children[kid])
            else:
                buckets.setdefault(slot, []).append(kid)
        for child in ball.children():
            walk(child, base + extra.get(child, 0), buckets.get(child, []))

    for root in roots:
        walk(root, acc[root], children[root])
    return out


def _normal_form(p: int, n: int, terms: Iterable[Term], tol: float) -> tuple:
    acc: dict[Ball, complex] = {}
    for ball, coeff in terms:
        if ball.prime != p:
            raise PrimeMismatchError("term prime differs from function prime")
        if ball.dim != n:
            raise ValueError("term dimension differs from function dimension")
        acc[ball] = acc.get(ball, 0) + complex(coeff)
    acc = {b: c for b, c in acc.items() if abs(c) > tol}
    if not acc:
        return ()
    if len({b.radius_exp for b in acc}) > 1:
        acc = _flatten_overlaps(p, n, acc)
        acc = {b: c for b, c in acc.items() if abs(c) > tol}
        if not acc:
            return ()
    acc = _merge_siblings(p, n, acc, tol)
    return tuple(sorted(acc.items(), key=_term_sort_key))


class SchwartzFunction:
    """A compactly supported locally constant function in normal form.

    Instances are immutable values; all operations return new functions.
    Coefficients are complex doubles, but every character phase feeding them
    is computed as an exact rational first.
    """

    def __init__(self, prime: int, dim: int, terms: Iterable[Term] = (), *,
                 tol: float = DEFAULT_TOL, _normalized: bool = False):
        self.prime = prime
        self.dim = dim
        self.tol = tol
        if _normalized:
            self.terms = tuple(terms)
        else:
            self.terms = _normal_form(prime, dim, terms, tol)

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, prime: int, dim: int, tol: float = DEFAULT_TOL) -> "SchwartzFunction":
        return cls(prime, dim, (), tol=tol, _normalized=True)

    @classmethod
    def indicator(cls, ball: Ball, coeff: complex = 1.0,
                  tol: float = DEFAULT_TOL) -> "SchwartzFunction":
        if abs(coeff) <= tol:
            return cls.zero(ball.prime, ball.dim, tol)
        return cls(ball.prime, ball.dim, ((ball, complex(coeff)),),
                   tol=tol, _normalized=True)

    # -- bookkeeping -------------------------------------------------------

    def _check_compatible(self, other: "SchwartzFunction") -> None:
        if self.prime != other.prime:
            raise PrimeMismatchError(
                f"cannot mix Q_{self.prime} and Q_{other.prime}")
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")

    def is_zero(self) -> bool:
        return not self.terms

    @cached_property
    def bounding_ball(self) -> Optional[Ball]:
        """Smallest ball containing the support (None for the zero function)."""
        if not self.terms:
            return None
        first = self.terms[0][0]
        radius = first.radius_exp
        for ball, _ in self.terms[1:]:
            radius = max(ball.radius_exp, radius)
            for c, c0 in zip(ball.center, first.center):
                v = valuation(c - c0, self.prime)
                if v is not INF:
                    radius = max(radius, -v)
        return Ball(self.prime, first.center, radius)

    def support_exp(self) -> Union[int, float]:
        """Smallest N with support inside B_N(0); -INF for the zero function."""
        if not self.terms:
            return -INF
        return max(ball.support_exp() for ball, _ in self.terms)

    def constancy_exp(self) -> Union[int, float]:
        """Largest l such that the function is constant on all scale-l balls."""
        if not self.terms:
            return INF
        return min(ball.radius_exp for ball, _ in self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchwartzFunction):
            return NotImplemented
        return (self.prime, self.dim, self.terms) == (
            other.prime, other.dim, other.terms)

    def __hash__(self):
        return hash((self.prime, self.dim, self.terms))

    def __repr__(self) -> str:
        return (f"SchwartzFunction(p={self.prime}, n={self.dim}, "
                f"terms={len(self.terms)})")

    def isclose(self, other: "SchwartzFunction", tol: float = None) -> bool:
        """Normal forms share a ball set and coefficients agree within tol."""
        self._check_compatible(other)
        tol = self.tol if tol is None else tol
        if len(self.terms) != len(other.terms):
            return False
        for (b1, c1), (b2, c2) in zip(self.terms, other.terms):
            if b1 != b2 or abs(c1 - c2) > tol:
                return False
        return True

    # -- linear structure ----------------------------------------------------

    def __add__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        self._check_compatible(other)
        return SchwartzFunction(self.prime, self.dim,
                                self.terms + other.terms, tol=self.tol)

    def __sub__(self, other: "SchwartzFunction") -> "SchwartzFunction":
        return self + other.scale(-1)

    def scale(self, factor: complex) -> "SchwartzFunction":
        if abs(factor) == 0:
            return SchwartzFunction.zero(self.prime, self.dim, self.tol)
        terms = tuple((b, c * factor) for b, c in self.terms)
        return SchwartzFunction(self.prime, self.dim, terms, tol=self.tol)

    def __mul__(self, other):
        if isinstance(other, SchwartzFunction):
            return self.pointwise_mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self) -> "SchwartzFunction":
        return self.scale(-1)

    def conjugate(self) -> "SchwartzFunction":
        terms = tuple((b, c.conjugate()) for b, c in self.terms)
        return SchwartzFunction(self.prime, self.dim, terms, tol=self.tol)

    def pointwise_mul(self, other: "SchwartzFunction") -> "SchwartzFunction":
        """Pointwise product; exact via nesting of disjoint ball families."""
        self._check_compatible(other)
        terms = []
        for b1, c1 in self.terms:
            for b2, c2 in other.terms:
                if b1.radius_exp <= b2.radius_exp:
                    if b2.contains_point(b1.center):
                        terms.append((b1, c1 * c2))
                elif b1.contains_point(b2.center):
                    terms.append((b2, c1 * c2))
        return SchwartzFunction(self.prime, self.dim, terms, tol=self.tol)

    # -- evaluation and geometry ---------------------------------------------

    def evaluate(self, point: Sequence) -> complex:
        pt = tuple(Fraction(x) for x in point)
        if len(pt) != self.dim:
            raise ValueError("point dimension mismatch")
        for ball, coeff in self.terms:
            if ball.contains_point(pt):
                return coeff
        return 0j

    def translate(self, shift: Sequence) -> "SchwartzFunction":
        """x -> f(x - shift)."""
        sh = tuple(Fraction(t) for t in shift)
        if len(sh) != self.dim:
            raise ValueError("shift dimension mismatch")
        terms = [
            (Ball(self.prime,
                  tuple(c + t for c, t in zip(ball.center, sh)),
                  ball.radius_exp), coeff)
            for ball, coeff in self.terms
        ]
        return SchwartzFunction(self.prime, self.dim, terms, tol=self.tol)

    def reflect(self) -> "SchwartzFunction":
        """x -> f(-x)."""
        terms = [
            (Ball(self.prime, tuple(-c for c in ball.center),
                  ball.radius_exp), coeff)
            for ball, coeff in self.terms
        ]
        return SchwartzFunction(self.prime, self.dim, terms, tol=self.tol)

    def dilate(self, j: Sequence[int]) -> "SchwartzFunction":
        """x -> f(p̂^j x) with the coordinate-wise multi-dilatation."""
        return self.affine_pullback(j, (0,) * self.dim)

    def affine_pullback(self, j: Sequence[int], a: Sequence) -> "SchwartzFunction":
        """x -> f(p̂^j x - a); the workhorse behind dilations and wavelet indices."""
        jv = tuple(int(k) for k in j)
        av = tuple(Fraction(x) for x in a)
        if len(jv) != self.dim or len(av) != self.dim:
            raise ValueError("index dimension mismatch")
        terms = []
        for ball, coeff in self.terms:
            boxes = [
                (power(self.prime, -jk) * (ck + ak), ball.radius_exp + jk)
                for ck, ak, jk in zip(ball.center, av, jv)
            ]
            terms.extend(_box_as_balls(self.prime, boxes, coeff))
        return SchwartzFunction(self.prime, self.dim, terms, tol=self.tol)

    # -- integration ---------------------------------------------------------

    def integrate(self) -> complex:
        """Haar integral; the unit ball has measure one."""
        total = 0j
        for ball, coeff in self.terms:
            total += coeff * float(power(self.prime, ball.measure_exp()))
        return total

    def inner_product(self, other: "SchwartzFunction") -> complex:
        """L2 pairing <f, g> = integral of f * conj(g).

        Computed over the common refinement of the two ball families, which
        by ultrametricity is just the nested pairs of terms.
        """
        self._check_compatible(other)
        mine, theirs = self.bounding_ball, other.bounding_ball
        if mine is None or theirs is None or not mine.intersects(theirs):
            return 0j
        p, n = self.prime, self.dim
        total = 0j
        for b1, c1 in self.terms:
            for b2, c2 in other.terms:
                if b1.radius_exp <= b2.radius_exp:
                    if b2.contains_point(b1.center):
                        total += c1 * c2.conjugate() * float(power(p, n * b1.radius_exp))
                elif b1.contains_point(b2.center):
                    total += c1 * c2.conjugate() * float(power(p, n * b2.radius_exp))
        return total

    def norm_l2(self) -> float:
        return math.sqrt(max(self.inner_product(self).real, 0.0))

    def is_lizorkin(self, tol: float = None) -> bool:
        """True iff the integral vanishes (within tol): membership in the
        zero-mean test function space preserved by the operators here."""
        tol = self.tol if tol is None else tol
        return abs(self.integrate()) <= tol

    # -- Fourier transform -----------------------------------------------------

    def fourier(self, budget: int = DEFAULT_TERM_BUDGET) -> "SchwartzFunction":
        """F[f](xi) = integral of chi_p(xi . x) f(x) dx, exactly structured."""
        return _transform(self, +1, budget)

    def fourier_inverse(self, budget: int = DEFAULT_TERM_BUDGET) -> "SchwartzFunction":
        """Inverse transform, kernel chi_p(-x . xi)."""
        return _transform(self, -1, budget)

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "p": self.prime,
            "n": self.dim,
            "terms": [
                {
                    "center": [_fraction_str(c) for c in ball.center],
                    "radius_exp": ball.radius_exp,
                    "coeff": {"re": coeff.real, "im": coeff.imag},
                }
                for ball, coeff in self.terms
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict, tol: float = DEFAULT_TOL) -> "SchwartzFunction":
        p = int(data["p"])
        n = int(data["n"])
        terms = []
        for item in data.get("terms", []):
            center = tuple(Fraction(c) for c in item["center"])
            ball = Ball(p, center, int(item["radius_exp"]))
            coeff = complex(item["coeff"]["re"], item["coeff"].get("im", 0.0))
            terms.append((ball, coeff))
        return cls(p, n, terms, tol=tol)

    @classmethod
    def from_json(cls, text: str, tol: float = DEFAULT_TOL) -> "SchwartzFunction":
        return cls.from_dict(json.loads(text), tol=tol)


def _fraction_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _box_as_balls(p: int, boxes: Sequence, coeff: complex) -> list:
    """Split a product of per-coordinate balls into uniform-radius balls.

    ``boxes`` is a list of (center, radius_exp) per coordinate; the result is
    the list of (Ball, coeff) covering the same product set at the minimum
    coordinate scale.
    """
    target = min(scale for _, scale in boxes)
    axes = []
    for center, scale in boxes:
        if scale == target:
            axes.append([center])
        else:
            base = power(p, -scale)
            axes.append([center + t * base for t in range(p ** (scale - target))])
    return [
        (Ball(p, combo, target), coeff) for combo in _cartesian(*axes)
    ]


def indicator(ball: Ball, coeff: complex = 1.0,
              tol: float = DEFAULT_TOL) -> SchwartzFunction:
    """Indicator function of a ball (times an optional coefficient)."""
    return SchwartzFunction.indicator(ball, coeff, tol)


def unit_ball_indicator(p: int, n: int = 1, tol: float = DEFAULT_TOL) -> SchwartzFunction:
    """The indicator of the unit ball Z_p^n (measure one, integral one)."""
    return indicator(Ball(p, (0,) * n, 0), 1.0, tol)


def _transform(f: SchwartzFunction, sign: int, budget: int) -> SchwartzFunction:
    p, n = f.prime, f.dim
    if not f.terms:
        return SchwartzFunction.zero(p, n, f.tol)
    gamma = min(ball.radius_exp for ball, _ in f.terms)
    big_n = max(ball.support_exp() for ball, _ in f.terms)
    d = big_n - gamma
    size = p**d
    if size**n > budget:
        raise TermBudgetError(
            f"transform needs {size**n} cells (> budget {budget})")
    grid = np.zeros((size,) * n, dtype=complex)
    p_big = power(p, big_n)
    for ball, coeff in f.terms:
        stride = p ** (big_n - ball.radius_exp)
        reps = p ** (ball.radius_exp - gamma)
        axes = []
        for c in ball.center:
            r = int(c * p_big)  # exact: canonical centers have p-power denominators
            axes.append(r + stride * np.arange(reps))
        grid[np.ix_(*axes)] += coeff

    # On the ball lattices the character kernel is exp(+-2*pi*i*A.Xi/p^d):
    # a radix-p DFT in each axis.  Forward uses the + kernel, inverse the -.
    if sign > 0:
        values = np.fft.ifftn(grid) * float(p) ** (n * big_n)
    else:
        values = np.fft.fftn(grid) * float(p) ** (n * gamma)

    out_scale = -big_n
    p_gamma = power(p, gamma)
    hits = np.argwhere(np.abs(values) > f.tol)
    terms = []
    for idx in hits:
        center = tuple(int(k) * p_gamma for k in idx)
        terms.append((Ball(p, center, out_scale), complex(values[tuple(idx)])))
    return SchwartzFunction(p, n, terms, tol=f.tol)
