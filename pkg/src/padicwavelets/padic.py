"""Exact p-adic rational arithmetic.

Numbers are arbitrary-precision rationals (`fractions.Fraction`) read as
elements of Q_p for a fixed prime p.  Everything here is exact: valuations,
norms, fractional parts, canonical ball centers, and the rational phases of
additive characters.  No floating point enters until a phase is finally
exponentiated (see :func:`phase_to_complex`).

All types are immutable values and all operations are pure, so they are safe
to share across threads without synchronization.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as _cartesian
from typing import Iterable, Sequence, Union

#: Valuation of zero.  A dedicated non-integer sentinel: ``|0|_p = 0`` must
#: never collide with a large finite norm.
INF = math.inf

Rational = Union[int, Fraction]


class PrimeMismatchError(ValueError):
    """Operands of a p-adic operation carry different primes."""


def _require_prime(p: int) -> None:
    if not isinstance(p, int) or p < 2:
        raise ValueError(f"prime must be an integer >= 2, got {p!r}")


def power(p: int, exponent: int) -> Fraction:
    """Exact p**exponent as a Fraction, for any integer exponent."""
    if exponent >= 0:
        return Fraction(p**exponent)
    return Fraction(1, p ** (-exponent))


def valuation(x: Rational, p: int) -> Union[int, float]:
    """p-adic valuation gamma(x); INF for x = 0.

    For x = p**gamma * (a/b) with a, b coprime to p, returns gamma.
    """
    x = Fraction(x)
    if x == 0:
        return INF
    v = 0
    num = x.numerator
    while num % p == 0:
        num //= p
        v += 1
    den = x.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v


def norm(x: Rational, p: int) -> Fraction:
    """p-adic absolute value |x|_p = p**(-valuation), exactly; |0|_p = 0."""
    v = valuation(x, p)
    if v is INF:
        return Fraction(0)
    return power(p, -v)


def frac_part(x: Rational, p: int) -> Fraction:
    """Fractional part {x}_p: the negative-power tail of the base-p expansion.

    Returns 0 when valuation(x) >= 0, otherwise the unique r / p**k with
    0 <= r < p**k congruent to x modulo Z_p, where k = -valuation(x).  The
    prime-to-p part of the denominator is removed with a modular inverse.
    """
    x = Fraction(x)
    v = valuation(x, p)
    if v is INF or v >= 0:
        return Fraction(0)
    k = -v
    pk = p**k
    unit_den = x.denominator // pk  # prime-to-p part; denominator = p**k * unit_den
    r = x.numerator * pow(unit_den, -1, pk) % pk
    return Fraction(r, pk)


def phase_to_complex(q: Rational) -> complex:
    """e^{2 pi i q} for an exact rational phase q."""
    return cmath.exp(2j * math.pi * float(q))


@dataclass(frozen=True)
class UnitPhase:
    """A point on the unit circle, e^{2 pi i q}, stored as exact q in [0,1).

    Products of phases add the rationals modulo 1 exactly, so arbitrarily
    long character products never drift.
    """

    q: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", Fraction(self.q) % 1)

    def __mul__(self, other: "UnitPhase") -> "UnitPhase":
        return UnitPhase(self.q + other.q)

    def conjugate(self) -> "UnitPhase":
        return UnitPhase(-self.q)

    def to_complex(self) -> complex:
        return phase_to_complex(self.q)

    def __str__(self) -> str:
        return f"{self.q.numerator}/{self.q.denominator}"


def character(x: Rational, p: int) -> UnitPhase:
    """Additive character chi_p(x) = e^{2 pi i {x}_p} as an exact phase."""
    return UnitPhase(frac_part(x, p))


@dataclass(frozen=True)
class PadicRational:
    """An exact rational viewed as an element of Q_p for a fixed prime.

    The stored value is always in lowest terms with a positive denominator
    (guaranteed by Fraction).  Arithmetic between numbers with different
    primes raises :class:`PrimeMismatchError`; silent coercion has no
    mathematical meaning.
    """

    prime: int
    value: Fraction

    def __post_init__(self) -> None:
        _require_prime(self.prime)
        object.__setattr__(self, "value", Fraction(self.value))

    @property
    def numerator(self) -> int:
        return self.value.numerator

    @property
    def denominator(self) -> int:
        return self.value.denominator

    def _coerce(self, other) -> Fraction:
        if isinstance(other, PadicRational):
            if other.prime != self.prime:
                raise PrimeMismatchError(
                    f"cannot mix Q_{self.prime} and Q_{other.prime}"
                )
            return other.value
        return Fraction(other)

    def __add__(self, other) -> "PadicRational":
        return PadicRational(self.prime, self.value + self._coerce(other))

    __radd__ = __add__

    def __sub__(self, other) -> "PadicRational":
        return PadicRational(self.prime, self.value - self._coerce(other))

    def __rsub__(self, other) -> "PadicRational":
        return PadicRational(self.prime, self._coerce(other) - self.value)

    def __mul__(self, other) -> "PadicRational":
        return PadicRational(self.prime, self.value * self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "PadicRational":
        return PadicRational(self.prime, self.value / self._coerce(other))

    def __neg__(self) -> "PadicRational":
        return PadicRational(self.prime, -self.value)

    def valuation(self) -> Union[int, float]:
        return valuation(self.value, self.prime)

    def norm(self) -> Fraction:
        return norm(self.value, self.prime)

    def frac_part(self) -> Fraction:
        return frac_part(self.value, self.prime)

    def character(self) -> UnitPhase:
        return character(self.value, self.prime)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def _coords_tuple(coords: Iterable) -> tuple:
    out = []
    for c in coords:
        if isinstance(c, PadicRational):
            out.append(c.value)
        else:
            out.append(Fraction(c))
    return tuple(out)


@dataclass(frozen=True)
class PadicVector:
    """A point of Q_p^n; coordinates all share one prime.

    The norm is the maximum of the coordinate norms (the non-Archimedean
    sup-norm on the product).
    """

    prime: int
    coords: tuple

    def __post_init__(self) -> None:
        _require_prime(self.prime)
        coords = _coords_tuple(self.coords)
        if not coords:
            raise ValueError("vector dimension must be >= 1")
        object.__setattr__(self, "coords", coords)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def _coerce(self, other: "PadicVector") -> "PadicVector":
        if other.prime != self.prime:
            raise PrimeMismatchError(
                f"cannot mix Q_{self.prime} and Q_{other.prime}"
            )
        if other.dim != self.dim:
            raise ValueError("dimension mismatch")
        return other

    def __add__(self, other: "PadicVector") -> "PadicVector":
        other = self._coerce(other)
        return PadicVector(
            self.prime, tuple(a + b for a, b in zip(self.coords, other.coords))
        )

    def __sub__(self, other: "PadicVector") -> "PadicVector":
        other = self._coerce(other)
        return PadicVector(
            self.prime, tuple(a - b for a, b in zip(self.coords, other.coords))
        )

    def __neg__(self) -> "PadicVector":
        return PadicVector(self.prime, tuple(-a for a in self.coords))

    def norm(self) -> Fraction:
        return max(norm(c, self.prime) for c in self.coords)

    def norm_exp(self) -> Union[int, float]:
        """log_p of the norm: max of -valuation over coordinates; -INF at 0."""
        return max(-valuation(c, self.prime) for c in self.coords)

    def dot(self, other: "PadicVector") -> Fraction:
        other = self._coerce(other)
        return sum(
            (a * b for a, b in zip(self.coords, other.coords)), Fraction(0)
        )


def reduce_mod_scale(c: Rational, p: int, gamma: int) -> Fraction:
    """Canonical representative of c modulo the ball scale p**gamma.

    Keeps exactly the base-p digits of c at powers below -gamma; the result
    is the unique representative with a p-power denominator and
    0 <= result < p**(-gamma), at distance <= p**gamma from c.
    """
    scale = power(p, gamma)
    return frac_part(Fraction(c) * scale, p) / scale


@dataclass(frozen=True)
class Ball:
    """Ball {x : |x - center|_p <= p**radius_exp} in Q_p^n, canonical form.

    Every point of a ball is a center; construction reduces each coordinate
    to the canonical digit-truncated representative, so two balls are equal
    as sets iff they are equal as values.
    """

    prime: int
    center: tuple
    radius_exp: int

    def __post_init__(self) -> None:
        _require_prime(self.prime)
        coords = _coords_tuple(self.center)
        if not coords:
            raise ValueError("ball dimension must be >= 1")
        canonical = tuple(
            reduce_mod_scale(c, self.prime, self.radius_exp) for c in coords
        )
        object.__setattr__(self, "center", canonical)

    @property
    def dim(self) -> int:
        return len(self.center)

    def measure_exp(self) -> int:
        """Haar measure of the ball is p**measure_exp (unit ball has measure 1)."""
        return self.dim * self.radius_exp

    def contains_point(self, point: Sequence[Rational]) -> bool:
        return all(
            valuation(Fraction(x) - c, self.prime) >= -self.radius_exp
            for x, c in zip(point, self.center)
        )

    def contains_ball(self, other: "Ball") -> bool:
        if other.radius_exp > self.radius_exp:
            return False
        return self.contains_point(other.center)

    def intersects(self, other: "Ball") -> bool:
        # two balls either nest or are disjoint
        if self.radius_exp >= other.radius_exp:
            return self.contains_point(other.center)
        return other.contains_point(self.center)

    def parent(self) -> "Ball":
        return Ball(self.prime, self.center, self.radius_exp + 1)

    def ancestor(self, radius_exp: int) -> "Ball":
        if radius_exp < self.radius_exp:
            raise ValueError("ancestor must be at least as coarse")
        return Ball(self.prime, self.center, radius_exp)

    def children(self) -> list:
        return decompose_ball(self, self.radius_exp - 1)

    def support_exp(self) -> int:
        """Smallest N with the ball inside B_N(0): max of radius and center norms."""
        out = self.radius_exp
        for c in self.center:
            v = valuation(c, self.prime)
            if v is not INF:
                out = max(out, -v)
        return out


def decompose_ball(ball: Ball, target_exp: int) -> list:
    """Split a ball into the p**(n*(gamma-gamma')) disjoint balls of scale gamma'.

    Centers are the canonical digit representatives; ordering is
    lexicographic over coordinates in increasing digit value.
    """
    gamma = ball.radius_exp
    if target_exp >= gamma:
        raise ValueError(
            f"not a refinement: target scale {target_exp} >= ball scale {gamma}"
        )
    p = ball.prime
    count = p ** (gamma - target_exp)
    base = power(p, -gamma)  # offsets live at the coarse ball's digit base
    offsets = [t * base for t in range(count)]
    out = []
    for combo in _cartesian(offsets, repeat=ball.dim):
        center = tuple(c + o for c, o in zip(ball.center, combo))
        out.append(Ball(p, center, target_exp))
    return out


def enumerate_shifts_1d(p: int, depth: int) -> list:
    """Truncated shift set I_p: 0 and all r/p**g, g <= depth, gcd(r, p) = 1.

    Cardinality is p**depth; ordering is by depth then numerator.
    """
    _require_prime(p)
    if depth < 0:
        raise ValueError("shift depth must be >= 0")
    out = [Fraction(0)]
    for g in range(1, depth + 1):
        pg = p**g
        out.extend(Fraction(r, pg) for r in range(1, pg) if r % p != 0)
    return out


def enumerate_shifts(p: int, n: int, depth: int) -> list:
    """n-fold product of the truncated 1D shift set, lexicographic order."""
    axis = enumerate_shifts_1d(p, depth)
    return [PadicVector(p, combo) for combo in _cartesian(axis, repeat=n)]


def enumerate_frequencies_1d(p: int, m: int) -> list:
    """Frequency set J_{p;m}: the (p-1)p**(m-1) rationals r/p**m, gcd(r,p)=1."""
    _require_prime(p)
    if m < 1:
        raise ValueError("m must be >= 1")
    pm = p**m
    return [Fraction(r, pm) for r in range(1, pm) if r % p != 0]


def enumerate_frequencies(p: int, m: Sequence[int]) -> list:
    """Product set J_{p;m_1} x ... x J_{p;m_n}, lexicographic order."""
    axes = [enumerate_frequencies_1d(p, mk) for mk in m]
    return [PadicVector(p, combo) for combo in _cartesian(*axes)]
