"""Non-Haar p-adic wavelet families: construction, analysis, synthesis.

Two families are provided, both orthonormal bases of L^2(Q_p^n):

* the ``theta`` family: for each frequency s with denominator exactly p^m the
  generator chi_p(s x) on the unit ball, dilated by p̂^j and shifted by the
  natural shift set; its values on scale -m balls are exact roots of unity
  e^{2 pi i {s b}_p};
* the ``psi`` family: for nu >= 1, linear combinations of p^nu shifted copies
  of a theta generator with coefficient vectors drawn from unit-modulus
  parameter arrays; the resulting translation matrix is unitary, which is
  exactly the condition for orthonormality.

Multidimensional wavelets are coordinate-wise tensor products with the
normalization p^{-|j|/2}, |j| = j_1 + ... + j_n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction
from functools import lru_cache
from itertools import product as _cartesian
from typing import Dict, Iterator, Optional, Sequence, Tuple

import numpy as np

from .functions import DEFAULT_TOL, SchwartzFunction, _box_as_balls
from .padic import (
    INF,
    Ball,
    decompose_ball,
    enumerate_frequencies_1d,
    enumerate_shifts_1d,
    frac_part,
    phase_to_complex,
    power,
    valuation,
)

#: Tolerance on |gamma| = 1 for psi-family parameters.
UNIT_MODULUS_TOL = 1e-8


def _is_p_power(value: int, p: int) -> bool:
    while value % p == 0:
        value //= p
    return value == 1


@dataclass(frozen=True)
class FamilySpec:
    """Which wavelet family indices refer to.

    ``m`` gives the per-coordinate frequency depth (the generator count per
    coordinate is (p-1)p^{m_k-1}).  For the psi family, ``nu`` >= 1 and
    ``gammas`` maps a 1D frequency s to its p^nu unit-modulus parameters;
    frequencies without an entry default to all ones, which reproduces the
    theta family exactly.
    """

    prime: int
    dim: int
    m: tuple
    kind: str = "theta"
    nu: int = 0
    gammas: tuple = ()

    def __post_init__(self) -> None:
        if self.prime < 2:
            raise ValueError("prime must be >= 2")
        m = tuple(int(v) for v in self.m)
        if len(m) != self.dim or self.dim < 1:
            raise ValueError("m must list one depth per coordinate")
        if any(v < 1 for v in m):
            raise ValueError("all m_k must be >= 1")
        object.__setattr__(self, "m", m)
        if self.kind not in ("theta", "psi"):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if self.kind == "psi":
            if self.nu < 1:
                raise ValueError("psi family requires nu >= 1")
        elif self.nu:
            raise ValueError("theta family has no nu parameter")
        gammas = []
        size = self.prime**self.nu
        for s, arr in self.gammas:
            arr = tuple(complex(g) for g in arr)
            if len(arr) != size:
                raise ValueError(f"gamma array for s={s} must have p^nu entries")
            if any(abs(abs(g) - 1) > UNIT_MODULUS_TOL for g in arr):
                raise ValueError("gamma parameters must have unit modulus")
            gammas.append((Fraction(s), arr))
        object.__setattr__(self, "gammas", tuple(sorted(gammas)))

    @classmethod
    def theta(cls, p: int, n: int, m) -> "FamilySpec":
        m = (m,) * n if isinstance(m, int) else tuple(m)
        return cls(p, n, m, "theta", 0, ())

    @classmethod
    def psi(cls, p: int, n: int, m, nu: int, gammas=None) -> "FamilySpec":
        m = (m,) * n if isinstance(m, int) else tuple(m)
        packed = tuple(sorted((Fraction(s), tuple(arr))
                              for s, arr in (gammas or {}).items()))
        return cls(p, n, m, "psi", nu, packed)

    def gamma_array(self, s: Fraction) -> tuple:
        for key, arr in self.gammas:
            if key == s:
                return arr
        return (1.0 + 0j,) * (self.prime**self.nu)

    def frequencies_1d(self, k: int) -> list:
        return enumerate_frequencies_1d(self.prime, self.m[k])

    def generator_count(self) -> int:
        p = self.prime
        out = 1
        for mk in self.m:
            out *= (p - 1) * p ** (mk - 1)
        return out


@dataclass(frozen=True)
class WaveletIndex:
    """Index (s, j, a) of a single basis element."""

    s: tuple
    j: tuple
    a: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "s", tuple(Fraction(v) for v in self.s))
        object.__setattr__(self, "j", tuple(int(v) for v in self.j))
        object.__setattr__(self, "a", tuple(Fraction(v) for v in self.a))

    @property
    def dim(self) -> int:
        return len(self.s)

    def j_total(self) -> int:
        return sum(self.j)

    def validate(self, spec: FamilySpec) -> None:
        p = spec.prime
        if not (len(self.s) == len(self.j) == len(self.a) == spec.dim):
            raise ValueError("index dimension does not match family")
        for sk, mk in zip(self.s, spec.m):
            if not 0 < sk < 1 or sk.denominator != p**mk:
                raise ValueError(
                    f"frequency {sk} is not a depth-{mk} generator for p={p}")
        for ak in self.a:
            if not 0 <= ak < 1 or not _is_p_power(ak.denominator, p):
                raise ValueError(f"shift {ak} is not in the natural shift set")


def index1d(s, j, a) -> WaveletIndex:
    return WaveletIndex((s,), (j,), (a,))


# -- generators ---------------------------------------------------------------


def generator_phases(p: int, m: int, s: Fraction) -> Dict[int, Fraction]:
    """Exact phases of the theta generator on the scale -m balls.

    The generator takes the value e^{2 pi i {s b}_p} on the ball of radius
    p^{-m} centered at the integer b, 0 <= b < p^m.
    """
    s = Fraction(s)
    return {b: frac_part(s * b, p) for b in range(p**m)}


@lru_cache(maxsize=None)
def _theta_generator_1d(p: int, m: int, s: Fraction) -> SchwartzFunction:
    terms = [
        (Ball(p, (Fraction(b),), -m), phase_to_complex(q))
        for b, q in generator_phases(p, m, s).items()
    ]
    return SchwartzFunction(p, 1, terms)


def alpha_coeffs(p: int, nu: int, s, gammas: Sequence[complex]) -> np.ndarray:
    """Coefficient vector turning theta shifts into a psi generator.

    alpha_k = p^{-nu} * sum_r gamma_r e^{-2 pi i (-s + r) k / p^nu}; the
    phases are accumulated as exact rationals before exponentiation.  All
    gamma_r must be unit modulus.  With gamma identically 1 this collapses to
    the delta vector (psi == theta).
    """
    s = Fraction(s)
    size = p**nu
    if len(gammas) != size:
        raise ValueError("need p^nu gamma parameters")
    if any(abs(abs(g) - 1) > UNIT_MODULUS_TOL for g in gammas):
        raise ValueError("gamma parameters must have unit modulus")
    out = np.zeros(size, dtype=complex)
    for k in range(size):
        total = 0j
        for r, g in enumerate(gammas):
            total += complex(g) * phase_to_complex(
                frac_part(Fraction(s - r) * k / size, p))
        out[k] = total / size
    return out


def shift_matrix(p: int, nu: int, s, alphas: Sequence[complex]) -> np.ndarray:
    """Matrix expressing the p^nu shifted psi copies over the shifted thetas.

    Row r holds psi(x - r/p^nu) in the basis theta(x - l/p^nu); shifts that
    wrap past 1 pick up the character factor chi_p(-s).  Orthonormality of
    the psi family is equivalent to unitarity of this matrix.
    """
    s = Fraction(s)
    size = p**nu
    chi = phase_to_complex(frac_part(-s, p))
    D = np.zeros((size, size), dtype=complex)
    for r in range(size):
        for l in range(size):
            if l >= r:
                D[r, l] = alphas[l - r]
            else:
                D[r, l] = chi * alphas[size - (r - l)]
    return D


@lru_cache(maxsize=None)
def _psi_generator_1d(p: int, m: int, s: Fraction, nu: int,
                      gammas: tuple) -> SchwartzFunction:
    alphas = alpha_coeffs(p, nu, s, gammas)
    base = _theta_generator_1d(p, m, s)
    out = SchwartzFunction.zero(p, 1)
    for k, alpha in enumerate(alphas):
        if abs(alpha) <= 1e-15:
            continue
        out = out + base.translate((Fraction(k, p**nu),)).scale(alpha)
    return out


def _generator_1d(spec: FamilySpec, k: int, s: Fraction) -> SchwartzFunction:
    if spec.kind == "theta":
        return _theta_generator_1d(spec.prime, spec.m[k], s)
    return _psi_generator_1d(spec.prime, spec.m[k], s, spec.nu,
                             spec.gamma_array(s))


def tensor_product(factors: Sequence[SchwartzFunction]) -> SchwartzFunction:
    """Coordinate-wise product of one-dimensional functions."""
    p = factors[0].prime
    terms = []
    for combo in _cartesian(*(f.terms for f in factors)):
        coeff = 1 + 0j
        boxes = []
        for ball, c in combo:
            coeff *= c
            boxes.append((ball.center[0], ball.radius_exp))
        terms.extend(_box_as_balls(p, boxes, coeff))
    return SchwartzFunction(p, len(factors), terms)


def wavelet(spec: FamilySpec, idx: WaveletIndex) -> SchwartzFunction:
    """The basis element for (s, j, a): p^{-|j|/2} times the tensor of
    one-dimensional generators composed with x_k -> p^{j_k} x_k - a_k."""
    idx.validate(spec)
    factors = [
        _generator_1d(spec, k, sk).affine_pullback((jk,), (ak,))
        for k, (sk, jk, ak) in enumerate(zip(idx.s, idx.j, idx.a))
    ]
    if spec.dim == 1:
        out = factors[0]
    else:
        out = tensor_product(factors)
    return out.scale(spec.prime ** (-idx.j_total() / 2))


def theta(spec: FamilySpec, idx: WaveletIndex) -> SchwartzFunction:
    if spec.kind != "theta":
        raise ValueError("theta() requires a theta family")
    return wavelet(spec, idx)


def psi(spec: FamilySpec, idx: WaveletIndex) -> SchwartzFunction:
    if spec.kind != "psi":
        raise ValueError("psi() requires a psi family")
    return wavelet(spec, idx)


def theta_phase_at(spec: FamilySpec, idx: WaveletIndex, point: Sequence) -> Optional[Fraction]:
    """Exact evaluation of a theta wavelet: the phase rational at a point.

    Returns q with value p^{-|j|/2} e^{2 pi i q}, or None outside the
    support.  Lets tests compare phase rationals exactly.
    """
    if spec.kind != "theta":
        raise ValueError("exact phases are defined for the theta family")
    idx.validate(spec)
    p = spec.prime
    total = Fraction(0)
    for xk, sk, jk, ak in zip(point, idx.s, idx.j, idx.a):
        yk = power(p, jk) * Fraction(xk) - ak
        v = valuation(yk, p)
        if v is not INF and v < 0:
            return None
        total = (total + frac_part(sk * yk, p)) % 1
    return total


def fourier_closed_form(spec: FamilySpec, idx: WaveletIndex) -> SchwartzFunction:
    """Fourier transform of a theta wavelet, built directly.

    Equals p^{|j|/2} chi_p(p̂^{-j} a . xi) on the product of balls of radius
    p^{-j_k} centered at -p^{j_k} s_k, with the character expanded into exact
    phases on a sub-ball partition.
    """
    if spec.kind != "theta":
        raise ValueError("closed form available for the theta family")
    idx.validate(spec)
    p = spec.prime
    factors = []
    for sk, jk, ak in zip(idx.s, idx.j, idx.a):
        support = Ball(p, (-power(p, jk) * sk,), -jk)
        t = power(p, -jk) * ak
        v = valuation(t, p)
        scale = -jk if v is INF else min(-jk, v)
        pieces = [support] if scale == -jk else decompose_ball(support, scale)
        terms = [
            (piece, phase_to_complex(frac_part(t * piece.center[0], p)))
            for piece in pieces
        ]
        factors.append(SchwartzFunction(p, 1, terms))
    out = factors[0] if spec.dim == 1 else tensor_product(factors)
    return out.scale(p ** (idx.j_total() / 2))


# -- coefficient fields --------------------------------------------------------


@dataclass
class CoefficientField:
    """Sparse spectral representation: finite map index -> coefficient."""

    family: FamilySpec
    entries: dict = dataclass_field(default_factory=dict)

    @classmethod
    def of(cls, family: FamilySpec, entries: dict,
           tol: float = DEFAULT_TOL) -> "CoefficientField":
        kept = {}
        for idx, c in entries.items():
            idx.validate(family)
            if abs(c) > tol:
                kept[idx] = complex(c)
        return cls(family, kept)

    def map_coefficients(self, fn) -> "CoefficientField":
        return CoefficientField(self.family,
                                {idx: fn(idx, c) for idx, c in self.entries.items()})

    def norm_sq(self) -> float:
        return float(sum(abs(c) ** 2 for c in self.entries.values()))

    def __len__(self) -> int:
        return len(self.entries)

    def _sorted_items(self):
        return sorted(self.entries.items(), key=lambda kv: (kv[0].s, kv[0].j, kv[0].a))

    def to_dict(self) -> dict:
        fam = {
            "p": self.family.prime,
            "n": self.family.dim,
            "m": list(self.family.m),
            "kind": self.family.kind,
        }
        if self.family.kind == "psi":
            fam["nu"] = self.family.nu
            fam["gammas"] = {
                f"{s.numerator}/{s.denominator}": [
                    {"re": g.real, "im": g.imag} for g in arr
                ]
                for s, arr in self.family.gammas
            }
        return {
            "family": fam,
            "entries": [
                {
                    "s": [f"{v.numerator}/{v.denominator}" for v in idx.s],
                    "j": list(idx.j),
                    "a": [f"{v.numerator}/{v.denominator}" for v in idx.a],
                    "coeff": {"re": c.real, "im": c.imag},
                }
                for idx, c in self._sorted_items()
            ],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict, tol: float = DEFAULT_TOL) -> "CoefficientField":
        fam = data["family"]
        kind = fam.get("kind", "theta")
        if kind == "psi":
            gammas = {
                Fraction(s): tuple(complex(g["re"], g.get("im", 0.0)) for g in arr)
                for s, arr in fam.get("gammas", {}).items()
            }
            family = FamilySpec.psi(int(fam["p"]), int(fam["n"]),
                                    tuple(fam["m"]), int(fam["nu"]), gammas)
        else:
            family = FamilySpec.theta(int(fam["p"]), int(fam["n"]), tuple(fam["m"]))
        entries = {}
        for item in data.get("entries", []):
            idx = WaveletIndex(
                tuple(Fraction(v) for v in item["s"]),
                tuple(item["j"]),
                tuple(Fraction(v) for v in item["a"]),
            )
            entries[idx] = complex(item["coeff"]["re"], item["coeff"].get("im", 0.0))
        return cls.of(family, entries, tol)

    @classmethod
    def from_json(cls, text: str, tol: float = DEFAULT_TOL) -> "CoefficientField":
        return cls.from_dict(json.loads(text), tol)


@dataclass(frozen=True)
class Window:
    """Explicit finite index window: j range and shift depth, per coordinate."""

    j_min: int
    j_max: int
    shift_depth: int

    def __post_init__(self) -> None:
        if self.j_max < self.j_min:
            raise ValueError("empty scale range")
        if self.shift_depth < 0:
            raise ValueError("shift depth must be >= 0")

    def indices(self, spec: FamilySpec) -> Iterator[WaveletIndex]:
        p, n = spec.prime, spec.dim
        s_axes = [spec.frequencies_1d(k) for k in range(n)]
        j_axis = range(self.j_min, self.j_max + 1)
        a_axis = enumerate_shifts_1d(p, self.shift_depth)
        for s in _cartesian(*s_axes):
            for j in _cartesian(j_axis, repeat=n):
                for a in _cartesian(a_axis, repeat=n):
                    yield WaveletIndex(s, j, a)

    def count(self, spec: FamilySpec) -> int:
        p, n = spec.prime, spec.dim
        total = spec.generator_count()
        total *= (self.j_max - self.j_min + 1) ** n
        total *= (p**self.shift_depth) ** n
        return total


@dataclass
class AnalysisResult:
    """Wavelet coefficients over a window plus a completeness certificate.

    ``complete`` is True only when the support/constancy bounds of the input
    prove that no index outside the window carries a nonzero coefficient.
    """

    field: CoefficientField
    complete: bool
    detail: str


def analyze(f: SchwartzFunction, spec: FamilySpec, window: Window,
            tol: float = None) -> AnalysisResult:
    """Inner products of f against every wavelet in the window.

    Functions with nonzero integral are analyzed anyway (their projections
    are well defined) but flagged: constants are invisible to the basis, so
    no finite window can capture them.
    """
    tol = DEFAULT_TOL if tol is None else tol
    entries = {}
    for idx in window.indices(spec):
        c = f.inner_product(wavelet(spec, idx))
        if abs(c) > tol:
            entries[idx] = c
    complete, detail = _certify_window(f, spec, window, tol)
    return AnalysisResult(CoefficientField(spec, entries), complete, detail)


def _certify_window(f: SchwartzFunction, spec: FamilySpec, window: Window,
                    tol: float) -> Tuple[bool, str]:
    if f.is_zero():
        return True, "zero function"
    if not f.is_lizorkin(tol):
        return False, "nonzero integral: constants are invisible to the basis"
    p, n = spec.prime, spec.dim
    try:
        spectrum = f.fourier()
    except Exception as exc:  # budget overruns make certification impossible
        return False, f"spectrum unavailable: {exc}"
    # coordinate support exponents of f (x side) bound the useful shifts
    n_coord = []
    for k in range(n):
        bound = None
        for ball, _ in f.terms:
            e = ball.radius_exp
            v = valuation(ball.center[k], p)
            if v is not INF:
                e = max(e, -v)
            bound = e if bound is None else max(bound, e)
        n_coord.append(bound)
    needed_depth = 0
    for ball, _ in spectrum.terms:
        for k in range(n):
            v = valuation(ball.center[k], p)
            e = -v if v is not INF else -INF
            if e <= ball.radius_exp:
                return (False,
                        f"spectrum meets frequency zero in coordinate {k}; "
                        "the nonzero index set is not finite")
            jk = spec.m[k] - e
            if not window.j_min <= jk <= window.j_max:
                return False, f"window misses scale j={jk} in coordinate {k}"
            needed_depth = max(needed_depth, n_coord[k] - jk)
    if window.shift_depth < needed_depth:
        return False, f"window misses shifts up to depth {needed_depth}"
    return True, "support and constancy bounds captured"


def synthesize(field: CoefficientField, tol: float = None) -> SchwartzFunction:
    """Finite sum of coefficient times wavelet, in normal form."""
    tol = DEFAULT_TOL if tol is None else tol
    spec = field.family
    terms = []
    for idx, c in field.entries.items():
        w = wavelet(spec, idx)
        terms.extend((ball, c * coeff) for ball, coeff in w.terms)
    return SchwartzFunction(spec.prime, spec.dim, terms, tol=tol)


def gram_matrix(spec: FamilySpec, indices: Sequence[WaveletIndex]) -> np.ndarray:
    """Hermitian matrix of pairwise wavelet inner products."""
    funcs = [wavelet(spec, idx) for idx in indices]
    size = len(funcs)
    out = np.zeros((size, size), dtype=complex)
    for i in range(size):
        for k in range(i, size):
            val = funcs[i].inner_product(funcs[k])
            out[i, k] = val
            out[k, i] = val.conjugate()
    return out


def parseval_partial_sum(p: int, m: int, j_max: int) -> Fraction:
    """Exact truncated Parseval sum for the unit ball indicator (1D).

    Sum over generators and scales m..j_max of p^{-j}; the closed form is
    1 - p^{m - j_max - 1} and the full series sums to 1.
    """
    if j_max < m:
        return Fraction(0)
    total = Fraction(0)
    per_scale = (p - 1) * p ** (m - 1)
    for j in range(m, j_max + 1):
        total += per_scale * power(p, -j)
    return total
