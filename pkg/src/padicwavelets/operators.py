"""Pseudo-differential operators as Fourier multipliers on zero-mean functions.

An operator is determined by its symbol A(xi), defined away from xi = 0.
Applying it means: transform, multiply by the symbol on a ball partition of
the spectrum fine enough for the symbol to be constant on each piece, and
transform back.  Zero-mean (Lizorkin-class) inputs keep the spectrum away
from the singular frequency 0, so built-in symbols never need refinement:
the p-adic norm is constant on any ball not containing 0.

Wavelets are eigenfunctions exactly when the symbol is constant on the coset
p̂^j(-s + Z_p^n); the eigenvalue is the symbol value A(-p̂^j s).  For the
fractional symbol |xi|^alpha this holds for every index with eigenvalue
p^{alpha * max_k(m_k - j_k)}, proven by the ultrametric equality case.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product as _cartesian
from typing import Callable, Optional, Sequence, Tuple

from .functions import (
    DEFAULT_TERM_BUDGET,
    DEFAULT_TOL,
    NotLizorkinError,
    SchwartzFunction,
    TermBudgetError,
)
from .padic import INF, Ball, decompose_ball, power, valuation
from .wavelets import CoefficientField, FamilySpec, WaveletIndex


class SymbolSingularError(ValueError):
    """Symbol evaluated where it is undefined (the zero frequency)."""


def p_power_alpha(p: int, exponent, alpha: complex) -> complex:
    """(p**exponent)**alpha via the principal branch exp(alpha ln p^e)."""
    return cmath.exp(complex(alpha) * exponent * math.log(p))


def _poly_value(poly, xi: Sequence[Fraction]) -> Fraction:
    total = Fraction(0)
    for coeff, exps in poly:
        term = coeff
        for x, e in zip(xi, exps):
            term *= x**e
        total += term
    return total


@dataclass(frozen=True)
class SymbolSpec:
    """A multiplier symbol: built-in norm powers or a user callable.

    ``depth`` is the declared local-constancy depth D >= 0: the symbol is
    promised constant on balls of radius p^{-D}.  Built-ins carry the exact
    marker ``depth=None``: their constancy (on spheres) is known, not
    declared.
    """

    kind: str
    alpha: complex = 1.0
    poly: tuple = ()
    depth: Optional[int] = None
    func: Optional[Callable] = None

    def __post_init__(self) -> None:
        if self.kind not in ("taibleson", "poly_norm", "custom"):
            raise ValueError(f"unknown symbol kind {self.kind!r}")
        if self.kind != "taibleson":
            if self.depth is None or self.depth < 0:
                raise ValueError(
                    f"{self.kind} symbols need a declared constancy depth >= 0")
        if self.kind == "poly_norm" and not self.poly:
            raise ValueError("poly_norm symbol needs a nonzero polynomial")
        if self.kind == "custom" and self.func is None:
            raise ValueError("custom symbol needs a callable")

    @classmethod
    def taibleson(cls, alpha: complex) -> "SymbolSpec":
        """The fractional symbol |xi|_p^alpha, alpha in C."""
        return cls("taibleson", complex(alpha))

    @classmethod
    def poly_norm(cls, poly, alpha: complex, depth: int) -> "SymbolSpec":
        """|f(xi)|_p^alpha for a rational-coefficient polynomial f."""
        packed = tuple(
            (Fraction(c), tuple(int(e) for e in exps)) for c, exps in poly)
        return cls("poly_norm", complex(alpha), packed, int(depth))

    @classmethod
    def custom(cls, func: Callable, depth: int) -> "SymbolSpec":
        """A user callable xi-tuple -> complex, safe for concurrent calls."""
        return cls("custom", 1.0, (), int(depth), func)

    @property
    def is_exact(self) -> bool:
        return self.depth is None

    def evaluate(self, p: int, xi: Sequence[Fraction]) -> complex:
        xi = tuple(Fraction(x) for x in xi)
        if self.kind == "taibleson":
            exps = [-v for v in (valuation(x, p) for x in xi) if v is not INF]
            if not exps:
                raise SymbolSingularError("norm symbol is singular at 0")
            return p_power_alpha(p, max(exps), self.alpha)
        if self.kind == "poly_norm":
            value = _poly_value(self.poly, xi)
            if value == 0:
                if self.alpha.real > 0:
                    return 0j
                raise SymbolSingularError(
                    "polynomial norm vanishes and Re(alpha) <= 0")
            return p_power_alpha(p, -valuation(value, p), self.alpha)
        return complex(self.func(xi))

    # -- serialization (custom symbols are code, not data) -------------------

    def to_dict(self) -> dict:
        if self.kind == "custom":
            raise ValueError("custom symbols cannot be serialized")
        data = {"kind": self.kind,
                "alpha": {"re": self.alpha.real, "im": self.alpha.imag}}
        if self.kind == "poly_norm":
            data["depth"] = self.depth
            data["poly"] = [
                {"coeff": f"{c.numerator}/{c.denominator}", "exps": list(exps)}
                for c, exps in self.poly
            ]
        return data

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data: dict) -> "SymbolSpec":
        kind = data["kind"]
        raw = data.get("alpha", 1.0)
        if isinstance(raw, dict):
            alpha = complex(raw["re"], raw.get("im", 0.0))
        else:
            alpha = complex(raw)
        if kind == "taibleson":
            return cls.taibleson(alpha)
        if kind == "poly_norm":
            poly = [(Fraction(t["coeff"]), tuple(t["exps"]))
                    for t in data["poly"]]
            return cls.poly_norm(poly, alpha, int(data["depth"]))
        raise ValueError(f"cannot deserialize symbol kind {kind!r}")

    @classmethod
    def from_json(cls, text: str) -> "SymbolSpec":
        return cls.from_dict(json.loads(text))


class EigenStatus(Enum):
    PROVEN_EXACT = "proven_exact"
    VERIFIED_TO_DEPTH = "verified_to_depth"
    FAILED = "failed"


@dataclass(frozen=True)
class EigenReport:
    """Outcome of the eigenfunction criterion for one index."""

    index: WaveletIndex
    eigenvalue: complex
    status: EigenStatus
    depth: Optional[int] = None
    witness: Optional[tuple] = None

    def ok(self) -> bool:
        return self.status is not EigenStatus.FAILED


class EigenfunctionError(RuntimeError):
    """Diagonal action requested for an index that is not an eigenfunction."""

    def __init__(self, report: EigenReport):
        self.report = report
        super().__init__(
            f"symbol is not constant on the coset of index {report.index}: "
            f"witness eta = {report.witness}")


def _norm_is_constant(ball: Ball) -> bool:
    """The p-adic max-norm is constant on a ball iff it excludes 0, i.e. some
    coordinate has center norm exceeding the radius."""
    p = ball.prime
    for c in ball.center:
        v = valuation(c, p)
        if v is not INF and -v > ball.radius_exp:
            return True
    return False


def _constancy_pieces(symbol: SymbolSpec, ball: Ball, budget: int) -> list:
    if symbol.kind == "taibleson":
        if not _norm_is_constant(ball):
            raise NotLizorkinError(
                "spectrum term touches the singular frequency 0; the input "
                "is not (numerically) in the zero-mean class")
        return [ball]
    target = min(ball.radius_exp, -symbol.depth)
    count = ball.prime ** (ball.dim * (ball.radius_exp - target))
    if count > budget:
        raise TermBudgetError(
            f"symbol refinement needs {count} pieces (> budget {budget})")
    if target == ball.radius_exp:
        return [ball]
    return decompose_ball(ball, target)


def apply(symbol: SymbolSpec, f: SchwartzFunction,
          tol: float = None, budget: int = DEFAULT_TERM_BUDGET) -> SchwartzFunction:
    """A f = F^{-1}[ A(xi) F[f](xi) ], for zero-mean f.

    The spectrum of f is partitioned into balls on which the symbol is
    constant; built-in norm symbols are exactly constant on every spectrum
    ball already (they exclude 0), declared-depth symbols refine to their
    depth.
    """
    tol = f.tol if tol is None else tol
    if abs(f.integrate()) > tol:
        raise NotLizorkinError(
            "operator symbols are singular at 0; input must have zero "
            f"integral (got {f.integrate()!r})")
    if f.is_zero():
        return f
    spectrum = f.fourier(budget)
    out_terms = []
    total = 0
    for ball, coeff in spectrum.terms:
        pieces = _constancy_pieces(symbol, ball, budget)
        total += len(pieces)
        if total > budget:
            raise TermBudgetError(
                f"symbol application exceeded the {budget}-term budget")
        for piece in pieces:
            out_terms.append(
                (piece, coeff * symbol.evaluate(f.prime, piece.center)))
    multiplied = SchwartzFunction(f.prime, f.dim, out_terms, tol=f.tol)
    return multiplied.fourier_inverse(budget)


def _coset_point(spec: FamilySpec, idx: WaveletIndex, eta: Sequence) -> tuple:
    p = spec.prime
    return tuple(
        power(p, jk) * (-sk + Fraction(ek))
        for sk, jk, ek in zip(idx.s, idx.j, eta)
    )


def eigenvalue_at(symbol: SymbolSpec, spec: FamilySpec, idx: WaveletIndex) -> complex:
    """The candidate eigenvalue A(-p̂^j s)."""
    return symbol.evaluate(spec.prime, _coset_point(spec, idx, (0,) * spec.dim))


def eigencheck(symbol: SymbolSpec, spec: FamilySpec, idx: WaveletIndex,
               tol: float = DEFAULT_TOL,
               rep_budget: int = DEFAULT_TERM_BUDGET) -> EigenReport:
    """Check A(p̂^j(-s + eta)) = A(-p̂^j s) over eta in Z_p^n.

    For the fractional symbol the check is analytic and exact: |-s + eta|_p
    equals |s|_p because |eta|_p <= 1 < |s|_p (ultrametric equality case).
    Declared-depth symbols are checked on all coset representatives of
    Z_p^n / p^D Z_p^n and reported as verified to that depth only.
    """
    idx.validate(spec)
    lam = eigenvalue_at(symbol, spec, idx)
    if symbol.kind == "taibleson":
        return EigenReport(idx, lam, EigenStatus.PROVEN_EXACT)
    depth = symbol.depth
    reps = spec.prime**depth
    if reps**spec.dim > rep_budget:
        raise TermBudgetError(
            f"eigencheck needs {reps**spec.dim} coset representatives")
    scale = max(abs(lam), 1.0)
    for eta in _cartesian(range(reps), repeat=spec.dim):
        value = symbol.evaluate(spec.prime, _coset_point(spec, idx, eta))
        if abs(value - lam) > tol * scale:
            return EigenReport(idx, lam, EigenStatus.FAILED, depth, eta)
    return EigenReport(idx, lam, EigenStatus.VERIFIED_TO_DEPTH, depth)


def eigen_apply(symbol: SymbolSpec, field: CoefficientField,
                tol: float = DEFAULT_TOL) -> CoefficientField:
    """Diagonal action: multiply each coefficient by its eigenvalue.

    Every (s, j) pair present must pass the eigenfunction criterion; a
    failed index aborts with the offending witness.  The eigenvalue does not
    depend on the shift a, nor on the family kind (theta and psi share it).
    """
    spec = field.family
    cache: dict = {}
    out = {}
    for idx, coeff in field.entries.items():
        key = (idx.s, idx.j)
        report = cache.get(key)
        if report is None:
            report = eigencheck(symbol, spec, idx, tol)
            cache[key] = report
        if not report.ok():
            raise EigenfunctionError(report)
        value = coeff * report.eigenvalue
        if abs(value) > tol:
            out[idx] = value
    return CoefficientField(spec, out)
