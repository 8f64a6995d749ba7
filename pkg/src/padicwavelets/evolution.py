"""Closed-form spectral solvers for evolutionary multiplier equations.

In the wavelet basis the three Cauchy problems decouple into independent
scalar mode equations for the coefficients L(t) of eigen-certified indices:

* diffusion-type   dL/dt + lambda L = 0          -> L(t) = L0 exp(-lambda t)
* Schrodinger-type i dL/dt - lambda L = 0        -> L(t) = L0 exp(-i lambda t)
* semi-linear      dL/dt + lambda L + q L^{2r+1} = 0, q = p^{-r |j|},
  solved in closed form for real initial coefficients and real lambda >= 0,
  under pairwise disjoint mode supports (the condition making the
  nonlinearity act mode by mode).

No time stepping happens anywhere; a high-order ODE integrator exists only
as a test oracle.  The residual report estimates d/dt by central differences
on the trajectory and measures how well each mode satisfies its equation.
"""

from __future__ import annotations

import cmath
import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .functions import DEFAULT_TOL
from .operators import (
    EigenfunctionError,
    EigenReport,
    SymbolSpec,
    eigencheck,
)
from .padic import INF, power, valuation
from .wavelets import CoefficientField, FamilySpec, WaveletIndex

KINDS = ("linear", "schrodinger", "semilinear")


class DisjointSupportError(ValueError):
    """Semi-linear solver requires pairwise disjoint mode supports."""

    def __init__(self, pair):
        self.pair = pair
        super().__init__(
            f"mode supports overlap for indices {pair[0]} and {pair[1]}")


@dataclass(frozen=True)
class EvolutionProblem:
    """A Cauchy problem posed in the wavelet coefficient domain.

    ``nonlinearity`` is the integer r >= 1 in the semi-linear term
    u |u|^{2r}; it is ignored by the two linear kinds.
    """

    kind: str
    symbol: SymbolSpec
    initial: CoefficientField
    times: tuple
    nonlinearity: int = 1

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        times = tuple(float(t) for t in self.times)
        if not times or times[0] < 0:
            raise ValueError("time grid must start at t >= 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "times", times)
        if self.nonlinearity < 1:
            raise ValueError("nonlinearity degree must be >= 1")


@dataclass
class Trajectory:
    """Per-time-point coefficient fields plus the problem they solve."""

    problem: EvolutionProblem
    fields: list

    @property
    def times(self) -> tuple:
        return self.problem.times

    def coefficient(self, idx: WaveletIndex) -> list:
        return [f.entries.get(idx, 0j) for f in self.fields]

    def to_csv(self) -> str:
        """Delimited export: one row per (time, mode)."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "s", "j", "a", "re", "im"])
        for t, field in zip(self.times, self.fields):
            for idx, c in sorted(field.entries.items(),
                                 key=lambda kv: (kv[0].s, kv[0].j, kv[0].a)):
                writer.writerow([
                    repr(t),
                    ";".join(f"{v.numerator}/{v.denominator}" for v in idx.s),
                    ";".join(str(v) for v in idx.j),
                    ";".join(f"{v.numerator}/{v.denominator}" for v in idx.a),
                    repr(c.real),
                    repr(c.imag),
                ])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "kind": self.problem.kind,
            "times": list(self.times),
            "states": [f.to_dict() for f in self.fields],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _certified_eigenvalues(problem: EvolutionProblem) -> Dict[tuple, EigenReport]:
    spec = problem.initial.family
    out: Dict[tuple, EigenReport] = {}
    for idx in problem.initial.entries:
        key = (idx.s, idx.j)
        if key in out:
            continue
        report = eigencheck(problem.symbol, spec, idx)
        if not report.ok():
            raise EigenfunctionError(report)
        out[key] = report
    return out


def check_disjointness(field: CoefficientField) -> Tuple[bool, Optional[tuple]]:
    """Are the supporting sets {|p̂^j x - a| <= 1} pairwise disjoint?

    The support of the mode (s, j, a) is the product of coordinate balls of
    radius p^{j_k} centered at p^{-j_k} a_k; two products are disjoint iff
    some coordinate pair is.  Returns (False, offending index pair) on
    failure.
    """
    p = field.family.prime
    items = list(field.entries)
    for i, left in enumerate(items):
        for right in items[i + 1:]:
            disjoint = False
            for jl, al, jr, ar in zip(left.j, left.a, right.j, right.a):
                delta = power(p, -jl) * al - power(p, -jr) * ar
                v = valuation(delta, p)
                if v is not INF and -v > max(jl, jr):
                    disjoint = True
                    break
            if not disjoint:
                return False, (left, right)
    return True, None


def _mode_weight(p: int, idx: WaveletIndex, r: int) -> float:
    """The nonlinear coupling q = p^{-r |j|} of a mode."""
    return float(power(p, -r * idx.j_total()))


def semilinear_mode(c: float, lam: float, r: int, q: float, t: float) -> float:
    """Closed-form coefficient of one semi-linear mode at time t.

    Solves dL/dt + lam L + q L^{2r+1} = 0 with L(0) = c; at lam = 0 the
    limit form applies (and covers the zero-symbol case).  Signs are
    preserved and |L| <= |c| e^{-lam t}.
    """
    two_r = 2 * r
    if c == 0.0:
        return 0.0
    if lam == 0.0:
        return c / (1 + two_r * t * c**two_r * q) ** (1 / two_r)
    shrink = -math.expm1(-two_r * lam * t)  # 1 - e^{-2r lam t}, stably
    ratio = lam / (lam + c**two_r * q * shrink)
    return c * math.exp(-lam * t) * ratio ** (1 / two_r)


def solve_linear(problem: EvolutionProblem) -> Trajectory:
    """Diffusion-type evolution: each mode decays by exp(-lambda t)."""
    if problem.kind != "linear":
        raise ValueError("solve_linear expects a linear problem")
    reports = _certified_eigenvalues(problem)
    spec = problem.initial.family
    fields = []
    for t in problem.times:
        entries = {
            idx: c * cmath.exp(-reports[(idx.s, idx.j)].eigenvalue * t)
            for idx, c in problem.initial.entries.items()
        }
        fields.append(CoefficientField(spec, entries))
    return Trajectory(problem, fields)


def solve_schrodinger(problem: EvolutionProblem) -> Trajectory:
    """Unitary evolution: each mode rotates by exp(-i lambda t)."""
    if problem.kind != "schrodinger":
        raise ValueError("solve_schrodinger expects a schrodinger problem")
    reports = _certified_eigenvalues(problem)
    spec = problem.initial.family
    fields = []
    for t in problem.times:
        entries = {
            idx: c * cmath.exp(-1j * reports[(idx.s, idx.j)].eigenvalue * t)
            for idx, c in problem.initial.entries.items()
        }
        fields.append(CoefficientField(spec, entries))
    return Trajectory(problem, fields)


def solve_semilinear(problem: EvolutionProblem,
                     tol: float = DEFAULT_TOL) -> Trajectory:
    """Semi-linear evolution with mode-wise closed-form coefficients.

    Requires real initial coefficients, real nonnegative eigenvalues, and
    pairwise disjoint mode supports; violations raise with the offending
    data rather than silently extending the formula.
    """
    if problem.kind != "semilinear":
        raise ValueError("solve_semilinear expects a semilinear problem")
    initial = problem.initial
    ok, pair = check_disjointness(initial)
    if not ok:
        raise DisjointSupportError(pair)
    for idx, c in initial.entries.items():
        if abs(c.imag) > tol:
            raise ValueError(
                f"semi-linear solver needs real coefficients; index {idx} "
                f"has coefficient {c}")
    reports = _certified_eigenvalues(problem)
    lams = {}
    for key, report in reports.items():
        lam = report.eigenvalue
        if abs(lam.imag) > tol or lam.real < -tol:
            raise ValueError(
                f"semi-linear solver needs real eigenvalues >= 0; got {lam}")
        lams[key] = max(lam.real, 0.0)
    spec = initial.family
    r = problem.nonlinearity
    p = spec.prime
    fields = []
    for t in problem.times:
        entries = {}
        for idx, c in initial.entries.items():
            value = semilinear_mode(
                c.real, lams[(idx.s, idx.j)], r, _mode_weight(p, idx, r), t)
            if abs(value) > 0.0:
                entries[idx] = complex(value)
        fields.append(CoefficientField(spec, entries))
    return Trajectory(problem, fields)


def solve(problem: EvolutionProblem) -> Trajectory:
    if problem.kind == "linear":
        return solve_linear(problem)
    if problem.kind == "schrodinger":
        return solve_schrodinger(problem)
    return solve_semilinear(problem)


@dataclass
class ResidualReport:
    """Finite-difference check that a trajectory satisfies its equation."""

    per_mode: dict
    max_residual: float


def residual(traj: Trajectory, problem: EvolutionProblem = None) -> ResidualReport:
    """Estimate the PDE residual mode by mode via central differences.

    Needs at least three sample times; the derivative estimate is second
    order on a uniform grid, so exact closed-form trajectories show
    second-order convergence as the grid is refined.
    """
    problem = traj.problem if problem is None else problem
    times = traj.times
    if len(times) < 3:
        raise ValueError("residual estimation needs at least 3 sample times")
    spec = problem.initial.family
    reports = _certified_eigenvalues(problem)
    r = problem.nonlinearity
    p = spec.prime
    indices = set()
    for f in traj.fields:
        indices.update(f.entries)
    per_mode = {}
    for idx in indices:
        lam = reports[(idx.s, idx.j)].eigenvalue
        series = traj.coefficient(idx)
        worst = 0.0
        for i in range(1, len(times) - 1):
            dt = times[i + 1] - times[i - 1]
            slope = (series[i + 1] - series[i - 1]) / dt
            if problem.kind == "linear":
                res = slope + lam * series[i]
            elif problem.kind == "schrodinger":
                res = 1j * slope - lam * series[i]
            else:
                q = _mode_weight(p, idx, r)
                res = slope + lam * series[i] + q * series[i] ** (2 * r + 1)
            worst = max(worst, abs(res))
        per_mode[idx] = worst
    overall = max(per_mode.values(), default=0.0)
    return ResidualReport(per_mode, overall)
