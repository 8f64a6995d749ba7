"""Command-line front end.

Subcommands: ``basis`` (synth / verify / parseval), ``fourier``, ``op``
(apply / eigencheck), ``evolve`` (linear / schrodinger / semilinear),
``analyze``, ``synthesize``.  Inputs and outputs are the JSON formats of the
library; trajectories and partial sums are also written as CSV, with a
rendered PNG figure next to any delimited file unless --no-plot is given.

Exit codes: 0 on success, 1 on a verification failure (a machine-readable
JSON report is still emitted), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from .evolution import (
    DisjointSupportError,
    EvolutionProblem,
    residual,
    solve,
)
from .functions import DEFAULT_TOL, SchwartzFunction, unit_ball_indicator
from .operators import EigenStatus, EigenfunctionError, SymbolSpec, apply as op_apply, eigencheck
from .padic import enumerate_frequencies_1d, power
from .wavelets import (
    CoefficientField,
    FamilySpec,
    WaveletIndex,
    Window,
    analyze,
    gram_matrix,
    parseval_partial_sum,
    synthesize,
    wavelet,
)


def _parse_fracs(text: str) -> tuple:
    return tuple(Fraction(part) for part in str(text).split(","))


def _parse_ints(text: str) -> tuple:
    return tuple(int(part) for part in str(text).split(","))


def _family_from_args(args) -> FamilySpec:
    m = _parse_ints(args.m)
    if len(m) == 1 and args.n > 1:
        m = m * args.n
    if args.family == "psi":
        gammas = {}
        if getattr(args, "seed", None) is not None:
            rng = random.Random(args.seed)
            for mk in sorted(set(m)):
                for s in enumerate_frequencies_1d(args.p, mk):
                    gammas[s] = tuple(
                        cmath.exp(2j * math.pi * rng.random())
                        for _ in range(args.p**args.nu))
        return FamilySpec.psi(args.p, args.n, m, args.nu, gammas)
    return FamilySpec.theta(args.p, args.n, m)


def _emit(payload, args) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text + "\n")
        if not args.quiet:
            print(f"wrote {out}")
    else:
        print(text)


def _load_function(path: str, args) -> SchwartzFunction:
    if path == "omega":
        return unit_ball_indicator(args.p, args.n, tol=args.tol)
    return SchwartzFunction.from_json(Path(path).read_text(), tol=args.tol)


def _load_initial_field(args, spec: FamilySpec):
    """Initial data: a coefficient-field JSON, a function JSON, or 'omega'."""
    if args.u0 != "omega":
        data = json.loads(Path(args.u0).read_text())
        if "family" in data:
            return CoefficientField.from_dict(data, tol=args.tol), None
    f = _load_function(args.u0, args)
    window = Window(args.jmin, args.jmax, args.shift_depth)
    result = analyze(f, spec, window, tol=args.tol)
    return result.field, result


def _figure_path(args) -> Path | None:
    if getattr(args, "no_plot", False):
        return None
    if getattr(args, "plot", None):
        return Path(args.plot)
    out = getattr(args, "out", None)
    if out:
        return Path(out).with_suffix(".png")
    return None


def _render_trajectory_figure(traj, path: Path, quiet: bool) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    times = list(traj.times)
    indices = sorted({idx for f in traj.fields for idx in f.entries},
                     key=lambda idx: (idx.s, idx.j, idx.a))
    for idx in indices:
        mags = [abs(c) for c in traj.coefficient(idx)]
        label = f"s={','.join(map(str, idx.s))} j={','.join(map(str, idx.j))}"
        ax.plot(times, mags, marker=".", label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("|coefficient|")
    ax.set_title(f"{traj.problem.kind} evolution, {len(indices)} modes")
    if traj.problem.kind == "linear":
        ax.set_yscale("log")
    if len(indices) <= 12:
        ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    if not quiet:
        print(f"wrote {path}")


def _render_parseval_figure(rows, path: Path, quiet: bool) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    js = [row[0] for row in rows]
    sums = [row[2] for row in rows]
    ax.plot(js, sums, marker="o", label="partial sum")
    ax.axhline(1.0, linestyle="--", color="gray", label="total mass")
    ax.set_xlabel("scale cutoff J")
    ax.set_ylabel("captured mass")
    ax.set_title("truncated Parseval sum for the unit ball")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    if not quiet:
        print(f"wrote {path}")


# -- subcommands ----------------------------------------------------------------


def _cmd_basis_synth(args) -> int:
    spec = _family_from_args(args)
    idx = WaveletIndex(_parse_fracs(args.s), _parse_ints(args.j),
                       _parse_fracs(args.a))
    w = wavelet(spec, idx)
    _emit(w.to_dict(), args)
    return 0


def _cmd_basis_verify(args) -> int:
    spec = _family_from_args(args)
    window = Window(args.jmin, args.jmax, args.shift_depth)
    indices = list(window.indices(spec))
    gram = gram_matrix(spec, indices)
    deviation = float(np.max(np.abs(gram - np.eye(len(indices)))))
    ok = deviation <= args.tol
    report = {
        "check": "orthonormality",
        "family": spec.kind,
        "p": args.p,
        "m": list(spec.m),
        "indices": len(indices),
        "max_deviation": deviation,
        "tolerance": args.tol,
        "orthonormal": ok,
    }
    _emit(report, args)
    return 0 if ok else 1


def _cmd_basis_parseval(args) -> int:
    spec = _family_from_args(args)
    m = spec.m[0]
    jmin = args.jmin if args.jmin is not None else m
    f = _load_function(args.u0, args)
    rows = []
    for j_cut in range(jmin, args.jmax + 1):
        result = analyze(f, spec, Window(jmin, j_cut, args.shift_depth),
                         tol=args.tol)
        numeric = result.field.norm_sq()
        exact = parseval_partial_sum(args.p, m, j_cut)
        rows.append((j_cut, numeric, float(exact),
                     f"{exact.numerator}/{exact.denominator}"))
    closed = 1 - power(args.p, m - args.jmax - 1)
    final_exact = parseval_partial_sum(args.p, m, args.jmax)
    numeric_ok = abs(rows[-1][1] - float(final_exact)) <= args.tol
    exact_ok = final_exact == closed
    report = {
        "check": "parseval",
        "p": args.p,
        "m": m,
        "j_max": args.jmax,
        "partial_sum": rows[-1][1],
        "closed_form": f"{closed.numerator}/{closed.denominator}",
        "closed_form_float": float(closed),
        "exact_match": exact_ok,
        "numeric_match": numeric_ok,
    }
    if args.out:
        lines = ["j,measured_mass,closed_form_mass,closed_form_exact"]
        lines += [f"{j},{num!r},{flt!r},{ex}" for j, num, flt, ex in rows]
        Path(args.out).write_text("\n".join(lines) + "\n")
        if not args.quiet:
            print(f"wrote {args.out}")
    figure = _figure_path(args)
    if figure is not None:
        _render_parseval_figure(rows, figure, args.quiet)
    ok = numeric_ok and exact_ok
    print(json.dumps(report, indent=2, sort_keys=True))
    return 0 if ok else 1


def _cmd_fourier(args) -> int:
    f = _load_function(args.input, args)
    g = f.fourier_inverse() if args.inverse else f.fourier()
    _emit(g.to_dict(), args)
    return 0


def _cmd_op_apply(args) -> int:
    symbol = SymbolSpec.from_json(Path(args.symbol).read_text())
    f = _load_function(args.input, args)
    g = op_apply(symbol, f, tol=args.tol)
    _emit(g.to_dict(), args)
    return 0


def _cmd_op_eigencheck(args) -> int:
    symbol = SymbolSpec.from_json(Path(args.symbol).read_text())
    if args.field:
        field = CoefficientField.from_json(Path(args.field).read_text())
        spec = field.family
        indices = sorted(field.entries, key=lambda i: (i.s, i.j, i.a))
    else:
        if args.p is None or not args.s or not args.j:
            print("error: eigencheck needs either --field or "
                  "--p/--m/--s/--j", file=sys.stderr)
            return 2
        spec = _family_from_args(args)
        indices = [WaveletIndex(_parse_fracs(args.s), _parse_ints(args.j),
                                _parse_fracs(args.a))]
    reports = []
    all_ok = True
    for idx in indices:
        rep = eigencheck(symbol, spec, idx, tol=args.tol)
        all_ok &= rep.ok()
        entry = {
            "s": [str(v) for v in idx.s],
            "j": list(idx.j),
            "a": [str(v) for v in idx.a],
            "status": rep.status.value,
            "eigenvalue": {"re": rep.eigenvalue.real,
                           "im": rep.eigenvalue.imag},
        }
        if rep.depth is not None:
            entry["depth"] = rep.depth
        if rep.witness is not None:
            entry["witness"] = list(rep.witness)
        reports.append(entry)
    _emit({"check": "eigenfunction", "reports": reports, "ok": all_ok}, args)
    return 0 if all_ok else 1


def _cmd_evolve(args) -> int:
    spec = _family_from_args(args)
    if args.symbol:
        symbol = SymbolSpec.from_json(Path(args.symbol).read_text())
    else:
        symbol = SymbolSpec.taibleson(complex(args.alpha, args.alpha_im))
    field, analysis = _load_initial_field(args, spec)
    if analysis is not None and not analysis.complete and not args.quiet:
        print(f"note: initial expansion flagged partial ({analysis.detail})",
              file=sys.stderr)
    times = tuple(np.linspace(0.0, args.tmax, args.steps + 1))
    problem = EvolutionProblem(args.evolve_kind, symbol, field, times,
                               nonlinearity=args.m_nl)
    try:
        traj = solve(problem)
    except (EigenfunctionError, DisjointSupportError, ValueError) as exc:
        print(json.dumps({"check": "evolve", "ok": False,
                          "error": str(exc)}, indent=2))
        return 1
    if args.format == "json" or (args.out and args.out.endswith(".json")):
        payload = traj.to_dict()
        if args.out:
            Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
            if not args.quiet:
                print(f"wrote {args.out}")
        else:
            print(json.dumps(payload, indent=2))
    else:
        text = traj.to_csv()
        if args.out:
            Path(args.out).write_text(text)
            if not args.quiet:
                print(f"wrote {args.out}")
        else:
            sys.stdout.write(text)
    figure = _figure_path(args)
    if figure is not None:
        _render_trajectory_figure(traj, figure, args.quiet)
    if len(times) >= 3 and not args.quiet:
        rep = residual(traj)
        print(f"max finite-difference residual: {rep.max_residual:.3e}",
              file=sys.stderr)
    return 0


def _cmd_analyze(args) -> int:
    spec = _family_from_args(args)
    f = _load_function(args.input, args)
    result = analyze(f, spec, Window(args.jmin, args.jmax, args.shift_depth),
                     tol=args.tol)
    payload = result.field.to_dict()
    payload["complete"] = result.complete
    payload["detail"] = result.detail
    _emit(payload, args)
    return 0


def _cmd_synthesize(args) -> int:
    field = CoefficientField.from_json(Path(args.input).read_text(),
                                       tol=args.tol)
    _emit(synthesize(field, tol=args.tol).to_dict(), args)
    return 0


# -- argument wiring --------------------------------------------------------------


def _add_common(parser, *, family=True, window=False, io_out=True,
                family_required=True):
    parser.add_argument("--tol", type=float, default=DEFAULT_TOL,
                        help="zero/equality tolerance (default 1e-10)")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress chatter")
    if io_out:
        parser.add_argument("--out", help="output file (default: stdout)")
        parser.add_argument("--format", choices=("json", "csv"),
                            default="csv", help="trajectory output format")
    if family:
        parser.add_argument("--p", type=int, required=family_required,
                            help="prime")
        parser.add_argument("--n", type=int, default=1, help="dimension")
        parser.add_argument("--m", default="1",
                            help="frequency depth(s), comma separated")
        parser.add_argument("--family", choices=("theta", "psi"),
                            default="theta")
        parser.add_argument("--nu", type=int, default=0,
                            help="psi-family shift depth parameter")
        parser.add_argument("--seed", type=int, default=None,
                            help="seed for random psi parameters (default 0 "
                             "where randomness is needed)")
    if window:
        parser.add_argument("--jmin", type=int, default=-2)
        parser.add_argument("--jmax", type=int, default=2)
        parser.add_argument("--shift-depth", type=int, default=2)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="padicwav",
        description="Exact p-adic wavelet bases, multiplier operators, and "
                    "spectral evolution solvers.")
    sub = parser.add_subparsers(dest="command", required=True)

    basis = sub.add_parser("basis", help="wavelet basis operations")
    basis_sub = basis.add_subparsers(dest="basis_command", required=True)

    synth = basis_sub.add_parser("synth", help="emit one wavelet as JSON")
    _add_common(synth)
    synth.add_argument("--s", required=True, help="frequencies, e.g. 1/2,3/4")
    synth.add_argument("--j", required=True, help="scales, e.g. 0,-1")
    synth.add_argument("--a", default="0", help="shifts, e.g. 0,1/2")
    synth.set_defaults(func=_cmd_basis_synth)

    verify = basis_sub.add_parser("verify", help="orthonormality check")
    _add_common(verify, window=True)
    verify.set_defaults(func=_cmd_basis_verify)

    parseval = basis_sub.add_parser("parseval",
                                    help="truncated Parseval sum report")
    _add_common(parseval, window=False)
    parseval.add_argument("--u0", default="omega",
                          help="'omega' or a function JSON file")
    parseval.add_argument("--jmin", type=int, default=None)
    parseval.add_argument("--jmax", type=int, required=True)
    parseval.add_argument("--shift-depth", type=int, default=0)
    parseval.add_argument("--no-plot", action="store_true")
    parseval.add_argument("--plot", help="explicit figure path")
    parseval.set_defaults(func=_cmd_basis_parseval)

    fourier = sub.add_parser("fourier", help="transform a function JSON")
    _add_common(fourier, family=False)
    fourier.add_argument("--in", dest="input", required=True)
    fourier.add_argument("--inverse", action="store_true")
    fourier.set_defaults(func=_cmd_fourier, p=None, n=None)

    op = sub.add_parser("op", help="pseudo-differential operators")
    op_sub = op.add_subparsers(dest="op_command", required=True)

    opapply = op_sub.add_parser("apply", help="apply a symbol to a function")
    _add_common(opapply, family=False)
    opapply.add_argument("--symbol", required=True, help="symbol JSON file")
    opapply.add_argument("--in", dest="input", required=True)
    opapply.set_defaults(func=_cmd_op_apply, p=None, n=None)

    eig = op_sub.add_parser("eigencheck",
                            help="run the eigenfunction criterion")
    _add_common(eig, family_required=False)
    eig.add_argument("--symbol", required=True)
    eig.add_argument("--field", help="check every index of a field JSON")
    eig.add_argument("--s", help="frequencies of a single index")
    eig.add_argument("--j", help="scales of a single index")
    eig.add_argument("--a", default="0")
    eig.set_defaults(func=_cmd_op_eigencheck)

    evolve = sub.add_parser("evolve", help="solve a Cauchy problem")
    evolve_sub = evolve.add_subparsers(dest="evolve_kind", required=True)
    for kind in ("linear", "schrodinger", "semilinear"):
        ev = evolve_sub.add_parser(kind)
        _add_common(ev, window=True)
        ev.add_argument("--alpha", type=float, default=1.0,
                        help="fractional-symbol exponent (real part)")
        ev.add_argument("--alpha-im", type=float, default=0.0,
                        help="imaginary part of the exponent")
        ev.add_argument("--symbol", help="symbol JSON file (overrides alpha)")
        ev.add_argument("--u0", required=True,
                        help="'omega', a function JSON, or a field JSON")
        ev.add_argument("--tmax", type=float, required=True)
        ev.add_argument("--steps", type=int, required=True,
                        help="number of time steps (grid has steps+1 points)")
        ev.add_argument("--m-nl", type=int, default=1,
                        help="nonlinearity degree for the semilinear kind")
        ev.add_argument("--no-plot", action="store_true")
        ev.add_argument("--plot", help="explicit figure path")
        ev.set_defaults(func=_cmd_evolve, evolve_kind=kind)

    ana = sub.add_parser("analyze", help="expand a function over a window")
    _add_common(ana, window=True)
    ana.add_argument("--in", dest="input", required=True)
    ana.set_defaults(func=_cmd_analyze)

    syn = sub.add_parser("synthesize", help="sum a coefficient field")
    _add_common(syn, family=False)
    syn.add_argument("--in", dest="input", required=True)
    syn.set_defaults(func=_cmd_synthesize, p=None, n=None)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError) as exc:
        print(json.dumps({"ok": False, "error": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
