"""Command-line entry point: ``hyperell <subcommand> ...``.

Exit codes: 0 success, 1 invariant breach, 2 usage error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import argument, ensemble, fmodel, hybrid, report
from .characters import QuadraticCharacter, jacobi, jacobi_by_factoring
from .lfunction import (
    LData,
    afe_check,
    coeffs_oracle_full,
    compute_zeros,
    lpoly,
    point_count_check,
    trace_check,
)
from .poly import BudgetExceeded, Poly, format_poly, parse_poly

CLI_SCHEMA = "hyperell.cli/1"
EXIT_OK, EXIT_BREACH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def resolve_D(args) -> Poly:
    """Explicit --D wins; otherwise sample from H_{2g+1,q} with --seed."""
    if args.D is not None:
        try:
            D = parse_poly(args.D, args.q)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        if args.g is not None and D.degree != 2 * args.g + 1:
            raise UsageError(f"--D has degree {D.degree}, but --g {args.g} needs {2 * args.g + 1}")
        return D
    if args.g is None:
        raise UsageError("give --g (to sample) or --D")
    cfg = ensemble.EnsembleConfig(args.q, args.g, seed=args.seed)
    return ensemble.sample_D(cfg, ensemble.make_rng(args.seed))


def _ldata(args) -> LData:
    try:
        chi = QuadraticCharacter(resolve_D(args))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return lpoly(chi, workers=args.threads)


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def emit(args, payload: dict, rows: list[dict] | None = None) -> None:
    """Write ``payload`` as JSON, or ``rows`` as CSV / an aligned table."""
    fmt = getattr(args, "format", "json")
    if fmt == "json" or rows is None:
        text = json.dumps(_jsonable({"schema": CLI_SCHEMA, **payload}), indent=2)
    elif fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(rows[0]) if rows else [], lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow(_jsonable(r))
        text = f"# schema: {CLI_SCHEMA}\n" + buf.getvalue().rstrip("\n")
    else:
        cols = list(rows[0]) if rows else []
        cells = [[_cell(r[c]) for c in cols] for r in rows]
        widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(cols)]
        lines = ["  ".join(c.rjust(w) for c, w in zip(cols, widths))]
        lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
        text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


# ---------------------------------------------------------------- subcommands

def cmd_lpoly(args) -> int:
    ld = _ldata(args)
    emit(args, {**ld.to_json(), "D_text": format_poly(ld.D)},
         [{"n": n, "c_n": c} for n, c in enumerate(ld.coeffs)])
    return EXIT_OK


def cmd_zeros(args) -> int:
    if args.from_file:
        with open(args.from_file) as fh:
            obj = json.load(fh)
        try:
            ld = LData.from_json(obj)
        except (KeyError, ValueError) as exc:
            raise UsageError(f"{args.from_file}: {exc}") from exc
        ld = compute_zeros(LData(ld.chi, ld.coeffs))
    else:
        ld = _ldata(args)
    th = ld.theta_array()
    emit(args, {"D": format_poly(ld.D), "q": ld.q, "g": ld.g, "thetas": th,
                "defects": ld.root_magnitude_defects, "flags": ld.flags},
         [{"j": j + 1, "theta": t, "defect": d}
          for j, (t, d) in enumerate(zip(th, ld.root_magnitude_defects))])
    return EXIT_OK


def cmd_trace_check(args) -> int:
    ld = _ldata(args)
    nmax = args.nmax or 2 * ld.g
    rows = [{"n": n, "defect": trace_check(ld, n)} for n in range(1, nmax + 1)]
    worst = max(r["defect"] for r in rows)
    pc = point_count_check(ld)
    emit(args, {"D": format_poly(ld.D), "defects": rows, "max_defect": worst,
                "point_count_defect": pc, "tolerance": args.tol}, rows)
    return EXIT_OK if worst < args.tol and pc == 0 else EXIT_BREACH


def cmd_hybrid_check(args) -> int:
    ld = _ldata(args)
    rng = np.random.Generator(np.random.PCG64(args.seed))
    us = np.concatenate([hybrid.interior_points(ld, args.grid, rng),
                         hybrid.separated_circle_points(ld, args.grid)])
    evals = [hybrid.hybrid_check(ld, u, K) for K in args.K for u in us]
    worst = max(e.defect for e in evals)
    rows = [e.to_json() for e in evals]
    emit(args, {"D": format_poly(ld.D), "evals": rows, "max_defect": worst, "tolerance": args.tol},
         [{"K": e.K, "u_re": e.u.real, "u_im": e.u.imag, "defect": e.defect} for e in evals])
    return EXIT_OK if worst < args.tol else EXIT_BREACH


def _thetas(args) -> np.ndarray:
    if args.theta:
        return np.asarray(args.theta, dtype=float)
    return np.arange(args.grid + 1) / args.grid


def cmd_arg(args) -> int:
    ld = _ldata(args)
    th = _thetas(args)
    S = argument.S_theta(ld, th)
    N = argument.N_theta(ld, th)
    rows = []
    per_K = {K: (argument.S_K_from_primes(ld, th, K), 2 * ld.g * th + argument.S_K_from_primes(ld, th, K))
             for K in args.K}
    for i, t in enumerate(th):
        row = {"theta": float(t), "S": float(S[i]), "N": int(N[i])}
        for K, (sk, fk) in per_K.items():
            row[f"S_K{K}"] = float(sk[i])
            row[f"f_K{K}"] = float(fk[i])
        rows.append(row)
    emit(args, {"D": format_poly(ld.D), "g": ld.g, "rows": rows}, rows)
    return EXIT_OK


def cmd_count(args) -> int:
    ld = _ldata(args)
    th = _thetas(args)
    N = argument.N_theta(ld, th)
    S = argument.S_theta(ld, th)
    rows = [{"theta": float(t), "N": int(n), "2g_theta_plus_S": float(2 * ld.g * t + s),
             "defect": float(abs(n - 2 * ld.g * t - s))} for t, n, s in zip(th, N, S)]
    worst = max(r["defect"] for r in rows)
    flagged = "zero_at_theta_0" in ld.flags
    emit(args, {"D": format_poly(ld.D), "rows": rows, "max_defect": worst, "flags": ld.flags}, rows)
    return EXIT_OK if flagged or worst < 1e-8 else EXIT_BREACH


def cmd_fmodel_zeros(args) -> int:
    ld = _ldata(args)
    out, rows = {}, []
    for K in args.K:
        z = fmodel.find_fk_zeros(ld, K)
        zr = z.to_rows()
        out[str(K)] = {"count": z.count, "zeros": zr, "simple_fraction": 1 - fmodel.simplicity_stats(z)}
        rows += [{"K": K, **r} for r in zr]
    args.format = args.emit
    emit(args, {"D": format_poly(ld.D), "g": ld.g, "by_K": out}, rows)
    return EXIT_OK


def cmd_clustering_check(args) -> int:
    ld = _ldata(args)
    results = {}
    for K in args.K:
        try:
            results[str(K)] = fmodel.clustering_check(ld, K, args.delta)
        except fmodel.PreconditionError as exc:
            raise UsageError(str(exc)) from exc
    emit(args, {"D": format_poly(ld.D), "delta": args.delta, "min_gap": fmodel.min_zero_gap(ld),
                "result": results}, [{"K": k, "pass": v} for k, v in results.items()])
    return EXIT_OK if all(results.values()) else EXIT_BREACH


def cmd_ensemble(args) -> int:
    if args.g is None:
        raise UsageError("ensemble needs --g")
    if not args.out:
        raise UsageError("ensemble needs --out (a JSON-lines file)")
    cfg = ensemble.EnsembleConfig(args.q, args.g, sample_count=args.samples, seed=args.seed,
                                  K_list=tuple(args.K), delta=args.delta)
    recs = ensemble.batch_run(cfg, args.out, workers=args.threads)
    bad = [r for r in recs if r.status != "ok"]
    print(json.dumps({"schema": CLI_SCHEMA, "written": len(recs), "not_ok": len(bad), "out": args.out}))
    return EXIT_BREACH if bad else EXIT_OK


def verify_one(ld: LData, Ks=(4, 8, 16), delta: float = 0.02, oracle_limit: int = 10**6) -> dict:
    """Every invariant check for one D; ``breaches`` lists what failed."""
    q, g = ld.q, ld.g
    breaches = []
    checks = {"afe": afe_check(ld), "point_count_defect": point_count_check(ld)}
    if not checks["afe"]:
        breaches.append("afe")
    if checks["point_count_defect"]:
        breaches.append("point_count")
    if q ** (2 * g) <= oracle_limit:
        checks["oracle_equal"] = list(ld.coeffs) == coeffs_oracle_full(ld.chi)
        if not checks["oracle_equal"]:
            breaches.append("oracle")
    cfg = ensemble.EnsembleConfig(q, g, K_list=tuple(Ks), delta=delta)
    rec = ensemble.run_one(cfg, 0, ld.D)
    breaches += rec.breaches
    for K in Ks:
        r = fmodel.rh_check_fk(ld, K)
        checks[f"fk_modulus_defect_{K}"] = r["modulus_identity_defect"]
        if not r["modulus_identity_defect"] < 1e-12:
            breaches.append(f"fk_modulus[{K}]")
    return {"checks": checks, "record": rec.to_json(), "breaches": breaches}


def cmd_verify(args) -> int:
    ld = _ldata(args)
    res = verify_one(ld, Ks=tuple(args.K), delta=args.delta)
    emit(args, {"D": format_poly(ld.D), **res})
    return EXIT_BREACH if res["breaches"] else EXIT_OK


def cmd_symbol(args) -> int:
    try:
        A, Q = parse_poly(args.A, args.q), parse_poly(args.Q, args.q)
        fast = jacobi(A, Q)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    slow = jacobi_by_factoring(A, Q)
    emit(args, {"A": format_poly(A), "Q": format_poly(Q), "q": args.q, "symbol": fast,
                "by_factoring": slow})
    return EXIT_OK if fast == slow else EXIT_BREACH


def cmd_report(args) -> int:
    try:
        rep = report.build_report(args.paths)
    except (ValueError, FileNotFoundError) as exc:
        raise UsageError(str(exc)) from exc
    text = report.render(rep, "csv" if args.format == "csv" else "markdown")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        print(text)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", type=int, default=3, help="field size (odd prime)")
    common.add_argument("--g", type=int, help="genus; D has degree 2g+1")
    common.add_argument("--D", help='explicit D, e.g. "x^3+2*x+1" or "[1,2,0,1]"')
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1, help="worker cap")
    common.add_argument("--out", help="write to this file instead of stdout")
    common.add_argument("--format", choices=["json", "csv", "table"], default="json")

    p = argparse.ArgumentParser(prog="hyperell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(fn=fn)
        return sp

    add("lpoly", cmd_lpoly, "coefficients and zeros of L(u, chi_D)")
    sp = add("zeros", cmd_zeros, "zeros as angles theta_j")
    sp.add_argument("--from-file", help="JSON written by `lpoly`")
    sp = add("trace-check", cmd_trace_check, "trace formula defects")
    sp.add_argument("--nmax", type=int)
    sp.add_argument("--tol", type=float, default=1e-8)
    sp = add("hybrid-check", cmd_hybrid_check, "L = P_K Z_K at sample points")
    sp.add_argument("--K", type=_int_list, default=[0, 1, 2, 5, 10])
    sp.add_argument("--grid", type=int, default=16, help="points per set (interior, boundary)")
    sp.add_argument("--tol", type=float, default=1e-9)
    for name, fn, help_ in (("arg", cmd_arg, "S, S_K, N and f_K on a theta grid"),
                            ("count", cmd_count, "N(theta) against 2g theta + S(theta)")):
        sp = add(name, fn, help_)
        sp.add_argument("--theta", type=_float_list)
        sp.add_argument("--grid", type=int, default=64)
        sp.add_argument("--K", type=_int_list, default=[4])
    sp = add("fmodel-zeros", cmd_fmodel_zeros, "zeros of F_K by level crossings")
    sp.add_argument("--K", type=_int_list, default=[8])
    sp.add_argument("--emit", choices=["json", "csv"], default="json")
    sp = add("clustering-check", cmd_clustering_check, "F_K zeros cluster near the theta_j")
    sp.add_argument("--K", type=_int_list, default=[64])
    sp.add_argument("--delta", type=float, default=0.02)
    sp = add("ensemble", cmd_ensemble, "batch run over sampled D, JSON lines")
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--K", type=_int_list, default=[4, 8, 16])
    sp.add_argument("--delta", type=float, default=0.02)
    sp = add("verify", cmd_verify, "full invariant suite on one D")
    sp.add_argument("--K", type=_int_list, default=[4, 8, 16])
    sp.add_argument("--delta", type=float, default=0.02)
    sp = add("symbol", cmd_symbol, "Jacobi symbol (A/Q)")
    sp.add_argument("--A", required=True)
    sp.add_argument("--Q", required=True)
    sp = sub.add_parser("report", help="aggregate JSON-lines batch files")
    sp.set_defaults(fn=cmd_report)
    sp.add_argument("paths", nargs="*")
    sp.add_argument("--format", choices=["markdown", "csv"], default="markdown")
    sp.add_argument("--out")
    return p


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if getattr(args, "threads", 1) < 1:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hyperell: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"hyperell: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ArithmeticError as exc:
        print(f"hyperell: invariant breach: {exc}", file=sys.stderr)
        return EXIT_BREACH


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()


__all__ = ["run", "main", "build_parser", "verify_one"]
