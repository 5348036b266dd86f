"""Command-line surface.

Commands
--------
dh         one double Hurwitz polynomial
ph         one pruned double Hurwitz polynomial
table      regenerate a golden reference table (A or B) and diff it
oracle     compare the factorization count against the recursion
tr-verify  expand a correlation form at the origin against the table
qc-verify  exact quantum-curve residual check
loop-check sigma-symmetrization diagnostics for a correlation form
phi-fit    decompose one form in the centered phi basis

Exit codes: 0 pass, 1 mismatch or failed verdict, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import mpmath

from .cutjoin import DHTable
from .curve import CurveSpec, SpectralCurve, f01_check, f02_check
from .oracle import FactorizationOracle
from .pruning import PruningTransform
from .quantum import WaveFunction, apply_quantum_curve, semiclassical_check
from .tables import (GOLDEN_D_MAX, diff_table, load_golden, render_polynomial_s1,
                     render_rows_csv, render_rows_json, render_rows_text)
from .toprec import RecursionEngine
from .weightpoly import parse_rational

__all__ = ["main"]


def _parse_mu(text: str) -> tuple[int, ...]:
    try:
        mu = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise SystemExit(2)
    if not mu or any(p < 1 for p in mu):
        print("error: mu must be a comma-separated list of positive integers",
              file=sys.stderr)
        raise SystemExit(2)
    return mu


def _parse_q(text: str, d: int) -> list[Fraction]:
    parts = [parse_rational(p) for p in text.split(",")]
    if len(parts) != d:
        print(f"error: expected {d} weights, got {len(parts)}", file=sys.stderr)
        raise SystemExit(2)
    return parts


def _curve_from_args(args) -> SpectralCurve:
    q = _parse_q(args.q, args.d)
    spec = CurveSpec.make(args.d, q, parse_rational(args.s),
                          precision=args.precision)
    return SpectralCurve(spec)


def _add_curve_flags(parser, default_q="1,1", default_d=2):
    parser.add_argument("--d", type=int, default=default_d,
                        help="degree of the weight polynomial P")
    parser.add_argument("--q", default=default_q,
                        help="comma-separated rational weights q_1..q_d")
    parser.add_argument("--s", default="1/10", help="rational weight s")
    parser.add_argument("--precision", type=int, default=256,
                        help="working precision in bits")
    parser.add_argument("--order", type=int, default=0,
                        help="extra truncation orders on top of the default "
                             "local window 2(6g+2n-4)+8")


def _emit_report(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(payload, indent=1))
    else:
        for key, value in payload.items():
            if key == "rows":
                for row in value:
                    print("  " + " ".join(f"{k}={v}" for k, v in row.items()))
            else:
                print(f"{key}: {value}")


def _nstr(x, digits=12) -> str:
    return mpmath.nstr(mpmath.mpf(abs(x)), digits)


# ----------------------------------------------------------------------
# commands


def cmd_dh(args) -> int:
    mu = _parse_mu(args.mu)
    d = args.d or sum(mu)
    table = DHTable(d)
    poly = table.dh(args.g, mu)
    if args.format == "json":
        print(json.dumps({"g": args.g, "mu": list(mu), "d": d,
                          "poly": poly.to_json()}, indent=1))
    elif args.s_poly:
        print(poly.pretty(show_s=True))
    else:
        print(render_polynomial_s1(poly))
    return 0


def cmd_ph(args) -> int:
    mu = _parse_mu(args.mu)
    d = args.d or sum(mu)
    transform = PruningTransform(DHTable(d))
    poly = transform.ph(args.g, mu)
    if args.format == "json":
        print(json.dumps({"g": args.g, "mu": list(mu), "d": d, "pruned": True,
                          "poly": poly.to_json()}, indent=1))
    elif args.s_poly:
        print(poly.pretty(show_s=True))
    else:
        print(render_polynomial_s1(poly))
    return 0


def cmd_table(args) -> int:
    name = args.table.upper()
    if name not in ("A", "B"):
        print("error: table must be A or B", file=sys.stderr)
        return 2
    table = DHTable(GOLDEN_D_MAX)
    rows = []
    if name == "A":
        for row in load_golden("A"):
            rows.append((row.g, row.mu, table.dh(row.g, row.mu)))
    else:
        transform = PruningTransform(table)
        for row in load_golden("B"):
            rows.append((row.g, row.mu, transform.ph(row.g, row.mu)))
    if args.format == "json":
        print(render_rows_json(rows))
    elif args.format == "csv":
        print(render_rows_csv(rows))
    else:
        print(render_rows_text(rows))
    diff = diff_table(name, table)
    if diff.ok:
        print(f"table {name}: {diff.row_count} rows, all equal", file=sys.stderr)
        return 0
    for g, mu, want, got in diff.mismatches:
        print(f"MISMATCH at g={g} mu={mu}: expected {want}, got {got}",
              file=sys.stderr)
    return 1


def cmd_oracle(args) -> int:
    mu = _parse_mu(args.mu)
    d = args.d or sum(mu)
    oracle = FactorizationOracle(d, degree_cap=args.cap)
    report = oracle.compare(args.g, mu, DHTable(d))
    counts = [{"lambda": list(lam), "m": m, "count": count}
              for (lam, m), count in sorted(report.counts.items())]
    if args.format == "json":
        print(json.dumps({
            "g": args.g, "mu": list(mu), "equal": report.equal,
            "counts": counts,
            "oracle": report.oracle_poly.to_json(),
            "recursion": report.recursion_poly.to_json(),
        }, indent=1))
    else:
        for entry in counts:
            print(f"  lambda={entry['lambda']} m={entry['m']} N={entry['count']}")
        print(f"oracle polynomial:    {render_polynomial_s1(report.oracle_poly)}")
        print(f"recursion polynomial: {render_polynomial_s1(report.recursion_poly)}")
        print("EQUAL" if report.equal else "NOT EQUAL")
    return 0 if report.equal else 1


def cmd_tr_verify(args) -> int:
    curve = _curve_from_args(args)
    engine = RecursionEngine(curve, extra_order=args.order)
    tol = mpmath.mpf(args.tolerance) if args.tolerance else None
    if (args.g, args.n) == (0, 2):
        report = engine.omega02_origin_check(args.mu_max, tolerance=tol)
    else:
        report = engine.verify_conjecture(args.g, args.n, args.mu_max,
                                          tolerance=tol)
    rows = [{"mu": list(row.mu), "predicted": str(row.predicted),
             "expected": str(row.expected),
             "rel_residual": _nstr(row.rel_residual),
             "verdict": "PASS" if row.ok else "FAIL"} for row in report.rows]
    payload = {"g": args.g, "n": args.n, "mu_max": args.mu_max,
               "tolerance": _nstr(report.tolerance),
               "max_residual": _nstr(report.max_residual),
               "verdict": "PASS" if report.ok else "FAIL", "rows": rows}
    if args.stability:
        stab = engine.stability_report(args.g, args.n)
        payload["stability"] = {
            "precision_drift": _nstr(stab["precision_drift"]),
            "truncation_drift": _nstr(stab["truncation_drift"]),
            "tolerance": _nstr(stab["precision_tol"]),
            "verdict": "PASS" if (stab["precision_drift"] < stab["precision_tol"]
                                  and stab["truncation_drift"] < stab["precision_tol"])
                       else "FAIL",
        }
    _emit_report(payload, args.format)
    ok = report.ok and (not args.stability or payload["stability"]["verdict"] == "PASS")
    return 0 if ok else 1


def cmd_qc_verify(args) -> int:
    table = DHTable(args.d)
    wf = WaveFunction(table, K=args.K, L=args.L)
    report = apply_quantum_curve(wf)
    log_ok = wf.log_matches_direct_sum()
    semi_ok = semiclassical_check(args.d)
    payload = {
        "d": args.d, "K": args.K, "L": args.L,
        "cells_checked": len(report.checked_cells),
        "nonzero_residuals": len(report.residuals),
        "log_consistency": "PASS" if log_ok else "FAIL",
        "semiclassical": "PASS" if semi_ok else "FAIL",
        "verdict": "PASS" if (report.ok and log_ok and semi_ok) else "FAIL",
    }
    if args.dump_residuals and report.residuals:
        payload["residuals"] = {
            f"x^{k} hbar^{j}": poly.to_json()
            for (k, j), poly in sorted(report.residuals.items())
        }
    _emit_report(payload, args.format)
    return 0 if payload["verdict"] == "PASS" else 1


def cmd_loop_check(args) -> int:
    curve = _curve_from_args(args)
    engine = RecursionEngine(curve, extra_order=args.order)
    report = engine.loop_equation_check(args.g, args.n)
    payload = {"g": args.g, "n": args.n,
               "worst_principal_part": _nstr(report.worst),
               "tolerance": _nstr(report.tolerance),
               "verdict": "PASS" if report.ok else "FAIL"}
    _emit_report(payload, args.format)
    return 0 if report.ok else 1


def cmd_phi_fit(args) -> int:
    curve = _curve_from_args(args)
    engine = RecursionEngine(curve, extra_order=args.order)
    report = engine.phi_decompose(args.g, args.n, m_cap=args.m_cap)
    coeffs = []
    with mpmath.workprec(curve.prec):
        scale = max((abs(c) for c in report.coefficients.values()),
                    default=mpmath.mpf(0))
        for combo, value in sorted(report.coefficients.items()):
            if scale and abs(value) < scale * mpmath.mpf(10) ** -40:
                continue
            label = " * ".join(f"phi[{i},{m}]" for (i, m) in combo)
            coeffs.append({"basis": label, "coefficient": str(value)})
    payload = {"g": args.g, "n": args.n, "m_cutoff": report.m_cutoff,
               "residual": _nstr(report.residual),
               "tolerance": _nstr(report.tolerance),
               "verdict": "PASS" if report.ok else "FAIL",
               "rows": coeffs}
    _emit_report(payload, args.format)
    return 0 if report.ok else 1


def cmd_closed_forms(args) -> int:
    r1 = f01_check(args.d, args.order)
    r2 = f02_check(args.d, min(args.order, 6))
    payload = {
        "f01": "PASS" if r1.ok else f"FAIL ({r1.detail})",
        "f02": "PASS" if r2.ok else f"FAIL ({r2.detail})",
        "verdict": "PASS" if (r1.ok and r2.ok) else "FAIL",
    }
    _emit_report(payload, args.format)
    return 0 if r1.ok and r2.ok else 1


# ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dhtr",
        description="Double Hurwitz numbers, pruning, and topological "
                    "recursion checks on x = z exp(-s P(z))",
    )
    parser.add_argument("--threads", type=int,
                        default=int(os.environ.get("DHTR_THREADS", "1")),
                        help="worker threads (accepted for compatibility; "
                             "the engines are sequential and output is "
                             "identical for any value)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dh", help="one double Hurwitz polynomial")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--mu", required=True, help="comma-separated parts")
    p.add_argument("--d", type=int, default=0,
                   help="largest tracked vertex weight (default: sum of mu)")
    p.add_argument("--s-poly", action="store_true",
                   help="show the full s-grading instead of s = 1")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_dh)

    p = sub.add_parser("ph", help="one pruned double Hurwitz polynomial")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--s-poly", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_ph)

    p = sub.add_parser("table", help="regenerate golden table A or B and diff")
    p.add_argument("table", help="A (double Hurwitz) or B (pruned)")
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("oracle", help="factorization count vs recursion")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--mu", required=True)
    p.add_argument("--d", type=int, default=0)
    p.add_argument("--cap", type=int, default=6, help="degree cap")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("tr-verify", help="origin expansion vs exact table")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu-max", type=int, default=4)
    p.add_argument("--tolerance", default=None,
                   help="relative residual bound (default 10^-prec/4)")
    p.add_argument("--stability", action="store_true",
                   help="also re-run at doubled precision and +4 orders")
    _add_curve_flags(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_tr_verify)

    p = sub.add_parser("qc-verify", help="exact quantum-curve residuals")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--K", type=int, default=6, help="x-truncation")
    p.add_argument("--L", type=int, default=2, help="hbar-truncation")
    p.add_argument("--dump-residuals", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_qc_verify)

    p = sub.add_parser("loop-check", help="sigma-symmetrization diagnostics")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    _add_curve_flags(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_loop_check)

    p = sub.add_parser("phi-fit", help="decompose a form in the phi basis")
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m-cap", type=int, default=6)
    _add_curve_flags(p)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_phi_fit)

    p = sub.add_parser("closed-forms", help="exact (0,1)/(0,2) identities")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--order", type=int, default=10)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_closed_forms)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
