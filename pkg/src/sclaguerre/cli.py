"""Command-line front end: ``sclaguerre <subcommand> ...``.

Exit codes: 0 when every selected check passes, 1 when one fails (the
failing rows go to stderr), 2 on bad usage.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .asymptotics import QUANTITIES, compare_to_exact, exact_values, expansion, extract_constants, series_eval
from .exceptions import SCLaguerreError
from .fluid import (density, endpoint_residuals, lagrange_multiplier, normalization_residual, solve_endpoints,
                    supplementary_residual)
from .identities import IDENTITIES, identity_reports
from .ladder import sample_points
from .moments import WeightParams, moment, moment_table
from .numerics import PrecisionContext
from .opcore import recurrence_table
from .output import emit

DIGITS_ENV = "SCLAGUERRE_DIGITS"

# smallest n at which each identity is stated
_MIN_N = {"sigma-discrete": 1, "p-difference": 1, "ladder": 1, "toda": 1}
_CONTINUOUS = {"riccati", "painleve4", "chazy", "sigma-continuous", "toda"}


class _UsageError(Exception):
    pass


def _default_digits():
    raw = os.environ.get(DIGITS_ENV)
    if raw is None:
        return 50
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"{DIGITS_ENV}={raw!r} is not an integer")


def _n_list(text):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def build_parser():
    p = _Parser(prog="sclaguerre", description="Semi-classical Laguerre orthogonal polynomial laboratory.")
    p.add_argument("--version", action="version", version=f"sclaguerre {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def common(sp):
        sp.add_argument("--lambda", dest="lam", default="1", help="exponent lambda (decimal string)")
        sp.add_argument("--t", default="0", help="linear coefficient t (decimal string)")
        sp.add_argument("--digits", type=int, default=None, help=f"working digits (default ${DIGITS_ENV} or 50)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", default=None, help="write to this path instead of stdout")

    sp = sub.add_parser("moments", help="moments mu_0 .. mu_jmax")
    common(sp)
    sp.add_argument("--jmax", type=int, required=True)
    sp.add_argument("--mode", choices=("formula", "quadrature"), default="formula")
    sp.add_argument("--seed", type=int, default=0, help="seed of the quadrature spot-check")

    sp = sub.add_parser("recurrence", help="recurrence table alpha, beta, h, p, ln D")
    common(sp)
    sp.add_argument("--nmax", type=int, required=True)
    sp.add_argument("--mode", choices=("hankel", "stieltjes"), default="hankel")
    sp.add_argument("--cross-check", action="store_true", help="also build the other route and compare")

    sp = sub.add_parser("verify", help="identity residual reports")
    common(sp)
    sp.add_argument("--identity", choices=IDENTITIES + ("all",), default="all")
    sp.add_argument("--nmax", type=int, default=None)
    sp.add_argument("--nmin", type=int, default=0)
    sp.add_argument("--n-list", type=_n_list, default=None, help="explicit indices, e.g. 1,3,7,12")
    sp.add_argument("--fd-step", default=None, help="base finite-difference step")
    sp.add_argument("--tol", default=None, help="override every tolerance")
    sp.add_argument("--seed", type=int, default=None, help="seed for ODE / ladder sample points")
    sp.add_argument("--mode", choices=("hankel", "stieltjes"), default="hankel")

    sp = sub.add_parser("fluid", help="Coulomb-fluid endpoints, density samples and residuals")
    common(sp)
    sp.add_argument("--n", default="50", help="fluid size (real)")
    sp.add_argument("--samples", type=int, default=10)
    sp.add_argument("--no-pv", action="store_true", help="skip the principal-value quadrature column")

    sp = sub.add_parser("asymptotics", help="large-n series against exact values")
    common(sp)
    sp.add_argument("--quantity", choices=QUANTITIES, default="alpha")
    sp.add_argument("--n-list", type=_n_list, default=[200, 400, 800, 1600])
    sp.add_argument("--through", default=None, help="lowest kept exponent, e.g. --through=-3 or --through=-5/2")
    sp.add_argument("--constants", action="store_true", help="also extrapolate C1 and C2 from ln D_n")
    sp.add_argument("--constants-n-list", type=_n_list, default=None)
    return p


def _ctx(args):
    digits = args.digits if args.digits is not None else _default_digits()
    fd = getattr(args, "fd_step", None)
    try:
        return PrecisionContext(digits, fd_step=fd)
    except SCLaguerreError as exc:
        raise _UsageError(str(exc))


def _config(args, ctx):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("output",)}
    cfg["digits"] = ctx.digits
    return cfg


def _params(args):
    try:
        return WeightParams(args.lam, args.t)
    except (SCLaguerreError, ValueError) as exc:
        raise _UsageError(str(exc))


def cmd_moments(args, ctx):
    params = _params(args)
    if args.mode == "formula":
        values = moment_table(args.jmax, params, ctx, seed=args.seed).values
    else:
        values = [moment(j, params, ctx, "quadrature") for j in range(args.jmax + 1)]
    rows = [{"j": j, "mu": v} for j, v in enumerate(values)]
    return rows, ["j", "mu"], {"pass": True}, True


def cmd_recurrence(args, ctx):
    params = _params(args)
    table = recurrence_table(args.nmax, params, ctx, mode=args.mode, cross_check=args.cross_check)
    cols = ["n", "alpha", "beta", "h", "p", "lnD"]
    return table.rows(), cols, {"mode": args.mode, "pass": True}, True


def _verify_indices(args, name):
    if args.n_list is not None:
        return [n for n in args.n_list if n >= _MIN_N.get(name, 0)]
    if args.nmax is None:
        raise _UsageError("verify needs --nmax or --n-list")
    return list(range(max(args.nmin, _MIN_N.get(name, 0)), args.nmax + 1))


def cmd_verify(args, ctx):
    params = _params(args)
    names = IDENTITIES if args.identity == "all" else (args.identity,)
    todo = [(name, n) for name in names for n in _verify_indices(args, name)]
    top = max((n for _, n in todo), default=0)
    table = recurrence_table(top + 1, params, ctx, mode=args.mode)
    reports = []
    for name, n in todo:
        if name in ("ladder", "ode", "compatibility") or name in _CONTINUOUS:
            params.require_positive_lambda(name)
        xs = sample_points(table, n, seed=args.seed) if name in ("ode", "ladder") else None
        reps = identity_reports(name, n, params, ctx, tol=args.tol, table=table, x_samples=xs, mode=args.mode)
        reports.append((name, n, reps))
    ok = all(r.passed for _, _, reps in reports for r in reps)
    if args.identity != "all":
        labels = [r.identity_name for r in reports[0][2]] if reports else []
        cols = ["n"] + labels + ["pass"]
        rows = []
        for _, n, reps in reports:
            row = {"n": n, "pass": all(r.passed for r in reps)}
            row.update({r.identity_name: r.residual for r in reps})
            rows.append(row)
    else:
        cols = ["identity", "n", "check", "residual", "derivative_error", "tolerance", "pass"]
        rows = [{"identity": name, "n": n, "check": r.identity_name, "residual": r.residual,
                 "derivative_error": r.derivative_error_estimate, "tolerance": r.tolerance, "pass": r.passed}
                for name, n, reps in reports for r in reps]
    failed = sum(1 for _, _, reps in reports for r in reps if not r.passed)
    return rows, cols, {"checks": sum(len(r) for _, _, r in reports), "failed": failed, "pass": ok}, ok


def cmd_fluid(args, ctx):
    params = _params(args)
    sol = solve_endpoints(args.n, params, ctx)
    mp = ctx.mp
    e3, e4 = endpoint_residuals(sol)
    norm = normalization_residual(sol)
    sup = supplementary_residual(sol)
    A = lagrange_multiplier(sol)
    a, b = sol.a, sol.b
    rows = []
    worst = mp.zero
    for k in range(args.samples):
        x = a + (b - a) * (k + mp.mpf(1) / 2) / args.samples
        cf = density(x, sol, ctx, "closed_form")
        row = {"x": x, "closed_form": cf}
        if not args.no_pv:
            pv = density(x, sol, ctx, "pv_quadrature")
            row["pv_quadrature"] = pv
            row["rel_diff"] = abs(pv - cf) / cf
            worst = max(worst, row["rel_diff"])
        rows.append(row)
    eq_tol = mp.mpf(10) ** (10 - ctx.digits)
    checks = {"eq3": e3 < eq_tol, "eq4": e4 < eq_tol, "normalization": norm < mp.mpf("1e-10"),
              "supplementary": sup < mp.mpf("1e-10"), "density_modes": worst < ctx.target_tol}
    ok = all(checks.values())
    summary = {"a": a, "b": b, "X": sol.X, "Y": sol.Y, "A": A, "eq3_residual": e3, "eq4_residual": e4,
               "normalization_residual": norm, "supplementary_residual": sup, "pass": ok,
               "failed_checks": [k for k, v in checks.items() if not v]}
    cols = ["x", "closed_form"] + ([] if args.no_pv else ["pv_quadrature", "rel_diff"])
    return rows, cols, summary, ok


def cmd_asymptotics(args, ctx):
    params = _params(args)
    spec = expansion(args.quantity, params, ctx, args.through)
    fit = compare_to_exact(args.quantity, args.n_list, params, spec.truncation_order, ctx)
    exact = exact_values(args.quantity, args.n_list, params, ctx)
    rows = [{"n": n, "exact": e, "series": series_eval(spec, n, params, ctx), "error": err}
            for n, e, err in zip(args.n_list, exact, fit.errors)]
    summary = {"quantity": args.quantity, "through": str(spec.truncation_order),
               "fitted_exponent": f"{fit.fitted_exponent:.4f}", "expected_exponent": str(fit.expected_exponent),
               "fit_pass": fit.passed}
    ok = fit.passed
    if args.constants:
        ns = args.constants_n_list or list(range(100, max(args.n_list) + 1, 100))
        est = extract_constants(ns, params, ctx)
        d1, d2 = est.significant_digits(ctx)
        summary.update({"C1_est": est.C1_est, "C1_closed": est.C1_closed, "C2_est": est.C2_est,
                        "C2_closed": est.C2_closed, "C1_digits": f"{d1:.2f}", "C2_digits": f"{d2:.2f}",
                        "constants_pass": d1 >= 8 and d2 >= 6})
        ok = ok and d1 >= 8 and d2 >= 6
    summary["pass"] = ok
    return rows, ["n", "exact", "series", "error"], summary, ok


COMMANDS = {"moments": cmd_moments, "recurrence": cmd_recurrence, "verify": cmd_verify,
            "fluid": cmd_fluid, "asymptotics": cmd_asymptotics}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise _UsageError("a subcommand is required")
        ctx = _ctx(args)
        rows, cols, summary, ok = COMMANDS[args.command](args, ctx)
    except _UsageError as exc:
        parser.print_usage(stderr)
        print(f"sclaguerre: error: {exc}", file=stderr)
        return 2
    except SCLaguerreError as exc:
        print(f"sclaguerre: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    text = emit(rows, cols, _config(args, ctx), summary, args.format, version=__version__)
    if args.output:
        try:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"sclaguerre: cannot write {args.output}: {exc}", file=stderr)
            return 2
    else:
        stdout.write(text)
    if not ok:
        failing = [r for r in rows if r.get("pass") is False]
        print(f"sclaguerre: {args.command} checks failed", file=stderr)
        if failing:
            stderr.write(emit(failing, cols, _config(args, ctx), None, "csv", version=__version__))
        return 1
    return 0


def main():  # console-script entry point
    sys.exit(run())
