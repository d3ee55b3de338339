"""Command-line interface.

Exit codes: 0 success, 1 usage / input / resource-limit error, 2 a checked
inequality or identity was violated.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import bounds as B
from . import definetti as D
from .errors import DomainError, PermafinettiError, ResourceLimitError
from .expansion import analyze, g_terms
from .io import dumps, read_matrix, read_model
from .permanent import injection_count, per_normalized, permanent
from .verify import SUITES, run_suite

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def build_parser():
    parser = _Parser(prog="permafinetti", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("constants", help="table of C_l, x_l and kappa upper bounds")
    p.add_argument("--lmax", type=int, default=3)
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("permanent", help="exact permanent of a matrix file")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=("naive", "genfunc", "auto"), default="auto")
    p.add_argument("--normalized", action="store_true", help="only report (N-n)!/N! Per Z")

    p = sub.add_parser("expand", help="expansion terms, approximation error and bounds")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, required=True)

    p = sub.add_parser("definetti", help="distances between P, Q1, Q2 for a model file")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000, help="random functions for the sup lower bound")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")

    p = sub.add_parser("verify", help="run a seeded property campaign")
    p.add_argument("suite", choices=sorted(SUITES))
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--nmax", type=int)
    p.add_argument("--report")
    p.add_argument("--timing", action="store_true", help="include elapsed_ms (breaks byte-identical output)")
    return parser


def parse_args(argv):
    return build_parser().parse_args(argv)


def _emit(payload, report=None):
    text = dumps(payload) + "\n"
    sys.stdout.write(text)
    if report:
        Path(report).write_text(text)


def _cmd_constants(args):
    rows = B.constants_table(args.lmax)
    if args.format == "csv":
        sys.stdout.write(B.constants_to_csv(rows))
    else:
        _emit({"rows": [{"l": r.l, "C_l": r.C, "x_l": r.x, "kappa_upper_l": r.kappa_upper} for r in rows]})
    return EXIT_OK


def _cmd_permanent(args):
    Z = read_matrix(args.input)
    N, n = Z.shape
    start = time.perf_counter()
    normalized = per_normalized(Z, method=args.method)
    out = {"N": N, "n": n, "method": args.method, "normalized_permanent": normalized}
    if not args.normalized:
        out["permanent"] = permanent(Z, method=args.method)
        out["terms"] = injection_count(N, n)
    out["elapsed_ms"] = int(round(1000 * (time.perf_counter() - start)))
    _emit(out)
    return EXIT_OK


def _try(fn, *a):
    try:
        return fn(*a)
    except DomainError as exc:
        return {"not_applicable": str(exc)}


def _cmd_expand(args):
    Z = read_matrix(args.input)
    p = analyze(Z)
    order = args.order
    if not 1 <= order <= p.n:
        raise DomainError(f"--order must lie in [1, n={p.n}]")
    G = g_terms(Z, order, params=p)
    H = complex(G.sum())
    target = per_normalized(Z)
    error = abs(target - H)
    bounds = {
        "main": _try(B.err_bound_main, p, order),
        "kappa": _try(B.err_bound_kappa, p, order),
        "h1": _try(B.err_bound_h1, p),
        "h2": _try(B.err_bound_h2, Z),
        "g2": _try(lambda q: dict(zip(("refined", "coarse"), B.bound_g2(q))), p),
        "g3": _try(B.bound_g3, Z),
        "bobkov": B.bobkov_bound(p.n, p.N),
    }
    checks = {}
    # bobkov and h1 bound the first-order error, h2 the second-order one.
    applicable = ["main", "kappa"] + {1: ["bobkov", "h1"], 2: ["h2"]}.get(order, [])
    for key in applicable:
        if isinstance(bounds[key], float):
            checks[key] = error <= bounds[key] + 1e-12 * (1 + bounds[key])
    out = {
        "N": p.N,
        "n": p.n,
        "order": order,
        "alpha": p.alpha,
        "beta": p.beta,
        "gamma": p.gamma,
        "unit_bounded": p.unit_bounded,
        "G": list(G),
        "H": H,
        "normalized_permanent": target,
        "error": error,
        "bounds": bounds,
        "bound_holds": checks,
    }
    _emit(out)
    return EXIT_OK if all(checks.values()) else EXIT_VIOLATION


def _cmd_definetti(args):
    model = read_model(args.model)
    n = args.n
    P, Q1 = D.exact_law(model, n), D.q1(model, n)
    b = D.df_bounds(n, model.N, model.d)
    out = {
        "model": model.to_dict(),
        "n": n,
        "tv_P_Q1": D.tv(P, Q1),
        "pv_P_Q1": D.pv(P, Q1),
        "sup_lower_P_Q1": D.sup_fn_lower(P, Q1, args.trials, args.seed),
    }
    checks = {
        "tv_P_Q1<=dm_exact": out["tv_P_Q1"] <= b.dm_exact + 1e-12,
        "tv_P_Q1<=dm_quad": out["tv_P_Q1"] <= b.dm_quad + 1e-12,
        "tv_P_Q1<=finite_s": out["tv_P_Q1"] <= b.finite_s + 1e-12,
        "pv_P_Q1<=bobkov": out["pv_P_Q1"] <= b.bobkov + 1e-12,
    }
    if b.first_order is not None:
        checks["pv_P_Q1<=first_order"] = out["pv_P_Q1"] <= b.first_order + 1e-12
        checks["sup_lower_P_Q1<=first_order"] = out["sup_lower_P_Q1"] <= b.first_order + 1e-12
    if n >= 2:
        Q2 = D.q2(model, n)
        out["tv_P_Q2"] = D.tv(P, Q2)
        out["pv_P_Q2"] = D.pv(P, Q2)
        out["sup_lower_P_Q2"] = D.sup_fn_lower(P, Q2, args.trials, args.seed)
        out["max_abs_P_minus_Q2"] = float(np.abs(P.values - Q2.values).max())
        if b.second_order is not None:
            checks["pv_P_Q2<=second_order"] = out["pv_P_Q2"] <= b.second_order + 1e-12
            checks["sup_lower_P_Q2<=second_order"] = out["sup_lower_P_Q2"] <= b.second_order + 1e-12
    out["sup_lower_note"] = "sup over product functions is reported as a randomized lower bound"
    out["bounds"] = b.to_dict()
    out["bound_holds"] = checks
    _emit(out, args.report)
    return EXIT_OK if all(checks.values()) else EXIT_VIOLATION


def _cmd_verify(args):
    report = run_suite(args.suite, args.trials, args.seed, nmax=args.nmax, timing=args.timing)
    _emit(report.to_dict(), args.report)
    return EXIT_VIOLATION if report.violations else EXIT_OK


COMMANDS = {
    "constants": _cmd_constants,
    "permanent": _cmd_permanent,
    "expand": _cmd_expand,
    "definetti": _cmd_definetti,
    "verify": _cmd_verify,
}


def execute(args):
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"resource limit: {exc} (caps can be raised via PERMAFINETTI_CAPS)", file=sys.stderr)
    except (PermafinettiError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return EXIT_ERROR


def main(argv=None):
    try:
        args = parse_args(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_ERROR
    return execute(args)


if __name__ == "__main__":
    sys.exit(main())
