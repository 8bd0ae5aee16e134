"""``dissext`` command line.

Exit status: 0 dissipative/accretive, 1 not, 2 boundary, 3 domain violation,
4 input or schema error.  The JSON report goes to stdout, a one-line summary
to stderr.
"""

import argparse
import csv
import io as _io
import math
import sys
import time

import jsonschema

from . import criterion, first_order, grid, schrodinger
from .errors import DomainViolation, TruncationTooSmall
from .funcspace import FuncExpr, NonIntegrableSingularity
from .io import (InputError, build_first_order, build_schrodinger, dumps_report,
                 loads_json, make_report, parse_instance, potential_from_json,
                 read_json, validate)
from .linalg import StrictPositivityViolated

EXIT_OK, EXIT_NOT, EXIT_BOUNDARY, EXIT_DOMAIN, EXIT_INPUT = 0, 1, 2, 3, 4

_DECISION_EXIT = {
    criterion.DISSIPATIVE: EXIT_OK,
    schrodinger.ACCRETIVE: EXIT_OK,
    criterion.NOT_DISSIPATIVE: EXIT_NOT,
    schrodinger.NOT_ACCRETIVE: EXIT_NOT,
    criterion.BOUNDARY: EXIT_BOUNDARY,
}

SCAN_COLUMNS = ("gamma", "c", "lhs", "rhs", "margin", "decision", "message")


class _Outcome:
    def __init__(self, result, code, summary, tolerances, echo):
        self.result, self.code, self.summary = result, code, summary
        self.tolerances, self.echo = tolerances, echo


def _pick(args, tol, name, default=None):
    val = getattr(args, name, None)
    if val is not None:
        return val
    return tol.get(name, default)


def _load_instance(args, kind, section):
    """Instance document from ``FILE`` or from inline flags."""
    if args.file:
        doc = read_json(args.file)
        inst = parse_instance(doc)
        if inst.kind != kind:
            raise InputError("/kind", f"expected {kind!r}, got {inst.kind!r}")
        return inst.payload, inst.tolerances, doc
    if kind == "first-order":
        if args.gamma is None or args.v is None:
            raise InputError("", "give an instance file or --gamma and --v")
        body = {"gamma": args.gamma, "v": loads_json(args.v, "/first_order/v"),
                "ell": loads_json(args.ell, "/first_order/ell") if args.ell else []}
    else:
        if args.potential is None or args.v is None:
            raise InputError("", "give an instance file or --potential and --v")
        body = {"potential": loads_json(args.potential, "/schrodinger/potential"),
                "v": loads_json(args.v, "/schrodinger/v"),
                "ell": loads_json(args.ell, "/schrodinger/ell") if args.ell else []}
    doc = {"schema_version": 1, "kind": kind, section: body}
    validate(doc)
    build = build_first_order if kind == "first-order" else build_schrodinger
    return build(body), {}, doc


# ----------------------------------------------------------------- commands

def cmd_check_matrix(args):
    if not args.file:
        raise InputError("", "check matrix needs an instance file")
    doc = read_json(args.file)
    inst = parse_instance(doc)
    if inst.kind != "matrix":
        raise InputError("/kind", f"expected 'matrix', got {inst.kind!r}")
    eps = _pick(args, inst.tolerances, "epsilon")
    rep = criterion.criterion_check(inst.payload["op"], inst.payload["ext"], eps)
    tols = {"epsilon": rep.epsilon_used, "boundary_rtol": criterion.BOUNDARY_RTOL,
            "oracle_rtol": criterion.ORACLE_RTOL}
    summary = (f"{rep.decision}: criterion margin {rep.criterion_margin:.6g}, "
               f"oracle margin {rep.oracle_margin:.6g}, agreement {rep.agreement}")
    return _Outcome(rep.to_dict(), _DECISION_EXIT[rep.decision], summary, tols, doc)


def cmd_check_first_order(args):
    p, tol, doc = _load_instance(args, "first-order", "first_order")
    method = args.method
    rep = first_order.dissipativity_check(p["v"], p["ell"], p["gamma"], method)
    tols = {"boundary_rtol": first_order.BOUNDARY_RTOL, "band": rep.tolerance, "method": method}
    summary = f"{rep.decision}: lhs {rep.lhs:.6g}, rhs {rep.rhs:.6g}, margin {rep.margin:.6g}"
    return _Outcome(rep.to_dict(), _DECISION_EXIT[rep.decision], summary, tols, doc)


def cmd_check_schrodinger(args):
    p, tol, doc = _load_instance(args, "schrodinger", "schrodinger")
    pot = p["potential"]
    t = _pick(args, tol, "tol", 1e-10)
    L = _pick(args, tol, "truncation_L") or schrodinger.default_truncation(pot)
    eta = schrodinger.solve_eta(pot, L, t)
    rep = schrodinger.accretive_check(p["v"], p["ell"], pot, eta=eta)
    tols = {"tol": t, "truncation_L": L, "boundary_rtol": schrodinger.BOUNDARY_RTOL,
            "band": rep.tolerance}
    result = rep.to_dict()
    result["eta_seed_sensitivity"] = eta.seed_sensitivity
    summary = (f"{rep.decision}: lhs {rep.lhs:.6g}, rhs {rep.rhs:.6g}, "
               f"eta'(0) {rep.eta_prime_0:.12g}")
    return _Outcome(result, _DECISION_EXIT[rep.decision], summary, tols, doc)


def coefficient_range(start, stop, step):
    """``start, start + step, ...`` up to ``stop`` inclusive; empty if ``stop < start``."""
    if step <= 0:
        raise InputError("/c-step", "step must be positive")
    if stop < start:
        return []
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(n)]


def cmd_scan_first_order(args):
    if not args.gamma:
        raise InputError("/gamma", "at least one --gamma is required")
    for g in args.gamma:
        if not g > 0:
            raise InputError("/gamma", f"gamma must be positive, got {g}")
    if args.c is not None:
        coeffs = list(args.c)
    else:
        coeffs = coefficient_range(args.c_start, args.c_stop, args.c_step)
    v = FuncExpr.from_json(loads_json(args.v, "/v"), first_order.UNIT) if args.v else None
    w = (FuncExpr.from_json(loads_json(args.direction, "/direction"), first_order.UNIT)
         if args.direction else None)
    rows = first_order.scan_rows(args.gamma, coeffs, v, w, args.method)
    echo = {"gamma": args.gamma, "c": coeffs, "v": args.v or "x^gamma",
            "direction": args.direction or "i x^gamma", "method": args.method}
    result = {"columns": list(SCAN_COLUMNS), "rows": [list(r) for r in rows]}
    summary = f"{len(rows)} rows"
    return _Outcome(result, EXIT_OK, summary, {"boundary_rtol": first_order.BOUNDARY_RTOL}, echo)


def cmd_eta(args):
    if args.potential is None:
        raise InputError("/potential", "--potential is required")
    pj = loads_json(args.potential, "/potential")
    validate({"schema_version": 1, "kind": "schrodinger",
              "schrodinger": {"potential": pj, "v": [], "ell": []}})
    pot = potential_from_json(pj, "/potential")
    t = args.tol if args.tol is not None else 1e-10
    L = args.truncation_L or schrodinger.default_truncation(pot)
    eta = schrodinger.solve_eta(pot, L, t)
    result = {"eta_prime_0": eta.eta_prime_0, "truncation_L": eta.truncation_L,
              "seed_sensitivity": eta.seed_sensitivity, "riccati_residual": eta.residual}
    return _Outcome(result, EXIT_OK, f"eta'(0) = {eta.eta_prime_0:.15g}",
                    {"tol": t, "truncation_L": L}, {"potential": pj})


def cmd_validate(args):
    cases = {name: (v, l, g) for name, v, l, g in grid.regression_cases()}
    names = list(cases) if args.case == "all" else [args.case]
    for n in names:
        if n not in cases:
            raise InputError("/case", f"unknown case {n!r}; known: {', '.join(cases)}")
    depth = args.mesh_depth if args.mesh_depth is not None else 12
    out = {}
    for n in names:
        v, l, g = cases[n]
        out[n] = grid.cross_validate(v, l, g, depth=depth).to_dict()
    ok = all(r["agrees"] for r in out.values())
    summary = f"{sum(r['agrees'] for r in out.values())}/{len(out)} cases agree"
    result = {"decision": "agree" if ok else "disagree", "cases": out}
    return _Outcome(result, EXIT_OK if ok else EXIT_NOT, summary,
                    {"mesh_depth": depth, "sign_resolution": grid.SIGN_RESOLUTION},
                    {"case": args.case})


def cmd_demo_closability(args):
    demo = grid.closability_falsifier()
    rows = [{**r, "norm2_float": float(r["norm2"])} for r in demo["rows"]]
    result = {"rows": rows,
              "q_differences": [[a, b, str(q)] for (a, b), q in demo["q_differences"].items()],
              "closable": demo["closable"]}
    summary = "q(f_n) = 1/2 while ||f_n||^2 = 1/(3n) -> 0: form not closable"
    return _Outcome(result, EXIT_OK, summary, {}, {})


# ------------------------------------------------------------------- parser

def _common(p):
    p.add_argument("--epsilon", type=float, help="strict-positivity floor for V_A")
    p.add_argument("--tol", type=float, help="solver tolerance")
    p.add_argument("--mesh-depth", type=int, help="geometric refinement levels at 0")
    p.add_argument("--truncation-L", type=float, help="half-line truncation length")
    p.add_argument("--format", choices=("json", "csv", "text"), default=None)


def build_parser():
    ap = argparse.ArgumentParser(prog="dissext", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="decide one extension")
    csub = check.add_subparsers(dest="target", required=True)
    p = csub.add_parser("matrix")
    p.add_argument("file", nargs="?")
    _common(p)
    p.set_defaults(func=cmd_check_matrix)
    p = csub.add_parser("first-order")
    p.add_argument("file", nargs="?")
    p.add_argument("--gamma", type=float)
    p.add_argument("--v", help="JSON term list [{\"c\": [re, im], \"alpha\": a, \"beta\": b}, ...]")
    p.add_argument("--ell", help="JSON term list (default 0)")
    p.add_argument("--method", choices=("closed", "quadrature"), default="closed")
    _common(p)
    p.set_defaults(func=cmd_check_first_order)
    p = csub.add_parser("schrodinger")
    p.add_argument("file", nargs="?")
    p.add_argument("--potential", help='JSON, e.g. {"kind": "constant", "value": 1}')
    p.add_argument("--v")
    p.add_argument("--ell")
    _common(p)
    p.set_defaults(func=cmd_check_schrodinger)

    scan = sub.add_parser("scan", help="margin along l = c * direction")
    ssub = scan.add_subparsers(dest="target", required=True)
    p = ssub.add_parser("first-order")
    p.add_argument("--gamma", type=float, nargs="+")
    p.add_argument("--c", type=float, nargs="+", help="explicit coefficients")
    p.add_argument("--c-start", type=float, default=0.0)
    p.add_argument("--c-stop", type=float, default=8.0)
    p.add_argument("--c-step", type=float, default=0.1)
    p.add_argument("--v", help="JSON term list (default x^gamma)")
    p.add_argument("--direction", help="JSON term list (default i x^gamma)")
    p.add_argument("--method", choices=("closed", "quadrature"), default="closed")
    _common(p)
    p.set_defaults(func=cmd_scan_first_order, default_format="csv")

    p = sub.add_parser("eta", help="decaying solution slope eta'(0)")
    p.add_argument("--potential")
    _common(p)
    p.set_defaults(func=cmd_eta)

    p = sub.add_parser("validate", help="grid cross-validation of the first-order check")
    p.add_argument("--case", default="all")
    _common(p)
    p.set_defaults(func=cmd_validate)

    demo = sub.add_parser("demo", help="demonstrations")
    dsub = demo.add_subparsers(dest="target", required=True)
    p = dsub.add_parser("closability")
    _common(p)
    p.set_defaults(func=cmd_demo_closability)
    return ap


def _csv_text(outcome):
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    res = outcome.result
    if "rows" in res and "columns" in res:
        w.writerow(res["columns"])
        for r in res["rows"]:
            w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    elif "cases" in res:
        w.writerow(("case", "n", "h", "dofs", "oracle_margin", "schur_margin", "floor", "sign",
                    "analytic_margin", "agrees"))
        for name, rep in res["cases"].items():
            for r in rep["rows"]:
                w.writerow((name, r["n"], r["h"], r["dofs"], r["oracle_margin"], r["schur_margin"],
                            r["floor"], r["sign"], rep["analytic_margin"], rep["agrees"]))
    else:
        flat = {k: v for k, v in res.items() if not isinstance(v, (list, dict))}
        w.writerow(flat.keys())
        w.writerow(flat.values())
    return buf.getvalue()


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    command = " ".join(x for x in (args.command, getattr(args, "target", None)) if x)
    fmt = args.format or getattr(args, "default_format", "json")
    started = time.perf_counter()
    try:
        outcome = args.func(args)
    except InputError as exc:
        outcome = _error(exc, EXIT_INPUT, exc.pointer)
    except jsonschema.ValidationError as exc:
        outcome = _error(exc, EXIT_INPUT, "/" + "/".join(map(str, exc.absolute_path)))
    except TruncationTooSmall as exc:
        outcome = _error(exc, EXIT_INPUT, "/truncation_L")
    except (DomainViolation, NonIntegrableSingularity, StrictPositivityViolated) as exc:
        outcome = _error(exc, EXIT_DOMAIN, None)
    report = make_report(command, outcome.echo, outcome.tolerances, outcome.result, started)
    if fmt == "json":
        stdout.write(dumps_report(report) + "\n")
    elif fmt == "csv":
        stdout.write(_csv_text(outcome))
    else:
        stdout.write(outcome.summary + "\n")
    stderr.write(f"[{command}] {outcome.summary} (exit {outcome.code})\n")
    return outcome.code


def _error(exc, code, pointer):
    result = {"decision": "error", "error": str(exc), "error_type": type(exc).__name__}
    if pointer is not None:
        result["pointer"] = pointer
    return _Outcome(result, code, f"{type(exc).__name__}: {exc}", {}, {})


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
