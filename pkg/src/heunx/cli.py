"""Command-line surface: reduce, coeffs, eval, verify, residual.

Exit codes: 0 success, 2 invalid input, 3 no solution or failed
verification, 4 internal numerical failure. Output is byte-deterministic
for a fixed input file and argument list: JSON is emitted with sorted keys
and floats carry full repr precision.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from .errors import (DivisionByZeroError, DomainError, NonConvergenceError,
                     NoSolutionError, NumericalError, PoleError,
                     PreconditionError, SingularPointError, ValidationError)
from .evaluator import (MAX_ABS_Z, SINGULAR_GUARD, evaluate_expansion,
                        evaluate_expansion_deriv, evaluation_table,
                        forcing_defect, ode_residual)
from .oracle import cross_check
from .params import PARAM_KEYS, HeunParams, params_from_dict, require_valid
from .recurrence import (CoefficientSource, recurrence_residual,
                         stream_to_csv, three_term_coefficients,
                         two_term_coefficients)
from .reduction import (A_TOP_TOL, VERIFY_TOL, ReductionCase, case_to_dict,
                        q_candidates_N0, q_candidates_N1, q_candidates_N2,
                        solve_reduction_general, verify_reduction)
from .special import SeriesControl

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NO_SOLUTION = 3
EXIT_NUMERICAL = 4

_SOURCES = {
    "closed": CoefficientSource.GAMMA_CLOSED_FORM,
    "ratio": CoefficientSource.TWO_TERM_RATIO,
    "three-term": CoefficientSource.THREE_TERM,
}


def _print_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _parse_floats(text: str) -> list:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        try:
            out.append(float(tok))
        except ValueError:
            raise PreconditionError(f"not a number: {tok!r}") from None
    return out


def _load_raw(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise PreconditionError(f"cannot read parameter file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"parameter file is not valid JSON: {exc}") from exc


def _full_params(path: str) -> HeunParams:
    return params_from_dict(_load_raw(path))


def _guard_domain(z_list, a: float, *, exclude_singular: bool) -> None:
    for z in z_list:
        if abs(z) > MAX_ABS_Z:
            raise PreconditionError(
                f"z = {z!r} is outside the evaluation domain (|z| <= {MAX_ABS_Z})")
        if exclude_singular and (abs(z) <= SINGULAR_GUARD
                                 or abs(z - 1.0) <= SINGULAR_GUARD
                                 or abs(z - a) <= SINGULAR_GUARD):
            raise PreconditionError(f"z = {z!r} coincides with a singular point")


def cmd_reduce(ns) -> int:
    data = _load_raw(ns.params)
    n_case = ns.n
    if n_case < 0:
        raise PreconditionError("--n must be non-negative")
    p0 = params_from_dict(data, optional=("q", "delta"))
    de = float(n_case + 2)
    if "delta" in data and abs(p0.delta - de) > 1e-12:
        raise PreconditionError(
            f"delta = {p0.delta!r} in the file is inconsistent with N = {n_case} "
            f"(needs {de!r})")
    ep_expected = 1.0 + p0.alpha + p0.beta - p0.gamma - de
    if abs(p0.epsilon - ep_expected) > 1e-9:
        raise PreconditionError(
            f"epsilon = {p0.epsilon!r} violates the exponent-sum relation at "
            f"delta = {de!r} (expected {ep_expected!r})")

    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        if ns.force_general or n_case >= 3:
            cases = solve_reduction_general(p0.a, p0.alpha, p0.beta, p0.gamma, n_case)
        elif n_case == 0:
            cases = q_candidates_N0(p0.a, p0.alpha, p0.beta, p0.gamma)
        elif n_case == 1:
            cases = q_candidates_N1(p0.a, p0.alpha, p0.beta, p0.gamma)
        else:
            cases = q_candidates_N2(p0.a, p0.alpha, p0.beta, p0.gamma)
        notes = [str(w.message) for w in caught]

    if ns.format == "csv":
        lines = ["N,q_root_index,q,e,passed"]
        for case in cases:
            e_txt = ";".join(repr(e) for e in case.e_list)
            lines.append(f"{case.N},{case.q_root_index},{case.params.q!r},"
                         f"{e_txt},{case.report.passed}")
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        payload = {
            "cases": [case_to_dict(c) for c in cases],
            "notes": notes,
            "tolerances": {"verify_tol": VERIFY_TOL, "a_top_tol": A_TOP_TOL},
        }
        _print_json(payload)
    return EXIT_OK if cases else EXIT_NO_SOLUTION


def cmd_coeffs(ns) -> int:
    p = require_valid(_full_params(ns.params))
    es = _parse_floats(ns.e)
    if ns.n_max < 0:
        raise PreconditionError("--n-max must be non-negative")
    source = _SOURCES[ns.source]
    if source == CoefficientSource.THREE_TERM:
        if es:
            raise PreconditionError("--e does not apply to the three-term source")
        stream = three_term_coefficients(p, ns.n_max)
    else:
        stream = two_term_coefficients(p, es, ns.n_max, source=source)
    if ns.format == "json":
        rows = []
        csv_rows = stream_to_csv(stream).strip().split("\n")[1:]
        for line in csv_rows:
            n_txt, c_txt, r_txt, res_txt = line.split(",")
            rows.append({"n": int(n_txt), "c_n": _jsonable(float(c_txt)),
                         "ratio": _jsonable(float(r_txt)),
                         "residual": _jsonable(float(res_txt))})
        _print_json({"source": stream.source.value, "rows": rows})
    else:
        sys.stdout.write(stream_to_csv(stream))
    return EXIT_OK


def _build_case(ns) -> ReductionCase:
    p = _full_params(ns.params)
    es = _parse_floats(ns.e)
    return ReductionCase.build(p, es)


def cmd_eval(ns) -> int:
    case = _build_case(ns)
    zs = _parse_floats(ns.z)
    if not zs:
        raise PreconditionError("--z must list at least one point")
    _guard_domain(zs, case.params.a, exclude_singular=False)
    ctl = SeriesControl(rel_tol=ns.rel_tol, max_terms=ns.max_terms)
    if ns.format == "json":
        rows = []
        for z in zs:
            u = evaluate_expansion(case, z, ctl)
            du = evaluate_expansion_deriv(case, z, 1, ctl)
            ddu = evaluate_expansion_deriv(case, z, 2, ctl)
            try:
                resid = ode_residual(case, z, ctl)
            except SingularPointError:
                resid = float("nan")
            rows.append({"z": z, "u": u.value, "du": du.value, "ddu": ddu.value,
                         "residual": _jsonable(resid), "terms_used": u.terms_used,
                         "status": u.status.value})
        _print_json({"rows": rows, "tolerances": {"rel_tol": ctl.rel_tol,
                                                  "max_terms": ctl.max_terms}})
    else:
        sys.stdout.write(evaluation_table(case, zs, ctl))
    return EXIT_OK


def cmd_residual(ns) -> int:
    case = _build_case(ns)
    zs = _parse_floats(ns.z)
    if not zs:
        raise PreconditionError("--z must list at least one point")
    _guard_domain(zs, case.params.a, exclude_singular=True)
    ctl = SeriesControl(rel_tol=ns.rel_tol, max_terms=ns.max_terms)
    rows = [(z, ode_residual(case, z, ctl), forcing_defect(case, z, ctl))
            for z in zs]
    if ns.format == "json":
        _print_json({"rows": [{"z": z, "residual": r, "forced_residual": f}
                              for z, r, f in rows],
                     "tolerances": {"rel_tol": ctl.rel_tol,
                                    "max_terms": ctl.max_terms}})
    else:
        lines = ["z,residual,forced_residual"]
        lines += [f"{z!r},{r!r},{f!r}" for z, r, f in rows]
        sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(ns) -> int:
    p = require_valid(_full_params(ns.params))
    es = _parse_floats(ns.e)
    zs = _parse_floats(ns.z)
    if not zs:
        raise PreconditionError("--z must list at least one point")
    _guard_domain(zs, p.a, exclude_singular=True)
    ctl = SeriesControl(rel_tol=ns.rel_tol, max_terms=ns.max_terms)

    stream = two_term_coefficients(p, es, ns.n_stream)
    rec_value = recurrence_residual(stream)
    rec_ok = rec_value <= ns.recurrence_tol

    report = verify_reduction(p, es)
    colloc_ok = report.passed and report.a_top_gap <= A_TOP_TOL

    checks = {
        "recurrence_residual": {"value": rec_value, "tol": ns.recurrence_tol,
                                "passed": rec_ok},
        "collocation": {"passed": colloc_ok, "tol": report.tolerance_used,
                        "a_top_gap": report.a_top_gap,
                        "values": [_jsonable(v) for v in report.identity_values]},
    }

    if colloc_ok:
        case = ReductionCase.build(p, es)
        ode_values = [ode_residual(case, z, ctl) for z in zs]
        ode_ok = max(ode_values) <= ns.ode_tol
        cross_value = cross_check(case, zs, ctl=ctl)
        cross_ok = cross_value <= ns.cross_tol
        forced = [forcing_defect(case, z, ctl) for z in zs]
        checks["ode_residual"] = {"values": ode_values, "tol": ns.ode_tol,
                                  "passed": ode_ok}
        checks["cross_check"] = {"value": cross_value, "tol": ns.cross_tol,
                                 "passed": cross_ok}
        checks["forced_residual"] = {"values": forced, "gating": False}
    else:
        checks["ode_residual"] = {"values": [], "tol": ns.ode_tol,
                                  "passed": False, "skipped": True}
        checks["cross_check"] = {"value": None, "tol": ns.cross_tol,
                                 "passed": False, "skipped": True}

    passed = bool(rec_ok and colloc_ok and checks["ode_residual"]["passed"]
                  and checks["cross_check"]["passed"])
    _print_json({"passed": passed, "checks": checks,
                 "z": zs, "e": es,
                 "params": {k: getattr(p, k) for k in PARAM_KEYS}})
    return EXIT_OK if passed else EXIT_NO_SOLUTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heunx",
        description="Two-term reductions of the general Heun recurrence: "
                    "search, coefficient tables, evaluation, certification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, with_e=True, with_ctl=False):
        sp.add_argument("--params", required=True,
                        help="JSON file with the equation parameters")
        if with_e:
            sp.add_argument("--e", default="",
                            help="comma-separated e_1..e_N (empty for N=0)")
        if with_ctl:
            sp.add_argument("--rel-tol", type=float, default=1e-14)
            sp.add_argument("--max-terms", type=int, default=10000)

    sp = sub.add_parser("reduce", help="find (q, e_1..e_N) reduction cases")
    sp.add_argument("--params", required=True)
    sp.add_argument("--n", type=int, required=True, help="reduction order N")
    sp.add_argument("--force-general", action="store_true",
                    help="use the multi-start solver even when a closed form exists")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_reduce)

    sp = sub.add_parser("coeffs", help="coefficient table c_0..c_nmax")
    common(sp)
    sp.add_argument("--n-max", type=int, default=50)
    sp.add_argument("--source", choices=tuple(_SOURCES), default="closed")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_coeffs)

    sp = sub.add_parser("eval", help="u, u', u'' and residual on a z grid")
    common(sp, with_ctl=True)
    sp.add_argument("--z", required=True, help="comma-separated evaluation points")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("verify", help="full certification of a reduction")
    common(sp, with_ctl=True)
    sp.add_argument("--z", default="0.1,0.25,0.4")
    sp.add_argument("--n-stream", type=int, default=50)
    sp.add_argument("--recurrence-tol", type=float, default=1e-10)
    sp.add_argument("--ode-tol", type=float, default=1e-7)
    sp.add_argument("--cross-tol", type=float, default=1e-7)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("residual", help="equation residuals on a z grid")
    common(sp, with_ctl=True)
    sp.add_argument("--z", required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_residual)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return ns.func(ns)
    except (ValidationError, PreconditionError, DomainError, PoleError,
            SingularPointError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    except NoSolutionError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NO_SOLUTION
    except (NonConvergenceError, DivisionByZeroError, NumericalError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
