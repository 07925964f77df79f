"""Command-line front end.

Commands: `nu` (Floquet exponent by any method), `series` (exact series
emission), `operators` (generating-operator tables), `verify` (numeric
verification suites).  Exit codes: 0 success, 1 verification failure,
2 usage error.  Rational coefficients are always emitted as "p/q" strings.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import curve, matcher, oracle
from .exact_series import rational_to_str

DEFAULT_TOL = float(os.environ.get("MATHIEU_CURVE_TOL", "1e-12"))

USAGE_ERROR = 2


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# nu
# ---------------------------------------------------------------------------

def _wkb_alpha_nu(lam: float, q: float, warn):
    w = lam / (2.0 * q)
    eps = q ** -0.5
    if w <= 1.0:
        raise ValueError("wkb-alpha needs w = lambda/(2q) > 1")
    u = (2.0 * w) ** -0.5
    ns = curve.nu_series(curve.ALPHA, eps_order=7)
    total, last = 0.0, 0.0
    first = None
    for e, row in sorted(ns.terms.items()):
        term = eps ** e * row.evaluate(u)
        if first is None and term:
            first = abs(term)
        total += term
        last = abs(term)
    if first and last > first:
        raise ValueError("wkb-alpha series is diverging at these parameters")
    if w < 4.0:
        warn("wkb-alpha outside its nominal regime (w >> 1); treat with care")
    return total, last


def _wkb_beta_nu(lam: float, q: float, warn):
    w = lam / (2.0 * q)
    eps = q ** -0.5
    sig = w - 1.0
    if abs(sig) > 0.9:
        warn("wkb-beta far from its nominal regime (w ~ 1); treat with care")
    ns = curve.nu_series(curve.BETA, eps_order=7)
    total, last = 0.0, 0.0
    first = None
    for e, row in sorted(ns.terms.items()):
        term = eps ** e * row.evaluate(sig)
        if first is None and term:
            first = abs(term)
        total += term
        last = abs(term)
    if first and last > first:
        raise ValueError("wkb-beta series is diverging at these parameters")
    # canonical representative nu >= 0 of the +-nu class
    return abs(total), last


def cmd_nu(args) -> int:
    warnings_list = []
    tol = args.tol

    def warn(msg):
        warnings_list.append(msg)

    if args.method == "monodromy":
        res = oracle.monodromy_nu(oracle.MonodromySetup(args.lam, args.q, tol=min(tol, 1e-10)))
        payload = res.to_dict()
    elif args.method == "hill":
        if args.q == 0:
            nu = math.sqrt(max(args.lam, 0.0))
            payload = {"nu": nu, "method": "hill", "stable": True, "est_error": 0.0}
        else:
            # hill answers the inverse question; report the monodromy exponent at
            # the tracked characteristic value as a consistency-checked result
            res = oracle.monodromy_nu(oracle.MonodromySetup(args.lam, args.q, tol=min(tol, 1e-10)))
            nu = res.nu if res.stable else None
            if nu is None:
                payload = res.to_dict() | {"method": "hill"}
            else:
                lam_back = oracle.hill_char_value(float(nu.real if isinstance(nu, complex) else nu), args.q)
                payload = res.to_dict() | {
                    "method": "hill",
                    "lambda_roundtrip": lam_back,
                    "est_error": abs(lam_back - args.lam),
                }
    elif args.method == "wkb-alpha":
        nu, last = _wkb_alpha_nu(args.lam, args.q, warn)
        payload = {"nu": nu, "method": "wkb-alpha", "stable": True, "est_error": last}
    elif args.method == "wkb-beta":
        nu, last = _wkb_beta_nu(args.lam, args.q, warn)
        payload = {"nu": nu, "method": "wkb-beta", "stable": True, "est_error": last}
    else:
        raise ValueError(f"unknown method {args.method}")
    if warnings_list:
        payload["warnings"] = warnings_list
    if args.format == "text":
        nu = payload["nu"]
        lines = [f"nu = {nu}", f"method = {payload['method']}"]
        if payload.get("band_edge"):
            lines.append("band edge: nu pinned to the nearest integer")
        if not payload.get("stable", True):
            lines.append("unstable (|trace| > 2): exponent has an imaginary part")
        lines += [f"est_error = {payload['est_error']:.3g}"] + warnings_list
        _emit("\n".join(lines), args.out)
    else:
        _emit(json.dumps(payload), args.out)
    return 0


# ---------------------------------------------------------------------------
# series / operators
# ---------------------------------------------------------------------------

def _eigen1_payload(order: int):
    s = matcher.small_q_series(min(order if order % 2 == 0 else order + 1, 8))
    rows = []
    for k in sorted(s.terms):
        r = s.coeff(k)
        rows.append(
            {
                "q_power": k,
                "num": {str(e): rational_to_str(c) for e, c in sorted(r.num.c.items())},
                "den": {str(e): rational_to_str(c) for e, c in sorted(r.den.c.items())},
            }
        )
    return s, rows


def _eigen1_latex(s) -> str:
    nu_sym = "\\nu"
    bits = [r"\lambda_\nu = \nu^2"]
    for k in sorted(s.terms):
        if k == 0:
            continue
        r = s.coeff(k)
        num, den = r.num.format(nu_sym), r.den.format(nu_sym)
        bits.append(rf"+ \frac{{{num}}}{{{den}}} q^{{{k}}}")
    return " ".join(bits)


def _inverse_payload(order: int):
    s = matcher.small_q_series(8)
    table = matcher.inverse_lambda_table(s, order)
    rows = []
    for j in sorted(table):
        rows.append(
            {
                "lambda_power": f"-{2 * j - 1}/2",
                "coeffs": {f"q^{qq}": rational_to_str(v) for qq, v in sorted(table[j].items())},
            }
        )
    return table, rows


def _eigen2_latex(lq) -> str:
    nu_sym = "\\nu"
    bits = [r"\lambda_\nu ="]
    first = True
    for head, poly in matcher.large_q_table_rows(lq):
        body = poly.format(nu_sym).replace("*", " ")
        piece = rf"({body})\, {head}"
        bits.append(piece if first else "+ " + piece)
        first = False
    return " ".join(bits)


def cmd_series(args) -> int:
    fmt = args.format
    if args.which == "eigen1":
        s, rows = _eigen1_payload(args.order)
        if fmt == "json":
            _emit(json.dumps({"series": "eigen1", "rows": rows}), args.out)
        elif fmt == "csv":
            lines = ["q_power,rational"]
            for k in sorted(s.terms):
                lines.append(f"{k},\"{s.coeff(k).format('nu')}\"")
            _emit("\n".join(lines), args.out)
        elif fmt == "latex":
            _emit(_eigen1_latex(s), args.out)
        else:
            _emit(matcher.eigen_small_table_text(s), args.out)
    elif args.which == "inverse":
        order = args.order if args.order % 2 else args.order + 1
        table, rows = _inverse_payload(order)
        if fmt == "json":
            _emit(json.dumps({"series": "inverse", "rows": rows}), args.out)
        elif fmt == "csv":
            lines = ["lambda_power,q_power,coeff"]
            for j in sorted(table):
                for qq, v in sorted(table[j].items()):
                    lines.append(f"-{2 * j - 1}/2,{qq},{rational_to_str(v)}")
            _emit("\n".join(lines), args.out)
        elif fmt == "latex":
            bits = [r"\nu = \sqrt{\lambda}"]
            for j in sorted(table):
                inner = " + ".join(
                    rf"\frac{{{rational_to_str(v)} q^{{{qq}}}}}{{1}}" if False else f"{rational_to_str(v)} q^{{{qq}}}"
                    for qq, v in sorted(table[j].items())
                )
                bits.append(rf"+ \left({inner}\right)\lambda^{{-{2 * j - 1}/2}}")
            _emit(" ".join(bits), args.out)
        else:
            lines = []
            for j in sorted(table):
                inner = " + ".join(f"({rational_to_str(v)})*q^{qq}" for qq, v in sorted(table[j].items()))
                lines.append(f"lambda^(-{2 * j - 1}/2): {inner}")
            _emit("\n".join(lines), args.out)
    elif args.which == "eigen2":
        lq = matcher.large_q_series(min(args.order, 7))
        if fmt == "json":
            rows = [
                {
                    "q_power_times_2": k,
                    "poly": {str(e): rational_to_str(c) for e, c in sorted(lq.terms[k].c.items())},
                }
                for k in sorted(lq.terms, reverse=True)
            ]
            _emit(json.dumps({"series": "eigen2", "rows": rows}), args.out)
        elif fmt == "csv":
            lines = ["q_power_times_2,nu_power,coeff"]
            for k in sorted(lq.terms, reverse=True):
                for e, c in sorted(lq.terms[k].c.items()):
                    lines.append(f"{k},{e},{rational_to_str(c)}")
            _emit("\n".join(lines), args.out)
        elif fmt == "latex":
            _emit(_eigen2_latex(lq), args.out)
        else:
            lines = [f"{head}: {poly.format('nu')}" for head, poly in matcher.large_q_table_rows(lq)]
            _emit("\n".join(lines), args.out)
    else:
        raise ValueError(f"unknown series {args.which}")
    return 0


def cmd_operators(args) -> int:
    ops = {op.m: op for op in curve.operator_table()}
    if args.m not in ops:
        raise ValueError(f"operator order m={args.m} not tabulated (1..4)")
    op = ops[args.m]
    payload = [
        {"coeff": rational_to_str(c), "wpow": w, "dpow": d} for c, w, d in op.terms
    ]
    if args.format == "text":
        _emit(
            " + ".join(f"({rational_to_str(c)}) w^{w} d^{d}" for c, w, d in op.terms),
            args.out,
        )
    else:
        _emit(json.dumps(payload), args.out)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _check_claims(tol):
    """Symbolic reproduction checks (exact; tol unused)."""
    from .ratfunc import Poly, RatFunc

    results = []
    s8 = matcher.small_q_series(8)
    r2 = s8.coeff(2)
    ok = r2 == RatFunc(Poly(Fraction(1)), Poly({2: Fraction(2), 0: Fraction(-2)}))
    results.append(("claims/eigen1-q2", ok, "q^2 coefficient 1/(2(nu^2-1))"))
    inv = matcher.invert_small_q(s8, 23)
    ns = curve.nu_series(curve.ALPHA, eps_order=3)
    ok_rows = True
    for e in (-1, 1, 3):
        row_i = inv.terms[e]
        row_a = ns.terms[e]
        for (n, _p), c in row_i.terms.items():
            if n <= row_a.truncation_order and row_a.coeff(n) != c:
                ok_rows = False
    results.append(("claims/alpha-match", ok_rows, "alpha rows equal inverse-series rows"))
    try:
        A = curve.alpha_base_series(26)
        op3 = matcher.determine_operator(3, inv, A)
        ok3 = {op.m: op for op in curve.operator_table()}[3].terms == op3.terms
    except Exception:
        ok3 = False
    results.append(("claims/determine-m3", ok3, "m=3 operator coefficients"))
    lq = matcher.large_q_series(7)
    ok_lq = lq.coeff(1) == Poly({1: Fraction(-4)})
    results.append(("claims/eigen2-sqrtq", ok_lq, "sqrt(q) coefficient -4nu"))
    return results


def _check_operators(tol):
    """Numeric operator identities via quadrature + derivative oracles."""
    results = []
    settings = [
        ("alpha", 3.0, 1.5),
        ("beta", 0.5, 0.38),
    ]
    for cyc, w0, radius in settings:
        def period0(wc):
            return oracle.contour_integral_pm(0, oracle.ContourSpec(cyc, wc))

        derivs = oracle.nth_derivatives_cauchy(period0, w0, 8, radius)
        for op in curve.operator_table():
            lhs = oracle.contour_integral_pm(2 * op.m, oracle.ContourSpec(cyc, w0))
            rhs = op.apply_numeric(derivs, w0)
            rel = abs(lhs - rhs) / abs(lhs)
            need = tol if op.m <= 2 else max(tol, 1e-4)
            results.append(
                (
                    f"operators/{cyc}-m{op.m}",
                    rel < need,
                    f"rel={rel:.2e} (tol {need:g})",
                )
            )
    return results


def _check_crosscheck(tol):
    """Cross-oracle Floquet consistency."""
    results = []
    for nu0, q0 in ((0.5, 1.0), (2.3, 2.0)):
        lam = oracle.hill_char_value(nu0, q0)
        res = oracle.monodromy_nu(oracle.MonodromySetup(lam, q0))
        err = abs(res.nu - nu0)
        results.append(
            (f"crosscheck/hill-monodromy-{nu0}-{q0}", err < 1e-8, f"err={err:.2e}")
        )
    s8 = matcher.small_q_series(8)
    lam = s8.eval(5.0, 1.0)
    hill = oracle.hill_char_value(5.0, 1.0)
    results.append(
        (
            "crosscheck/eigen1-hill-5-1",
            abs(lam - hill) < 1e-8,
            f"|d lambda|={abs(lam - hill):.2e}",
        )
    )
    return results


SUITES = {
    "claims": _check_claims,
    "operators": _check_operators,
    "crosscheck": _check_crosscheck,
}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)} or 'all'")
    records = []
    with ThreadPoolExecutor(max_workers=min(4, len(names))) as pool:
        futures = {n: pool.submit(SUITES[n], args.tol) for n in names}
        for n in names:
            records.extend(futures[n].result())
    records.sort(key=lambda r: r[0])
    all_ok = all(ok for _id, ok, _msg in records)
    lines = [
        json.dumps({"check": cid, "pass": bool(ok), "detail": msg})
        for cid, ok, msg in records
    ]
    _emit("\n".join(lines), args.out)
    return 0 if all_ok else 1


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mathieu-curve",
        description="Floquet exponents of the Mathieu equation from elliptic-curve periods",
    )
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numeric tolerance")
    p.add_argument("--format", choices=("json", "csv", "latex", "text"), default="json")
    p.add_argument("--out", default=None, help="write output to a file instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    pn = sub.add_parser("nu", help="compute the Floquet exponent")
    pn.add_argument("--lambda", dest="lam", type=float, required=True)
    pn.add_argument("--q", type=float, required=True)
    pn.add_argument(
        "--method",
        choices=("monodromy", "hill", "wkb-alpha", "wkb-beta"),
        default="monodromy",
    )
    pn.set_defaults(func=cmd_nu)

    ps = sub.add_parser("series", help="emit exact eigenvalue/inverse series")
    ps.add_argument("--which", choices=("eigen1", "inverse", "eigen2"), required=True)
    ps.add_argument("--order", type=int, default=7)
    ps.set_defaults(func=cmd_series)

    po = sub.add_parser("operators", help="emit a generating operator table")
    po.add_argument("--m", type=int, required=True)
    po.set_defaults(func=cmd_operators)

    pv = sub.add_parser("verify", help="run numeric verification suites")
    pv.add_argument("--suite", choices=("claims", "operators", "crosscheck", "all"), default="all")
    pv.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code not in (0,) else 0
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
