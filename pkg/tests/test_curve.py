import math
from fractions import Fraction as F

import pytest
from scipy.special import hyp2f1 as scipy_hyp2f1

from mathieu_curve.curve import (
    ALPHA,
    ALPHA_AT_SIGMA,
    BETA,
    BETA_AT_INF,
    CurveParams,
    DegenerateCurveError,
    GeneratingOperator,
    Ln2Pair,
    OperatorStructureError,
    alpha_base_series,
    apply_operator,
    beta_base_series,
    branch_points,
    dual_base_series,
    nu_series,
    operator_table,
)
from mathieu_curve.exact_series import U, AsymptoticSeries, TruncationError


def _second_route_alpha(order):
    """Independent expansion via v = 1/w composition (test-side oracle)."""
    cap = order + 1

    def mul(a, b):
        r = {}
        for i, x in a.items():
            for j, y in b.items():
                if i + j <= cap:
                    r[i + j] = r.get(i + j, F(0)) + x * y
        return {k: v for k, v in r.items() if v}

    def binom(alpha, inner):
        out, term, c, k = {0: F(1)}, {0: F(1)}, F(1), 0
        while True:
            k += 1
            c = c * (F(alpha) - (k - 1)) / k
            term = mul(term, inner)
            if not term:
                return out
            for n, v in term.items():
                out[n] = out.get(n, F(0)) + c * v

    v = {1: F(1)}  # v = 1/w, expressed in u later via v = 2u^2
    sqrt_shell = binom(F(1, 2), v)           # (1+v)^(1/2)
    t = mul({1: F(2)}, binom(F(-1), v))      # 2v(1+v)^(-1)
    fser, tpow, k = {0: F(1)}, {0: F(1)}, 0
    while True:
        k += 1
        tpow = mul(tpow, t)
        if not tpow:
            break
        fk = F(1)
        for i in range(k):
            fk = fk * (F(-1, 2) + i) * (F(1, 2) + i) / ((1 + i) * (1 + i))
        for n, val in tpow.items():
            fser[n] = fser.get(n, F(0)) + fk * val
    prod = mul(sqrt_shell, fser)
    # sqrt(2w) * prod with v^n = (2u^2)^n: exponent 2n - 1 in u
    return {2 * n - 1: val * F(2) ** n for n, val in prod.items()}


class TestBranchPoints:
    def test_plain_values(self):
        bp = branch_points(CurveParams(3.0, 1.0))
        assert bp.points[0] == pytest.approx(1j * math.sqrt(5))
        assert bp.points[1] == pytest.approx(1j)
        assert bp.points[2] == pytest.approx(-1j)
        assert bp.points[3] == pytest.approx(-1j * math.sqrt(5))
        assert bp.cuts == ((bp.points[0], bp.points[1]), (bp.points[2], bp.points[3]))

    def test_degenerate(self):
        with pytest.raises(DegenerateCurveError):
            branch_points(CurveParams(2.0, 1.0))
        with pytest.raises(DegenerateCurveError):
            branch_points(CurveParams(-2.0, 1.0))

    def test_curve_residual(self):
        lam, q = -3.0, 1.0
        bp = branch_points(CurveParams(lam, q))
        for x in bp.points:
            y_sq = (x * x + lam) ** 2 - 4 * q * q
            assert abs(y_sq) < 1e-12

    def test_params_validation(self):
        with pytest.raises(ValueError):
            CurveParams(1.0, 0.0)
        p = CurveParams(25.0, 2.5)
        assert p.w == pytest.approx(5.0)
        assert p.eps == pytest.approx(2.5 ** -0.5)


class TestAlphaBase:
    def test_printed_coefficients(self):
        a = alpha_base_series(24)
        assert a.coeff(-1) == 1
        assert a.coeff(3) == F(-1, 4)
        assert a.coeff(7) == F(-15, 64)
        assert a.coeff(11) == F(-105, 256)

    def test_even_relative_powers_vanish(self):
        a = alpha_base_series(24)
        assert all(n % 4 == 3 or n == -1 for (n, _p) in a.terms)

    def test_deep_coefficient_against_second_route(self):
        a = alpha_base_series(24)
        ref = _second_route_alpha(24)
        for n, v in ref.items():
            if n <= 24:
                assert a.coeff(n) == v
        # frozen value: the (2w)^-8 relative coefficient
        assert a.coeff(15) == F(-15015, 16384)

    def test_numeric_against_hypergeometric(self):
        w = 50.0
        u = (2 * w) ** -0.5
        closed = math.sqrt(2 * (w + 1)) * scipy_hyp2f1(-0.5, 0.5, 1.0, 2.0 / (w + 1))
        assert alpha_base_series(24).evaluate(u) == pytest.approx(closed, rel=1e-10)


class TestBetaBase:
    def test_printed_coefficients(self):
        b = beta_base_series(12)
        assert b.coeff(1) == F(1, 2)
        assert b.coeff(2) == F(-1, 32)
        assert b.coeff(3) == F(3, 512)
        assert b.coeff(4) == F(-25, 16384)

    def test_sigma5_from_direct_pochhammer(self):
        # independent: (sigma/2) F(1/2,1/2,2;-sigma/2) term k=4
        poch = lambda a, k: math.prod([F(a) + i for i in range(k)], start=F(1))
        g4 = poch(F(1, 2), 4) * poch(F(1, 2), 4) / (poch(2, 4) * 24)
        expected = g4 * F(1, 2) * F(-1, 2) ** 4
        assert beta_base_series(8).coeff(5) == expected == F(245, 524288)

    def test_numeric_against_hypergeometric(self):
        w = 1.05
        closed = 0.5 * (w - 1) * scipy_hyp2f1(0.5, 0.5, 2.0, (1 - w) / 2)
        assert beta_base_series(16).evaluate(w - 1) == pytest.approx(closed, rel=1e-10)


class TestDualSeries:
    def test_beta_at_inf_paper_blocks(self):
        d = dual_base_series(BETA_AT_INF, 8)
        assert d.coeff(-1, 0) == Ln2Pair(F(-2), F(2))
        assert d.coeff(-1, 1) == Ln2Pair(F(1), F(0))
        assert d.coeff(3, 0) == Ln2Pair(F(1, 4), F(-1, 2))
        assert d.coeff(3, 1) == Ln2Pair(F(-1, 4), F(0))
        assert d.coeff(7, 0) == Ln2Pair(F(47, 128), F(-60, 128))
        assert d.coeff(7, 1) == Ln2Pair(F(-30, 128), F(0))

    def test_beta_at_inf_numeric(self):
        d = dual_base_series(BETA_AT_INF, 12)
        for w in (40.0, 100.0):
            u = (2 * w) ** -0.5
            closed = 0.5 * (w - 1) * scipy_hyp2f1(0.5, 0.5, 2.0, (1 - w) / 2)
            assert d.evaluate(u) == pytest.approx(closed, rel=1e-9)

    def test_alpha_at_sigma_blocks(self):
        # paper blocks hold under the documented shift a_true = a_paper - 3 b ln2
        d = dual_base_series(ALPHA_AT_SIGMA, 6)
        assert d.coeff(0, 0) == Ln2Pair(F(4), F(0))
        paper = {
            1: (Ln2Pair(F(1, 2), F(1)), F(-1, 2)),
            2: (Ln2Pair(F(3, 64), F(-4, 64)), F(2, 64)),
            3: (Ln2Pair(F(-6, 512), F(6, 512)), F(-3, 512)),
        }
        for n, (a_paper, b) in paper.items():
            assert d.coeff(n, 1) == Ln2Pair(b, F(0))
            shifted = Ln2Pair(a_paper.a, a_paper.b - 3 * b)
            assert d.coeff(n, 0) == shifted

    def test_alpha_at_sigma_numeric(self):
        d = dual_base_series(ALPHA_AT_SIGMA, 10)
        for w in (1.02, 1.1):
            closed = math.sqrt(2 * (w + 1)) * scipy_hyp2f1(-0.5, 0.5, 1.0, 2 / (w + 1))
            assert d.evaluate(w - 1) == pytest.approx(closed, rel=1e-9)


class TestOperators:
    def test_table_values(self):
        ops = {op.m: op for op in operator_table()}
        assert ops[1].terms == ((F(1, 6), 1, 2), (F(1, 12), 0, 1))
        d3 = dict(((w, d), c) for c, w, d in ops[3].terms)
        assert d3[(0, 3)] == F(41, 14 * 64)
        d4 = dict(((w, d), c) for c, w, d in ops[4].terms)
        assert d4[(0, 4)] == F(15229, 135 * 128 * 16)

    def test_structure_invariant(self):
        for op in operator_table():
            for _c, wpow, dpow in op.terms:
                assert wpow == dpow - op.m
        with pytest.raises(OperatorStructureError):
            GeneratingOperator(2, ((F(1), 0, 1),))

    def test_json(self):
        import json

        ops = {op.m: op for op in operator_table()}
        payload = json.loads(ops[3].to_json())
        assert payload[0] == {"coeff": "31/15120", "wpow": 3, "dpow": 6}


class TestApplyOperator:
    def test_zero_series(self):
        z = AsymptoticSeries.zero(U, 10)
        for op in operator_table():
            assert apply_operator(op, z).is_zero()

    def test_linearity(self):
        a = alpha_base_series(20)
        b = AsymptoticSeries(U, {(3, 0): F(1, 7), (7, 0): F(2)}, 20)
        op = operator_table()[1]
        left = apply_operator(op, a + b)
        right = apply_operator(op, a) + apply_operator(op, b)
        assert left == right
        assert apply_operator(op, a.scale(F(3, 5))) == apply_operator(op, a).scale(F(3, 5))

    def test_alpha_row_values(self):
        out = apply_operator(operator_table()[0], alpha_base_series(24))
        assert out.coeff(5) == F(-1, 4)
        assert out.coeff(9) == F(-35, 32)
        assert out.coeff(13) == F(-1155, 256)

    def test_beta_leading(self):
        out = apply_operator(operator_table()[0], beta_base_series(12))
        assert out.coeff(0) == F(1, 32)

    def test_truncation_guard(self):
        short = AsymptoticSeries(U, {(-1, 0): F(1)}, 0)
        with pytest.raises(TruncationError):
            apply_operator(operator_table()[3], short).coeff(9)


class TestNuSeries:
    def test_alpha_rows_match_display(self):
        ns = nu_series(ALPHA, eps_order=7, var_order=24)
        row = ns.row(-1)
        assert [row.coeff(n) for n in (-1, 3, 7, 11)] == [
            F(1),
            F(-1, 4),
            F(-15, 64),
            F(-105, 256),
        ]
        row5 = ns.row(5)
        assert [row5.coeff(n) for n in (9, 13, 17)] == [F(-1, 4), F(-33, 2), F(-42185, 128)]

    def test_beta_leading_row(self):
        ns = nu_series(BETA, eps_order=3, var_order=10)
        assert ns.row(-1).coeff(1) == F(1, 2)

    def test_only_odd_rows(self):
        ns = nu_series(ALPHA, eps_order=7)
        assert all(e % 2 == 1 or e == -1 for e in ns.eps_powers())
        assert ns.eps_powers() == [-1, 1, 3, 5, 7]

    def test_eps_order_cap(self):
        with pytest.raises(ValueError):
            nu_series(ALPHA, eps_order=9)
