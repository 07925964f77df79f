import math
from fractions import Fraction as F

import pytest

from mathieu_curve.curve import alpha_base_series, nu_series, operator_table
from mathieu_curve.exact_series import U, AsymptoticSeries, EpsilonSeries
from mathieu_curve.matcher import (
    MatchingError,
    ResonantNuError,
    determine_operator,
    inverse_lambda_table,
    invert_small_q,
    large_q_series,
    small_q_series,
)
from mathieu_curve.ratfunc import Poly, RatFunc


def nu2_poly(*factors):
    """prod (nu^2 - k^2) for the given k, times an optional leading constant."""
    out = Poly(1)
    for k in factors:
        out = out * Poly({2: F(1), 0: F(-k * k)})
    return out


class TestSmallQSeries:
    def test_printed_low_orders(self):
        s = small_q_series(8)
        assert s.coeff(0) == RatFunc(Poly({2: F(1)}))
        assert s.coeff(2) == RatFunc(Poly(1), Poly({2: F(2), 0: F(-2)}))
        assert s.coeff(4) == RatFunc(
            Poly({2: F(5), 0: F(7)}), nu2_poly(1, 1, 1, 2) * Poly(32)
        )
        assert s.coeff(6) == RatFunc(
            Poly({4: F(9), 2: F(58), 0: F(29)}),
            nu2_poly(1, 1, 1, 1, 1, 2, 3) * Poly(64),
        )

    def test_q8_formula(self):
        s = small_q_series(8)
        num = Poly(
            {
                10: F(1469),
                8: F(9144),
                6: F(-140354),
                4: F(64228),
                2: F(827565),
                0: F(274748),
            }
        )
        den = nu2_poly(4, 3, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1) * Poly(8192)
        assert s.coeff(8) == RatFunc(num, den)

    def test_no_odd_orders(self):
        s = small_q_series(8)
        assert sorted(s.terms) == [0, 2, 4, 6, 8]

    def test_eval_and_resonance(self):
        s = small_q_series(8)
        val = s.eval(5.0, 1.0)
        assert val == pytest.approx(25.0208475, abs=1e-6)
        with pytest.raises(ResonantNuError):
            s.eval(2.0, 1.0)  # nu=2 hits (nu^2-4)


PAPER_INVERSE = {
    2: {2: F(-1, 4)},
    3: {2: F(-1, 4)},
    4: {2: F(-1, 4), 4: F(-15, 64)},
    5: {2: F(-1, 4), 4: F(-35, 32)},
    6: {2: F(-1, 4), 4: F(-273, 64), 6: F(-105, 256)},
    7: {2: F(-1, 4), 4: F(-33, 2), 6: F(-1155, 256)},
    8: {2: F(-1, 4), 4: F(-4147, 64), 6: F(-5005, 128)},
    9: {2: F(-1, 4), 4: F(-8229, 32), 6: F(-42185, 128)},
    10: {2: F(-1, 4), 4: F(-65637, 64), 6: F(-722007, 256)},
    11: {2: F(-1, 4), 4: F(-65569, 16), 6: F(-6294301, 256)},
}


class TestInversion:
    def test_full_display_block(self):
        table = inverse_lambda_table(small_q_series(8), 21)
        for j, brackets in PAPER_INVERSE.items():
            for qq, v in brackets.items():
                assert table[j][qq] == v, (j, qq)
        # no q-powers below the displayed ones sneak in
        for j in PAPER_INVERSE:
            low = {qq for qq in table[j] if qq <= 6}
            assert low == set(PAPER_INVERSE[j])

    def test_q8_extension_term(self):
        table = inverse_lambda_table(small_q_series(8), 23)
        assert table[12][8] == F(-1000684685, 16384)

    def test_w_eps_rows(self):
        inv = invert_small_q(small_q_series(8), 23)
        row = inv.terms[-1]
        assert [row.coeff(n) for n in (-1, 3, 7, 11)] == [
            F(1),
            F(-1, 4),
            F(-15, 64),
            F(-105, 256),
        ]
        row7 = inv.terms[7]
        assert [row7.coeff(n) for n in (11, 15, 19, 23)] == [
            F(-1, 4),
            F(-4147, 64),
            F(-722007, 256),
            F(-1000684685, 16384),
        ]

    def test_insufficient_order_rejected(self):
        from mathieu_curve.exact_series import TruncationError

        with pytest.raises(TruncationError):
            inverse_lambda_table(small_q_series(4), 21)

    def test_alpha_rows_equal_inverse_rows(self):
        inv = invert_small_q(small_q_series(8), 23)
        ns = nu_series("alpha", eps_order=7, var_order=26)
        for e in (-1, 1, 3, 5, 7):
            ri, ra = inv.terms[e], ns.terms[e]
            lo = min(ri.truncation_order, ra.truncation_order)
            for (n, _p), c in ri.terms.items():
                if n <= lo:
                    assert ra.coeff(n) == c, (e, n)


class TestDetermineOperator:
    def setup_method(self):
        self.inv = invert_small_q(small_q_series(8), 23)
        self.base = alpha_base_series(26)

    def test_m3(self):
        op = determine_operator(3, self.inv, self.base)
        assert op.terms == tuple(
            (F(n, d * 64), w, k)
            for (n, d, w, k) in [(124, 945, 3, 6), (158, 105, 2, 5), (153, 35, 1, 4), (41, 14, 0, 3)]
        )

    def test_m3_idempotent_with_table(self):
        op = determine_operator(3, self.inv, self.base)
        assert op.terms == {o.m: o for o in operator_table()}[3].terms

    def test_m4(self):
        op = determine_operator(4, self.inv, self.base)
        expected = {o.m: o for o in operator_table()}[4]
        assert op.terms == expected.terms

    def test_overdetermined_consistency_used(self):
        # with q^8 data the eps^5 row carries a spare u^21 coefficient; corrupting
        # it must be detected
        rows = dict(self.inv.terms)
        r5 = rows[5]
        terms = dict(r5.terms)
        terms[(21, 0)] = terms.get((21, 0), F(0)) + F(1, 7)
        rows[5] = AsymptoticSeries(U, terms, r5.truncation_order)
        bad = EpsilonSeries(rows, self.inv.truncation_eps)
        with pytest.raises(MatchingError):
            determine_operator(3, bad, self.base)

    def test_zeroed_row_rejected(self):
        rows = dict(self.inv.terms)
        rows[5] = AsymptoticSeries(U, {}, rows[5].truncation_order)
        bad = EpsilonSeries(rows, self.inv.truncation_eps)
        with pytest.raises(MatchingError):
            determine_operator(3, bad, self.base)


PAPER_EIGEN2 = {
    2: {0: F(2)},
    1: {1: F(-4)},
    0: {2: F(4, 8), 0: F(-1, 8)},
    -1: {3: F(4, 64), 1: F(-3, 64)},
    -2: {4: F(80, 4096), 2: F(-136, 4096), 0: F(9, 4096)},
    -3: {5: F(528, 2 ** 16), 3: F(-1640, 2 ** 16), 1: F(405, 2 ** 16)},
    -4: {6: F(2016, 2 ** 19), 4: F(-10080, 2 ** 19), 2: F(5886, 2 ** 19), 0: F(-243, 2 ** 19)},
    -5: {7: F(33728, 2 ** 24), 5: F(-249872, 2 ** 24), 3: F(276004, 2 ** 24), 1: F(-41607, 2 ** 24)},
    -6: {
        8: F(2403072, 2 ** 31),
        6: F(-24881920, 2 ** 31),
        4: F(45534368, 2 ** 31),
        2: F(-16087536, 2 ** 31),
        0: F(506979, 2 ** 31),
    },
    -7: {
        9: F(44811520, 2 ** 36),
        7: F(-620967168, 2 ** 36),
        5: F(1724770656, 2 ** 36),
        3: F(-1152647184, 2 ** 36),
        1: F(130610637, 2 ** 36),
    },
}


class TestLargeQ:
    def test_all_displayed_terms(self):
        lq = large_q_series(7)
        for key, poly in PAPER_EIGEN2.items():
            assert lq.coeff(key) == Poly(poly), key

    def test_sign_convention(self):
        assert large_q_series(7).coeff(1) == Poly({1: F(-4)})

    def test_eval(self):
        lq = large_q_series(7)
        val = lq.eval(0.5, 50.0)
        # leading terms: 2q - 4 nu sqrt(q) + 0 + ...
        assert val == pytest.approx(100 - 2 * math.sqrt(50), abs=0.01)
        assert lq.last_term_magnitude(0.5, 50.0) < 1e-8


class TestEndToEnd:
    def test_pipeline_reproduces_table_operators(self):
        # inverse series determines m=3,4; with those, the beta reversion yields
        # the large-q series whose sqrt-q slope fixes the orientation
        inv = invert_small_q(small_q_series(8), 23)
        base = alpha_base_series(26)
        for m in (3, 4):
            assert determine_operator(m, inv, base).terms == {
                o.m: o for o in operator_table()
            }[m].terms
