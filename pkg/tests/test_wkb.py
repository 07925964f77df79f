import cmath
import math

import numpy as np
import pytest

from mathieu_curve.exact_series import Fraction as F
from mathieu_curve.exact_series import GaussianRational
from mathieu_curve.wkb import (
    BranchState,
    TurningPointError,
    WkbDensity,
    continue_branch_along,
    recursion_residual,
    wkb_density,
    wkb_eval,
)

GR = GaussianRational


class TestDensityGoldens:
    def test_p0(self):
        assert wkb_density(0).terms == {(0, 0, 0, 1): GR(1)}

    def test_p1_is_i_s_over_P_squared(self):
        # (i/2)(ln p0)' = (i/2)(2s/P)/P
        assert wkb_density(1).terms == {(0, 0, 1, -2): GR(0, 1)}

    def test_p2_closed_form(self):
        # (1/(8 sqrt2)) (sin^2 2z - 4w cos 2z + 4)/(w - cos 2z)^(5/2) rewritten in
        # P-monomials: (s^2 - 4wc + 4) * 2^2 / (8 P^5) with s^2 -> 1 - c^2
        expected = (
            WkbDensity(2, {(0, 0, 2, -5): GR(F(1, 2))})
            + WkbDensity(2, {(1, 1, 0, -5): GR(-2)})
            + WkbDensity(2, {(0, 0, 0, -5): GR(2)})
        )
        assert wkb_density(2) == expected

    def test_p3_total_derivative_form(self):
        # p3 = (i/2)(p2/p0)'
        ratio = wkb_density(2).div_p0()
        expected = ratio.diff_z().times_i().scale(F(1, 2))
        assert wkb_density(3).terms == expected.terms

    def test_canonical_text_stable(self):
        txt = wkb_density(2).canonical_text()
        assert txt == "(5/2)*P^-5 + (-1)*c^1*P^-3 + (-5/2)*c^2*P^-5"


class TestRecursion:
    @pytest.mark.parametrize("m", range(0, 9))
    def test_residual_vanishes(self, m):
        assert recursion_residual(m).is_zero()

    @pytest.mark.parametrize("m", range(0, 9))
    def test_parity(self, m):
        d = wkb_density(m)
        flipped = d.parity_flip()
        if m % 2 == 0:
            assert flipped == d
        else:
            assert flipped == -d

    @pytest.mark.parametrize("m", range(0, 9))
    def test_reality(self, m):
        d = wkb_density(m)
        if m % 2 == 0:
            assert d.imag_part_zero()
        else:
            assert d.real_part_zero()

    @pytest.mark.parametrize("m", range(0, 9))
    def test_p_exponent_parity_and_bound(self, m):
        for e in wkb_density(m).p_exponents():
            assert e <= 1
            assert (e - (m + 1)) % 2 == 0
        if m >= 1:
            assert all(e < 0 for e in wkb_density(m).p_exponents())


class TestEvaluation:
    def test_p0_at_origin(self):
        assert wkb_eval(0, 3.0, 0.0) == pytest.approx(2.0)

    def test_p1_vanishes_at_origin(self):
        assert wkb_eval(1, 3.0, 0.0) == pytest.approx(0.0)

    def test_p2_closed_form_value(self):
        # (1/(8 sqrt2)) (sin^2 2z - 4w cos 2z + 4)/(w - cos 2z)^(5/2) at w=3, z=pi/4
        val = wkb_eval(2, 3.0, math.pi / 4)
        expected = (1.0 / (8.0 * math.sqrt(2))) * (1.0 - 0.0 + 4.0) / 3.0 ** 2.5
        assert val == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("m", [0, 1, 2, 3])
    def test_against_closed_forms_at_random_points(self, m):
        rng = np.random.default_rng(42 + m)
        for _ in range(100):
            w = rng.uniform(1.5, 6.0)
            z = complex(rng.uniform(-1.2, 1.2), rng.uniform(-0.4, 0.4))
            P = cmath.sqrt(2.0 * (w - cmath.cos(2 * z)))
            c2, s2 = cmath.cos(2 * z), cmath.sin(2 * z)
            lnp0_p = 2.0 * s2 / P ** 2
            lnp0_pp = 4.0 * c2 / P ** 2 - 8.0 * s2 ** 2 / P ** 4
            if m == 0:
                ref = P
            elif m == 1:
                ref = 0.5j * lnp0_p
            elif m == 2:
                ref = -(2.0 * lnp0_pp - lnp0_p ** 2) / (8.0 * P)
            else:
                # p3 = (i/2) d/dz (p2/p0); evaluated via the symbolic p2/p0 derivative
                ratio = wkb_density(2).div_p0()
                dz = ratio.diff_z()
                ref = 0.5j * complex(dz.evaluate(w, z, P))
            got = wkb_eval(m, w, z)
            assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))

    def test_turning_point_rejected(self):
        zt = 0.5 * math.acos(0.5)
        with pytest.raises(TurningPointError):
            wkb_eval(2, 0.5, zt)

    def test_branch_state_continuity(self):
        # marching around the beta loop keeps P continuous and returns to start
        w = 0.5
        zt = 0.5 * math.acos(w)
        t = 2 * np.pi * np.arange(512) / 512
        zs = (zt + 0.25) * np.cos(t) + 0.35j * np.sin(t)
        P = continue_branch_along(w, zs)
        r0 = cmath.sqrt(2.0 * (w - cmath.cos(2 * zs[0])))
        assert abs(P[0] - r0) < 1e-14
        steps = np.abs(np.diff(P))
        assert steps.max() < 0.5 * np.abs(P[1:]).min()

    def test_branch_state_object(self):
        w = 0.5
        state = BranchState()
        zt = 0.5 * math.acos(w)
        t = np.linspace(0, 2 * np.pi, 600)
        vals = [wkb_eval(0, w, (zt + 0.3) * math.cos(tt) + 0.3j * math.sin(tt), state) for tt in t]
        # closure: the continued branch returns to the principal value
        assert abs(vals[0] - vals[-1]) < 1e-10
