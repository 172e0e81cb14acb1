import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import gamma, zeta

from bosemilne.errors import ConfigurationError, DivergenceError, DomainError
from bosemilne.special import (AlphaModel, PhysicalScales, einstein,
                               einstein_reg, moment_l0, physical_jump, xi_alpha)

E_AT_1 = 0.92067359420779231895  # 50-digit evaluation of e/(e-1)^2


class TestEinstein:
    def test_reference_value(self):
        assert einstein(1.0) == pytest.approx(E_AT_1, rel=1e-15)

    def test_even(self):
        assert einstein(-1.7) == einstein(1.7)

    def test_leading_pole_coefficient(self):
        x = 1e-6
        assert x * x * einstein(x) == pytest.approx(1.0, abs=1e-10)

    def test_pole_rejected(self):
        with pytest.raises(DomainError):
            einstein(0.0)

    def test_no_overflow_at_700(self):
        v = einstein(700.0)
        assert 0.0 < v < 1e-300 or v > 0  # finite, positive

    @settings(max_examples=20, deadline=None)
    @given(st.floats(min_value=1e-8, max_value=50.0))
    def test_matches_exponential_form(self, x):
        direct = math.exp(x) / math.expm1(x) ** 2
        assert abs(einstein(x) - direct) <= 1e-14 * direct

    def test_regularised_series_joins_direct_branch(self):
        x = 0.249  # series branch; compare against the direct subtraction
        series = einstein_reg(x)
        direct = einstein(x) - 1.0 / x ** 2 + 1.0 / 12.0
        assert series == pytest.approx(direct, rel=1e-10)
        assert einstein_reg(1e-9) == pytest.approx(0.0, abs=1e-19)


class TestMoments:
    @pytest.mark.parametrize("p, closed", [
        (0.0, 4 * math.pi ** 4 / 15),            # Gamma(5) zeta(4)
        (2.0, 732.48700462880338059),            # Gamma(7) zeta(6)
    ])
    def test_closed_forms(self, p, closed):
        assert moment_l0(p) == pytest.approx(closed, rel=1e-12)

    @pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 2.0])
    def test_gamma_zeta_oracle(self, p):
        want = float(gamma(p + 5) * zeta(p + 4))
        assert abs(moment_l0(p) - want) <= 1e-10 * want

    def test_continuation_below_minus_three(self):
        # termwise series continues to Gamma(1.1) zeta(0.1), a negative value
        got = moment_l0(-3.9)
        assert got == pytest.approx(-0.57370020877384537994, rel=1e-10)

    @pytest.mark.parametrize("p", [-4.0, -5.2])
    def test_divergent(self, p):
        with pytest.raises(DivergenceError):
            moment_l0(p)

    def test_zeta_pole(self):
        with pytest.raises(DivergenceError):
            moment_l0(-3.0)


class TestAlphaModel:
    def test_moments_match_closed_form(self, model1):
        want = float(gamma(1 + 5) * zeta(1 + 4))
        assert abs(model1.l0_alpha - want) <= 1e-10 * want
        want2 = float(gamma(2 + 5) * zeta(2 + 4))
        assert abs(model1.l0_2alpha - want2) <= 1e-10 * want2

    @pytest.mark.parametrize("alpha", [-0.1, 3.2, math.nan, math.inf])
    def test_rejects_out_of_range(self, alpha):
        with pytest.raises(ConfigurationError):
            AlphaModel.build(alpha)

    def test_alpha_three_has_no_negative_moment(self):
        m = AlphaModel.build(3.0)
        assert m.l0_neg is None
        assert m.l0_alpha > 0


class TestXiAlpha:
    def test_alpha_zero_inside_slit(self, model0):
        assert xi_alpha(model0, 0.5) == model0.l0_2alpha

    def test_alpha_zero_outside_slit(self, model0):
        assert xi_alpha(model0, 2.0) == 0.0

    def test_alpha_two_unit_mu(self, model2):
        # independent oracle: adaptive quadrature of w^8 E on (0, 1)
        assert xi_alpha(model2, 1.0) == pytest.approx(0.13396432776187883834, rel=1e-10)

    def test_monotone_nonincreasing(self, model1):
        mus = np.geomspace(1e-3, 50.0, 24)
        vals = [xi_alpha(model1, float(m)) for m in mus]
        assert all(a >= b - 1e-12 for a, b in zip(vals, vals[1:]))
        assert all(v <= model1.l0_2alpha * (1 + 1e-14) for v in vals)

    def test_limits(self, model1):
        assert xi_alpha(model1, 1e-10) == model1.l0_2alpha
        assert xi_alpha(model1, 1e8) < 1e-20

    def test_domain(self, model1):
        with pytest.raises(DomainError):
            xi_alpha(model1, 0.0)


class TestPhysicalJump:
    def test_zero_cases(self, model0):
        scales = PhysicalScales(t0=3.0, nu0=2e9, c=2.998e8, hbar_over_k=7.64e-12)
        assert physical_jump(scales, model0, 0.0, 0.5) == 0.0
        assert physical_jump(scales, model0, 1.0, 0.0) == 0.0

    def test_unit_scales_reproduce_v1(self, ctx, model0):
        # nu0 = c makes the length scale exactly one metre at alpha = 0
        scales = PhysicalScales(t0=1.0, nu0=2.998e8, c=2.998e8, hbar_over_k=7.64e-12)
        v1 = ctx.v1(0.0).value
        jump = physical_jump(scales, model0, 1.0, v1)
        assert jump == pytest.approx(0.71045, abs=5e-5)

    def test_rejects_nonpositive(self):
        with pytest.raises(ConfigurationError):
            PhysicalScales(t0=-1.0, nu0=1.0, c=1.0, hbar_over_k=1.0)
