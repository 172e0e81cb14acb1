import math

import numpy as np
import pytest

from bosemilne import factorization as fz, saddle
from bosemilne.dispersion import lambda_case
from bosemilne.errors import ConsistencyError, DomainError

W0_EXACT = {0.0: 3.83001609630907, 2.0: 5.96940917071577}


class TestSaddleRoot:
    @pytest.mark.parametrize("alpha, printed", [(0.0, 3.83002), (2.0, 5.96941)])
    def test_printed_values(self, alpha, printed):
        assert abs(saddle.saddle_root(alpha) - printed) <= 1e-5

    @pytest.mark.parametrize("alpha", [0.0, 0.7, 2.0, 3.0])
    def test_defining_equation_residual(self, alpha):
        w0 = saddle.saddle_root(alpha)
        a4 = alpha + 4.0
        assert abs(math.exp(w0) * (a4 - w0) - (a4 + w0)) <= 1e-9 * math.exp(w0)
        assert 0.0 < w0 < a4

    def test_negative_alpha_rejected(self):
        with pytest.raises(DomainError):
            saddle.saddle_root(-0.5)


class TestSaddleApprox:
    @pytest.mark.parametrize("alpha, printed", [(0.0, 3.85347), (2.0, 5.97025)])
    def test_printed_values(self, alpha, printed):
        assert abs(saddle.saddle_root_approx(alpha) - printed) <= 1e-5

    @pytest.mark.parametrize("alpha", [0.0, 0.5, 1.0, 2.0, 3.0])
    def test_within_one_percent(self, alpha):
        w0 = saddle.saddle_root(alpha)
        assert abs(saddle.saddle_root_approx(alpha) - w0) <= 0.01 * w0

    def test_gap_at_alpha_zero_is_point_six_percent(self):
        gap = (saddle.saddle_root_approx(0.0) - saddle.saddle_root(0.0)) / saddle.saddle_root(0.0)
        assert gap == pytest.approx(0.0061, abs=1e-3)

    def test_large_alpha_limit(self):
        assert saddle.saddle_root_approx(30.0) / 34.0 == pytest.approx(1.0, abs=1e-13)


class TestV1Saddle:
    def test_alpha_zero_identity(self):
        assert saddle.v1_saddle(0.0, 0.7104460896) == 0.7104460896

    def test_printed_alpha_two(self):
        assert abs(saddle.v1_saddle(2.0, 0.71045) - 0.01994) <= 1e-5

    def test_monotone_decreasing(self):
        vals = [saddle.v1_saddle(a, 0.7104460896) for a in np.linspace(0.0, 3.0, 13)]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestSurrogate:
    def test_alpha_zero_is_case_function(self):
        z = 1.3 + 0.4j
        assert saddle.lambda_surrogate(0.0, saddle.saddle_root(0.0), z) == lambda_case(z)

    def test_origin(self):
        assert saddle.lambda_surrogate(2.0, saddle.saddle_root(2.0), 0.0) == 1.0

    def test_argument_substitution(self):
        w0 = saddle.saddle_root(2.0)
        assert saddle.lambda_surrogate(2.0, w0, 2j / w0 ** 2) == pytest.approx(
            lambda_case(2j), rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, 2.0])
    def test_generic_pipeline_reproduces_scaling(self, ctx, alpha):
        # the theta/V1 machinery on the surrogate slit collapses to w0^-alpha V1(0)
        w0 = saddle.saddle_root(alpha)
        table = saddle.surrogate_theta_table(alpha, w0)
        model = ctx.model(alpha)
        est = fz.v1_coefficient(model, table)
        want = w0 ** (-alpha) * ctx.v1(0.0).value
        assert abs(est.value - want) <= 1e-6


class TestSummary:
    def test_fields(self, ctx):
        s = saddle.summarize(2.0, ctx.v1(0.0).value)
        assert s.alpha == 2.0
        assert abs(s.v1_tilde - 0.01994) <= 1e-5
        assert s.v1_exact_ref is None
        assert 0.0 < s.omega0 < 6.0

    def test_invariant_guard(self):
        with pytest.raises(ConsistencyError):
            saddle.SaddleSummary(alpha=0.0, omega0=3.83, omega0_approx=4.5,
                                 v1_tilde=0.7, v1_exact_ref=None)
