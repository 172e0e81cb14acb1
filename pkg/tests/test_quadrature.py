import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bosemilne.errors import AccuracyError, ConfigurationError, DomainError
from bosemilne.quadrature import (PvIntegrand, gauss_rule, integrate,
                                  integrate_with_error, pv_integral)
from bosemilne.special import einstein


class TestGaussRule:
    def test_order_one(self):
        r = gauss_rule(1)
        assert r.nodes[0] == pytest.approx(0.0, abs=1e-15)
        assert r.weights[0] == pytest.approx(2.0, abs=1e-15)

    def test_order_two_closed_form(self):
        r = gauss_rule(2)
        np.testing.assert_allclose(r.nodes, [-1 / math.sqrt(3), 1 / math.sqrt(3)], atol=1e-15)
        np.testing.assert_allclose(r.weights, [1.0, 1.0], atol=1e-15)

    @pytest.mark.parametrize("n", [2, 5, 16, 64, 257])
    def test_weights_and_nodes(self, n):
        r = gauss_rule(n)
        assert abs(r.weights.sum() - 2.0) <= 1e-14
        assert np.all(r.weights > 0)
        assert np.all(np.diff(r.nodes) > 0)

    def test_exactness_degree_2n_minus_1(self):
        # order 64 integrates tau^126 on [-1, 1] exactly
        r = gauss_rule(64)
        got = r.weights @ r.nodes ** 126
        assert got == pytest.approx(2.0 / 127.0, rel=1e-12)

    @pytest.mark.parametrize("bad", [0, -3, 10001, 2.5])
    def test_order_validation(self, bad):
        with pytest.raises(ConfigurationError):
            gauss_rule(bad)


class TestIntegrate:
    def test_constant(self):
        assert integrate(lambda x: np.ones_like(x), 0.0, 1.0) == pytest.approx(1.0, abs=1e-14)

    def test_planck_moment(self):
        got = integrate(lambda w: w ** 4 * einstein(w), 0.0, 80.0, 1e-12)
        assert got == pytest.approx(4 * math.pi ** 4 / 15, rel=1e-10)

    def test_log_endpoint_singularity(self):
        got = integrate(lambda t: np.log(1.0 / t), 0.0, 1.0, 1e-8, max_depth=40)
        assert got == pytest.approx(1.0, rel=1e-8)

    def test_breakpoints_skip_interior_kink(self):
        f = lambda x: np.abs(x - 0.3)
        got = integrate(f, 0.0, 1.0, 1e-12, points=[0.3])
        assert got == pytest.approx(0.5 * 0.3 ** 2 + 0.5 * 0.7 ** 2, rel=1e-13)

    def test_accuracy_error_carries_best_estimate(self):
        f = lambda x: np.abs(x - 1 / math.pi) ** -0.95
        with pytest.raises(AccuracyError) as exc:
            integrate(f, 0.0, 1.0, 1e-13, max_depth=4)
        assert exc.value.best is not None
        assert exc.value.bound > 0

    def test_stability_under_rule_doubling(self):
        f = lambda x: np.exp(-x) * np.sin(3 * x)
        a = integrate(f, 0.0, 5.0, 1e-12, rule=gauss_rule(64))
        b = integrate(f, 0.0, 5.0, 1e-12, rule=gauss_rule(128))
        assert abs(a - b) <= 1e-11 * abs(a)

    def test_complex_integrand(self):
        got = integrate(lambda t: np.exp(1j * t), 0.0, math.pi / 2, 1e-13)
        assert got == pytest.approx(1.0 + 1j, rel=1e-12)

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            integrate(lambda x: x, 1.0, 0.0)


class TestPrincipalValue:
    def test_constant_symmetric_pole(self):
        # f == 1 on (0, 2), pole at 1: logarithms cancel
        p = PvIntegrand(f=lambda t: np.ones_like(t), pole=1.0, interval=(0.0, 2.0))
        assert pv_integral(p) == pytest.approx(0.0, abs=1e-13)

    def test_linear_through_origin(self):
        p = PvIntegrand(f=lambda t: t, pole=0.0, interval=(-1.0, 1.0))
        assert pv_integral(p) == pytest.approx(2.0, rel=1e-13)

    def test_quadratic_antiderivative_oracle(self):
        # t^2/(t-1) = t + 1 + 1/(t-1): P-integral over (0,2) is 4
        p = PvIntegrand(f=lambda t: t ** 2, pole=1.0, interval=(0.0, 2.0))
        assert pv_integral(p) == pytest.approx(4.0, rel=1e-13)

    def test_pole_at_endpoint_rejected(self):
        with pytest.raises(DomainError):
            PvIntegrand(f=lambda t: t, pole=1.0, interval=(0.0, 1.0))

    @settings(max_examples=25, deadline=None)
    @given(st.lists(st.floats(-3, 3), min_size=3, max_size=3),
           st.lists(st.floats(-3, 3), min_size=3, max_size=3),
           st.floats(-2, 2), st.floats(-2, 2))
    def test_linearity(self, ca, cb, wa, wb):
        f = lambda t: ca[0] + ca[1] * t + ca[2] * t * t
        g = lambda t: cb[0] + cb[1] * t + cb[2] * t * t
        h = lambda t: wa * f(t) + wb * g(t)
        pole, iv = 0.4, (-1.0, 2.0)
        lhs = pv_integral(PvIntegrand(f=h, pole=pole, interval=iv))
        rhs = (wa * pv_integral(PvIntegrand(f=f, pole=pole, interval=iv))
               + wb * pv_integral(PvIntegrand(f=g, pole=pole, interval=iv)))
        assert lhs == pytest.approx(rhs, abs=1e-12 * (1 + abs(rhs)))

    def test_against_scipy_qawc(self):
        from scipy.integrate import quad
        f = lambda t: np.cos(t) * np.exp(-0.3 * t)
        got = pv_integral(PvIntegrand(f=f, pole=0.7, interval=(0.0, 3.0)), tol=1e-11)
        want, _ = quad(lambda t: float(f(np.asarray(t))), 0.0, 3.0,
                       weight="cauchy", wvar=0.7)
        assert got == pytest.approx(want, rel=1e-9)


def test_error_estimate_is_a_bound():
    f = lambda x: np.sin(7 * x) / (1 + x * x)
    val, err = integrate_with_error(f, 0.0, 4.0, 1e-10)
    exact, _ = integrate_with_error(f, 0.0, 4.0, 1e-14, max_depth=20)
    assert abs(val - exact) <= max(err, 1e-13)
