"""Einstein function, Planck-weight frequency moments, and physical scaling.

The Einstein function E(x) = e^x/(e^x-1)^2 is the temperature derivative
kernel of the Planck occupation. Everything downstream integrates against the
weight w^(p+4) E(w) on the positive frequency axis; the closed form

    int_0^inf w^(p+4) E(w) dw = Gamma(p+5) zeta(p+4)

is reserved for verification, while production values come from quadrature so
the same numerical stack is exercised end to end.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .errors import ConfigurationError, DivergenceError, DomainError
from .quadrature import QuadConfig

__all__ = [
    "AlphaModel",
    "PhysicalScales",
    "einstein",
    "einstein_reg",
    "moment_l0",
    "xi_alpha",
    "physical_jump",
]

OMEGA_CUT_DEFAULT = 80.0

# Laurent coefficients of E(x) - 1/x^2 + 1/12 = sum c_k x^(2k), k >= 1
_REG_COEFFS = (1.0 / 240.0, -1.0 / 6048.0, 1.0 / 172800.0, -1.0 / 5322240.0)


def einstein(x):
    """Einstein function E(x) = e^x/(e^x-1)^2, evaluated as 1/(4 sinh^2(x/2)).

    The sinh form avoids overflow of e^x for x up to ~700 and is manifestly
    even. x = 0 is a double pole and is rejected.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr == 0.0):
        raise DomainError("einstein(0) is a pole")
    s = np.sinh(0.5 * arr)
    with np.errstate(divide="ignore", over="ignore"):
        out = 1.0 / (4.0 * s * s)
    if np.any(np.isinf(out)):  # sinh^2 underflowed: too close to the pole
        raise DomainError("einstein argument too close to the pole at 0")
    return out if arr.ndim else float(out)


def einstein_reg(x):
    """Regularised Einstein function E(x) - 1/x^2 + 1/12.

    Smooth through x = 0; evaluated by series for |x| < 1/4 where the direct
    subtraction loses all significant digits.
    """
    arr = np.asarray(x, dtype=float)
    out = np.empty_like(arr)
    small = np.abs(arr) < 0.25
    xs = arr[small]
    x2 = xs * xs
    acc = np.zeros_like(xs)
    for c in reversed(_REG_COEFFS):
        acc = x2 * (c + acc)
    out[small] = acc
    xb = arr[~small]
    s = np.sinh(0.5 * xb)
    out[~small] = 1.0 / (4.0 * s * s) - 1.0 / (xb * xb) + 1.0 / 12.0
    return out if arr.ndim else float(out)


def moment_l0(p: float, *, omega_cut: float = OMEGA_CUT_DEFAULT,
              tol: float = 1e-12, quad: QuadConfig | None = None) -> float:
    """Frequency moment int_0^inf w^(p+4) E(w) dw by quadrature.

    Converges classically for p > -3. On (-4, -3) the small-w divergence is
    removed analytically (E = 1/w^2 - 1/12 + O(w^2)), which continues the
    moment to the value Gamma(p+5) zeta(p+4); p = -3 sits on the zeta pole.
    The e^-w tail makes truncation at omega_cut = 80 exact to ~1e-30.
    """
    if p <= -4.0:
        raise DivergenceError(f"moment diverges for p <= -4 (got p={p})")
    if p == -3.0:
        raise DivergenceError("moment has a pole at p = -3")
    quad = quad or QuadConfig()
    rule = quadrature.gauss_rule(quad.base_order)

    def tail_integrand(w):
        return w ** (p + 4) * einstein(w)

    # (0, 1): subtract the Laurent singularity, integrate the smooth remainder
    def head_integrand(w):
        return w ** (p + 4) * einstein_reg(w)

    head = quadrature.integrate(head_integrand, 0.0, 1.0, tol,
                                rule=rule, max_depth=quad.max_depth)
    head += 1.0 / (p + 3.0) - 1.0 / (12.0 * (p + 5.0))
    tail = quadrature.integrate(tail_integrand, 1.0, omega_cut, tol,
                                rule=rule, max_depth=quad.max_depth)
    return head + tail


@dataclass(frozen=True)
class AlphaModel:
    """Scattering exponent alpha with its derived moments and quadrature config.

    The collision frequency scales as w^alpha; l0(alpha), l0(-alpha) and
    l0(2 alpha) are the Planck-weight moments that normalise the transport
    equation. l0_neg is None at alpha = 3 where the moment hits the zeta pole.
    """

    alpha: float
    l0_alpha: float
    l0_neg: float | None
    l0_2alpha: float
    omega_cut: float
    quad_cfg: QuadConfig

    @classmethod
    def build(cls, alpha: float, *, omega_cut: float = OMEGA_CUT_DEFAULT,
              quad: QuadConfig | None = None) -> "AlphaModel":
        if not math.isfinite(alpha) or not (0.0 <= alpha <= 3.0):
            raise ConfigurationError(
                f"alpha must be finite and in [0, 3], got {alpha}")
        quad = quad or QuadConfig()
        l0a = moment_l0(alpha, omega_cut=omega_cut, quad=quad)
        l02 = moment_l0(2 * alpha, omega_cut=omega_cut, quad=quad)
        l0n = None if alpha == 3.0 else moment_l0(-alpha, omega_cut=omega_cut, quad=quad)
        return cls(alpha=alpha, l0_alpha=l0a, l0_neg=l0n, l0_2alpha=l02,
                   omega_cut=omega_cut, quad_cfg=quad)

    def __post_init__(self):
        if self.l0_alpha <= 0 or self.l0_2alpha <= 0:
            raise ConfigurationError("moments l0(alpha), l0(2 alpha) must be positive")


def xi_alpha(model: AlphaModel, mu: float) -> float:
    """Truncated moment int_0^cut w^(2 alpha + 4) E(w) dw with cut = mu^(-1/alpha).

    The cutoff collects exactly the frequencies whose stretched slit
    (-w^-alpha, w^-alpha) still contains mu, i.e. w^alpha * mu < 1. At
    alpha = 0 the slit is (-1, 1) for every frequency, so the moment is full
    inside it and zero outside.
    """
    if mu <= 0:
        raise DomainError(f"xi_alpha requires mu > 0, got {mu}")
    if model.alpha == 0.0:
        return model.l0_2alpha if mu < 1.0 else 0.0
    log_cut = -math.log(mu) / model.alpha
    if log_cut >= math.log(model.omega_cut):
        return model.l0_2alpha
    cut = math.exp(log_cut)
    a2 = 2 * model.alpha
    rule = quadrature.gauss_rule(model.quad_cfg.base_order)
    if cut <= 0.25:
        # Laurent expansion of E keeps the relative accuracy at tiny cutoffs
        val = cut ** (a2 + 3) / (a2 + 3) - cut ** (a2 + 5) / (12 * (a2 + 5))
        val += quadrature.integrate(lambda w: w ** (a2 + 4) * einstein_reg(w),
                                    0.0, cut, 1e-12, rule=rule,
                                    max_depth=model.quad_cfg.max_depth)
        return val
    return quadrature.integrate(lambda w: w ** (a2 + 4) * einstein(w),
                                0.0, cut, 1e-12, rule=rule,
                                max_depth=model.quad_cfg.max_depth)


@dataclass(frozen=True)
class PhysicalScales:
    """Dimensional inputs: reference temperature, collision prefactor, speed, hbar/k.

    nu0 carries units s^-1 (rad/s)^-alpha so that nu(w) = nu0 w^alpha is a
    frequency; hbar_over_k is in kelvin-seconds.
    """

    t0: float
    nu0: float
    c: float
    hbar_over_k: float

    def __post_init__(self):
        for name in ("t0", "nu0", "c", "hbar_over_k"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigurationError(f"{name} must be positive and finite")

    def length_scale(self, alpha: float) -> float:
        """Metres per dimensionless length unit: (c/nu0) (k T0/hbar)^-alpha."""
        ls = (self.c / self.nu0) * (self.t0 / self.hbar_over_k) ** (-alpha)
        if not (math.isfinite(ls) and ls > 0):
            raise ConfigurationError("length scale is not positive and finite")
        return ls


def physical_jump(scales: PhysicalScales, model: AlphaModel,
                  k_phys: float, v1: float) -> float:
    """Boundary temperature offset T1 - T0 = V1(alpha) * length_scale * K_phys.

    K_phys is the imposed far-field gradient in K/m; the result is in kelvin.
    """
    return v1 * scales.length_scale(model.alpha) * k_phys
