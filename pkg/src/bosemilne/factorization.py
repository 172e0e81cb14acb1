"""Riemann-Hilbert factorisation of the half-range boundary problem.

With theta(mu) = arg lam+(mu) tabulated, the sectionally analytic factor

    X(z) = (1/z) exp V(z),    V(z) = (1/pi) int_0^inf (theta(t) - pi)/(t - z) dt

satisfies X+/X- = lam+/lam- on the positive axis (index -1 problem). The
1/z prefactor cancels the logarithmic blow-up of V at the origin, so exp(V)
keeps X finite and nonvanishing there, while X ~ 1/z at infinity.

Removing the pole of the general solution at infinity pins the expansion
coefficients of the temperature-jump problem:

    C0 = -2 l0 K,    K0 = V1 K,
    V1 = (1/pi) int_0^inf (pi - theta(mu)) dmu,

and the continuum coefficient follows from the jump of 1/X across the cut:

    n(eta) = -(2 l0 K / pi) exp(-Vp(eta)) sin(pi - theta(eta)),

where Vp is the principal value of V on the cut. The overall sign is frozen
by the zero-inflow boundary condition (see N_SIGN below); flipping it leaves
a boundary residual of order one.

For alpha >= 3/2 the tail pi - theta ~ C mu^((alpha-3)/alpha) decays too
slowly and the V1 integral diverges; this is detected from the fitted tail
exponent and reported as a DivergenceError pointing at the saddle-point
route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import quadrature
from .dispersion import DispersionTable
from .errors import DivergenceError, DomainError, RangeError
from .quadrature import PvIntegrand, pv_integral
from .special import AlphaModel
from .util import ordered_map

__all__ = [
    "FactorizationData",
    "SpectrumCoefficient",
    "V1Estimate",
    "N_SIGN",
    "v1_coefficient",
    "build_factorization",
    "v_transform",
    "v_cut",
    "x_factor",
    "x_boundary",
    "n_coefficient",
    "n_jump_complex",
    "spectrum_table",
]

# Sign of the continuum coefficient relative to (2 l0 K / pi) e^{-Vp} sin(pi-theta).
# Derived from the jump of C0/X across the cut and confirmed operationally:
# with -1 the boundary residual at x=0 is at quadrature level, with +1 it is O(1).
N_SIGN = -1.0


@dataclass(frozen=True)
class V1Estimate:
    """Temperature-jump coefficient with an error estimate and provenance."""

    value: float
    error: float
    method: str


@dataclass(frozen=True)
class SpectrumCoefficient:
    """Continuous-spectrum expansion coefficient n(eta) at one node."""

    eta: float
    n_value: float

    def __post_init__(self):
        if not math.isfinite(self.n_value):
            raise DomainError(f"n({self.eta}) is not finite")


def v1_coefficient(model: AlphaModel, table: DispersionTable, *,
                   tol: float = 1e-10, rule_order: int | None = None) -> V1Estimate:
    """Jump coefficient V1 = (1/pi) int_0^inf (pi - theta(mu)) dmu.

    Slit-type tables (alpha = 0, saddle surrogates) integrate the exact
    boundary function adaptively; the logarithmically slow approach of theta
    to pi at the slit edge is tamed by an exponential substitution. For
    alpha > 0 the tabulated interpolant is integrated exactly (pchip
    antiderivative) and the algebraic tail beyond the grid is added from the
    fitted power law, which must decay faster than 1/mu.
    """
    rule = quadrature.gauss_rule(rule_order or model.quad_cfg.base_order)

    if table.slit_edge is not None:
        edge = table.slit_edge

        def resid(mus):
            mus = np.atleast_1d(np.asarray(mus, dtype=float))
            out = np.array([math.pi - table.boundary_fn(m).theta for m in mus])
            return out

        body, err1 = quadrature.integrate_with_error(
            resid, 0.0, 0.9 * edge, tol, rule=rule, max_depth=24)
        # near the edge substitute mu = edge - e^{-s}: the integrand becomes
        # exponentially small and smooth in s
        s0 = -math.log(0.1 * edge)

        def edge_piece(s):
            s = np.atleast_1d(np.asarray(s, dtype=float))
            mus = edge - np.exp(-s)
            vals = np.array([math.pi - table.boundary_fn(m).theta for m in mus])
            return vals * np.exp(-s)

        near, err2 = quadrature.integrate_with_error(
            edge_piece, s0, s0 + 45.0, tol, rule=rule, max_depth=24)
        value = (body + near) / math.pi
        error = (err1 + err2) / math.pi
        return V1Estimate(value=value, error=error, method="adaptive-slit")

    p, c = table.tail_exponent, table.tail_coeff
    if p is None or p >= -1.0:
        raise DivergenceError(
            f"tail exponent {p} >= -1: the exact V1 integral diverges for "
            f"alpha={table.alpha}; use the saddle-point approximation")
    anti = table.theta_interp.antiderivative()
    mu_max = table.mu_max
    body = math.pi * mu_max - float(anti(mu_max) - anti(0.0))
    tail = c * mu_max ** (p + 1.0) / (-(p + 1.0))
    # interpolation-error proxy: pchip integral vs trapezoid of the same data
    trap = math.pi * mu_max - float(np.trapezoid(table.theta, table.mu))
    interp_err = abs(body - trap) * 0.1
    tail_err = tail * min(1.0, 2.0 * (table.tail_fit_residual or 0.0))
    return V1Estimate(value=(body + tail) / math.pi,
                      error=(interp_err + tail_err) / math.pi,
                      method="table+tail")


@dataclass(frozen=True)
class FactorizationData:
    """Everything the field evaluation needs: theta table, V1, K, C0, K0."""

    model: AlphaModel
    table: DispersionTable
    v1: float
    v1_error: float
    k: float

    def __post_init__(self):
        if self.v1 <= 0:
            raise DomainError(f"V1 must be positive, got {self.v1}")

    @property
    def c0(self) -> float:
        return -2.0 * self.model.l0_alpha * self.k

    @property
    def k0(self) -> float:
        return self.v1 * self.k

    @cached_property
    def _g_interp(self):
        return self.table.theta_interp

    @cached_property
    def _g_deriv(self):
        return self.table.theta_interp.derivative()


def build_factorization(model: AlphaModel, table: DispersionTable,
                        k: float = 1.0, v1_est: V1Estimate | None = None) -> FactorizationData:
    est = v1_est or v1_coefficient(model, table)
    return FactorizationData(model=model, table=table, v1=est.value,
                             v1_error=est.error, k=k)


def _tail_cauchy(data: FactorizationData, z) -> complex:
    """int_{mu_max}^inf (theta - pi)/(t - z) dt via the fitted tail model.

    Substituting u = 1/t maps it to a regular integral on (0, 1/mu_max);
    valid whenever z is not on (mu_max, inf).
    """
    p, c = data.table.tail_exponent, data.table.tail_coeff
    if p is None:
        return 0.0
    u_max = 1.0 / data.table.mu_max

    def f(u):
        u = np.asarray(u, dtype=float)
        return u ** (-p - 1.0) / (1.0 - z * u)

    val = quadrature.integrate(f, 0.0, u_max, 1e-10, max_depth=24)
    return -c * val


def v_transform(data: FactorizationData, z, *, tol: float = 1e-10) -> complex:
    """Cauchy transform V(z) = (1/pi) int_0^inf (theta(t) - pi)/(t - z) dt.

    z must stay off the closed positive real axis (the cut); boundary values
    on the cut come from v_cut.
    """
    zc = complex(z)
    if zc.imag == 0.0 and zc.real >= 0.0:
        raise DomainError("z is on the cut [0, inf); use v_cut for boundary values")
    table = data.table
    interp = data._g_interp

    def f(t):
        return (interp(t) - math.pi) / (t - zc)

    pts = []
    if 0.0 < zc.real < table.mu_max:
        pts.append(zc.real)
    val = quadrature.integrate(f, 0.0, table.mu_max, tol, max_depth=30, points=pts)
    val += _tail_cauchy(data, zc)
    return val / math.pi


def v_cut(data: FactorizationData, eta: float, *, tol: float = 1e-9) -> float:
    """Principal value Vp(eta) of the Cauchy transform on the cut, 0 < eta < mu_max."""
    table = data.table
    if not (0.0 < eta < table.mu_max):
        raise RangeError(f"eta={eta} outside the tabulated cut (0, {table.mu_max})")
    interp, deriv = data._g_interp, data._g_deriv

    def g(t):
        return interp(np.asarray(t, dtype=float)) - math.pi

    pv = pv_integral(PvIntegrand(f=g, pole=eta, interval=(0.0, table.mu_max),
                                 fprime=lambda t: float(deriv(t))),
                     tol=tol, max_depth=30)
    pv += float(np.real(_tail_cauchy(data, eta)))
    return pv / math.pi


def x_factor(data: FactorizationData, z, *, tol: float = 1e-10) -> complex:
    """Factorisation function X(z) = (1/z) exp V(z); the origin is excluded."""
    zc = complex(z)
    if zc == 0.0:
        raise DomainError("X(z) has the explicit 1/z factor; z = 0 is excluded")
    return (1.0 / zc) * _cexp(v_transform(data, zc, tol=tol))


def x_boundary(data: FactorizationData, mu: float, side: str = "above") -> complex:
    """Boundary value X+-(mu) = (1/mu) exp(Vp(mu) +- i (theta(mu) - pi)) on the cut."""
    if side not in ("above", "below"):
        raise DomainError(f"side must be 'above' or 'below', got {side!r}")
    sgn = 1.0 if side == "above" else -1.0
    vp = v_cut(data, mu)
    phase = sgn * (float(data.table.theta_at(mu)) - math.pi)
    return (1.0 / mu) * _cexp(complex(vp, phase))


def _cexp(w: complex) -> complex:
    return complex(math.exp(w.real) * math.cos(w.imag),
                   math.exp(w.real) * math.sin(w.imag))


def n_coefficient(data: FactorizationData, eta: float, *,
                  vp: float | None = None) -> SpectrumCoefficient:
    """Continuum coefficient n(eta) from the jump of C0/X across the cut.

    Real closed form N_SIGN * (2 l0 K / pi) e^{-Vp} sin(pi - theta). Beyond a
    slit edge theta == pi and the coefficient vanishes identically; beyond the
    tabulated range of an alpha > 0 table the value is not interpolable.
    """
    if eta <= 0:
        raise DomainError(f"eta must be positive, got {eta}")
    table = data.table
    if table.slit_edge is not None and eta >= table.slit_edge:
        return SpectrumCoefficient(eta=eta, n_value=0.0)
    if eta >= table.mu_max:
        raise RangeError(f"eta={eta} beyond the tabulated range {table.mu_max}")
    if data.k == 0.0:
        return SpectrumCoefficient(eta=eta, n_value=0.0)
    vp = v_cut(data, eta) if vp is None else vp
    theta = float(table.theta_at(eta))
    amp = 2.0 * data.model.l0_alpha * data.k / math.pi
    return SpectrumCoefficient(eta=eta,
                               n_value=N_SIGN * amp * math.exp(-vp) * math.sin(math.pi - theta))


def n_jump_complex(data: FactorizationData, eta: float) -> complex:
    """n(eta) evaluated literally as -2 l0 K (1/X+ - 1/X-) / (2 pi i eta).

    Independent of the real closed form used by n_coefficient; its imaginary
    part must vanish by conjugate symmetry (reality check in the tests).
    """
    xp = x_boundary(data, eta, "above")
    xm = x_boundary(data, eta, "below")
    return -2.0 * data.model.l0_alpha * data.k * (1.0 / xp - 1.0 / xm) \
        / (2.0j * math.pi * eta)


def spectrum_table(data: FactorizationData, etas: Sequence[float] | None = None,
                   *, n_nodes: int = 400, threads: int = 1) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Tabulate (eta, Vp(eta), n(eta)) over the cut.

    Returns arrays (etas, vp, n). Default nodes subsample the theta grid to
    n_nodes (n is smooth; each node costs one principal-value integral) and
    sit strictly inside the tabulated range so the principal value is well
    defined at each of them.
    """
    table = data.table
    if etas is None:
        mu = table.mu
        inner = mu[(mu > 0.0) & (mu < table.mu_max)]
        if len(inner) > n_nodes:
            idx = np.unique(np.linspace(0, len(inner) - 1, n_nodes).astype(int))
            inner = inner[idx]
        etas = inner
    etas = np.asarray(etas, dtype=float)
    vps = np.array(ordered_map(lambda e: v_cut(data, e), etas, threads=threads))
    ns = np.array([n_coefficient(data, e, vp=vp).n_value
                   for e, vp in zip(etas, vps)])
    return etas, vps, ns
