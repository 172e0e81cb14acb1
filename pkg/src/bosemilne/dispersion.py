"""Dispersion function of the half-space problem and its boundary data.

The classical one-speed dispersion function

    lam_C(z) = 1 + (z/2) ln((z-1)/(z+1)),   cut on [-1, 1],

is averaged over the Planck frequency weight, with the argument stretched by
the power-law collision rate:

    lam(z) = (1/l0) int_0^inf w^(a+4) E(w) lam_C(w^a z) dw.

The weight exponent a+4 (not 2a+4) is forced by self-consistency of the
characteristic equation: only this normalisation gives lam(0) = 1 and reduces
lam to lam_C at a = 0. For a > 0 the union of the stretched slits covers the
whole real axis, so the boundary values carry an imaginary part

    Im lam+(mu) = pi mu xi_a(mu) / (2 l0)      for every mu > 0,

where xi_a is the truncated moment from `special`. The continuous argument
theta(mu) = arg lam+(mu) runs from 0 to pi; its table drives the
Riemann-Hilbert factorisation downstream.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import quadrature, special
from .errors import ConsistencyError, DomainError, ResolutionError
from .special import AlphaModel

__all__ = [
    "DispersionSample",
    "DispersionTable",
    "lambda_case",
    "lambda_case_pv",
    "lambda_case_boundary",
    "lambda_general",
    "lambda_boundary",
    "build_theta_table",
    "index_kappa",
    "default_mu_grid",
]

_SERIES_RADIUS = 4.0
_SERIES_TERMS = 18


def _case_series(z2inv):
    """lam_C via the series -sum_{k>=1} z^(-2k)/(2k+1); |z| >= 4 territory.

    Free of the 1 - (1 + ...) cancellation that destroys the direct formula
    at large |z|.
    """
    acc = np.zeros_like(z2inv)
    for k in range(_SERIES_TERMS, 0, -1):
        acc = z2inv * (1.0 / (2 * k + 1) + acc)
    return -acc


def lambda_case(z):
    """Case dispersion function lam_C(z) = 1 + (z/2) ln((z-1)/(z+1)).

    Principal logarithms put the branch cut exactly on [-1, 1]; points on the
    cut are rejected (use lambda_case_boundary for the one-sided limits).
    Scalar or ndarray input.
    """
    arr = np.asarray(z, dtype=complex)
    origin = arr == 0.0  # removable point: both one-sided limits equal 1
    on_cut = (arr.imag == 0.0) & (np.abs(arr.real) <= 1.0) & ~origin
    if np.any(on_cut):
        raise DomainError("lambda_case is undefined on the cut [-1, 1]")
    out = np.empty_like(arr)
    out[origin] = 1.0
    big = np.abs(arr) >= _SERIES_RADIUS
    if np.any(big):
        zb = arr[big]
        out[big] = _case_series(1.0 / (zb * zb))
    rest = ~big & ~origin
    if np.any(rest):
        zs = arr[rest]
        out[rest] = 1.0 + 0.5 * zs * (np.log(zs - 1.0) - np.log(zs + 1.0))
    return out if arr.ndim else complex(out)


def lambda_case_pv(mu):
    """Real principal value of lam_C on the real axis, mu >= 0, mu != 1.

    Equals 1 - (mu/2) ln|(1+mu)/(1-mu)|; inside (0,1) this is the common real
    part of the two boundary values, outside it is lam_C itself.
    """
    arr = np.asarray(mu, dtype=float)
    out = np.empty_like(arr)
    big = np.abs(arr) >= _SERIES_RADIUS
    if np.any(big):
        xb = arr[big]
        out[big] = _case_series(1.0 / (xb * xb)).real
    if np.any(~big):
        xs = arr[~big]
        with np.errstate(divide="ignore", invalid="ignore"):
            out[~big] = 1.0 - 0.5 * xs * np.log(np.abs((1.0 + xs) / (1.0 - xs)))
    return out if arr.ndim else float(out)


def lambda_case_boundary(mu: float, side: str = "above") -> complex:
    """One-sided boundary value lam_C(mu +- i0) = pv(mu) +- i pi mu / 2, |mu| < 1."""
    if not abs(mu) < 1.0:
        raise DomainError(f"boundary values exist only on (-1, 1), got mu={mu}")
    if side not in ("above", "below"):
        raise DomainError(f"side must be 'above' or 'below', got {side!r}")
    sgn = 1.0 if side == "above" else -1.0
    return complex(lambda_case_pv(mu), sgn * 0.5 * math.pi * mu)


def weighted_case_average(model: AlphaModel, z, *, tol: float = 1e-12,
                          max_depth: int = 24) -> complex:
    """The Planck-weighted average (1/l0) int w^(a+4) E(w) lam_C(w^a z) dw.

    This is the generic integral route; at alpha = 0 it must collapse to
    lam_C(z) itself, which the acceptance suite checks to 1e-12.
    """
    a = model.alpha
    zc = complex(z)

    def f(w):
        return w ** (a + 4) * special.einstein(w) * lambda_case(w ** a * zc)

    # the integrand changes character where |w^a z| ~ 1; seed panels there
    pts = []
    mag = abs(zc)
    if a > 0.0 and mag > 1.0:
        w_cross = math.exp(-math.log(mag) / a)
        for s in (1.0, 8.0, 64.0):
            p = w_cross * s
            if 0.0 < p < 0.5 * model.omega_cut:
                pts.append(p)
    val = quadrature.integrate(f, 0.0, model.omega_cut, tol,
                               rule=quadrature.gauss_rule(model.quad_cfg.base_order),
                               max_depth=max_depth, points=pts)
    return val / model.l0_alpha


def lambda_general(model: AlphaModel, z, *, tol: float = 1e-11,
                   max_depth: int = 24) -> complex:
    """Frequency-averaged dispersion function lam(z) off the real axis.

    For alpha = 0 the weight integrates to 1 and lam is exactly lam_C. For
    alpha > 0 the cut fills the whole real axis, so only Im z != 0 is
    accepted here; real arguments go through lambda_boundary.
    """
    if model.alpha == 0.0:
        return lambda_case(z)
    zc = complex(z)
    if zc.imag == 0.0:
        raise DomainError(
            "for alpha > 0 the cut covers the real axis; use lambda_boundary")
    return weighted_case_average(model, zc, tol=tol, max_depth=max_depth)


@dataclass(frozen=True)
class DispersionSample:
    """Boundary data at one point mu > 0 of the cut.

    lambda_real is the principal-value real part of lam+(mu), im_plus its
    (nonnegative) imaginary part, theta the continuous argument in [0, pi].
    """

    mu: float
    lambda_real: float
    im_plus: float
    theta: float


def lambda_boundary(model: AlphaModel, mu: float, *, tol: float = 1e-10,
                    max_depth: int = 20) -> DispersionSample:
    """Boundary value lam+(mu) for mu > 0, with theta = atan2(Im, Re).

    The real part integrates the principal value of lam_C(w^a mu) over the
    weight; the integrand has an integrable logarithmic singularity where
    w^a mu = 1, handled by splitting there. The imaginary part is exact in
    terms of the truncated moment xi_a.
    """
    if mu <= 0:
        raise DomainError(f"lambda_boundary requires mu > 0, got {mu}")
    a = model.alpha
    if a == 0.0:
        re = float(lambda_case_pv(mu))
        im = 0.5 * math.pi * mu if mu < 1.0 else 0.0
        return DispersionSample(mu=mu, lambda_real=re, im_plus=im,
                                theta=math.atan2(im, re))

    im = 0.5 * math.pi * mu * special.xi_alpha(model, mu) / model.l0_alpha

    def f(w):
        w = np.asarray(w, dtype=float)
        vals = w ** (a + 4) * special.einstein(w) * (lambda_case_pv(w ** a * mu) - 1.0)
        # points rounding exactly onto the singular frequency carry zero measure
        return np.where(np.isfinite(vals), vals, 0.0)

    rule = quadrature.gauss_rule(model.quad_cfg.base_order)
    cut = model.omega_cut
    log_ws = -math.log(mu) / a
    val = 0.0
    if log_ws < math.log(cut):
        # integrable log singularity of lam_C at w^a mu = 1: integrate its two
        # neighbourhoods under w = ws -+ e^-t, which maps ln|w - ws| to a
        # smooth, exponentially damped integrand
        ws = math.exp(log_ws)
        dl = min(0.5 * ws, 1.0)
        dr = min(0.5 * (cut - ws), 1.0)
        t_cap = -math.log(16 * np.finfo(float).eps * max(ws, 1.0))

        def left(t):
            t = np.asarray(t, dtype=float)
            return f(ws - np.exp(-t)) * np.exp(-t)

        def right(t):
            t = np.asarray(t, dtype=float)
            return f(ws + np.exp(-t)) * np.exp(-t)

        if ws - dl > 0.0:
            val += quadrature.integrate(f, 0.0, ws - dl, tol, rule=rule,
                                        max_depth=max_depth, scale=model.l0_alpha)
        val += quadrature.integrate(left, -math.log(dl), t_cap, tol, rule=rule,
                                    max_depth=max_depth, scale=model.l0_alpha)
        val += quadrature.integrate(right, -math.log(dr), t_cap, tol, rule=rule,
                                    max_depth=max_depth, scale=model.l0_alpha)
        if ws + dr < cut:
            val += quadrature.integrate(f, ws + dr, cut, tol, rule=rule,
                                        max_depth=max_depth, scale=model.l0_alpha)
    else:
        val = quadrature.integrate(f, 0.0, cut, tol, rule=rule,
                                   max_depth=max_depth, scale=model.l0_alpha)
    re = 1.0 + val / model.l0_alpha
    return DispersionSample(mu=mu, lambda_real=re, im_plus=im,
                            theta=math.atan2(im, re))


@dataclass(frozen=True)
class DispersionTable:
    """Sampled boundary data {mu, Re lam+, Im lam+, theta} plus tail metadata.

    `samples` starts with the exact origin limit (mu=0: lam=1, theta=0) and is
    strictly increasing in mu. For slit-type tables (alpha = 0 and saddle
    surrogates) the support of Im lam+ ends at `slit_edge` and theta == pi
    beyond it; for alpha > 0 the approach theta -> pi is algebraic and encoded
    by tail_exponent/tail_coeff fitted on the last grid decade.
    """

    samples: tuple[DispersionSample, ...]
    alpha: float
    tail_exponent: float | None
    tail_coeff: float | None
    grid_spec: str
    slit_edge: float | None
    boundary_fn: Callable[[float], DispersionSample] = field(repr=False, compare=False)
    tail_fit_residual: float | None = None

    def __post_init__(self):
        mus = np.array([s.mu for s in self.samples])
        if len(mus) < 2 or np.any(np.diff(mus) <= 0):
            raise ConsistencyError("table nodes must be strictly increasing in mu")

    @cached_property
    def mu(self) -> np.ndarray:
        return np.array([s.mu for s in self.samples])

    @cached_property
    def theta(self) -> np.ndarray:
        return np.array([s.theta for s in self.samples])

    @cached_property
    def lambda_real(self) -> np.ndarray:
        return np.array([s.lambda_real for s in self.samples])

    @cached_property
    def im_plus(self) -> np.ndarray:
        return np.array([s.im_plus for s in self.samples])

    @cached_property
    def theta_interp(self) -> PchipInterpolator:
        # monotone cubic protects the unwrapped branch between nodes
        return PchipInterpolator(self.mu, self.theta, extrapolate=False)

    @property
    def mu_max(self) -> float:
        return float(self.mu[-1])

    def theta_at(self, mu):
        """Continuous argument at arbitrary mu >= 0 (table, slit closure, or tail)."""
        arr = np.asarray(mu, dtype=float)
        out = np.empty_like(arr)
        inside = arr <= self.mu_max
        out[inside] = self.theta_interp(arr[inside])
        beyond = ~inside
        if np.any(beyond):
            if self.slit_edge is not None:
                out[beyond] = math.pi
            elif self.tail_exponent is not None:
                out[beyond] = math.pi - self.tail_coeff * arr[beyond] ** self.tail_exponent
            else:
                raise DomainError("no tail model to extend theta beyond the grid")
        return out if arr.ndim else float(out)

    def g_at(self, mu):
        """theta(mu) - pi, the density of the half-space Cauchy transform."""
        return self.theta_at(mu) - math.pi


def default_mu_grid(model: AlphaModel, n: int = 400, mu_min: float = 1e-4,
                    mu_max: float | None = None) -> tuple[np.ndarray, str]:
    """Default sampling grid for the theta table.

    alpha = 0: geometric up to 0.5, then edge-refined toward the slit end at 1
    (theta climbs to pi only logarithmically there). alpha > 0: geometric up
    to a mu_max where either pi - theta < 1e-4 or the power-law tail model
    takes over.
    """
    if model.alpha == 0.0:
        return _slit_grid(1.0, n, mu_min), f"slit[{mu_min:g},1;n={n}]"
    if mu_max is None:
        mu_max = 3000.0
        for probe in (30.0, 100.0, 300.0, 1000.0):
            s = lambda_boundary(model, probe)
            if math.pi - s.theta < 1e-4:
                mu_max = probe
                break
    return (np.geomspace(mu_min, mu_max, n),
            f"geometric[{mu_min:g},{mu_max:g};n={n}]")


def _slit_grid(edge: float, n: int, mu_min: float) -> np.ndarray:
    n_lo, n_mid = (2 * n) // 5, (3 * n) // 10
    lo = np.geomspace(mu_min * edge, 0.5 * edge, n_lo)
    mid = np.linspace(0.5 * edge, 0.9 * edge, n_mid)
    hi = edge * (1.0 - np.geomspace(0.1, 1e-13, n - n_lo - n_mid))
    return np.unique(np.concatenate([lo, mid, hi]))


def build_theta_table(model: AlphaModel, grid: np.ndarray | None = None, *,
                      theta_tol: float = 2e-8, max_passes: int = 8,
                      threads: int = 1) -> DispersionTable:
    """Tabulate lam+ on a positive-mu grid and assign the continuous argument.

    Since Im lam+ >= 0, atan2 already lands in [0, pi], which is the
    continuous branch with theta(0+) = 0; the midpoint-probe refinement in
    the shared tabulation path then guarantees the interpolant reproduces it
    to theta_tol. A residual jump above pi/2 after max_passes means the grid
    cannot resolve the argument and is an error.
    """
    if grid is None:
        grid, spec = default_mu_grid(model)
    else:
        grid = np.asarray(grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise ConsistencyError("grid must be a nonempty 1-d array")
        spec = f"custom[n={len(grid)}]"

    slit_edge = 1.0 if model.alpha == 0.0 else None
    fn = lambda m: lambda_boundary(model, m)
    return _table_from_boundary(fn, grid, model.alpha, slit_edge, spec,
                                theta_tol=theta_tol, max_passes=max_passes,
                                threads=threads)


def _table_from_boundary(boundary_fn, grid, alpha, slit_edge, grid_spec, *,
                         theta_tol=2e-8, max_passes=8, threads=1):
    """Shared tabulation path for real and surrogate dispersion functions.

    Refinement is error-driven: midpoints of unverified segments are probed
    against the monotone-cubic interpolant of the current nodes, and every
    probe becomes a node (a computed boundary value is never discarded).
    Segments whose probe already matched to theta_tol are not refined
    further. Two safety nets follow: a pchip-vs-C2-spline comparison that
    flags pathological segments where the midpoint happens to sit on a zero
    of the error profile, and a 1000-point certification scan whose samples
    are likewise absorbed into the table.
    """
    from .util import ordered_map

    mus = np.sort(np.asarray(grid, dtype=float))
    samples = {float(m): s for m, s in zip(mus, ordered_map(boundary_fn, mus, threads=threads))}

    def sorted_samples():
        return [samples[m] for m in sorted(samples)]

    verified: set[tuple[float, float]] = set()
    for _ in range(max_passes):
        mu_arr = np.array(sorted(samples))
        th_arr = np.array([samples[m].theta for m in mu_arr])
        interp = PchipInterpolator(mu_arr, th_arr)
        pairs = list(zip(mu_arr[:-1], mu_arr[1:]))
        todo = [pr for pr in pairs
                if pr not in verified and pr[0] < 0.5 * (pr[0] + pr[1]) < pr[1]]
        if not todo:
            break
        mids = np.array([0.5 * (a + b) for a, b in todo])
        probes = list(ordered_map(boundary_fn, mids, threads=threads))
        errs = np.abs(interp(mids) - np.array([s.theta for s in probes]))
        for (a, b), m, probe, err in zip(todo, mids, probes, errs):
            samples[float(m)] = probe
            if err <= theta_tol:
                # children inherit: local error drops ~an order per halving
                verified.add((a, float(m)))
                verified.add((float(m), b))
        if np.all(errs <= theta_tol):
            break
    else:
        th_arr = np.array([s.theta for s in sorted_samples()])
        if np.any(np.abs(np.diff(th_arr)) > 0.5 * math.pi):
            raise ResolutionError(
                "theta changes by more than pi/2 between adjacent nodes "
                f"after {max_passes} refinement passes")

    # safety net 1: where pchip degrades (limited derivatives), it separates
    # from the C2 spline built on the same data; probe the disagreements
    from scipy.interpolate import CubicSpline
    for _ in range(4):
        mu_arr = np.array(sorted(samples))
        th_arr = np.array([samples[m].theta for m in mu_arr])
        pchip = PchipInterpolator(mu_arr, th_arr)
        spline = CubicSpline(mu_arr, th_arr)
        fracs = np.array([0.25, 0.5, 0.75])
        pm = mu_arr[:-1, None] + fracs[None, :] * np.diff(mu_arr)[:, None]
        gap = np.abs(pchip(pm) - spline(pm))
        worst = np.argmax(gap, axis=1)
        seg_gap = gap[np.arange(len(worst)), worst]
        flag = np.nonzero(seg_gap > 2.0 * theta_tol)[0]
        new_mus = [float(pm[i, worst[i]]) for i in flag
                   if float(pm[i, worst[i]]) not in samples]
        if not new_mus:
            break
        for m, s in zip(new_mus, ordered_map(boundary_fn, new_mus, threads=threads)):
            samples[m] = s

    # safety net 2: certification scan, all samples absorbed
    mu_arr = np.array(sorted(samples))
    lo, hi = mu_arr[0], mu_arr[-1]
    scan = np.geomspace(lo, hi, 1000)
    scan = [float(m) for m in scan if lo < m < hi and float(m) not in samples]
    for m, s in zip(scan, ordered_map(boundary_fn, scan, threads=threads)):
        samples[m] = s

    out = sorted_samples()
    origin = DispersionSample(mu=0.0, lambda_real=1.0, im_plus=0.0, theta=0.0)
    out = [origin] + out

    tail_p = tail_c = tail_res = None
    if slit_edge is None:
        mu_arr = np.array([s.mu for s in out])
        th_arr = np.array([s.theta for s in out])
        sel = mu_arr >= 0.1 * mu_arr[-1]
        resid = np.pi - th_arr[sel]
        if np.any(resid <= 0):
            raise ConsistencyError("pi - theta must stay positive on the tail")
        coef = np.polyfit(np.log(mu_arr[sel]), np.log(resid), 1)
        tail_p = float(coef[0])
        tail_c = float(np.exp(coef[1]))
        pred = coef[0] * np.log(mu_arr[sel]) + coef[1]
        tail_res = float(np.sqrt(np.mean((pred - np.log(resid)) ** 2)))

    return DispersionTable(samples=tuple(out), alpha=alpha,
                           tail_exponent=tail_p, tail_coeff=tail_c,
                           grid_spec=grid_spec, slit_edge=slit_edge,
                           boundary_fn=boundary_fn, tail_fit_residual=tail_res)


def index_kappa(table: DispersionTable, tol: float = 1e-3) -> int:
    """Winding index of the factorisation coefficient: -(theta(inf)-theta(0))/pi.

    theta(inf) = pi exactly for slit tables (lam+ is real negative beyond the
    edge) and by the decaying tail model otherwise. Must come out -1.
    """
    if len(table.samples) < 8:
        raise ConsistencyError("table too coarse to determine the winding index")
    theta0 = table.samples[0].theta
    if table.slit_edge is not None:
        probe = table.boundary_fn(2.0 * table.slit_edge)
        if probe.im_plus != 0.0 or probe.lambda_real >= 0.0:
            raise ConsistencyError("slit table: lam+ beyond the edge must be real negative")
        theta_inf = math.atan2(probe.im_plus, probe.lambda_real)
    else:
        if table.tail_exponent is None or table.tail_exponent >= 0:
            raise ConsistencyError("tail model does not decay; cannot close the winding")
        theta_inf = math.pi
    kappa_real = -(theta_inf - theta0) / math.pi
    kappa = round(kappa_real)
    if abs(kappa_real - kappa) > tol:
        raise ConsistencyError(
            f"winding {kappa_real} deviates from an integer by more than {tol}")
    return kappa
