"""Boundary integral operator, frequency profiles, and whole-plane extension.

The operator that solves the linear half-line problem with zero initial
data and boundary data h is evaluated on the lattice as

    W(h)(x, t) = (1/2pi) sum_{mu<0} e^{i mu t} e^{i sqrt(|mu|) x} hhat(mu) dmu
               + (1/2pi) sum_{mu>=0} e^{i mu t} e^{-sqrt(mu) x} hhat(mu) dmu,

with hhat the transform of the zero extension of h; the mu sums run over
the tau dual lattice so that at x = 0 they reassemble the inverse transform
of hhat exactly and the boundary data is recovered at the nodes.

The whole-plane extension keeps the oscillatory part as is, truncates the
evanescent part at low frequency with the phi1/phi3 cutoffs, and replaces
the high-frequency evanescent part by a mixed even/odd reflection whose
transform is

    I3hat(xi, tau) = phi2(tau) hhat(tau) [ (1 - w(tau)) (1 - Theta(xi, tau))
                     * sqrt(tau)/(xi^2 + tau)  -  (2i/pi) F(xi, tau) ],

where Theta opens a cone |xi| <= delta*sqrt(tau) around the tau axis, w is
chosen so that the slowly decaying part of the reflection kernel cancels
(the annihilation identity [1 + w] f1 + 2 f2 = 0), and F is a principal
value integral evaluated here by singularity subtraction:

    PV int g(n)/(m^2 - n^2) dn
        = int (g(n) - g(m))/(m^2 - n^2) dn  +  g(m) * PV int dn/(m^2 - n^2),

whose second term vanishes on (0, oo) and has an explicit logarithm on any
finite truncation.  The subtracted integrand is smooth, so composite
Gauss-Legendre panels resolve it to near machine precision; the analytic
tails of the integrand are added in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .cutoffs import CutoffConfig, DEFAULT_CUTOFF, phi1, phi2, phi3, psi, psi_prime
from .errors import QuadratureError, RegimeError
from .lattice import Field, Grid1D, SpaceTimeGrid, dft_inverse, dft_line, idft_line, Spectrum
from .norms import HalfLineFunction, mirror_grid, zero_extend
from .propagator import require_decay

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _panel_nodes(edges: np.ndarray, refine: int = 1) -> tuple[np.ndarray, np.ndarray]:
    if refine > 1:
        steps = np.linspace(0.0, 1.0, refine + 1)
        edges = np.unique(np.concatenate(
            [edges[:-1, None] + np.diff(edges)[:, None] * steps[None, :],
             edges[-1:, None]], axis=None))
    a, b = edges[:-1], edges[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    nodes = (mid + half * _GL_NODES[None, :]).ravel()
    weights = (half * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights


@dataclass
class FrequencyProfile:
    """Tabulated tau-profiles f1, f2 and the annihilation multiplier w.

    Values are tabulated on log-spaced nodes over [1/2, tau_max] and
    interpolated cubically in log tau; w vanishes identically below 1/2.
    """

    tau_nodes: np.ndarray
    f1_vals: np.ndarray
    f2_vals: np.ndarray
    w_vals: np.ndarray
    cfg: CutoffConfig
    tau_max: float
    _w_spline: CubicSpline = field(repr=False, compare=False, default=None)
    _f1_spline: CubicSpline = field(repr=False, compare=False, default=None)
    _f2_spline: CubicSpline = field(repr=False, compare=False, default=None)
    _tables: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        logt = np.log(self.tau_nodes)
        if self._w_spline is None:
            object.__setattr__(self, "_w_spline", CubicSpline(logt, self.w_vals))
            object.__setattr__(self, "_f1_spline", CubicSpline(logt, self.f1_vals))
            object.__setattr__(self, "_f2_spline", CubicSpline(logt, self.f2_vals))

    def _eval(self, spline, tau, outside):
        tau = np.asarray(tau, dtype=float)
        if np.any(tau > self.tau_max * (1.0 + 1e-12)):
            raise RegimeError(
                f"tau = {float(np.max(tau))} outside profile range "
                f"(tau_max = {self.tau_max})")
        out = np.full(tau.shape, outside)
        mid = tau > 0.5
        if np.any(mid):
            out[mid] = spline(np.log(tau[mid]))
        return out if out.ndim else float(out)

    def w_at(self, tau):
        """Annihilation multiplier w(tau); zero for tau <= 1/2."""
        return self._eval(self._w_spline, tau, 0.0)

    def f1_at(self, tau):
        return self._eval(self._f1_spline, tau, np.nan)

    def f2_at(self, tau):
        return self._eval(self._f2_spline, tau, np.nan)

    def annihilation_residual(self, tau) -> np.ndarray:
        """[1 + w] f1 + 2 f2 with f1, f2 recomputed by fresh quadrature."""
        f1, f2 = profile_integrals(np.atleast_1d(np.asarray(tau, float)), self.cfg)
        return (1.0 + self.w_at(tau)) * f1 + 2.0 * f2


def profile_integrals(tau: np.ndarray, cfg: CutoffConfig) -> tuple[np.ndarray, np.ndarray]:
    """f1 and f2 at the given tau values (vectorized quadrature).

    In the rescaled variable n = eta/sqrt(tau) the integrands are
    [1 - Psi((n - delta) sqrt(tau))]/(n^2 + 1) and its complement; outside
    the ramp both have arctan antiderivatives, and the ramp section is a
    single smooth Gauss-Legendre panel in the ramp variable.
    """
    tau = np.asarray(tau, dtype=float)
    rt = np.sqrt(tau)
    delta = cfg.delta
    a1 = delta + cfg.ramp_width / rt
    u = 0.5 * cfg.ramp_width * (_GL_NODES + 1.0)
    wts = 0.5 * cfg.ramp_width * _GL_WEIGHTS
    ramp = psi(u, cfg)
    n = delta + u[None, :] / rt[:, None]
    kern = 1.0 / (n ** 2 + 1.0)
    trans2 = (kern * ramp[None, :] * wts[None, :]).sum(axis=1) / rt
    trans1 = (kern * (1.0 - ramp)[None, :] * wts[None, :]).sum(axis=1) / rt
    f2 = np.arctan(delta) + trans2
    f1 = (np.pi / 2.0 - np.arctan(a1)) + trans1
    return f1, f2


def profile_build(cfg: CutoffConfig, tau_max: float,
                  nodes_per_decade: int = 160) -> FrequencyProfile:
    """Tabulate f1, f2 and solve the annihilation identity for w.

    w(tau) = -2 f2/f1 - 1 for tau >= 1, zero below 1/2, with a smooth
    blend in between obtained by multiplying the formula by a ramp.
    """
    if tau_max < 10.0:
        raise RegimeError(f"tau_max must be at least 10, got {tau_max}")
    lo = 0.5
    count = int(np.ceil(np.log10(tau_max / lo) * nodes_per_decade)) + 1
    coarse = np.geomspace(lo, tau_max, count)
    # The blend section (1/2, 2) carries the fastest log-tau variation of w;
    # refine it so the spline interpolant keeps the annihilation identity
    # below 1e-8 everywhere, not just at nodes.
    fine = np.geomspace(lo, 2.0, 4 * nodes_per_decade)
    tau_nodes = np.unique(np.concatenate([coarse, fine, [1.0, 2.0]]))
    f1, f2 = profile_integrals(tau_nodes, cfg)
    on = tau_nodes >= 1.0
    if np.any(f1[on] < 0.1):
        bad = tau_nodes[on][np.argmin(f1[on])]
        raise QuadratureError(
            f"profile integral f1 lost its lower bound near tau = {bad}")
    if np.any(~np.isfinite(f1)) or np.any(~np.isfinite(f2)):
        bad = tau_nodes[~np.isfinite(f1 * f2)][0]
        raise QuadratureError(f"profile quadrature failed at tau = {bad}")
    blend = psi(2.0 * cfg.ramp_width * (1.0 - tau_nodes), cfg)
    w = blend * (-2.0 * f2 / f1 - 1.0)
    return FrequencyProfile(tau_nodes, f1, f2, w, cfg, float(tau_max))


@dataclass
class BoundarySpectrum:
    """Transform of the zero-extended boundary data on the tau lattice."""

    h_star_hat: np.ndarray
    grid: SpaceTimeGrid


def boundary_spectrum(h: HalfLineFunction, grid: SpaceTimeGrid) -> BoundarySpectrum:
    h_star = zero_extend(h, grid.t)
    return BoundarySpectrum(dft_line(h_star, grid.t), grid)


def theta_eval(xi, tau, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Cone cutoff Theta(xi, tau) = Psi(|xi| - delta*|tau|**0.5); even in xi."""
    xi = np.asarray(xi, dtype=float)
    tau = np.asarray(tau, dtype=float)
    return psi(np.abs(xi) - cfg.delta * np.sqrt(np.abs(tau)), cfg)


def theta1_eval(xi, tau, profile: FrequencyProfile,
                cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Reflection multiplier [1 + w][1 - Theta] + 2*Theta; even in xi."""
    th = theta_eval(xi, tau, cfg)
    w = profile.w_at(tau)
    return (1.0 + w) * (1.0 - th) + 2.0 * th


def _f_core(m: np.ndarray, tau: float, w_tau: float, cfg: CutoffConfig,
            refine: int = 1) -> np.ndarray:
    """F(m*sqrt(tau), tau) for an array of nonnegative m (both branches)."""
    rt = np.sqrt(tau)
    delta = cfg.delta
    a1 = delta + cfg.ramp_width / rt
    m = np.asarray(m, dtype=float)
    mmax = float(m.max()) if m.size else 0.0
    big_n = max(8.0, a1 + 4.0, 2.0 * mmax + 8.0)

    edges = [0.0, 0.5 * delta, delta]
    edges += list(delta + (a1 - delta) * np.linspace(0.25, 1.0, 4))
    step = max(0.5, a1)
    pos = a1
    while pos < big_n:
        pos = min(pos + step, big_n)
        edges.append(pos)
        step *= 1.7
    nodes, weights = _panel_nodes(np.asarray(edges), refine)

    def theta1(n):
        ramp = psi((n - delta) * rt, cfg)
        return (1.0 + w_tau) * (1.0 - ramp) + 2.0 * ramp

    def g_of(n):
        return theta1(n) / (n ** 2 + 1.0)

    def g_prime(n):
        ramp_d = psi_prime((n - delta) * rt, cfg) * rt
        return ((1.0 - w_tau) * ramp_d / (n ** 2 + 1.0)
                - 2.0 * n * theta1(n) / (n ** 2 + 1.0) ** 2)

    g = g_of(nodes)
    gm = g_of(m)
    gpm = g_prime(m)

    denom = m[:, None] ** 2 - nodes[None, :] ** 2
    near = np.abs(m[:, None] - nodes[None, :]) < 1e-7 * (1.0 + m[:, None])
    denom_safe = np.where(near, 1.0, denom)

    msafe = np.where(m > 0.0, m, 1.0)
    lam = np.log((big_n + msafe) / (big_n - msafe)) / (2.0 * msafe)
    arct = np.pi / 2.0 - np.arctan(big_n)

    out = np.zeros_like(m)
    low = (m < 2.0) & (m > 0.0)
    high = m >= 2.0

    if np.any(low):
        num = g[None, :] - gm[low][:, None]
        integrand = num / denom_safe[low]
        limit = (-gpm[low] / (2.0 * msafe[low]))[:, None]
        integrand = np.where(near[low], limit, integrand)
        s = integrand @ weights
        tail = (1.0 + w_tau) / (m[low] ** 2 + 1.0) * (arct - lam[low])
        out[low] = (m[low] / rt) * (s + gm[low] * lam[low] + tail)

    if np.any(high):
        num = (nodes ** 2 * g)[None, :] - (m[high] ** 2 * gm[high])[:, None]
        integrand = num / denom_safe[high]
        limit = (-(gm[high] + 0.5 * m[high] * gpm[high]))[:, None]
        integrand = np.where(near[high], limit, integrand)
        s = integrand @ weights
        tail = (1.0 + w_tau) * (-lam[high]
                                - (arct - lam[high]) / (m[high] ** 2 + 1.0))
        out[high] = (s + m[high] ** 2 * gm[high] * lam[high] + tail) / (m[high] * rt)

    return out


def F_kernel(xi: float, tau: float, profile: FrequencyProfile,
             cfg: CutoffConfig = DEFAULT_CUTOFF, refine: int = 1) -> float:
    """Principal-value reflection kernel; odd in xi, branch switch at 2*sqrt(tau)."""
    if tau < 1.0:
        raise RegimeError(f"F kernel requires tau >= 1, got {tau}")
    w_tau = float(profile.w_at(tau))
    m = abs(xi) / np.sqrt(tau)
    val = float(_f_core(np.array([m]), tau, w_tau, cfg, refine)[0])
    if not np.isfinite(val):
        raise QuadratureError(f"F kernel quadrature failed at (xi, tau) = ({xi}, {tau})")
    return float(np.sign(xi)) * val


def _extension_tables(grid: SpaceTimeGrid, profile: FrequencyProfile,
                      cfg: CutoffConfig) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Lattice tables (phi2(tau), smooth part A, signed F) for the extension."""
    key = (grid.x, grid.t, cfg)
    if key in profile._tables:
        return profile._tables[key]
    taus = grid.t.freqs
    p2 = phi2(taus, cfg)
    active = np.nonzero(p2 > 0.0)[0]
    n_x = grid.x.n_points
    xi = grid.x.freqs
    xi_abs = np.abs(xi[:n_x // 2 + 1])
    fold = np.minimum(np.arange(n_x), n_x - np.arange(n_x))
    sign = np.sign(xi)

    a_tab = np.zeros((n_x, grid.t.n_points))
    f_tab = np.zeros((n_x, grid.t.n_points))
    period = n_x * grid.x.dual_spacing
    for k in active:
        tau = float(taus[k])
        w_tau = float(profile.w_at(tau))
        th = psi(np.abs(xi) - cfg.delta * np.sqrt(tau), cfg)
        # Lattice samples of the smooth part are alias-folded in closed form:
        # sum_m 1/((xi + m*P)^2 + tau) has a cosh/cos expression, and every
        # image sits far outside the cone so its Theta factor is 1.  This
        # makes the inverse DFT reproduce true samples of the extension
        # instead of a Nyquist-truncated integral.
        a = np.sqrt(tau)
        r = 2.0 * np.pi * a / period
        folded = (np.pi / (period * a)) * np.sinh(r) / (
            np.cosh(r) - np.cos(2.0 * np.pi * xi / period))
        a_tab[:, k] = (1.0 - w_tau) * a * (folded - th / (xi ** 2 + tau))
        vals = _f_core(xi_abs / np.sqrt(tau), tau, w_tau, cfg)
        f_tab[:, k] = sign * vals[fold]
    if not np.all(np.isfinite(f_tab)):
        raise QuadratureError("F kernel table contains non-finite entries")
    tables = (p2, a_tab, f_tab)
    profile._tables[key] = tables
    return tables


def i3_spectrum(h: BoundarySpectrum, profile: FrequencyProfile,
                cfg: CutoffConfig = DEFAULT_CUTOFF) -> Spectrum:
    """Transform of the reflected high-frequency extension piece."""
    grid = h.grid
    p2, a_tab, f_tab = _extension_tables(grid, profile, cfg)
    coeff = p2 * h.h_star_hat
    vals = coeff[None, :] * (a_tab - (2j / np.pi) * f_tab)
    return Spectrum(grid, vals)


def w_bdr_direct(h: HalfLineFunction, grid: SpaceTimeGrid) -> Field:
    """Boundary integral operator on the quarter plane (zeros at x < 0).

    The two mu integrals are taken over the tau dual lattice, so their sum
    at x = 0 is the exact lattice inversion of hhat and the boundary data
    is recovered nodewise.
    """
    require_decay(h, "w_bdr_direct")
    hhat = boundary_spectrum(h, grid).h_star_hat
    taus = grid.t.freqs
    x = grid.x.nodes
    xpos = x >= 0.0
    neg = taus < 0.0
    pos = ~neg

    vals = np.zeros((grid.x.n_points, grid.t.n_points), dtype=complex)
    xp = x[xpos][:, None]
    v = np.zeros((int(xpos.sum()), grid.t.n_points), dtype=complex)
    v[:, neg] = hhat[neg][None, :] * np.exp(1j * np.sqrt(-taus[neg])[None, :] * xp)
    v[:, pos] = hhat[pos][None, :] * np.exp(-np.sqrt(taus[pos])[None, :] * xp)
    vals[xpos, :] = idft_line(v, grid.t, axis=-1)
    return Field(grid, vals)


def phi_bdr_apply(h: HalfLineFunction, grid: SpaceTimeGrid,
                  profile: FrequencyProfile,
                  cfg: CutoffConfig = DEFAULT_CUTOFF) -> Field:
    """Whole-plane extension of the boundary operator (all of R^2)."""
    bs = boundary_spectrum(h, grid)
    hhat = bs.h_star_hat
    taus = grid.t.freqs
    x = grid.x.nodes[:, None]
    neg = taus < 0.0
    pos = ~neg

    v = np.zeros((grid.x.n_points, grid.t.n_points), dtype=complex)
    v[:, neg] = hhat[neg][None, :] * np.exp(1j * np.sqrt(-taus[neg])[None, :] * x)
    v[:, pos] = (hhat[pos] * phi1(taus[pos], cfg))[None, :] * np.exp(
        -np.sqrt(taus[pos])[None, :] * phi3(x, cfg))
    i12 = idft_line(v, grid.t, axis=-1)
    i3 = dft_inverse(i3_spectrum(bs, profile, cfg)).values
    return Field(grid, i12 + i3)
