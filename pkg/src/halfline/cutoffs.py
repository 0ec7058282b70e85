"""Smooth cutoff functions and the weight bracket.

Every cutoff in the package is built from one C-infinity non-increasing
ramp Psi with Psi(x) = 1 for x <= 0 and Psi(x) = 0 for x >= ramp_width.
The ramp is the normalized integral of the standard bump
exp(-1/(u*(1-u))), evaluated by per-cell Gauss-Legendre quadrature against
a precomputed cumulative table, which is monotone by construction and
accurate to machine precision.

The default ramp width is 1/2 rather than 1: the transition width enters
the frequency profile f1 through the argument (|xi| - delta*|tau|**0.5),
and the narrower ramp keeps min f1 comfortably above 1 at delta = 1/4
while preserving every support property downstream (theta, phi1, phi2,
phi3 and the profile construction only require the transition to finish
by 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RegimeError


def bracket(x):
    """Smooth weight <x> = (1 + x**2)**0.5; even, >= 1, ~ |x| at infinity."""
    return np.hypot(1.0, x)


class _BumpRamp:
    """Cumulative integral of exp(-1/(u*(1-u))) on [0, 1], vectorized."""

    _CELLS = 192
    _ORDER = 12

    def __init__(self):
        nodes, weights = np.polynomial.legendre.leggauss(self._ORDER)
        self._gl_nodes = 0.5 * (nodes + 1.0)
        self._gl_weights = 0.5 * weights
        edges = np.linspace(0.0, 1.0, self._CELLS + 1)
        a, b = edges[:-1], edges[1:]
        pts = a[:, None] + (b - a)[:, None] * self._gl_nodes[None, :]
        cells = ((b - a)[:, None] * self._gl_weights[None, :] * self._bump(pts)).sum(axis=1)
        self._edges = edges
        self._cum = np.concatenate([[0.0], np.cumsum(cells)])
        self.total = float(self._cum[-1])
        self.peak = float(self._bump(np.array(0.5)))

    @staticmethod
    def _bump(u):
        u = np.asarray(u, dtype=float)
        out = np.zeros_like(u)
        inside = (u > 0.0) & (u < 1.0)
        ui = u[inside]
        out[inside] = np.exp(-1.0 / (ui * (1.0 - ui)))
        return out

    def cumulative(self, y):
        """F(y) = integral of the bump over [0, min(max(y,0),1)]."""
        y = np.asarray(y, dtype=float)
        yc = np.clip(y, 0.0, 1.0)
        idx = np.minimum((yc * self._CELLS).astype(int), self._CELLS - 1)
        a = self._edges[idx]
        pts = a[..., None] + (yc - a)[..., None] * self._gl_nodes
        partial = ((yc - a)[..., None] * self._gl_weights * self._bump(pts)).sum(axis=-1)
        return self._cum[idx] + partial

    def density(self, y):
        return self._bump(y) / self.total


_RAMP = _BumpRamp()


@dataclass(frozen=True)
class CutoffConfig:
    """Parameters of the cutoff family.

    delta is the aperture of the frequency-space cone cut (0 < delta <= 1/2);
    ramp_width is the length of the Psi transition interval; psi_ramp
    records the ramp construction for reports.
    """

    delta: float = 0.25
    ramp_width: float = 0.5
    psi_ramp: str = "bump-integral smoothstep"

    def __post_init__(self):
        if not (0.0 < self.delta <= 0.5):
            raise RegimeError(f"delta must lie in (0, 1/2], got {self.delta}")
        if not (0.0 < self.ramp_width <= 1.0):
            raise RegimeError(f"ramp_width must lie in (0, 1], got {self.ramp_width}")

    @property
    def psi_slope_bound(self) -> float:
        """sup |Psi'| for this ramp."""
        return _RAMP.peak / (_RAMP.total * self.ramp_width)


DEFAULT_CUTOFF = CutoffConfig()


def psi(x, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Monotone C-infinity ramp: 1 for x <= 0, 0 for x >= cfg.ramp_width."""
    x = np.asarray(x, dtype=float)
    y = x / cfg.ramp_width
    out = 1.0 - _RAMP.cumulative(y) / _RAMP.total
    out = np.where(y <= 0.0, 1.0, out)
    out = np.where(y >= 1.0, 0.0, out)
    return out if out.ndim else float(out)


def psi_prime(x, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Derivative of :func:`psi` (nonpositive, supported on the ramp)."""
    x = np.asarray(x, dtype=float)
    return -_RAMP.density(x / cfg.ramp_width) / cfg.ramp_width


def theta(t, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Time cutoff: 1 on [-1, 1], support inside (-2, 2), C-infinity."""
    t = np.asarray(t, dtype=float)
    return psi(np.abs(t) - 1.0, cfg)


def phi1(mu, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Low-frequency partition member, support inside (-1, 2)."""
    mu = np.asarray(mu, dtype=float)
    return psi(-mu, cfg) * psi(mu - 1.0, cfg)


def phi2(mu, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """High-frequency partition member, support inside (1, oo);
    phi1 + phi2 = 1 on the positive axis."""
    mu = np.asarray(mu, dtype=float)
    return 1.0 - psi(mu - 1.0, cfg)


def phi3(x, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Smooth truncated identity: x for x >= 0, 0 for x <= -1."""
    x = np.asarray(x, dtype=float)
    return x * psi(-x, cfg)


_CUTOFFS = {"theta": theta, "Psi": psi, "phi1": phi1, "phi2": phi2, "phi3": phi3}


def cutoff_eval(kind: str, x, cfg: CutoffConfig = DEFAULT_CUTOFF):
    """Evaluate one of the named cutoffs (theta, Psi, phi1, phi2, phi3)."""
    try:
        fn = _CUTOFFS[kind]
    except KeyError:
        raise RegimeError(f"unknown cutoff kind {kind!r}; "
                          f"expected one of {sorted(_CUTOFFS)}") from None
    return fn(x, cfg)
