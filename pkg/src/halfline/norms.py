"""Discrete Sobolev and dispersive space-time norms.

All norms are computed on the dual lattice with the bracket weight
<x> = (1 + x**2)**0.5 and the (2*pi)**-1 Parseval normalization, so the
unweighted cases reduce exactly to physical L^2 norms:

    hs_norm(f, 0)      = ||f||_{L^2(dx)}
    xsb_norm(w, 0, 0)  = ||w||_{L^2(dx dt)}

Half-line functions are measured through their zero extensions, which is
the honest computable choice for |s| < 1/2 (the zero extension is bounded
on H^s exactly in that range; test data additionally vanishes at the
endpoint when larger s is exercised).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .cutoffs import bracket
from .errors import DataError, GridMismatchError, RegimeError
from .lattice import Field, Grid1D, dft_forward, dft_line

# Occupied dual bins above this fraction of the Nyquist frequency trigger a
# resolution warning; fractional weights are applied pointwise with no
# dealiasing correction, so well-resolved data must stay below it.
BAND_FRACTION = 0.8


@dataclass(frozen=True)
class SobolevParams:
    """Regularity triple (s, b, sigma) for the solver and verifier.

    The solver regime is -3/4 < s < 0, max(3/8, 1/8 - s/2) < b < 1/2 and
    1/2 < sigma <= sigma0 = (2b + s + 5/4)/3.
    """

    s: float
    b: float
    sigma: float = 0.51

    @property
    def sigma0(self) -> float:
        return (2.0 * self.b + self.s + 1.25) / 3.0

    def validate_solver_regime(self):
        if not (-0.75 < self.s < 0.0):
            raise RegimeError(f"need -3/4 < s < 0, got s={self.s}")
        blo = max(3.0 / 8.0, 1.0 / 8.0 - self.s / 2.0)
        if not (blo < self.b < 0.5):
            raise RegimeError(
                f"need max(3/8, 1/8 - s/2) = {blo} < b < 1/2, got b={self.b}")
        if not (0.5 < self.sigma <= self.sigma0):
            raise RegimeError(
                f"need 1/2 < sigma <= sigma0 = {self.sigma0}, got sigma={self.sigma}")

    def as_dict(self) -> dict:
        return {"s": self.s, "b": self.b, "sigma": self.sigma}


@dataclass
class HalfLineFunction:
    """Samples of a function of one nonnegative variable on a uniform grid."""

    grid: Grid1D
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=complex)
        if self.grid.origin < 0:
            raise DataError("half-line grid must start at a nonnegative origin")
        if self.samples.shape != (self.grid.n_points,):
            raise GridMismatchError(
                f"samples shape {self.samples.shape} does not match grid "
                f"({self.grid.n_points},)")

    @property
    def decay_flag(self) -> bool:
        """True when the last 10% of samples are below 1e-8 of the max."""
        peak = float(np.max(np.abs(self.samples)))
        if peak == 0.0:
            return True
        tail = self.samples[-max(1, self.grid.n_points // 10):]
        return bool(np.max(np.abs(tail)) <= 1e-8 * peak)

    def __sub__(self, other: "HalfLineFunction") -> "HalfLineFunction":
        if self.grid != other.grid:
            raise GridMismatchError("half-line grids differ")
        return HalfLineFunction(self.grid, self.samples - other.samples)

    def __mul__(self, factor) -> "HalfLineFunction":
        return HalfLineFunction(self.grid, self.samples * factor)

    __rmul__ = __mul__


def zero_extend(h: HalfLineFunction, grid: Grid1D) -> np.ndarray:
    """Extend h by zero onto a full-line grid sharing its spacing.

    The positive nodes of the target grid must line up with (and contain)
    the support of h.
    """
    if abs(grid.spacing - h.grid.spacing) > 1e-12 * grid.spacing:
        raise GridMismatchError(
            f"target spacing {grid.spacing} differs from data spacing {h.grid.spacing}")
    offset = (h.grid.origin - grid.origin) / grid.spacing
    k0 = int(round(offset))
    if abs(offset - k0) > 1e-9:
        raise GridMismatchError("data nodes do not lie on the target lattice")
    if k0 < 0 or k0 + h.grid.n_points > grid.n_points:
        raise GridMismatchError(
            "target grid too short to contain the half-line data")
    out = np.zeros(grid.n_points, dtype=complex)
    out[k0:k0 + h.grid.n_points] = h.samples
    return out


def mirror_grid(half: Grid1D) -> Grid1D:
    """Symmetric full-line grid [-L, L) whose nonnegative part is `half`."""
    if half.origin != 0.0:
        raise GridMismatchError("mirror_grid expects a half-line grid rooted at 0")
    return Grid1D(2 * half.n_points, half.spacing, -half.length)


def _occupancy_check(power: np.ndarray, freqs: np.ndarray, spacing: float, what: str):
    cut = BAND_FRACTION * np.pi / spacing
    total = float(power.sum())
    if total == 0.0:
        return
    high = float(power[np.abs(freqs) > cut].sum())
    if high > 1e-3 * total:
        warnings.warn(
            f"{what}: {100 * high / total:.2f}% of spectral mass above "
            f"{BAND_FRACTION:.0%} of Nyquist; weighted norms may be unresolved",
            stacklevel=3)


def hs_norm(values: np.ndarray, grid: Grid1D, s: float) -> float:
    """H^s norm of line samples: ((2pi)^-1 sum <k>^{2s} |fhat|^2 dk)**0.5."""
    if not -2.0 <= s <= 2.0:
        raise RegimeError(f"hs_norm supports s in [-2, 2], got {s}")
    fhat = dft_line(values, grid)
    power = np.abs(fhat) ** 2
    _occupancy_check(power, grid.freqs, grid.spacing, "hs_norm")
    weighted = bracket(grid.freqs) ** (2.0 * s) * power
    return float(np.sqrt(weighted.sum() * grid.dual_spacing / (2.0 * np.pi)))


def halfline_hs_norm(h: HalfLineFunction, s: float) -> float:
    """H^s(R+) norm of h, computed as the full-line norm of its zero extension."""
    full = mirror_grid(h.grid)
    return hs_norm(zero_extend(h, full), full, s)


def _weighted_dual_norm(f: Field, weight: np.ndarray, what: str) -> float:
    g = f.grid
    sp = dft_forward(f)
    power = np.abs(sp.values) ** 2
    _occupancy_check(power.sum(axis=1), g.x.freqs, g.x.spacing, what + " (x)")
    _occupancy_check(power.sum(axis=0), g.t.freqs, g.t.spacing, what + " (t)")
    total = (weight ** 2 * power).sum() * g.dual_cell()
    return float(np.sqrt(total) / (2.0 * np.pi))


def xsb_norm(f: Field, s: float, b: float) -> float:
    """Dispersive space-time norm || <xi>^s <tau+xi^2>^b what ||_2."""
    xi, tau = f.grid.xi_tau()
    weight = bracket(xi) ** s * bracket(tau + xi ** 2) ** b
    return _weighted_dual_norm(f, weight, "xsb_norm")


def zsb_norm(f: Field, s: float, b: float) -> float:
    """Companion norm with temporal weight: || <tau>^{s/2} <tau+xi^2>^b what ||_2."""
    xi, tau = f.grid.xi_tau()
    weight = bracket(tau) ** (s / 2.0) * bracket(tau + xi ** 2) ** b
    return _weighted_dual_norm(f, weight, "zsb_norm")


def sup_slice_hs(f: Field, s: float) -> float:
    """sup over t-slices of the H^s_x norm of f(., t)."""
    g = f.grid
    fhat = dft_line(f.values, g.x, axis=0)
    power = np.abs(fhat) ** 2
    _occupancy_check(power.sum(axis=1), g.x.freqs, g.x.spacing, "sup_slice_hs")
    weights = bracket(g.x.freqs) ** (2.0 * s)
    slice_sq = (weights[:, None] * power).sum(axis=0) * g.x.dual_spacing / (2.0 * np.pi)
    return float(np.sqrt(slice_sq.max()))


def y_norm(f: Field, s: float, b: float) -> float:
    """Solution-space norm (sup_t ||f(.,t)||_{H^s}^2 + ||f||_{X^{s,b}}^2)**0.5."""
    return float(np.sqrt(sup_slice_hs(f, s) ** 2 + xsb_norm(f, s, b) ** 2))
