"""Uniform space-time lattices and discrete Fourier transforms.

Fields live on a periodic lattice in (x, t); their transforms live on the
dual lattice in (xi, tau).  The transform convention is

    what(xi, tau) = sum_{x,t} exp(-i*(x*xi + t*tau)) w(x, t) dx dt,

so an on-lattice plane wave exp(i*(xi0*x + tau0*t)) occupies the single dual
bin (xi0, tau0), and the free Schrodinger wave exp(i*(xi0*x - xi0**2*t))
sits on the characteristic parabola tau = -xi0**2 where the modulation
weight <tau + xi**2> is minimal.  Discrete Parseval holds exactly:

    sum |w|^2 dx dt = (2*pi)**-2 * sum |what|^2 dxi dtau.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid1D:
    """Uniform 1D lattice: nodes origin + k*spacing, k = 0..n_points-1.

    n_points must be a power of two (>= 8) so that transforms are fast and
    the dual spacing 2*pi/(n_points*spacing) is exact in floating point.
    """

    n_points: int
    spacing: float
    origin: float = 0.0

    def __post_init__(self):
        if self.n_points < 8 or not _is_pow2(self.n_points):
            raise GridMismatchError(
                f"n_points must be a power of two >= 8, got {self.n_points}")
        if not self.spacing > 0:
            raise GridMismatchError(f"spacing must be positive, got {self.spacing}")

    @property
    def nodes(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.n_points)

    @property
    def dual_spacing(self) -> float:
        return 2.0 * np.pi / (self.n_points * self.spacing)

    @property
    def freqs(self) -> np.ndarray:
        """Dual nodes in FFT order, covering |freq| <= pi/spacing."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @property
    def length(self) -> float:
        return self.n_points * self.spacing

    def index_of(self, coord: float) -> int:
        """Index of an on-lattice coordinate; rejects off-lattice values."""
        k = (coord - self.origin) / self.spacing
        ki = int(round(k))
        if not (0 <= ki < self.n_points) or abs(k - ki) > 1e-9:
            raise GridMismatchError(f"coordinate {coord} is not on the lattice")
        return ki


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Product of an x-lattice and a t-lattice with their dual lattices."""

    x: Grid1D
    t: Grid1D

    @property
    def shape(self) -> tuple[int, int]:
        return (self.x.n_points, self.t.n_points)

    def xi_tau(self) -> tuple[np.ndarray, np.ndarray]:
        """Dual coordinates broadcast to the field shape (FFT order)."""
        return self.x.freqs[:, None], self.t.freqs[None, :]

    def cell(self) -> float:
        return self.x.spacing * self.t.spacing

    def dual_cell(self) -> float:
        return self.x.dual_spacing * self.t.dual_spacing


def _check_shape(grid: SpaceTimeGrid, values: np.ndarray, what: str):
    if values.shape != grid.shape:
        raise GridMismatchError(
            f"{what} shape {values.shape} does not match grid {grid.shape}")


@dataclass
class Field:
    """Complex samples w(x_j, t_k) on a space-time lattice."""

    grid: SpaceTimeGrid
    values: np.ndarray
    underresolved: bool = field(default=False, compare=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        _check_shape(self.grid, self.values, "field")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy(), self.underresolved)


@dataclass
class Spectrum:
    """Complex samples what(xi_j, tau_k) on the dual lattice (FFT order)."""

    grid: SpaceTimeGrid
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        _check_shape(self.grid, self.values, "spectrum")


def _same_grid(a: SpaceTimeGrid, b: SpaceTimeGrid):
    if a != b:
        raise GridMismatchError(f"grids differ: {a} vs {b}")


def dft_forward(f: Field) -> Spectrum:
    """Space-time transform with kernel exp(-i*(x*xi + t*tau)) dx dt."""
    g = f.grid
    vals = np.fft.fft2(f.values) * g.cell()
    vals *= np.exp(-1j * g.x.origin * g.x.freqs)[:, None]
    vals *= np.exp(-1j * g.t.origin * g.t.freqs)[None, :]
    return Spectrum(g, vals)


def dft_inverse(s: Spectrum) -> Field:
    """Inverse of :func:`dft_forward`; round-trips to 1e-12 relative."""
    g = s.grid
    vals = s.values * np.exp(1j * g.x.origin * g.x.freqs)[:, None]
    vals = vals * np.exp(1j * g.t.origin * g.t.freqs)[None, :]
    return Field(g, np.fft.ifft2(vals) / g.cell())


def dft_line(values: np.ndarray, grid: Grid1D, axis: int = -1) -> np.ndarray:
    """1D transform of line samples: fhat(k) = sum exp(-i*x*k) f(x) dx."""
    vals = np.fft.fft(np.asarray(values, dtype=complex), axis=axis) * grid.spacing
    shape = [1] * vals.ndim
    shape[axis] = grid.n_points
    return vals * np.exp(-1j * grid.origin * grid.freqs).reshape(shape)


def idft_line(values: np.ndarray, grid: Grid1D, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dft_line`: f(x) = (2pi)^-1 sum exp(i*x*k) fhat dk."""
    shape = [1] * np.ndim(values)
    shape[axis] = grid.n_points
    vals = np.asarray(values, dtype=complex) * np.exp(
        1j * grid.origin * grid.freqs).reshape(shape)
    return np.fft.ifft(vals, axis=axis) / grid.spacing


def l2_phys(f: Field) -> float:
    """Discrete L^2(dx dt) norm of a field."""
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.cell()))


def l2_dual(s: Spectrum) -> float:
    """(2pi)^-1-normalized L^2(dxi dtau) norm; equals l2_phys by Parseval."""
    return float(np.sqrt(np.sum(np.abs(s.values) ** 2) * s.grid.dual_cell())
                 / (2.0 * np.pi))


def symmetric_grid(n: int, half_length: float) -> Grid1D:
    """Lattice on [-half_length, half_length) with n points; 0 is a node."""
    return Grid1D(n, 2.0 * half_length / n, -half_length)
