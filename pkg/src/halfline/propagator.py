"""Free Schrodinger group, Duhamel integral, and their boundary traces.

The group acts slice by slice in spectral x:

    u(xi, t) = exp(-i*xi**2*t) * phihat(xi),

so u(., 0) reproduces the data and the L^2 mass is conserved in t exactly.
The Duhamel operator

    v(x, t) = int_0^t [W(f(., t'))](x, t - t') dt'

is accumulated with the group factored out of each step and the source
interpolated linearly in t', which makes the update exact for sources that
are constant in time and second-order accurate in general.  The t = 0 node
must be on the lattice; for t < 0 the integral runs backwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, GridMismatchError
from .lattice import Field, Grid1D, SpaceTimeGrid, dft_line, idft_line
from .norms import HalfLineFunction, zero_extend

# Fraction of Nyquist beyond which spectral mass marks data as underresolved.
_TAIL_FRACTION = 0.8
_TAIL_TOL = 1e-8


@dataclass
class InitialData:
    """Half-line initial datum with its zero extension on a full x-grid."""

    phi: HalfLineFunction
    x_grid: Grid1D
    extension: np.ndarray

    @classmethod
    def from_halfline(cls, phi: HalfLineFunction, x_grid: Grid1D) -> "InitialData":
        return cls(phi, x_grid, zero_extend(phi, x_grid))


def _resolution_flag(phihat: np.ndarray, grid: Grid1D) -> bool:
    peak = float(np.max(np.abs(phihat)))
    if peak == 0.0:
        return False
    tail = np.abs(grid.freqs) > _TAIL_FRACTION * np.pi / grid.spacing
    return bool(np.max(np.abs(phihat[tail]), initial=0.0) > _TAIL_TOL * peak)


def w_r_apply(phi_star: np.ndarray, grid: SpaceTimeGrid) -> Field:
    """Evolve full-line data by the free group on every t-slice."""
    phi_star = np.asarray(phi_star, dtype=complex)
    if phi_star.shape != (grid.x.n_points,):
        raise GridMismatchError(
            f"data shape {phi_star.shape} does not match x-grid "
            f"({grid.x.n_points},)")
    phihat = dft_line(phi_star, grid.x)
    underresolved = _resolution_flag(phihat, grid.x)
    xi = grid.x.freqs[:, None]
    t = grid.t.nodes[None, :]
    vals = idft_line(np.exp(-1j * xi ** 2 * t) * phihat[:, None], grid.x, axis=0)
    return Field(grid, vals, underresolved=underresolved)


def _phi12(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """phi1(z) = (e^z - 1)/z and phi2(z) = (e^z - 1 - z)/z^2, stable near 0."""
    z = np.asarray(z, dtype=complex)
    small = np.abs(z) < 1e-5
    zs = np.where(small, 1.0, z)
    e = np.exp(z)
    p1 = np.where(small, 1.0 + z / 2.0 + z ** 2 / 6.0, (e - 1.0) / zs)
    p2 = np.where(small, 0.5 + z / 6.0 + z ** 2 / 24.0, (e - 1.0 - z) / zs ** 2)
    return p1, p2


def duhamel_apply(f: Field, grid: SpaceTimeGrid | None = None) -> Field:
    """Accumulate int_0^t W(f(., t'))(x, t - t') dt' over the lattice."""
    if grid is None:
        grid = f.grid
    elif grid != f.grid:
        raise GridMismatchError("source field lives on a different grid")
    dt = grid.t.spacing
    k0 = grid.t.index_of(0.0)
    xi = grid.x.freqs
    fhat = dft_line(f.values, grid.x, axis=0)

    z = -1j * xi ** 2 * dt
    ez = np.exp(z)
    p1, p2 = _phi12(z)
    # v(t+dt) = e^z v(t) + dt*[(phi1 - phi2) f(t) + phi2 f(t+dt)]
    a_fwd = dt * (p1 - p2)
    b_fwd = dt * p2
    zb = -z
    ezb = np.exp(zb)
    p1b, p2b = _phi12(zb)
    a_bwd = dt * (p1b - p2b)
    b_bwd = dt * p2b

    vhat = np.zeros_like(fhat)
    n_t = grid.t.n_points
    for k in range(k0, n_t - 1):
        vhat[:, k + 1] = ez * vhat[:, k] + a_fwd * fhat[:, k] + b_fwd * fhat[:, k + 1]
    for k in range(k0, 0, -1):
        vhat[:, k - 1] = (ezb * vhat[:, k]
                          - (a_bwd * fhat[:, k] + b_bwd * fhat[:, k - 1]))
    return Field(grid, idft_line(vhat, grid.x, axis=0))


def _positive_t_grid(t_grid: Grid1D) -> tuple[Grid1D, int]:
    k0 = t_grid.index_of(0.0)
    n = t_grid.n_points - k0
    if n & (n - 1):
        raise GridMismatchError(
            "positive part of the t-grid must have a power-of-two node count")
    return Grid1D(n, t_grid.spacing, 0.0), k0


def trace_p(phi: InitialData, grid: SpaceTimeGrid) -> HalfLineFunction:
    """Boundary trace of the free evolution: p(t) = W(phi*)(0, t), t >= 0."""
    u = w_r_apply(phi.extension, grid)
    return field_trace(u, grid)


def trace_q(f: Field, grid: SpaceTimeGrid | None = None) -> HalfLineFunction:
    """Boundary trace of the Duhamel integral at x = 0 for t >= 0."""
    v = duhamel_apply(f, grid)
    return field_trace(v, v.grid)


def field_trace(u: Field, grid: SpaceTimeGrid) -> HalfLineFunction:
    """Restrict a field to the x = 0 column and nonnegative times."""
    jx = grid.x.index_of(0.0)
    half, k0 = _positive_t_grid(grid.t)
    return HalfLineFunction(half, u.values[jx, k0:])


def require_decay(h: HalfLineFunction, what: str):
    if not h.decay_flag:
        raise DataError(f"{what}: data does not decay at the grid end")
