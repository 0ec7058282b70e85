"""Analytic data families used by the CLI and the solve tests."""

from __future__ import annotations

import numpy as np

from .errors import DataError
from .lattice import Grid1D
from .norms import HalfLineFunction


def gaussian_halfline(grid: Grid1D, amplitude: float = 1.0, center: float = 5.0,
                      width: float = 2.0, momentum: float = 0.0) -> HalfLineFunction:
    """Gaussian packet amplitude * exp(-((x-center)/width)^2 + i momentum x)."""
    x = grid.nodes
    vals = amplitude * np.exp(-((x - center) / width) ** 2 + 1j * momentum * x)
    return HalfLineFunction(grid, vals)


def bump_halfline(grid: Grid1D, amplitude: float = 1.0, start: float = 0.05,
                  stop: float = 1.85, omega: float = 0.0) -> HalfLineFunction:
    """Compactly supported C-infinity bump on (start, stop), zero at 0."""
    t = grid.nodes
    u = (t - start) / (stop - start)
    vals = np.zeros(grid.n_points, dtype=complex)
    inside = (u > 0.0) & (u < 1.0)
    ui = u[inside]
    vals[inside] = amplitude * np.exp(-1.0 / (ui * (1.0 - ui)) + 4.0)
    vals *= np.exp(1j * omega * t)
    return HalfLineFunction(grid, vals)


def zero_halfline(grid: Grid1D) -> HalfLineFunction:
    return HalfLineFunction(grid, np.zeros(grid.n_points, dtype=complex))


_KINDS = {"gaussian": gaussian_halfline, "bump": bump_halfline,
          "zero": zero_halfline}


def make_halfline(grid: Grid1D, spec: dict) -> HalfLineFunction:
    """Build a half-line function from a config dict with a 'kind' key."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _KINDS:
        raise DataError(f"unknown data kind {kind!r}; expected one of {sorted(_KINDS)}")
    try:
        return _KINDS[kind](grid, **spec)
    except TypeError as exc:
        raise DataError(f"bad parameters for data kind {kind!r}: {exc}") from None
