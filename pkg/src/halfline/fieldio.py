"""Field interchange files: CSV samples plus a JSON grid sidecar."""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import DataError
from .lattice import Field, Grid1D, SpaceTimeGrid


def write_field(f: Field, csv_path: str, sidecar_path: str | None = None):
    """Write field samples as (x_index, t_index, re, im) rows with a JSON
    sidecar describing the grid."""
    if sidecar_path is None:
        sidecar_path = os.path.splitext(csv_path)[0] + ".grid.json"
    g = f.grid
    with open(csv_path, "w") as out:
        out.write("x_index,t_index,re,im  # lattice indices, field value (dimensionless)\n")
        for j in range(g.x.n_points):
            row = f.values[j]
            for k in range(g.t.n_points):
                out.write(f"{j},{k},{row[k].real!r},{row[k].imag!r}\n")
    meta = {
        "n_x": g.x.n_points, "dx": g.x.spacing, "x0": g.x.origin,
        "n_t": g.t.n_points, "dt": g.t.spacing, "t0": g.t.origin,
    }
    with open(sidecar_path, "w") as out:
        json.dump(meta, out, sort_keys=True)
        out.write("\n")


def read_field(csv_path: str, sidecar_path: str | None = None) -> Field:
    if sidecar_path is None:
        sidecar_path = os.path.splitext(csv_path)[0] + ".grid.json"
    with open(sidecar_path) as fh:
        meta = json.load(fh)
    try:
        grid = SpaceTimeGrid(Grid1D(meta["n_x"], meta["dx"], meta["x0"]),
                             Grid1D(meta["n_t"], meta["dt"], meta["t0"]))
    except KeyError as exc:
        raise DataError(f"grid sidecar missing key {exc}") from None
    vals = np.zeros(grid.shape, dtype=complex)
    with open(csv_path) as fh:
        header = fh.readline()
        if not header.startswith("x_index"):
            raise DataError("field CSV must start with its column header")
        for line in fh:
            j, k, re, im = line.split(",")
            vals[int(j), int(k)] = float(re) + 1j * float(im)
    return Field(grid, vals)
