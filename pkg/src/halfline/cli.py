"""Batch front end: solve | verify | norm | profile.

All behavior is driven by one JSON config document; unknown keys are
rejected so a typo cannot silently change a run.  Outputs are CSV tables
with one-line headers plus JSON summaries, written under the output
directory; identical config and seed produce byte-identical artifacts.

Exit status: 0 when every requested check passes its frozen threshold,
1 for an invalid configuration, 2 for a numerical rejection (partial
artifacts are flagged in manifest.json), 3 when a check ran but failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .boundary import F_kernel, profile_build, w_bdr_direct  # noqa: F401
from .cutoffs import CutoffConfig
from .errors import HalflineError
from .families import make_halfline
from .fieldio import read_field
from .lattice import Grid1D, SpaceTimeGrid, symmetric_grid
from .norms import SobolevParams, sup_slice_hs, xsb_norm, y_norm, zsb_norm
from .solve import IBVPData, picard_solve, rescale
from .verify import ESTIMATE_IDS, cached_profile, run_estimate

_DEFAULTS = {
    "n_x": 512, "n_t": 512,
    "L_x": 64.0, "horizon": 8.0,
    "s": -0.5, "b": 0.45, "sigma": 0.51,
    "delta": 0.25,
    "lambda": 1.0,
    "tolerance": 1e-6, "max_iter": 25,
    "seed": 0, "trials": 50,
    "out_dir": "halfline-out",
    "estimates": ["bilinear_X"],
    "tau_max": None,
    "data": {"phi": {"kind": "zero"}, "h": {"kind": "zero"}},
    "field": None,
}


class ConfigError(ValueError):
    pass


def load_config(path: str | None, overrides: dict) -> dict:
    cfg = dict(_DEFAULTS)
    if path is not None:
        with open(path) as fh:
            user = json.load(fh)
        unknown = sorted(set(user) - set(_DEFAULTS))
        if unknown:
            raise ConfigError(f"unknown config key {unknown[0]!r}")
        cfg.update(user)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    _validate(cfg)
    return cfg


def _validate(cfg: dict):
    for key in ("n_x", "n_t"):
        n = cfg[key]
        if not (isinstance(n, int) and n >= 8 and (n & (n - 1)) == 0):
            raise ConfigError(f"{key} must be a power of two >= 8, got {n}")
    for key in ("L_x", "horizon", "tolerance"):
        if not cfg[key] > 0:
            raise ConfigError(f"{key} must be positive, got {cfg[key]}")
    if not (0.0 < cfg["lambda"] <= 1.0):
        raise ConfigError(f"lambda must lie in (0, 1], got {cfg['lambda']}")
    if not (0.0 < cfg["delta"] <= 0.5):
        raise ConfigError(f"delta must lie in (0, 1/2], got {cfg['delta']}")
    if cfg["max_iter"] < 1 or cfg["trials"] < 1:
        raise ConfigError("max_iter and trials must be at least 1")
    for est in cfg["estimates"]:
        if est not in ESTIMATE_IDS:
            raise ConfigError(f"unknown estimate id {est!r}")


def _grids(cfg: dict) -> SpaceTimeGrid:
    return SpaceTimeGrid(symmetric_grid(cfg["n_x"], cfg["L_x"] / 2.0),
                         symmetric_grid(cfg["n_t"], cfg["horizon"] / 2.0))


def _params(cfg: dict) -> SobolevParams:
    return SobolevParams(cfg["s"], cfg["b"], cfg["sigma"])


def _write_json(path: str, payload) -> str:
    with open(path, "w") as out:
        if isinstance(payload, str):
            out.write(payload)
        else:
            json.dump(payload, out, sort_keys=True)
        out.write("\n")
    return path


def _cmd_solve(cfg: dict, out_dir: str) -> tuple[int, list[str]]:
    grid = _grids(cfg)
    phi_grid = Grid1D(cfg["n_x"] // 2, grid.x.spacing, 0.0)
    h_grid = Grid1D(cfg["n_t"] // 2, grid.t.spacing, 0.0)
    data = IBVPData.create(make_halfline(phi_grid, cfg["data"]["phi"]),
                           make_halfline(h_grid, cfg["data"]["h"]),
                           _params(cfg))
    if cfg["lambda"] < 1.0:
        data = rescale(data, cfg["lambda"])
    cutoff = CutoffConfig(delta=cfg["delta"])
    result = picard_solve(data, tol=cfg["tolerance"], max_iter=cfg["max_iter"],
                          cfg=cutoff)

    artifacts = []
    g = result.u.grid
    slice_path = os.path.join(out_dir, "solution_slices.csv")
    with open(slice_path, "w") as out:
        out.write("x,t,re_u,im_u  # space, time, solution value (dimensionless)\n")
        for target in (0.0, 0.25, 0.5, 0.75, 1.0):
            k = int(round((target - g.t.origin) / g.t.spacing))
            t = g.t.nodes[k]
            for j, x in enumerate(g.x.nodes):
                val = result.u.values[j, k]
                out.write(f"{x!r},{t!r},{val.real!r},{val.imag!r}\n")
    artifacts.append(slice_path)
    summary = {
        "converged": result.converged,
        "iterations": len(result.iterate_deltas),
        "iterate_deltas": result.iterate_deltas,
        "residual_norm": result.residual_norm,
        "diagnostics": result.diagnostics,
        "y_norm": y_norm(result.u, cfg["s"], cfg["b"]),
    }
    artifacts.append(_write_json(os.path.join(out_dir, "solve_result.json"), summary))
    return (0 if result.converged else 3), artifacts


def _cmd_verify(cfg: dict, out_dir: str) -> tuple[int, list[str]]:
    grid = _grids(cfg)
    params = _params(cfg)
    cutoff = CutoffConfig(delta=cfg["delta"])
    artifacts = []
    all_pass = True
    for est in cfg["estimates"]:
        report = run_estimate(est, params, trials=cfg["trials"],
                              seed=cfg["seed"], grid=grid, cfg=cutoff)
        artifacts.append(_write_json(
            os.path.join(out_dir, f"report_{est}.json"), report.to_json()))
        log_path = os.path.join(out_dir, f"trials_{est}.csv")
        with open(log_path, "w") as out:
            out.write("trial,ratio  # trial index, LHS/RHS ratio (dimensionless)\n")
            for k, r in report.trial_rows():
                out.write(f"{k},{r!r}\n")
        artifacts.append(log_path)
        all_pass &= report.passes()
    return (0 if all_pass else 3), artifacts


def _cmd_norm(cfg: dict, out_dir: str) -> tuple[int, list[str]]:
    if not cfg["field"]:
        raise ConfigError("norm requires a 'field' path in the config")
    f = read_field(cfg["field"])
    s, b = cfg["s"], cfg["b"]
    lines = [
        f"H^s slice sup (s={s}): {sup_slice_hs(f, s)!r}",
        f"X^(s,b) (s={s}, b={b}): {xsb_norm(f, s, b)!r}",
        f"Z^(s,b) (s={s}, b={b}): {zsb_norm(f, s, b)!r}",
        f"Y^(s,b) (s={s}, b={b}): {y_norm(f, s, b)!r}",
    ]
    print("\n".join(lines))
    path = _write_json(os.path.join(out_dir, "norms.json"), {
        "sup_slice_hs": sup_slice_hs(f, s), "xsb": xsb_norm(f, s, b),
        "zsb": zsb_norm(f, s, b), "y": y_norm(f, s, b), "s": s, "b": b})
    return 0, [path]


def _cmd_profile(cfg: dict, out_dir: str) -> tuple[int, list[str]]:
    grid = _grids(cfg)
    cutoff = CutoffConfig(delta=cfg["delta"])
    tau_max = cfg["tau_max"] or float(np.pi / grid.t.spacing) + 1.0
    profile = cached_profile(cutoff, tau_max)
    table_path = os.path.join(out_dir, "profile.csv")
    with open(table_path, "w") as out:
        out.write("tau,f1,f2,w  # frequency, profile integrals, annihilation multiplier\n")
        for tau, f1, f2, w in zip(profile.tau_nodes, profile.f1_vals,
                                  profile.f2_vals, profile.w_vals):
            out.write(f"{tau!r},{f1!r},{f2!r},{w!r}\n")
    f_path = os.path.join(out_dir, "f_kernel.csv")
    taus = np.geomspace(1.0, tau_max, 13)
    with open(f_path, "w") as out:
        out.write("xi,tau,F  # kernel value on a log sweep (dimensionless)\n")
        for tau in taus:
            for xi in np.sqrt(tau) * np.geomspace(0.02, 40.0, 25):
                out.write(f"{xi!r},{tau!r},{F_kernel(xi, tau, profile, cutoff)!r}\n")
    resid = float(np.max(np.abs(profile.annihilation_residual(
        np.geomspace(1.0, tau_max, 201)))))
    summary = _write_json(os.path.join(out_dir, "profile_summary.json"), {
        "delta": cutoff.delta, "tau_max": tau_max,
        "annihilation_residual_max": resid,
        "f1_min": float(profile.f1_vals[profile.tau_nodes >= 1.0].min()),
    })
    ok = resid <= 1e-8
    return (0 if ok else 3), [table_path, f_path, summary]


_COMMANDS = {"solve": _cmd_solve, "verify": _cmd_verify,
             "norm": _cmd_norm, "profile": _cmd_profile}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="halfline",
        description="Half-line quadratic Schrodinger: solve, verify, norm, profile")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", default=None, help="JSON config path")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="seed override")
    parser.add_argument("--grid", nargs=2, type=int, metavar=("N_X", "N_T"),
                        default=None, help="grid size override")
    args = parser.parse_args(argv)

    overrides: dict = {"seed": args.seed, "out_dir": args.out}
    if args.grid is not None:
        overrides["n_x"], overrides["n_t"] = args.grid

    try:
        cfg = load_config(args.config, overrides)
    except (ConfigError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1

    out_dir = cfg["out_dir"]
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        print(f"invalid config: output directory not writable: {exc}",
              file=sys.stderr)
        return 1

    manifest = os.path.join(out_dir, "manifest.json")
    try:
        status, artifacts = _COMMANDS[args.command](cfg, out_dir)
    except ConfigError as exc:
        print(f"invalid config: {exc}", file=sys.stderr)
        return 1
    except HalflineError as exc:
        _write_json(manifest, {"status": "rejected", "error": str(exc),
                               "artifacts": [], "partial": True})
        print(f"numerical rejection: {exc}", file=sys.stderr)
        return 2
    _write_json(manifest, {"status": "ok" if status == 0 else "failed",
                           "artifacts": sorted(artifacts), "partial": False})
    return status


if __name__ == "__main__":
    sys.exit(main())
