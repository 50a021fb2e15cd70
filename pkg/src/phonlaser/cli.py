"""Batch front end: config-driven evaluation, sweeps, and figure data.

Subcommands
    analytics   closed-form operating point, statistics, validity report
    sweep       analytic F / g2 tables over 1-2 parameter axes
    steady      exact steady-state statistics (tasks: point, fig4a, fig4b)
    mcwf        quantum-jump ensemble statistics (tasks: point, fig4a)
    wigner      steady-state mechanical Wigner grid
    validate    regime-of-validity check, exit 1 on any flag

Configs are JSON with a mandatory ``units`` tag: "kappa" for rates already
expressed relative to the optical linewidth, or "si" for angular rates in
rad/s (optionally deriving E from power/omega_b and nbar0 from
temperature/omega_m); SI inputs are normalized to kappa units internally.
CSV output is deterministic (12 significant digits, no timestamps); JSON
mirrors the rows and adds a metadata block.
"""

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import __version__
from . import hilbert as hb
from . import observables as ob
from . import solvers as sv
from .analytics import (
    BelowThreshold,
    CoolingChannel,
    NoAntibunchingError,
    SystemParams,
    drive_from_power,
    fano,
    gain_ratio,
    limit_cycle,
    optical_amplitudes,
    optimal_operating_point,
    thermal_occupation,
    validity_report,
)
from .model import build_model

EXIT_OK = 0
EXIT_FLAGS = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3

DEFAULT_MAX_DIM = 400
_PARAM_KEYS = ("g0", "kappa", "gamma0", "E", "nbar0", "omega_m")
_SI_EXTRA_KEYS = ("power", "omega_b", "temperature")
_AXIS_NAMES = ("g0", "kappa", "gamma0", "E", "nbar0", "R")


class ConfigError(ValueError):
    """Malformed or inconsistent run configuration."""


@dataclass(frozen=True)
class RunConfig:
    """One resolved run: subcommand, physics, numerics, and output plumbing."""

    mode: str
    params: SystemParams
    dims: hb.ModeDims
    frame: str
    task: str
    axes: tuple
    traj: sv.TrajectoryConfig
    out: Optional[str]
    fmt: str
    seed: int
    threads: int
    max_dim: int
    raw: dict = field(repr=False, default_factory=dict)


# -- config ingestion ---------------------------------------------------------

def _require(cond: bool, message: str):
    if not cond:
        raise ConfigError(message)


def _build_params(conf: dict) -> SystemParams:
    units = conf.get("units")
    _require(
        units in ("kappa", "si"),
        f"config must carry a units tag 'kappa' or 'si', got {units!r}",
    )
    pr = dict(conf.get("params", {}))
    cooling = pr.pop("cooling", None)
    unknown = set(pr) - set(_PARAM_KEYS) - (set(_SI_EXTRA_KEYS) if units == "si" else set())
    _require(not unknown, f"unknown parameter keys {sorted(unknown)}")

    if units == "si":
        _require("kappa" in pr, "SI config requires kappa in rad/s")
        kappa = float(pr["kappa"])
        if "E" not in pr and "power" in pr:
            _require("omega_b" in pr, "deriving E from power requires omega_b")
            pr["E"] = drive_from_power(float(pr["power"]), float(pr["omega_b"]), kappa)
        if "nbar0" not in pr and "temperature" in pr:
            _require("omega_m" in pr, "deriving nbar0 from temperature requires omega_m")
            pr["nbar0"] = thermal_occupation(float(pr["omega_m"]), float(pr["temperature"]))
        for key in _SI_EXTRA_KEYS:
            pr.pop(key, None)
        # normalize to kappa units
        for key in ("g0", "gamma0", "E", "omega_m"):
            if key in pr:
                pr[key] = float(pr[key]) / kappa
        pr["kappa"] = 1.0
        if cooling is not None:
            cooling = {k: float(v) / kappa for k, v in cooling.items()}

    if cooling is not None:
        try:
            pr["cooling"] = CoolingChannel(**cooling)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad cooling channel: {exc}") from None
    try:
        return SystemParams(**pr)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad parameters: {exc}") from None


def _build_dims(conf: dict) -> hb.ModeDims:
    wanted = conf.get("dims", [3, 3, 16])
    _require(
        isinstance(wanted, (list, tuple)) and len(wanted) == 3,
        f"dims must be a list of three cutoffs, got {wanted!r}",
    )
    try:
        return hb.ModeDims(*(int(n) for n in wanted))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad dims: {exc}") from None


def _build_axes(conf: dict) -> tuple:
    axes = conf.get("sweep", {}).get("axes", [])
    _require(1 <= len(axes) <= 2 or not axes, "sweep takes 1 or 2 axes")
    out = []
    for ax in axes:
        name = ax.get("name")
        _require(name in _AXIS_NAMES, f"axis over unknown parameter {name!r}")
        try:
            points = int(ax.get("points", 1))
            lo, hi = float(ax["min"]), float(ax.get("max", ax["min"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad axis {name!r}: {exc}") from None
        scale = ax.get("scale", "linear")
        _require(scale in ("linear", "log"), f"axis scale {scale!r} not linear|log")
        _require(points >= 1, "axis needs points >= 1")
        if points == 1:
            values = np.array([lo])
        elif scale == "log":
            _require(lo > 0, "log axis needs min > 0")
            values = np.geomspace(lo, hi, points)
        else:
            values = np.linspace(lo, hi, points)
        out.append((name, values))
    return tuple(out)


def _build_traj(conf: dict, seed: int, threads: int) -> sv.TrajectoryConfig:
    tr = dict(conf.get("trajectories", {}))
    allowed = {
        "n_traj", "tau", "seed", "initial_spread", "initial_center",
        "max_step", "max_jump_prob", "bootstrap_samples", "workers",
    }
    unknown = set(tr) - allowed
    _require(not unknown, f"unknown trajectory keys {sorted(unknown)}")
    center = tr.get("initial_center")
    if isinstance(center, (list, tuple)):
        _require(len(center) == 2, "initial_center takes [re, im]")
        tr["initial_center"] = complex(float(center[0]), float(center[1]))
    tr.setdefault("seed", seed)
    tr.setdefault("workers", threads)
    try:
        return sv.TrajectoryConfig(**tr)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad trajectory config: {exc}") from None


def load_config(path: str, mode: str, args) -> RunConfig:
    try:
        with open(path) as fh:
            conf = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    _require(isinstance(conf, dict), "config root must be an object")

    seed = args.seed if args.seed is not None else int(conf.get("seed", 0))
    threads = args.threads
    frame = conf.get("frame", "lab")
    _require(frame in ("lab", "displaced"), f"frame {frame!r} not lab|displaced")
    task = conf.get("task", "point")
    _require(task in ("point", "fig4a", "fig4b"), f"task {task!r} unknown")
    return RunConfig(
        mode=mode,
        params=_build_params(conf),
        dims=_build_dims(conf),
        frame=frame,
        task=task,
        axes=_build_axes(conf),
        traj=_build_traj(conf, seed, threads),
        out=args.out,
        fmt=args.format,
        seed=seed,
        threads=threads,
        max_dim=args.max_dim,
        raw=conf,
    )


# -- output -------------------------------------------------------------------

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def write_rows(cfg: RunConfig, fieldnames: list, rows: list):
    """CSV is byte-stable for a fixed config; JSON adds a metadata block."""
    if cfg.fmt == "csv":
        target = open(cfg.out, "w", newline="") if cfg.out else sys.stdout
        try:
            writer = csv.writer(target, lineterminator="\n")
            writer.writerow(fieldnames)
            for row in rows:
                writer.writerow([_cell(row.get(k)) for k in fieldnames])
        finally:
            if cfg.out:
                target.close()
        return
    clean = [
        {k: (None if _is_nan(row.get(k)) else row.get(k)) for k in fieldnames}
        for row in rows
    ]
    doc = {
        "metadata": {
            "version": __version__,
            "mode": cfg.mode,
            "task": cfg.task,
            "seed": cfg.seed,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        },
        "fields": fieldnames,
        "rows": clean,
    }
    text = json.dumps(doc, indent=2, default=_json_default)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _is_nan(v) -> bool:
    return isinstance(v, float) and np.isnan(v)


def _json_default(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    raise TypeError(f"not JSON serializable: {type(v)}")


# -- analytic commands --------------------------------------------------------

def _param_echo(p: SystemParams) -> dict:
    return {
        "g0": p.g0, "kappa": p.kappa, "gamma0": p.gamma0, "E": p.E,
        "nbar0": p.nbar0, "gamma": p.gamma, "nbar": p.nbar,
    }


_ANALYTICS_FIELDS = [
    "g0", "kappa", "gamma0", "E", "nbar0", "gamma", "nbar", "R",
    "above_threshold", "zeta0", "zeta0_sq", "alpha0_abs", "beta0_abs",
    "Gamma", "D", "mean_n", "F", "g2", "g2_minus_1_scaled", "n_ph",
    "n_ph_scaled", "R_opt", "g2_opt", "note", "valid", "valid_flags",
    "enhancement",
]


def analytics_record(p: SystemParams) -> dict:
    row = _param_echo(p)
    row["R"] = gain_ratio(p)
    sol = limit_cycle(p)
    if isinstance(sol, BelowThreshold):
        alpha, beta = optical_amplitudes(p, 0.0)
        n_ph = abs(alpha) ** 2 + abs(beta) ** 2
        row.update({
            "above_threshold": False, "zeta0": 0.0, "zeta0_sq": 0.0,
            "alpha0_abs": abs(alpha), "beta0_abs": abs(beta),
            "Gamma": None, "D": None, "mean_n": None, "F": None, "g2": None,
            "g2_minus_1_scaled": None, "n_ph": n_ph,
            "n_ph_scaled": n_ph / (p.kappa * p.gamma / (4 * p.g0**2)),
        })
    else:
        row.update({
            "above_threshold": True, "zeta0": sol.zeta0, "zeta0_sq": sol.zeta0**2,
            "alpha0_abs": abs(sol.alpha0), "beta0_abs": abs(sol.beta0),
            "Gamma": sol.Gamma, "D": sol.D, "mean_n": sol.mean_n, "F": sol.fano,
            "g2": sol.g2,
            "g2_minus_1_scaled": (sol.g2 - 1.0) / (p.g0 / p.kappa) ** 2,
            "n_ph": sol.n_ph,
            "n_ph_scaled": sol.n_ph / (p.kappa * p.gamma / (4 * p.g0**2)),
        })
    try:
        opt = optimal_operating_point(p.g0 / p.kappa, p.nbar)
        row["R_opt"] = opt.gain_ratio
        row["g2_opt"] = opt.g2
        row["note"] = "g2_opt from the closed-form optimum; see README case study"
    except NoAntibunchingError:
        row["R_opt"] = None
        row["g2_opt"] = None
        row["note"] = "nbar >= 1: antibunching unreachable at any drive"
    rep = validity_report(p)
    row["valid"] = rep.ok
    row["valid_flags"] = ";".join(rep.flags)
    row["enhancement"] = rep.enhancement
    return row


def run_analytics(cfg: RunConfig) -> int:
    write_rows(cfg, _ANALYTICS_FIELDS, [analytics_record(cfg.params)])
    return EXIT_OK


_SWEEP_FIELDS = [
    "g0", "kappa", "gamma0", "E", "nbar0", "gamma", "nbar", "R",
    "above_threshold", "zeta0_sq", "F", "g2", "g2_minus_1_scaled",
    "n_ph", "n_ph_scaled",
]


def _point_params(p: SystemParams, assignments: dict) -> SystemParams:
    fields = {
        "g0": p.g0, "kappa": p.kappa, "gamma0": p.gamma0, "E": p.E,
        "nbar0": p.nbar0, "omega_m": p.omega_m, "cooling": p.cooling,
    }
    fields.update({k: v for k, v in assignments.items() if k != "R"})
    if "R" in assignments:
        # the drive sets the gain; solve R = 16 g0^2 E^2 / kappa^3 gamma for E
        q = SystemParams(**fields)
        fields["E"] = float(
            np.sqrt(assignments["R"] * q.kappa**3 * q.gamma / (16.0 * q.g0**2))
        )
    try:
        return SystemParams(**fields)
    except ValueError as exc:
        raise ConfigError(f"sweep point {assignments} is unphysical: {exc}") from None


def sweep_rows(cfg: RunConfig) -> list:
    _require(cfg.axes, "sweep needs a sweep.axes section")
    grids = [values for _, values in cfg.axes]
    names = [name for name, _ in cfg.axes]
    rows = []
    for idx in np.ndindex(*(len(g) for g in grids)):
        assignments = {n: float(g[i]) for n, g, i in zip(names, grids, idx)}
        p = _point_params(cfg.params, assignments)
        rec = _param_echo(p)
        rec["R"] = gain_ratio(p)
        sol = limit_cycle(p)
        if isinstance(sol, BelowThreshold):
            alpha, beta = optical_amplitudes(p, 0.0)
            n_ph = abs(alpha) ** 2 + abs(beta) ** 2
            rec.update({
                "above_threshold": False, "zeta0_sq": 0.0, "F": None,
                "g2": None, "g2_minus_1_scaled": None, "n_ph": n_ph,
                "n_ph_scaled": n_ph / (p.kappa * p.gamma / (4 * p.g0**2)),
            })
        else:
            rec.update({
                "above_threshold": True, "zeta0_sq": sol.zeta0**2, "F": sol.fano,
                "g2": sol.g2,
                "g2_minus_1_scaled": (sol.g2 - 1.0) / (p.g0 / p.kappa) ** 2,
                "n_ph": sol.n_ph,
                "n_ph_scaled": sol.n_ph / (p.kappa * p.gamma / (4 * p.g0**2)),
            })
        rows.append(rec)
    return rows


def run_sweep(cfg: RunConfig) -> int:
    write_rows(cfg, _SWEEP_FIELDS, sweep_rows(cfg))
    return EXIT_OK


def run_validate(cfg: RunConfig) -> int:
    rep = validity_report(cfg.params)
    row = _param_echo(cfg.params)
    row.update({f"ratio_{k}": v for k, v in sorted(rep.ratios.items())})
    row["enhancement"] = rep.enhancement
    row["flags"] = ";".join(rep.flags)
    row["valid"] = rep.ok
    write_rows(cfg, list(row.keys()), [row])
    return EXIT_OK if rep.ok else EXIT_FLAGS


# -- quantum commands ---------------------------------------------------------

def _mech_tail(state: hb.QuantumState) -> float:
    rho_c = hb.partial_trace(state, "c")
    pops = np.diag(rho_c.data).real
    return float(pops[-2:].sum())


def converged_steady(
    p: SystemParams,
    dims: hb.ModeDims,
    max_dim: int,
    frame: str = "lab",
    tail_tol: float = 1e-7,
):
    """Steady state with the mechanical cutoff grown until the tail is empty."""
    n_c = dims.n_c
    last_exc = None
    while True:
        trial = hb.ModeDims(dims.n_a, dims.n_b, n_c)
        if trial.dim > max_dim:
            raise sv.SolverError(
                f"converged mechanical cutoff needs more than max_dim={max_dim} "
                f"(last tried {trial.as_tuple()}"
                + (f"; {last_exc}" if last_exc else "")
                + "); raise --max-dim or tighten the parameter range"
            )
        res = sv.steady_state(build_model(p, trial, frame=frame), max_dim=max_dim)
        tail = _mech_tail(res.state)
        if tail < tail_tol:
            return res, trial, tail
        last_exc = f"tail population {tail:.2e} at cutoff {n_c}"
        n_c = int(np.ceil(n_c * 1.45))


_STEADY_FIELDS = [
    "g0", "kappa", "gamma0", "E", "nbar0", "gamma", "nbar", "R", "frame",
    "n_a", "n_b", "n_c", "mean_n", "F", "g2", "residual", "mech_tail",
]


def _steady_point_row(cfg: RunConfig) -> dict:
    p = cfg.params
    res, dims, tail = converged_steady(p, cfg.dims, cfg.max_dim, frame=cfg.frame)
    model_frame = build_model(p, dims, frame=cfg.frame).frame
    st = ob.phonon_stats(res.state, frame=model_frame)
    row = _param_echo(p)
    row.update({
        "R": gain_ratio(p), "frame": cfg.frame,
        "n_a": dims.n_a, "n_b": dims.n_b, "n_c": dims.n_c,
        "mean_n": st.mean_n, "F": st.fano, "g2": st.g2,
        "residual": res.residual, "mech_tail": tail,
    })
    return row


_FIG4A_FIELDS = [
    "g0_over_kappa", "R", "gamma", "E", "solver", "n_a", "n_b", "n_c",
    "mean_n", "F", "F_se", "F_theory", "rel_dev",
]


def _fig4a_point(cfg: RunConfig, g0k: float, R: float, solver: str) -> dict:
    drive = float(cfg.raw.get("drive_product", 0.04))
    kappa = 1.0
    g0 = g0k * kappa
    E = drive * kappa**2 / g0
    gamma = 16.0 * (g0 * E) ** 2 / (kappa**3 * R)
    p = SystemParams(g0=g0, kappa=kappa, gamma0=gamma, E=E, nbar0=cfg.params.nbar0)
    f_theory = fano(p)
    if isinstance(f_theory, BelowThreshold):
        raise ConfigError(f"fig4a point R={R} is below threshold")
    row = {
        "g0_over_kappa": g0k, "R": R, "gamma": gamma, "E": E, "solver": solver,
        "F_theory": f_theory,
    }
    if solver == "steady":
        res, dims, _ = converged_steady(p, cfg.dims, cfg.max_dim)
        st = ob.phonon_stats(res.state)
        row.update({
            "n_a": dims.n_a, "n_b": dims.n_b, "n_c": dims.n_c,
            "mean_n": st.mean_n, "F": st.fano, "F_se": None,
        })
    else:
        model = build_model(p, cfg.dims, frame="displaced")
        ens = sv.mcwf_ensemble(model, config=cfg.traj, max_dim=cfg.max_dim)
        row.update({
            "n_a": cfg.dims.n_a, "n_b": cfg.dims.n_b, "n_c": cfg.dims.n_c,
            "mean_n": ens.stats.mean_n, "F": ens.stats.fano,
            "F_se": ens.stats.se_fano,
        })
    row["rel_dev"] = (row["F"] - f_theory) / f_theory
    return row


def _fig4a_rows(cfg: RunConfig, solver: str) -> list:
    section = cfg.raw.get("fig4a", {})
    g0_list = section.get("g0_over_kappa", [0.25])
    r_axis = section.get("R", {"min": 2.0, "max": 20.0, "points": 7})
    r_values = np.linspace(float(r_axis["min"]), float(r_axis["max"]), int(r_axis["points"]))
    jobs = [(g0k, R) for g0k in g0_list for R in r_values]
    if cfg.threads > 1 and solver == "steady":
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(lambda j: _fig4a_point(cfg, j[0], j[1], solver), jobs))
    else:
        rows = [_fig4a_point(cfg, g0k, R, solver) for g0k, R in jobs]
    return rows


_FIG4B_FIELDS = [
    "g0_over_kappa", "E", "nbar0", "gamma_best", "R_best", "negativity",
    "w_min", "w_max", "n_c", "points_scanned", "points_skipped",
]


def _fig4b_scan_point(cfg: RunConfig, g0k: float, gammas: np.ndarray, points: int) -> dict:
    drive = float(cfg.raw.get("fig4b", {}).get("drive", 0.07))
    kappa = 1.0
    E = drive * kappa
    best = None
    skipped = 0
    for gamma in gammas:
        p = SystemParams(g0=g0k, kappa=kappa, gamma0=float(gamma), E=E, nbar0=cfg.params.nbar0)
        try:
            res, dims, _ = converged_steady(p, cfg.dims, cfg.max_dim)
        except sv.SolverError:
            skipped += 1
            continue
        grid = ob.mechanical_wigner(res.state, points=points)
        w_min, w_max = grid.values.min(), grid.values.max()
        neg = w_min / w_max
        if best is None or neg < best["negativity"]:
            best = {
                "gamma_best": float(gamma),
                "R_best": gain_ratio(p),
                "negativity": float(neg),
                "w_min": float(w_min),
                "w_max": float(w_max),
                "n_c": dims.n_c,
            }
    if best is None:
        raise sv.SolverError(
            f"every gamma point at g0/kappa={g0k} exceeded max_dim={cfg.max_dim}"
        )
    best.update({
        "g0_over_kappa": g0k, "E": E, "nbar0": cfg.params.nbar0,
        "points_scanned": len(gammas) - skipped, "points_skipped": skipped,
    })
    return best


def _fig4b_rows(cfg: RunConfig) -> list:
    section = cfg.raw.get("fig4b", {})
    g0_axis = section.get(
        "g0_over_kappa", {"min": 0.5, "max": 1.5, "points": 3}
    )
    if isinstance(g0_axis, list):
        g0_values = np.asarray(g0_axis, dtype=float)
    else:
        g0_values = np.linspace(
            float(g0_axis["min"]), float(g0_axis["max"]), int(g0_axis["points"])
        )
    g_axis = section.get("gamma_grid", {"min": 1e-4, "max": 1e-1, "points": 20})
    gammas = np.geomspace(float(g_axis["min"]), float(g_axis["max"]), int(g_axis["points"]))
    points = int(section.get("wigner_points", 101))
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(
                pool.map(lambda g: _fig4b_scan_point(cfg, float(g), gammas, points), g0_values)
            )
    else:
        rows = [_fig4b_scan_point(cfg, float(g), gammas, points) for g in g0_values]
    return rows


def run_steady(cfg: RunConfig) -> int:
    if cfg.task == "point":
        write_rows(cfg, _STEADY_FIELDS, [_steady_point_row(cfg)])
    elif cfg.task == "fig4a":
        write_rows(cfg, _FIG4A_FIELDS, _fig4a_rows(cfg, "steady"))
    else:
        write_rows(cfg, _FIG4B_FIELDS, _fig4b_rows(cfg))
    return EXIT_OK


_MCWF_FIELDS = [
    "g0", "kappa", "gamma0", "E", "nbar0", "gamma", "nbar", "R", "frame",
    "n_a", "n_b", "n_c", "n_traj", "tau", "mean_n", "mean_n_se", "F", "F_se",
    "g2", "g2_se", "total_jumps", "dt", "n_steps",
]


def _mcwf_point_row(cfg: RunConfig) -> dict:
    p = cfg.params
    model = build_model(p, cfg.dims, frame=cfg.frame)
    ens = sv.mcwf_ensemble(model, config=cfg.traj, max_dim=cfg.max_dim)
    st = ens.stats
    row = _param_echo(p)
    row.update({
        "R": gain_ratio(p), "frame": cfg.frame,
        "n_a": cfg.dims.n_a, "n_b": cfg.dims.n_b, "n_c": cfg.dims.n_c,
        "n_traj": cfg.traj.n_traj, "tau": ens.diagnostics["tau"],
        "mean_n": st.mean_n, "mean_n_se": st.se_mean_n,
        "F": st.fano, "F_se": st.se_fano, "g2": st.g2, "g2_se": st.se_g2,
        "total_jumps": ens.diagnostics["total_jumps"],
        "dt": ens.diagnostics["dt"], "n_steps": ens.diagnostics["n_steps"],
    })
    return row


def run_mcwf(cfg: RunConfig) -> int:
    if cfg.task == "fig4b":
        raise ConfigError("task fig4b runs under the steady subcommand")
    if cfg.task == "point":
        write_rows(cfg, _MCWF_FIELDS, [_mcwf_point_row(cfg)])
    else:
        write_rows(cfg, _FIG4A_FIELDS, _fig4a_rows(cfg, "mcwf"))
    return EXIT_OK


def run_wigner(cfg: RunConfig) -> int:
    section = cfg.raw.get("wigner", {})
    points = int(section.get("points", 141))
    res, dims, _ = converged_steady(cfg.params, cfg.dims, cfg.max_dim, frame=cfg.frame)
    frame = build_model(cfg.params, dims, frame=cfg.frame).frame
    window = section.get("window")
    xs = ps = None
    if window is not None:
        _require(
            isinstance(window, (list, tuple)) and len(window) == 4,
            "wigner.window takes [xmin, xmax, pmin, pmax]",
        )
        xs = np.linspace(float(window[0]), float(window[1]), points)
        ps = np.linspace(float(window[2]), float(window[3]), points)
    grid = ob.mechanical_wigner(res.state, frame=frame, xs=xs, ps=ps, points=points)
    if cfg.fmt == "csv":
        if cfg.out:
            ob.write_wigner_csv(grid, cfg.out)
        else:
            rows = [
                {"x": x, "p": p_, "W": grid.values[i, j]}
                for i, x in enumerate(grid.xs)
                for j, p_ in enumerate(grid.ps)
            ]
            write_rows(cfg, ["x", "p", "W"], rows)
        return EXIT_OK
    doc = {
        "metadata": {
            "version": __version__, "mode": "wigner", "seed": cfg.seed,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "negativity": float(grid.negativity),
        },
        "xs": grid.xs.tolist(),
        "ps": grid.ps.tolist(),
        "values": grid.values.tolist(),
    }
    text = json.dumps(doc, indent=2)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return EXIT_OK


# -- entry point ---------------------------------------------------------------

_RUNNERS = {
    "analytics": run_analytics,
    "sweep": run_sweep,
    "steady": run_steady,
    "mcwf": run_mcwf,
    "wigner": run_wigner,
    "validate": run_validate,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phonlaser",
        description="Sub-Poissonian phonon laser statistics: analytics, exact "
        "quantum solvers, and figure data.",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for name, text in [
        ("analytics", "closed-form operating point and statistics"),
        ("sweep", "analytic tables over parameter axes"),
        ("steady", "exact steady-state statistics (tasks: point, fig4a, fig4b)"),
        ("mcwf", "quantum-jump ensemble statistics (tasks: point, fig4a)"),
        ("wigner", "steady-state mechanical Wigner grid"),
        ("validate", "regime-of-validity check (exit 1 on flags)"),
    ]:
        sp = sub.add_parser(name, help=text)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        sp.add_argument("--format", default="csv", choices=("csv", "json"))
        sp.add_argument("--seed", type=int, default=None, help="RNG seed override")
        sp.add_argument("--threads", type=int, default=1, help="worker threads")
        sp.add_argument(
            "--max-dim", dest="max_dim", type=int, default=DEFAULT_MAX_DIM,
            help="largest Hilbert dimension a solver may use",
        )
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.mode, args)
        return _RUNNERS[args.mode](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except sv.SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
