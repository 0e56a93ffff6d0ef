"""Build a scenario from an :class:`ExperimentConfig`, run it and write its artifacts."""
from __future__ import annotations

import csv
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .assembly import BoundaryCondition
from .config import ConfigError, ExperimentConfig
from .errors import CurveflowError
from .flows import FlowConfig, run
from .initial import (random_periodic_admissible, reparametrize_arclength, single_fold_admissible,
                      torus_seed)
from .surface import sphere, torus

logger = logging.getLogger(__name__)

OUT_ENV = "CURVEFLOW_OUT"
TRACE_COLUMNS = ("k", "t", "energy", "bending", "geodesic", "penalty", "indentation_total",
                 "step_norm", "arclength_violation", "surface_violation", "penetration",
                 "max_penetration", "dissipation")
SNAPSHOT_COLUMNS = ("x", "u1", "u2", "u3")
INDENTATION_COLUMNS = ("gap", "azimuth", "obstacle1", "obstacle2", "obstacle3")

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3


def fmt(x) -> str:
    """Full double precision; integers stay integers."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass
class Scenario:
    config: ExperimentConfig
    surface: object
    bc: BoundaryCondition
    u0: object
    flow: FlowConfig
    resolved: dict


@dataclass
class ExperimentResult:
    exit_code: int
    out_dir: Path | None
    summary: dict = field(default_factory=dict)
    message: str = ""


def build_scenario(cfg: ExperimentConfig) -> Scenario:
    """Initial curve, surface, boundary condition and numeric flow parameters."""
    periodic = cfg.bc == "periodic"
    if cfg.surface == "sphere":
        surface = sphere()
        h = 2 * math.pi / cfg.J
        vals = cfg.resolve(h)
        if cfg.generator == "random":
            u0 = random_periodic_admissible(cfg.seed, cfg.J, vals["delta"], cfg.amplitude)
        else:
            u0 = single_fold_admissible(cfg.J, vals["delta"], cfg.seed)
    else:
        surface = torus(cfg.R, cfg.r)
        u0 = reparametrize_arclength(torus_seed(cfg.a, cfg.b, cfg.R, cfg.r), cfg.J, periodic)
        h = u0.partition.mesh_size
        vals = cfg.resolve(h)
    bc = BoundaryCondition(cfg.bc).with_target(u0)
    flow = FlowConfig(kind=cfg.flow, tau=vals["tau"], gamma=vals["gamma"], eps=vals["epsilon"],
                      delta=vals["delta"], max_steps=cfg.max_steps, stop_tol=vals["stop_tol"],
                      quad_points=cfg.quad_points, midpoint_normal=cfg.midpoint_normal,
                      snapshot_stride=cfg.snapshot_stride)
    resolved = {"h": h, "length": u0.partition.length, "J": cfg.J, **vals}
    return Scenario(cfg, surface, bc, u0, flow, resolved)


def output_dir(cfg: ExperimentConfig) -> Path:
    return Path(os.environ.get(OUT_ENV) or cfg.out)


def trace_rows(trace, tau: float):
    for k, (diag, energy, diss) in enumerate(zip(trace.diagnostics, trace.energies,
                                                   trace.dissipation)):
        d = diag.as_dict()
        yield [k, k * tau, energy, d["bending"], d["geodesic"], d["penalty"],
               d["indentation_total"], d["step_norm"], d["arclength_violation"],
               d["surface_violation"], d["penetration"], d["max_penetration"], diss]


def write_trace(path: Path, trace, tau: float):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for row in trace_rows(trace, tau):
            w.writerow([fmt(v) for v in row])


def read_trace(path) -> tuple[list, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ConfigError(f"{path}: empty trace")
    header = rows[0]
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    except ValueError:
        raise ConfigError(f"{path}: non-numeric trace entry") from None
    if data.size and data.shape[1] != len(header):
        raise ConfigError(f"{path}: ragged trace")
    return header, data.reshape(-1, len(header))


def snapshot_table(u, scenario: Scenario, samples: int):
    x, pts = u.sample(samples)
    cols = [x, pts[:, 0], pts[:, 1], pts[:, 2]]
    names = list(SNAPSHOT_COLUMNS)
    if scenario.flow.kind == "indentation":
        delta = scenario.flow.delta
        rho = math.sqrt(1.0 - delta * delta)  # radius of the obstacle circle on the sphere
        phi = np.arctan2(pts[:, 1], pts[:, 0])
        cols += [pts[:, 2] - delta, phi, rho * np.cos(phi), rho * np.sin(phi),
                 np.full_like(phi, delta)]
        names += INDENTATION_COLUMNS
    return names, np.column_stack(cols)


def write_snapshot(path: Path, u, scenario: Scenario, samples: int):
    names, table = snapshot_table(u, scenario, samples)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in table:
            w.writerow([fmt(v) for v in row])


def snapshot_name(k: int) -> str:
    return f"snapshot_{k:04d}.csv"


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> ExperimentResult:
    """Run one configured experiment; never raises for configuration or solver errors."""
    out = Path(out_dir) if out_dir is not None else output_dir(cfg)
    try:
        scenario = build_scenario(cfg)
    except (ConfigError, CurveflowError, ValueError) as exc:
        return ExperimentResult(EXIT_CONFIG, None, message=f"cannot build scenario: {exc}")
    out.mkdir(parents=True, exist_ok=True)

    start = time.perf_counter()
    exit_code, message = EXIT_OK, ""
    try:
        u, trace, snaps = run(scenario.flow, scenario.u0, scenario.surface, scenario.bc)
    except CurveflowError as exc:
        trace = getattr(exc, "trace", None)
        if trace is None:  # rejected before the first step
            return ExperimentResult(EXIT_CONFIG, out, message=str(exc))
        u = exc.curve
        stride = cfg.snapshot_stride
        snaps = [(0, scenario.u0)] + ([(trace.steps, u)] if stride else [])
        exit_code, message = EXIT_SOLVER, f"solver failure after {trace.steps} steps: {exc}"
    wall = time.perf_counter() - start

    files = []
    if cfg.csv:
        write_trace(out / "trace.csv", trace, scenario.flow.tau)
        files.append("trace.csv")
        snaps = dict(snaps)
        snaps.setdefault(0, scenario.u0)
        snaps.setdefault(trace.steps, u)
        for k in sorted(snaps):
            write_snapshot(out / snapshot_name(k), snaps[k], scenario, cfg.snapshot_samples)
            files.append(snapshot_name(k))
    if cfg.svg:
        from .plots import write_energy_svg, write_profile_svg  # optional matplotlib
        try:
            write_energy_svg(out / "energy.svg", [("run", np.array(trace.energies))])
            files.append("energy.svg")
            if scenario.flow.kind == "indentation":
                names, table = snapshot_table(u, scenario, cfg.snapshot_samples)
                write_profile_svg(out / "penetration.svg", table[:, 0], table[:, 3],
                                  scenario.flow.delta)
                files.append("penetration.svg")
        except ImportError:
            logger.warning("matplotlib is not installed; skipping SVG output")

    summary = {
        "version": __version__,
        "scenario": cfg.scenario,
        "parameters": dict(cfg.raw),
        "resolved": scenario.resolved,
        "seed": cfg.seed,
        "termination": trace.termination,
        "steps": trace.steps,
        "initial_energy": trace.energies[0],
        "final_energy": trace.energies[-1],
        "final_diagnostics": trace.diagnostics[-1].as_dict(),
        "energy_increases": len(trace.energy_increases),
        "wall_time_s": wall,
        "files": files,
    }
    if message:
        summary["error"] = message
    if cfg.json:
        with open(out / "summary.json", "w") as fh:
            json.dump(_jsonable(summary), fh, indent=2)
    return ExperimentResult(exit_code, out, summary, message)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def merge_traces(paths) -> tuple[list, np.ndarray, list]:
    """Align traces by step; missing steps of shorter runs are NaN."""
    labels, tables, header = [], [], None
    for p in paths:
        cols, data = read_trace(p)
        if header is None:
            header = cols
        elif cols != header:
            raise ConfigError(f"{p}: column schema differs from {paths[0]}")
        p = Path(p)
        labels.append(p.parent.name if p.stem == "trace" and p.parent.name else p.stem)
        tables.append(data)
    seen = {}
    for i, lab in enumerate(labels):  # disambiguate repeated labels
        if labels.count(lab) > 1:
            seen[lab] = seen.get(lab, 0) + 1
            labels[i] = f"{lab}#{seen[lab]}"
    n = max(len(t) for t in tables)
    merged_cols = ["k"] + [f"{lab}:{c}" for lab in labels for c in header if c != "k"]
    body = np.full((n, len(merged_cols)), np.nan)
    body[:, 0] = np.arange(n)
    col = 1
    for t in tables:
        for j, c in enumerate(header):
            if c == "k":
                continue
            body[: len(t), col] = t[:, j]
            col += 1
    return merged_cols, body, labels
