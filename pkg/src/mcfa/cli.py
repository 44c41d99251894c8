"""Batch front-end: YAML scenario configs in, CSV results and a run log out.

Subcommands: `asymptotic` (eventual counts), `transient` (coupled-system
time series), `simulate` (particle Monte Carlo), and `sweep` (the
angle/separation parameter sweeps with any subset of methods). Angles in
configs are degrees; all other units follow the library (micrometers,
seconds). See README for the config schema.
"""
from __future__ import annotations

import argparse
import csv
import math
import shutil
import sys
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import analytic, asymptotic, geometry as geo, montecarlo, volterra
from .errors import ConfigError, NumericalError, TopologyError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

METHOD_TAGS = ("asymptotic", "series", "volterra", "montecarlo")
DEFAULT_OMEGA_DEG = tuple(float(v) for v in range(0, 181, 15))


@dataclass(frozen=True)
class ScenarioConfig:
    kind: str                       # "parametric" | "explicit"
    d1: float | None
    d_c1c2: tuple[float, ...]
    omega_deg: tuple[float, ...]
    radius: float
    t2: geo.Point3 | None
    transmitters: tuple[geo.Point3, ...]
    receivers: tuple[geo.Receiver, ...]
    diffusion: float
    molecules: float
    solver_dt: float
    solver_t_max: float
    mc_dt_sim: float
    mc_particles: int
    mc_seed: int
    mc_correction: bool
    mc_record_dt: float | None
    sweep_methods: tuple[str, ...]
    sweep_times: tuple[float, ...]
    output_path: str | None


@dataclass
class SweepResult:
    """Rows of (omega_deg, d_c1c2, t, method, receiver, value); receiver
    indices are 1-based. Asymptotic rows carry t = inf."""

    rows: list[tuple] = field(default_factory=list)
    gaps: list[tuple] = field(default_factory=list)


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"config is not valid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of sections")
    try:
        return _parse_config(raw)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"malformed config: {e}") from e


def _parse_config(raw: dict) -> ScenarioConfig:
    scenario = raw.get("scenario")
    if not isinstance(scenario, dict):
        raise ConfigError("missing required section: scenario")
    medium = raw.get("medium")
    if not isinstance(medium, dict):
        raise ConfigError("missing required section: medium")
    kind = scenario.get("kind")
    if kind not in ("parametric", "explicit"):
        raise ConfigError(f"scenario.kind must be parametric or explicit, got {kind!r}")

    has_parametric = "d1" in scenario or "d_c1c2" in scenario
    has_explicit = "transmitters" in scenario or "receivers" in scenario
    if has_parametric and has_explicit:
        raise ConfigError("scenario mixes parametric and explicit topology fields")

    d1 = None
    d_set: tuple[float, ...] = ()
    omega: tuple[float, ...] = DEFAULT_OMEGA_DEG
    t2 = None
    txs: tuple[geo.Point3, ...] = ()
    rxs: tuple[geo.Receiver, ...] = ()
    radius = float(scenario.get("radius", geo.DEFAULT_RADIUS))
    if kind == "parametric":
        if not has_parametric:
            raise ConfigError("parametric scenario requires d1 and d_c1c2")
        d1 = float(scenario["d1"])
        d_set = _as_float_tuple(scenario["d_c1c2"], "scenario.d_c1c2")
        if "omega_deg" in scenario:
            omega = _parse_omega(scenario["omega_deg"])
        if "t2" in scenario:
            t2 = _parse_point(scenario["t2"], "scenario.t2")
    else:
        if not has_explicit:
            raise ConfigError("explicit scenario requires transmitters and receivers")
        txs = tuple(_parse_point(v, f"transmitters[{i}]")
                    for i, v in enumerate(scenario.get("transmitters", [])))
        rxs = tuple(_parse_receiver(v, i)
                    for i, v in enumerate(scenario.get("receivers", [])))

    solver = raw.get("solver", {}) or {}
    mc = raw.get("mc", {}) or {}
    sweep = raw.get("sweep", {}) or {}
    methods = tuple(sweep.get("methods", ("asymptotic", "volterra")))
    for m in methods:
        if m not in METHOD_TAGS:
            raise ConfigError(f"unknown sweep method {m!r}; choose from {METHOD_TAGS}")
    times = _as_float_tuple(sweep.get("times", (300.0,)), "sweep.times")
    output = raw.get("output", {}) or {}

    cfg = ScenarioConfig(
        kind=kind,
        d1=d1,
        d_c1c2=d_set,
        omega_deg=omega,
        radius=radius,
        t2=t2,
        transmitters=txs,
        receivers=rxs,
        diffusion=float(medium.get("D", geo.DEFAULT_DIFFUSION)),
        molecules=float(medium.get("N_T", geo.DEFAULT_MOLECULES)),
        solver_dt=float(solver.get("dt", 0.01)),
        solver_t_max=float(solver.get("t_max", 300.0)),
        mc_dt_sim=float(mc.get("dt_sim", 1e-4)),
        mc_particles=int(mc.get("particles", 10000)),
        mc_seed=int(mc.get("seed", 1)),
        mc_correction=bool(mc.get("boundary_correction", True)),
        mc_record_dt=None if mc.get("record_dt") is None else float(mc["record_dt"]),
        sweep_methods=methods,
        sweep_times=times,
        output_path=output.get("path"),
    )
    _check_positive(cfg)
    return cfg


def _check_positive(cfg: ScenarioConfig) -> None:
    checks = {
        "medium.D": cfg.diffusion,
        "medium.N_T": cfg.molecules,
        "solver.dt": cfg.solver_dt,
        "solver.t_max": cfg.solver_t_max,
        "mc.dt_sim": cfg.mc_dt_sim,
        "mc.particles": cfg.mc_particles,
        "scenario.radius": cfg.radius,
    }
    if cfg.kind == "parametric":
        checks["scenario.d1"] = cfg.d1
        for i, d in enumerate(cfg.d_c1c2):
            checks[f"scenario.d_c1c2[{i}]"] = d
    for i, t in enumerate(cfg.sweep_times):
        checks[f"sweep.times[{i}]"] = t
    for name, value in checks.items():
        if value is None or not (value > 0):
            raise ConfigError(f"{name} must be positive, got {value}")


def _parse_omega(raw) -> tuple[float, ...]:
    if isinstance(raw, dict):
        start = float(raw.get("start", 0.0))
        stop = float(raw.get("stop", 180.0))
        step = float(raw.get("step", 15.0))
        if step <= 0:
            raise ConfigError("omega_deg.step must be positive")
        n = int(round((stop - start) / step))
        return tuple(start + i * step for i in range(n + 1))
    return _as_float_tuple(raw, "scenario.omega_deg")


def _as_float_tuple(value, name: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),)
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    raise ConfigError(f"{name} must be a number or list of numbers")


def _parse_point(value, name: str) -> geo.Point3:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ConfigError(f"{name} must be a 3-element list")
    return geo.Point3(*(float(v) for v in value))


def _parse_receiver(value, index: int) -> geo.Receiver:
    if not isinstance(value, dict) or "center" not in value or "radius" not in value:
        raise ConfigError(f"receivers[{index}] must have center and radius")
    return geo.Receiver(_parse_point(value["center"], f"receivers[{index}].center"),
                        float(value["radius"]))


def _single_topology(cfg: ScenarioConfig) -> geo.Topology:
    if cfg.kind == "explicit":
        topology = geo.Topology(
            transmitters=cfg.transmitters,
            receivers=cfg.receivers,
            diffusion_coefficient=cfg.diffusion,
            molecules_per_release=cfg.molecules,
        )
        geo.require_valid(topology)
        return topology
    if len(cfg.d_c1c2) != 1 or len(cfg.omega_deg) != 1:
        raise ConfigError(
            "this subcommand needs a single topology; give scalar d_c1c2 and "
            "omega_deg, or use the sweep subcommand")
    return _parametric_topology(cfg, cfg.d_c1c2[0], cfg.omega_deg[0])


def _parametric_topology(cfg: ScenarioConfig, d_c1c2: float,
                         omega_deg: float) -> geo.Topology:
    omega = math.radians(omega_deg)
    if cfg.t2 is None:
        return geo.build_sito_scenario(cfg.d1, d_c1c2, omega, cfg.radius,
                                       cfg.diffusion, cfg.molecules)
    return geo.build_mimo_scenario(cfg.d1, d_c1c2, omega, cfg.t2, cfg.radius,
                                   cfg.diffusion, cfg.molecules)


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def emit_csv(result, path: str | Path) -> None:
    """Write a result object as CSV with 17-significant-digit numbers and a
    deterministic row order. Re-emitting the same result yields a
    byte-identical file."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if isinstance(result, volterra.AbsorptionSeries):
            p = result.cumulative.shape[0]
            writer.writerow(["t"] + [f"N_{i + 1}" for i in range(p)])
            times = result.grid.times()
            for k in range(result.grid.n_steps + 1):
                writer.writerow([_fmt(times[k])]
                                + [_fmt(v) for v in result.cumulative[:, k]])
        elif isinstance(result, montecarlo.McEstimate):
            p = result.absorbed.shape[0]
            writer.writerow(["t"] + [f"N_{i + 1}" for i in range(p)])
            times = result.grid.times()
            for k in range(result.grid.n_steps + 1):
                writer.writerow([_fmt(times[k])]
                                + [_fmt(v) for v in result.absorbed[:, k]])
        elif isinstance(result, asymptotic.AsymptoticSolution):
            writer.writerow(["receiver", "n_infinity"])
            for i, v in enumerate(result.n_infinity):
                writer.writerow([str(i + 1), _fmt(v)])
        elif isinstance(result, SweepResult):
            writer.writerow(["omega", "d_c1c2", "t", "method", "receiver", "value"])
            for row in sorted(result.rows,
                              key=lambda r: (r[0], r[1], r[2], r[3], r[4])):
                writer.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2]),
                                 row[3], str(row[4]), _fmt(row[5])])
        else:
            raise TypeError(f"no CSV schema for {type(result).__name__}")


def _emit_gaps(result: SweepResult, path: Path) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega", "d_c1c2", "t", "method", "receiver",
                         "asymptotic", "value", "rel_gap"])
        for row in sorted(result.gaps,
                          key=lambda r: (r[0], r[1], r[2], r[3], r[4])):
            writer.writerow([_fmt(row[0]), _fmt(row[1]), _fmt(row[2]), row[3],
                             str(row[4]), _fmt(row[5]), _fmt(row[6]),
                             _fmt(row[7])])


def _run_sweep(cfg: ScenarioConfig, out_dir: Path, log: list[str]) -> None:
    if cfg.kind != "parametric":
        raise ConfigError("sweep requires a parametric scenario")
    if "series" in cfg.sweep_methods and cfg.t2 is not None:
        raise ConfigError("the series method needs a single transmitter (no t2)")
    times = cfg.sweep_times
    if "volterra" in cfg.sweep_methods:
        for t in times:
            k = round(t / cfg.solver_dt)
            if abs(t - k * cfg.solver_dt) > 1e-9 * max(1.0, t):
                raise ConfigError(
                    f"sweep time {t} is not a multiple of solver.dt = {cfg.solver_dt}")
            if t > cfg.solver_t_max + 1e-12:
                raise ConfigError(f"sweep time {t} exceeds solver.t_max")

    result = SweepResult()
    for omega_deg in cfg.omega_deg:
        for d in cfg.d_c1c2:
            topology = _parametric_topology(cfg, d, omega_deg)
            point = (omega_deg, d)
            asym = None
            if "asymptotic" in cfg.sweep_methods:
                asym = asymptotic.solve(topology)
                for i, v in enumerate(asym.n_infinity):
                    result.rows.append((*point, math.inf, "asymptotic", i + 1, v))
            if "series" in cfg.sweep_methods:
                rx_rx, tx_rx = geo.pair_distances(topology)
                geom = analytic.SitoGeometry(tx_rx[0, 0], tx_rx[0, 1],
                                             rx_rx[0, 1], rx_rx[1, 0], cfg.radius)
                for t in times:
                    for i, g in enumerate((geom, geom.swapped())):
                        v = analytic.sito_series(g, cfg.molecules, cfg.diffusion, t)
                        result.rows.append((*point, t, "series", i + 1, v))
                        if asym is not None:
                            result.gaps.append(
                                (*point, t, "series", i + 1, asym.n_infinity[i],
                                 v, (v - asym.n_infinity[i]) / asym.n_infinity[i]))
            if "volterra" in cfg.sweep_methods:
                grid = volterra.TimeGrid(
                    cfg.solver_dt, round(cfg.solver_t_max / cfg.solver_dt))
                series = volterra.solve_transient(topology, grid)
                for t in times:
                    k = round(t / cfg.solver_dt)
                    for i in range(topology.p):
                        v = series.cumulative[i, k]
                        result.rows.append((*point, t, "volterra", i + 1, v))
                        if asym is not None:
                            result.gaps.append(
                                (*point, t, "volterra", i + 1, asym.n_infinity[i],
                                 v, (v - asym.n_infinity[i]) / asym.n_infinity[i]))
            if "montecarlo" in cfg.sweep_methods:
                mc_cfg = montecarlo.McConfig(
                    dt_sim=cfg.mc_dt_sim, t_max=max(times),
                    particles_per_transmitter=cfg.mc_particles,
                    seed=cfg.mc_seed, boundary_correction=cfg.mc_correction,
                    record_dt=cfg.mc_record_dt)
                estimate = montecarlo.simulate(topology, mc_cfg)
                scale = cfg.molecules / cfg.mc_particles
                rec_times = estimate.grid.times()
                for t in times:
                    k = min(math.ceil(t / estimate.grid.dt - 1e-9),
                            estimate.grid.n_steps)
                    for i in range(topology.p):
                        v = estimate.absorbed[i, k] * scale
                        result.rows.append(
                            (*point, rec_times[k], "montecarlo", i + 1, v))
                        if asym is not None:
                            result.gaps.append(
                                (*point, rec_times[k], "montecarlo", i + 1,
                                 asym.n_infinity[i], v,
                                 (v - asym.n_infinity[i]) / asym.n_infinity[i]))
    emit_csv(result, out_dir / "sweep.csv")
    if result.gaps:
        _emit_gaps(result, out_dir / "sweep_gaps.csv")
    log.append(f"sweep: {len(result.rows)} rows "
               f"({len(cfg.omega_deg)} angles x {len(cfg.d_c1c2)} separations, "
               f"methods {','.join(cfg.sweep_methods)})")


def run(config_path: str | Path, subcommand: str, out_dir: str | Path | None = None,
        methods: tuple[str, ...] | None = None, seed: int | None = None) -> int:
    """Execute one subcommand against a config; returns the process exit code.

    Exit codes: 0 success, 2 config error, 3 topology/data error,
    4 numerical failure.
    """
    t_start = time.perf_counter()
    try:
        cfg = load_config(config_path)
        if methods:
            for m in methods:
                if m not in METHOD_TAGS:
                    raise ConfigError(f"unknown method {m!r}")
            cfg = _replace(cfg, sweep_methods=tuple(methods))
        if seed is not None:
            cfg = _replace(cfg, mc_seed=seed)
        out = Path(out_dir) if out_dir is not None else Path(cfg.output_path or "out")
        out.mkdir(parents=True, exist_ok=True)

        log: list[str] = [f"subcommand: {subcommand}", f"config: {config_path}"]
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            if subcommand == "asymptotic":
                solution = asymptotic.solve(_single_topology(cfg))
                emit_csv(solution, out / "asymptotic.csv")
                log.append(f"condition estimate: {solution.condition_estimate:.6g}")
            elif subcommand == "transient":
                grid = volterra.TimeGrid(
                    cfg.solver_dt, round(cfg.solver_t_max / cfg.solver_dt))
                series = volterra.solve_transient(_single_topology(cfg), grid)
                emit_csv(series, out / "transient.csv")
                log.append(f"grid: dt={grid.dt} n_steps={grid.n_steps}")
            elif subcommand == "simulate":
                mc_cfg = montecarlo.McConfig(
                    dt_sim=cfg.mc_dt_sim, t_max=cfg.solver_t_max,
                    particles_per_transmitter=cfg.mc_particles,
                    seed=cfg.mc_seed, boundary_correction=cfg.mc_correction,
                    record_dt=cfg.mc_record_dt)
                estimate = montecarlo.simulate(_single_topology(cfg), mc_cfg)
                emit_csv(estimate, out / "montecarlo.csv")
                log.append(f"particles per transmitter: {cfg.mc_particles}, "
                           f"seed: {cfg.mc_seed}")
            elif subcommand == "sweep":
                _run_sweep(cfg, out, log)
            else:
                raise ConfigError(f"unknown subcommand {subcommand!r}")
        for w in caught:
            log.append(f"warning: {w.message}")
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except TopologyError as e:
        print(f"topology error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL

    shutil.copyfile(config_path, out / "config.yaml")
    log.append(f"elapsed: {time.perf_counter() - t_start:.3f} s")
    (out / "run.log").write_text("\n".join(log) + "\n")
    return EXIT_OK


def _replace(cfg: ScenarioConfig, **kwargs) -> ScenarioConfig:
    from dataclasses import replace
    return replace(cfg, **kwargs)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="mcfa",
        description="Diffusive molecular-communication channels with "
                    "fully-absorbing spherical receivers")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, blurb in (
            ("asymptotic", "eventual absorbed counts N(infinity)"),
            ("transient", "coupled-system absorption time series"),
            ("simulate", "particle Monte Carlo counts"),
            ("sweep", "angle/separation sweep over the chosen methods")):
        sp = sub.add_parser(name, help=blurb)
        sp.add_argument("--config", required=True, help="YAML scenario config")
        sp.add_argument("--out", default=None, help="output directory")
        if name in ("simulate", "sweep"):
            sp.add_argument("--seed", type=int, default=None,
                            help="override mc.seed")
        if name == "sweep":
            sp.add_argument("--methods", default=None,
                            help="comma-separated subset of "
                                 + ",".join(METHOD_TAGS))
    args = parser.parse_args(argv)
    methods = tuple(args.methods.split(",")) if getattr(args, "methods", None) else None
    return run(args.config, args.subcommand, out_dir=args.out,
               methods=methods, seed=getattr(args, "seed", None))


if __name__ == "__main__":
    sys.exit(main())
