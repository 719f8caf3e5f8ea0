"""Command-line entry point: solve, sweep, pareto and validate-config.

Exit codes: 0 success, 1 infeasible or failed run, 2 usage or config error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field, replace
from itertools import product
from pathlib import Path

import numpy as np

from .channel import build_scenario_channels, dbm_to_watts, watts_to_dbm
from .experiment import (
    ConfigError,
    SweepConfig,
    emit_plot_data,
    load_config,
    run_sweep,
    write_results,
)
from .metrics import TargetModel
from .optimizer import SolveStatus, ao_solve
from .pareto import METRICS, _Context, single_objective_optima, trace_front, write_front_csv
from .protocol import Protocol

log = logging.getLogger("sazeris")

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
COMMANDS = ("solve", "sweep", "pareto", "validate-config")


@dataclass
class CommandSpec:
    command: str
    config_path: Path | None = None
    output_dir: Path = Path(".")
    seed: int | None = None
    protocols: list = field(default_factory=list)
    verbosity: int = 0
    jobs: int | None = None
    dump_trials: bool = False
    method: str | None = None


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sazeris", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, required=name == "validate-config", help="JSON sweep/scenario file")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        p.add_argument("--seed", type=int, help="override the scenario seed")
        p.add_argument("--protocol", action="append", default=[], help="ES, TS or PS; repeatable")
        loud = p.add_mutually_exclusive_group()
        loud.add_argument("--quiet", "-q", action="store_true")
        loud.add_argument("--verbose", "-v", action="store_true")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=None, help="worker processes (default: all CPUs)")
            p.add_argument("--dump-trials", action="store_true", help="also write per-trial JSON lines")
        if name == "pareto":
            p.add_argument("--method", choices=["epsilon", "weighted", "lexicographic"])
    return parser


def parse_args(argv) -> CommandSpec:
    args = build_parser().parse_args(argv)
    return CommandSpec(
        command=args.command,
        config_path=args.config,
        output_dir=args.out,
        seed=args.seed,
        protocols=list(args.protocol),
        verbosity=-1 if args.quiet else (1 if args.verbose else 0),
        jobs=getattr(args, "jobs", None),
        dump_trials=getattr(args, "dump_trials", False),
        method=getattr(args, "method", None),
    )


def _load(spec: CommandSpec) -> SweepConfig:
    if spec.config_path is None:
        cfg = SweepConfig()
    else:
        if not spec.config_path.is_file():
            raise ConfigError(f"config file not found: {spec.config_path}")
        cfg = load_config(spec.config_path)
    if spec.seed is not None:
        cfg = cfg.with_seed(spec.seed)
    if spec.protocols:
        try:
            cfg = replace(cfg, protocol_variants=tuple(Protocol.parse(p) for p in spec.protocols))
        except ValueError as exc:
            raise ConfigError(f"--protocol: {exc}") from None
    return cfg


def _out_dir(spec: CommandSpec) -> Path:
    try:
        spec.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise UsageError(f"cannot create output directory {spec.output_dir}: {exc.strerror or exc}") from None
    return spec.output_dir


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, (np.floating, float)):
        v = float(x)
        return v if math.isfinite(v) else str(v)
    if isinstance(x, np.integer):
        return int(x)
    if hasattr(x, "value"):
        return x.value
    return x


def _single_instance(cfg: SweepConfig):
    value = cfg.fixed[cfg.sweep_axis]
    channels = build_scenario_channels(cfg.scenario_for(value, cfg.scenario.seed))
    protocol = cfg.protocol_for(cfg.protocol_variants[0], value)
    return channels, protocol, TargetModel.for_channels(channels, cfg.rcs_mean)


def cmd_solve(spec: CommandSpec) -> int:
    cfg = _load(spec)
    out = _out_dir(spec)
    channels, protocol, target = _single_instance(cfg)
    rep = ao_solve(channels, protocol, cfg.qos, replace(cfg.solver, seed=cfg.scenario.seed), target)
    sol = rep.solution
    report = {
        "protocol": protocol.variant.value,
        "rho": protocol.rho,
        "realized_rho": protocol.realized_rho,
        "n_tx": channels.n_tx,
        "n_ris": channels.n_ris,
        "seed": cfg.scenario.seed,
        "status": rep.status.value,
        "power_w": rep.objective_w if sol is not None else None,
        "power_dbm": float(watts_to_dbm(rep.objective_w)) if sol is not None and rep.objective_w > 0 else None,
        "objective_trace_w": rep.objective_trace,
        "constraint_slacks": rep.constraint_slacks,
        "n_ao_iters": rep.n_ao_iters,
        "n_socp": rep.n_socp,
        "solution": None if sol is None else {
            "tx_beams": sol.tx_beams.T,
            "ris_phases": sol.ris_phases,
            "rx_beam": sol.rx_beam,
        },
    }
    path = out / "solve.json"
    path.write_text(json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    if rep.status is SolveStatus.INFEASIBLE:
        print(f"{protocol.variant.value} rho={protocol.rho:g}: infeasible (report: {path})")
        return EXIT_FAILED
    slack = min(rep.constraint_slacks.values())
    print(
        f"{protocol.variant.value} rho={protocol.rho:g} N_t={channels.n_tx} N_r={channels.n_ris}: "
        f"{report['power_dbm']:.3f} dBm, {rep.status.value} after {rep.n_ao_iters} AO rounds, "
        f"min slack {slack:.3e} (report: {path})"
    )
    return EXIT_OK


def cmd_sweep(spec: CommandSpec) -> int:
    cfg = _load(spec)
    out = _out_dir(spec)

    def progress(done, total):
        if done == total or done % max(1, total // 20) == 0:
            log.info("trial %d/%d", done, total)

    dump = out / "trials.jsonl" if spec.dump_trials else None
    res = run_sweep(cfg, jobs=spec.jobs, dump_path=dump, progress=progress)
    write_results(res, out / "sweep.csv")
    files = emit_plot_data(res, out)
    for row in res.rows:
        print(
            f"{row.protocol} {row.axis}={row.axis_value:g}: {row.mean_power_dbm:.3f} dBm "
            f"(std {row.std_power_db:.2f} dB, infeasible {row.infeasible_rate:.0%})"
        )
    print(f"wrote {out / 'sweep.csv'} and {len(files)} series files")
    return EXIT_OK


def _pareto_grid(method, pcfg, ctx, objective, priority):
    grid = pcfg.get("grid")
    if grid is not None:
        return [tuple(node) for node in grid]
    if method == "weighted":
        steps = [0.0, 0.25, 0.5, 0.75, 1.0]
        return [w for w in product(steps, repeat=3) if abs(sum(w) - 1.0) < 1e-12]
    if method == "lexicographic":
        return [(0.0, 0.0), (0.1, 0.1), (0.25, 0.25), (0.5, 0.5)]
    optima = single_objective_optima(ctx)
    others = [m for m in METRICS if m != objective]
    fracs = [0.0, 0.25, 0.5, 0.75]
    return [tuple(f * optima[m].metric(m) for f, m in zip(pair, others)) for pair in product(fracs, repeat=2)]


def cmd_pareto(spec: CommandSpec) -> int:
    cfg = _load(spec)
    out = _out_dir(spec)
    pcfg = dict(cfg.pareto)
    method = spec.method or pcfg["method"]
    if method not in ("epsilon", "weighted", "lexicographic"):
        raise ConfigError(f"pareto.method: unknown method {method!r}")
    variant = cfg.protocol_variants[0] if spec.protocols else Protocol.parse(pcfg["protocol"])
    value = cfg.fixed[cfg.sweep_axis]
    channels = build_scenario_channels(cfg.scenario_for(value, cfg.scenario.seed))
    protocol = cfg.protocol_for(variant, value)
    target = TargetModel.for_channels(channels, cfg.rcs_mean)
    budget = float(dbm_to_watts(pcfg["power_budget_dbm"]))
    solver = replace(cfg.solver, seed=cfg.scenario.seed)
    ctx = _Context(budget, channels, protocol, solver, target)
    objective, priority = pcfg["objective"], tuple(pcfg["priority"])
    grid = _pareto_grid(method, pcfg, ctx, objective, priority)
    front = trace_front(method, grid, budget, channels, protocol, solver, target,
                        objective=objective, priority=priority, include_infeasible=True, context=ctx)
    path = out / "front.csv"
    write_front_csv(front, path, method)
    n_ok = sum(p.feasible for p in front)
    n_nd = sum(p.feasible and not p.dominated for p in front)
    print(f"{method} front: {n_ok}/{len(grid)} feasible nodes, {n_nd} non-dominated (front: {path})")
    return EXIT_OK if n_ok else EXIT_FAILED


def cmd_validate(spec: CommandSpec) -> int:
    cfg = _load(spec)
    n_solves = len(cfg.protocol_variants) * len(cfg.grid) * cfg.n_trials
    print(
        f"{spec.config_path}: ok ({cfg.sweep_axis} sweep over {len(cfg.grid)} values, "
        f"{len(cfg.protocol_variants)} protocols, {cfg.n_trials} trials, {n_solves} solves)"
    )
    return EXIT_OK


HANDLERS = {"solve": cmd_solve, "sweep": cmd_sweep, "pareto": cmd_pareto, "validate-config": cmd_validate}


def run_command(spec: CommandSpec) -> int:
    try:
        return HANDLERS[spec.command](spec)
    except (ConfigError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as exc:  # report, never crash with a traceback
        log.debug("unhandled failure", exc_info=True)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


def main(argv=None) -> int:
    try:
        spec = parse_args(sys.argv[1:] if argv is None else argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    level = {-1: logging.WARNING, 0: logging.INFO, 1: logging.DEBUG}[spec.verbosity]
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger("sazeris").setLevel(level)
    return run_command(spec)


if __name__ == "__main__":
    sys.exit(main())
