"""Monte-Carlo sweeps of the minimum transmit power over rho, N_r or N_t.

Config files are JSON with top-level keys ``scenario``, ``protocol_variants``,
``sweep_axis``, ``grid``, ``fixed``, ``n_trials``, ``qos``, ``solver`` and the
optional ``target`` and ``pareto`` blocks. Only ``sweep_axis`` and ``grid``
are required.

Trial ``t`` of every grid point uses seed ``scenario.seed + t``, so the same
channel draws are shared across protocols and grid values, and results do
not depend on how trials are scheduled.
"""
from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .channel import DEFAULT_EXPONENTS, ScenarioConfig, build_scenario_channels, watts_to_dbm
from .metrics import QosRequirements, TargetModel
from .optimizer import SolveOptions, SolveStatus, ao_solve
from .protocol import Protocol, ProtocolConfig

log = logging.getLogger(__name__)

AXES = ("rho", "n_ris", "n_tx")
RESULT_COLUMNS = [
    "protocol", "axis", "axis_value", "mean_power_dbm", "std_power_db",
    "infeasible_rate", "n_trials", "mean_ao_iters",
]
FIXED_DEFAULTS = {"rho": 0.5, "n_ris": 100, "n_tx": 8, "p_circuit": 50e-3, "p_element": 2e-6, "eta": 0.8}
TOP_LEVEL = {"scenario", "protocol_variants", "sweep_axis", "grid", "fixed", "n_trials", "qos", "solver", "target", "pareto"}
PARETO_DEFAULTS = {
    "protocol": "PS",
    "power_budget_dbm": 50.0,
    "method": "epsilon",
    "objective": "comm",
    "priority": ["comm", "sense", "wpt"],
    "grid": None,
}


class ConfigError(ValueError):
    """Invalid sweep configuration; the message names the file and field."""


@dataclass(frozen=True)
class SweepConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    protocol_variants: tuple = (Protocol.PS, Protocol.TS, Protocol.ES)
    sweep_axis: str = "rho"
    grid: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    fixed: dict = field(default_factory=lambda: dict(FIXED_DEFAULTS))
    n_trials: int = 20
    qos: QosRequirements = field(default_factory=QosRequirements)
    solver: SolveOptions = field(default_factory=SolveOptions)
    rcs_mean: float = 0.5
    pareto: dict = field(default_factory=lambda: dict(PARETO_DEFAULTS))

    def __post_init__(self):
        if self.sweep_axis not in AXES:
            raise ConfigError(f"sweep_axis: expected one of {AXES}, got {self.sweep_axis!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("grid: must be nonempty")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("grid not increasing")
        if self.sweep_axis == "rho" and not all(0.0 < v < 1.0 for v in grid):
            raise ConfigError("grid: rho values must lie strictly inside (0, 1)")
        if self.sweep_axis != "rho":
            if not all(v >= 1 and v == int(v) for v in grid):
                raise ConfigError(f"grid: {self.sweep_axis} values must be positive integers")
            grid = tuple(int(v) for v in grid)
        object.__setattr__(self, "grid", grid)
        if not self.protocol_variants:
            raise ConfigError("protocol_variants: must be nonempty")
        try:
            variants = tuple(Protocol.parse(p) for p in self.protocol_variants)
        except ValueError as exc:
            raise ConfigError(f"protocol_variants: {exc}") from None
        object.__setattr__(self, "protocol_variants", variants)
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ConfigError("n_trials: must be an integer >= 1")
        if self.rcs_mean < 0:
            raise ConfigError("target.rcs_mean: must be nonnegative")
        fixed = dict(FIXED_DEFAULTS)
        fixed.update(self.fixed)
        object.__setattr__(self, "fixed", fixed)
        for p in variants:
            # surfaces bad rho / eta / power constants at load time
            self.protocol_for(p, grid[0])

    def point(self, value) -> dict:
        """Fixed parameters with the swept one set to ``value``."""
        params = dict(self.fixed)
        params[self.sweep_axis] = value
        return params

    def scenario_for(self, value, seed: int) -> ScenarioConfig:
        params = self.point(value)
        return self.scenario.with_updates(n_tx=int(params["n_tx"]), n_ris=int(params["n_ris"]), seed=int(seed))

    def protocol_for(self, variant, value) -> ProtocolConfig:
        params = self.point(value)
        try:
            return ProtocolConfig(
                variant, float(params["rho"]), int(params["n_ris"]),
                float(params["p_circuit"]), float(params["p_element"]), float(params["eta"]),
            )
        except ValueError as exc:
            raise ConfigError(f"fixed: {exc}") from None

    def with_seed(self, seed: int) -> "SweepConfig":
        return replace(self, scenario=self.scenario.with_updates(seed=int(seed)))

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario.to_dict(),
            "protocol_variants": [p.value for p in self.protocol_variants],
            "sweep_axis": self.sweep_axis,
            "grid": list(self.grid),
            "fixed": dict(self.fixed),
            "n_trials": self.n_trials,
            "qos": asdict(self.qos),
            "solver": {k: (v.value if hasattr(v, "value") else v) for k, v in asdict(self.solver).items()},
            "target": {"rcs_mean": self.rcs_mean},
            "pareto": dict(self.pareto),
        }


def _check_keys(block, allowed, where):
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected an object, got {type(block).__name__}")
    unknown = sorted(set(block) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown field {where + '.' if where else ''}{unknown[0]}")


def _build(cls, block, where, convert=None):
    names = {f.name for f in fields(cls)}
    _check_keys(block, names, where)
    kwargs = dict(block)
    if convert:
        kwargs = convert(kwargs)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _scenario_kwargs(block):
    out = dict(block)
    for key in ("bs_position", "ris_position", "ir_center", "er_center"):
        if key in out:
            out[key] = tuple(out[key])
    if "pathloss_exponents" in out:
        exps = out["pathloss_exponents"]
        _check_keys(exps, DEFAULT_EXPONENTS, "scenario.pathloss_exponents")
        out["pathloss_exponents"] = {**DEFAULT_EXPONENTS, **exps}
    return out


def parse_config(data: dict, source: str = "<config>") -> SweepConfig:
    _check_keys(data, TOP_LEVEL, "")
    for key in ("sweep_axis", "grid"):
        if key not in data:
            raise ConfigError(f"{source}: missing required field {key}")
    kwargs = {"sweep_axis": data["sweep_axis"], "grid": data["grid"]}
    if not isinstance(data["grid"], list):
        raise ConfigError("grid: expected a list of numbers")
    kwargs["scenario"] = _build(ScenarioConfig, data.get("scenario", {}), "scenario", _scenario_kwargs)
    if "protocol_variants" in data:
        kwargs["protocol_variants"] = data["protocol_variants"]
    if "fixed" in data:
        _check_keys(data["fixed"], FIXED_DEFAULTS, "fixed")
        kwargs["fixed"] = data["fixed"]
    if "n_trials" in data:
        kwargs["n_trials"] = data["n_trials"]
    kwargs["qos"] = _build(QosRequirements, data.get("qos", {}), "qos")
    kwargs["solver"] = _build(SolveOptions, data.get("solver", {}), "solver")
    target = data.get("target", {})
    _check_keys(target, {"rcs_mean"}, "target")
    kwargs["rcs_mean"] = float(target.get("rcs_mean", 0.5))
    pareto = data.get("pareto", {})
    _check_keys(pareto, PARETO_DEFAULTS, "pareto")
    kwargs["pareto"] = {**PARETO_DEFAULTS, **pareto}
    try:
        return SweepConfig(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None


def load_config(path) -> SweepConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        lines = text.splitlines()
        context = lines[exc.lineno - 1] if 0 < exc.lineno <= len(lines) else ""
        raise ConfigError(
            f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}\n    {context}\n    {' ' * (exc.colno - 1)}^"
        ) from None
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    try:
        return parse_config(data, str(path))
    except ConfigError as exc:
        msg = str(exc)
        raise ConfigError(msg if msg.startswith(str(path)) else f"{path}: {msg}") from None


@dataclass(frozen=True)
class TrialResult:
    protocol: str
    axis_value: float
    trial: int
    seed: int
    status: str
    power_w: float
    ao_iters: int
    n_socp: int
    realized_rho: float

    @property
    def feasible(self) -> bool:
        return self.status != SolveStatus.INFEASIBLE.value


@dataclass(frozen=True)
class SweepRow:
    protocol: str
    axis: str
    axis_value: float
    mean_power_dbm: float
    std_power_db: float
    infeasible_rate: float
    n_trials: int
    mean_ao_iters: float

    def as_list(self) -> list:
        return [getattr(self, c) for c in RESULT_COLUMNS]


@dataclass
class SweepResult:
    axis: str
    rows: list = field(default_factory=list)
    trials: list = field(default_factory=list)

    def row(self, protocol, axis_value) -> SweepRow:
        key = Protocol.parse(protocol).value
        for r in self.rows:
            if r.protocol == key and r.axis_value == axis_value:
                return r
        raise KeyError((protocol, axis_value))

    def series(self, protocol) -> tuple[np.ndarray, np.ndarray]:
        key = Protocol.parse(protocol).value
        rows = sorted((r for r in self.rows if r.protocol == key), key=lambda r: r.axis_value)
        return np.array([r.axis_value for r in rows]), np.array([r.mean_power_dbm for r in rows])

    def protocols(self) -> list:
        return list(dict.fromkeys(r.protocol for r in self.rows))


def _run_trial(task) -> TrialResult:
    cfg, variant, value, trial = task
    seed = cfg.scenario.seed + trial
    channels = build_scenario_channels(cfg.scenario_for(value, seed))
    protocol = cfg.protocol_for(variant, value)
    target = TargetModel.for_channels(channels, cfg.rcs_mean)
    opts = replace(cfg.solver, seed=seed)
    rep = ao_solve(channels, protocol, cfg.qos, opts, target)
    power = rep.objective_w if rep.status is not SolveStatus.INFEASIBLE else float("nan")
    return TrialResult(
        variant.value, value, trial, seed, rep.status.value, float(power),
        rep.n_ao_iters, rep.n_socp, protocol.realized_rho,
    )


def aggregate(axis: str, trials, variants, grid, n_trials: int) -> list:
    """Per (protocol, grid value) statistics over the feasible trials."""
    rows = []
    by_key = {}
    for t in trials:
        by_key.setdefault((t.protocol, t.axis_value), []).append(t)
    for variant in variants:
        for value in grid:
            group = sorted(by_key.get((variant.value, value), []), key=lambda t: t.trial)
            ok = [t for t in group if t.feasible]
            if ok:
                powers = np.array([t.power_w for t in ok])
                mean_dbm = float(watts_to_dbm(powers.mean()))
                std_db = float(np.std(watts_to_dbm(powers)))
                iters = float(np.mean([t.ao_iters for t in ok]))
            else:
                mean_dbm = std_db = iters = float("nan")
            rate = 1.0 - len(ok) / len(group) if group else 1.0
            rows.append(SweepRow(variant.value, axis, value, mean_dbm, std_db, rate, len(group), iters))
    return rows


def run_sweep(cfg: SweepConfig, jobs: int | None = 1, dump_path=None, progress=None) -> SweepResult:
    """Solve every (protocol, grid value, trial) and aggregate.

    ``jobs`` > 1 spreads trials over a process pool; ``None`` uses every
    available CPU. The reduction is keyed by trial identity, so the output is
    independent of ``jobs``.
    """
    tasks = [(cfg, v, value, t) for v in cfg.protocol_variants for value in cfg.grid for t in range(cfg.n_trials)]
    if jobs is None:
        jobs = os.cpu_count() or 1
    jobs = max(1, min(int(jobs), len(tasks)))
    trials = []
    if jobs == 1:
        for i, task in enumerate(tasks):
            trials.append(_run_trial(task))
            if progress:
                progress(i + 1, len(tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for i, res in enumerate(pool.map(_run_trial, tasks, chunksize=max(1, len(tasks) // (4 * jobs)))):
                trials.append(res)
                if progress:
                    progress(i + 1, len(tasks))
    trials.sort(key=lambda t: (cfg.protocol_variants.index(Protocol(t.protocol)), t.axis_value, t.trial))
    rows = aggregate(cfg.sweep_axis, trials, cfg.protocol_variants, cfg.grid, cfg.n_trials)
    res = SweepResult(cfg.sweep_axis, rows, trials)
    if dump_path is not None:
        dump_trials(res, dump_path)
    return res


def dump_trials(res: SweepResult, path) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            for t in res.trials:
                fh.write(json.dumps(asdict(t), sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write trial dump {path}: {exc.strerror or exc}") from exc


def load_trials(path) -> list:
    with Path(path).open(encoding="utf-8") as fh:
        return [TrialResult(**json.loads(line)) for line in fh if line.strip()]


def _fmt(v) -> str:
    if isinstance(v, float):
        return "nan" if math.isnan(v) else repr(v)
    return str(v)


def write_results(res: SweepResult, path) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RESULT_COLUMNS)
            for row in res.rows:
                writer.writerow([_fmt(v) for v in row.as_list()])
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc


def read_results(path) -> SweepResult:
    rows = []
    axis = ""
    with Path(path).open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != RESULT_COLUMNS:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        for r in reader:
            axis = r["axis"]
            value = float(r["axis_value"])
            if axis != "rho":
                value = int(value)
            rows.append(SweepRow(
                r["protocol"], axis, value, float(r["mean_power_dbm"]), float(r["std_power_db"]),
                float(r["infeasible_rate"]), int(r["n_trials"]), float(r["mean_ao_iters"]),
            ))
    return SweepResult(axis, rows)


def emit_plot_data(res: SweepResult, path) -> list:
    """One ``series_<protocol>.dat`` file per protocol under directory ``path``."""
    out_dir = Path(path)
    written = []
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        for proto in res.protocols():
            xs, ys = res.series(proto)
            target = out_dir / f"series_{proto}.dat"
            lines = [f"# {res.axis} mean_power_dbm"]
            lines += [f"{_fmt(x)} {_fmt(float(y))}" for x, y in zip(xs.tolist(), ys)]
            target.write_text("\n".join(lines) + "\n", encoding="utf-8")
            written.append(target)
    except OSError as exc:
        raise OSError(f"cannot write plot data under {out_dir}: {exc.strerror or exc}") from exc
    return written
