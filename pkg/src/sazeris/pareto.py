"""Tradeoff fronts over (min IR rate, sensing rate, ER harvested power).

All strategies work on the budgeted variant of the beamforming problem:
metrics are free, transmit power is capped at ``power_budget`` and the RIS
must stay self-powered.

* ``solve_constrained`` maximizes one metric with floors on the other two by
  bisection on the level; a level is feasible when the power-minimizing
  solver meets it within the budget.
* ``solve_lexicographic`` runs three constrained stages in priority order.
* ``solve_weighted_sum`` climbs the normalized weighted sum with trust-region
  SCA steps.

Any feasible design can be scaled up to the full budget without hurting a
metric or the RIS power balance, so every returned point spends the budget.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import ChannelSet
from .conic import SocpBuilder, SocpStatus, solve_socp
from .metrics import (
    BeamformingSolution,
    QosRequirements,
    TargetModel,
    comm_rate,
    harvested_power_ers,
    sensing_rate,
)
from .optimizer import (
    SolveOptions,
    SolveStatus,
    _Instance,
    _Linearizer,
    _lift,
    _to_complex,
    _to_real,
    ao_solve,
    check_feasibility,
    update_receive_beamformer,
)
from .protocol import ProtocolConfig

METRICS = ("comm", "sense", "wpt")
METRIC_TOL = {"comm": 1e-3, "sense": 1e-3, "wpt": 1e-6}  # bps/Hz, bps/Hz, W (1e-3 mW)
FRONT_COLUMNS = ["method", "grid_id", "comm_bpshz", "sense_bpshz", "wpt_mw", "dominated", "status"]


@dataclass
class ParetoPoint:
    comm: float
    sense: float
    wpt: float
    solution: BeamformingSolution | None = None
    dominated: bool = False
    status: str = "Optimal"
    grid_id: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == "Optimal"

    def vector(self) -> np.ndarray:
        return np.array([self.comm, self.sense, self.wpt])

    def metric(self, name: str) -> float:
        return float(getattr(self, name))


def _infeasible(meta=None) -> ParetoPoint:
    return ParetoPoint(0.0, 0.0, 0.0, None, False, "Infeasible", meta=dict(meta or {}))


def dominates(p: ParetoPoint, q: ParetoPoint) -> bool:
    """``p`` is at least as good as ``q`` everywhere and strictly better somewhere."""
    a, b = p.vector(), q.vector()
    return bool(np.all(a >= b) and np.any(a > b))


def mark_dominated(points) -> list:
    for q in points:
        q.dominated = any(dominates(p, q) for p in points if p is not q)
    return points


def non_dominated(points) -> list:
    return [p for p in mark_dominated(list(points)) if not p.dominated]


def _normalize_metric(name: str) -> str:
    if name not in METRICS:
        raise ValueError(f"unknown metric {name!r}; expected one of {METRICS}")
    return name


def evaluate_metrics(solution, channels, protocol, target) -> dict:
    """Metric triple with the sensing combiner set to its optimum."""
    sol = solution.copy()
    sol.rx_beam = update_receive_beamformer(sol, channels, target, protocol)
    profile = sol.profile(protocol)
    return {
        "comm": min(comm_rate(k, sol, channels, profile) for k in range(channels.n_irs)),
        "sense": sensing_rate(sol, channels, profile, target),
        "wpt": harvested_power_ers(sol, channels, profile, protocol.eta),
    }


def _at_budget(solution: BeamformingSolution, budget: float) -> BeamformingSolution:
    sol = solution.copy()
    power = sol.objective_w
    if power > 0:
        sol.tx_beams = sol.tx_beams * math.sqrt(budget / power)
    return sol


class _Context:
    """Shared state of one instance: channels, protocol, budget, found designs."""

    def __init__(self, power_budget, channels, protocol, opts, target):
        if not power_budget > 0:
            raise ValueError("power_budget must be positive")
        self.budget = float(power_budget)
        self.channels = channels
        self.protocol = protocol
        self.opts = SolveOptions() if opts is None else opts
        self.target = TargetModel.for_channels(channels) if target is None else target
        self.pool: list[ParetoPoint] = []

    def point(self, solution, register=True) -> ParetoPoint | None:
        """Metrics of ``solution`` rescaled to the budget; None if not self-powered."""
        sol = _at_budget(solution, self.budget)
        if not self.self_powered(sol):
            return None
        sol.rx_beam = update_receive_beamformer(sol, self.channels, self.target, self.protocol)
        m = evaluate_metrics(sol, self.channels, self.protocol, self.target)
        pt = ParetoPoint(m["comm"], m["sense"], m["wpt"], sol)
        if register:
            self.register(pt)
        return pt

    def register(self, point: ParetoPoint) -> None:
        if all(p is not point for p in self.pool):
            self.pool.append(point)

    def self_powered(self, sol) -> bool:
        zero = QosRequirements(0.0, 0.0, 0.0)
        return check_feasibility(sol, self.channels, self.protocol, zero, self.target)["ris"] >= -1e-12

    def qos_for(self, levels: dict) -> QosRequirements:
        return QosRequirements(
            r_com_min=levels.get("comm", 0.0),
            r_sense_min=levels.get("sense", 0.0),
            e_min_total=levels.get("wpt", 0.0),
        )

    def best_incumbent(self, objective, floors):
        best = None
        for p in self.pool:
            if _meets(p, floors):
                if best is None or p.metric(objective) > best.metric(objective):
                    best = p
        return best

    def check_level(self, levels: dict, warm):
        """Feasible design meeting ``levels`` within the budget, or None."""
        qos = self.qos_for(levels)
        rep = ao_solve(self.channels, self.protocol, qos, self.opts, self.target, initial=warm)
        if rep.status is SolveStatus.INFEASIBLE or rep.solution is None:
            return None
        if rep.objective_w > self.budget * (1.0 + 1e-8):
            return None
        return rep.solution

    def upper_bound(self, metric: str) -> float:
        """Triangle-inequality bound on ``metric`` under the budget."""
        ch, pr = self.channels, self.protocol
        bounds = pr.modulus_bounds()
        row_norms = np.linalg.norm(ch.bs_ris, axis=1)

        def gain(direct, cascade):
            return (np.linalg.norm(direct) + np.sum(bounds * np.abs(cascade) * row_norms)) ** 2

        ts = pr.time_share
        if metric == "comm":
            g = min(gain(ch.direct_ir[k], ch.ris_ir[k]) for k in range(ch.n_irs))
            return ts * math.log2(1.0 + self.budget * g / ch.noise_power)
        if metric == "sense":
            g = gain(np.zeros(ch.n_tx), ch.ris_target)
            snr = self.target.two_way_gain * ch.n_sensors * g * self.budget / ch.noise_power
            return ts * math.log2(1.0 + snr)
        g = sum(gain(ch.direct_er[m], ch.ris_er[m]) for m in range(ch.n_ers))
        return ts * pr.eta * g * self.budget


def _thresholds_dict(objective, thresholds) -> dict:
    others = [m for m in METRICS if m != objective]
    if thresholds is None:
        return {m: 0.0 for m in others}
    if isinstance(thresholds, dict):
        unknown = set(thresholds) - set(others)
        if unknown:
            raise ValueError(f"thresholds for unknown or objective metrics: {sorted(unknown)}")
        out = {m: float(thresholds.get(m, 0.0)) for m in others}
    else:
        vals = list(thresholds)
        if len(vals) != 2:
            raise ValueError("thresholds must give values for the two non-objective metrics")
        out = dict(zip(others, map(float, vals)))
    if any(v < 0 for v in out.values()):
        raise ValueError("thresholds must be nonnegative")
    return out


def _meets(point: ParetoPoint, floors: dict) -> bool:
    # relative slack absorbs the rescale from a marginally over-budget oracle design
    return all(point.metric(k) >= v * (1.0 - 1e-7) - 1e-12 for k, v in floors.items())


def _composite(point: ParetoPoint, weights, normalizers) -> float:
    return float(sum(w * point.metric(m) / n for m, w, n in zip(METRICS, weights, normalizers)))


def _metric_models(ctx: _Context, inst: _Instance, lin: _Linearizer, n: int) -> dict:
    """First-order models ``(row, const)`` of every metric about the reference.

    ``comm`` maps to one model per IR. Each model equals the true metric at
    the reference point.
    """
    z_ref = lin.z_ref
    c_ln = inst.ts / math.log(2.0)

    def linear_terms(terms):
        # sum_j g_j * (first-order model of |y_j|^2 - |y_j,ref|^2)
        row = np.zeros(n)
        const = 0.0
        for g, (alpha, beta) in terms:
            y_r = alpha @ z_ref + beta
            re, _ = _lift(np.conj(y_r) * alpha)
            row[: 2 * lin.nz] += 2.0 * g * re
            const += g * (2.0 * np.real(np.conj(y_r) * beta) - 2.0 * abs(y_r) ** 2)
        return row, const

    models = {"comm": []}
    for k, pair in enumerate(inst.ir):
        amps = [lin.amplitude(pair, j) for j in range(inst.k)]
        powers = [abs(a @ z_ref + bb) ** 2 for a, bb in amps]
        interference = sum(powers) - powers[k]
        total = inst.sigma2 + sum(powers)
        rate = c_ln * math.log(total / (inst.sigma2 + interference))
        gains = [c_ln / total if j == k else c_ln * (1.0 / total - 1.0 / (inst.sigma2 + interference)) for j in range(inst.k)]
        row, const = linear_terms(list(zip(gains, amps)))
        models["comm"].append((row, const + rate))
    amps = [lin.amplitude(inst.sense, j) for j in range(inst.k)]
    echo = sum(abs(a @ z_ref + bb) ** 2 for a, bb in amps)
    kappa = ctx.target.two_way_gain * ctx.channels.n_sensors / inst.sigma2
    rate = c_ln * math.log1p(kappa * echo)
    row, const = linear_terms([(c_ln * kappa / (1.0 + kappa * echo), a) for a in amps])
    models["sense"] = (row, const + rate)
    amps = [lin.amplitude(p, j) for p in inst.er for j in range(inst.k)]
    g = inst.ts * ctx.protocol.eta
    value = g * sum(abs(a @ z_ref + bb) ** 2 for a, bb in amps)
    row, const = linear_terms([(g, a) for a in amps])
    models["wpt"] = (row, const + value)
    return models


def _model_step(ctx: _Context, inst: _Instance, sol, weights, normalizers, floors, trust):
    """Maximize the linear model of the weighted sum over a trust region.

    Floors enter as linear-model constraints; the true metrics are checked by
    the caller. The budget and the RIS power balance are kept exactly.
    """
    theta_ref = inst.coefficients(sol.ris_phases)
    lin = _Linearizer(inst, sol.tx_beams, theta_ref, ctx.budget)
    n = lin.n  # the trailing variable is the epigraph of the min IR rate
    tau = n - 1
    b = SocpBuilder(n)
    n_w = 2 * inst.n_tx * inst.k
    th = lin.theta_slice()
    models = _metric_models(ctx, inst, lin, n)

    w_c, w_s, w_e = weights
    n_c, n_s, n_e = normalizers
    if w_c > 0 or floors.get("comm", 0.0) > 0:
        b.objective[tau] = -w_c / n_c
        for k, (row, const) in enumerate(models["comm"]):
            r = row.copy()
            r[tau] = -1.0
            b.add_linear_ge(r, const, f"rate_{k}")
        if floors.get("comm", 0.0) > 0:
            e = np.zeros(n)
            e[tau] = 1.0
            b.add_linear_ge(e, -floors["comm"], "floor_comm")
    for name, w, nz in (("sense", w_s, n_s), ("wpt", w_e, n_e)):
        row, const = models[name]
        if w > 0:
            b.objective -= (w / nz) * row
        if floors.get(name, 0.0) > 0:
            scale = 1.0 / max(floors[name], 1e-300)
            b.add_linear_ge(row * scale, const * scale - 1.0, f"floor_{name}")

    # budget: ||W||^2 <= P, i.e. unit norm in normalized beams
    sel = np.zeros((n_w, n))
    sel[:, :n_w] = np.eye(n_w)
    b.add_cone(sel, np.zeros(n_w), np.zeros(n), 1.0, "budget")
    if inst.ris_req > 0:
        row = np.zeros(n)
        const = 0.0
        for j in range(inst.k):
            y_ref = inst.g_harvest @ sol.tx_beams[:, j]
            re, _ = _lift(2.0 * lin.scale * (np.conj(y_ref) @ inst.g_harvest))
            row[j * 2 * inst.n_tx:(j + 1) * 2 * inst.n_tx] = re
            const -= float(np.sum(np.abs(y_ref) ** 2))
        b.add_linear_ge(row / inst.ris_req, const / inst.ris_req - 1.0, "ris")
    base = th.start
    for i in range(inst.n_ris):
        rows = np.zeros((2, n))
        rows[0, base + 2 * i] = 1.0
        rows[1, base + 2 * i + 1] = 1.0
        if inst.reflect[i]:
            b.add_cone(rows, np.zeros(2), np.zeros(n), inst.bounds[i], f"modulus_{i}")
        else:
            b.add_eq(rows[0], 0.0)
            b.add_eq(rows[1], 0.0)
    n_refl = int(inst.reflect.sum())
    if n_refl:
        radius = trust * float(np.max(inst.bounds)) * math.sqrt(n_refl)
        b.add_cone(np.eye(n)[th], -_to_real(theta_ref), np.zeros(n), radius, "trust_theta")
    b.add_cone(np.eye(n)[:n_w], -_to_real(lin.Wn.T.reshape(-1)), np.zeros(n), trust, "trust_w")
    if not np.any(b.objective):
        return None
    res = solve_socp(b.build(), ctx.opts.socp_tol)
    if res.status is not SocpStatus.OPTIMAL:
        return None
    z = _to_complex(res.x[: 2 * lin.nz])
    W_new = lin.scale * z[: inst.n_tx * inst.k].reshape(inst.k, inst.n_tx).T
    return W_new, z[inst.n_tx * inst.k:], lin


def _ascend(ctx: _Context, start: ParetoPoint, weights, normalizers, floors, max_iters=40, tol=1e-6) -> ParetoPoint:
    """Trust-region SCA ascent of the weighted sum from a feasible point.

    Every accepted iterate spends the full budget, is self-powered and meets
    ``floors`` in the true metrics, so the weighted sum never decreases.
    """
    inst = _Instance(ctx.channels, ctx.protocol, QosRequirements(0.0, 0.0, 0.0), ctx.target)
    best = start
    value = _composite(best, weights, normalizers)
    trust = ctx.opts.trust_init
    for _ in range(max_iters):
        step = _model_step(ctx, inst, best.solution, weights, normalizers, floors, trust)
        improved = None
        if step is not None:
            W_new, theta_new, lin = step
            alpha = 1.0
            for _ in range(max(1, ctx.opts.line_search_steps)):
                W = best.solution.tx_beams + alpha * (W_new - best.solution.tx_beams)
                theta = lin.theta + alpha * (theta_new - lin.theta)
                tiny = np.abs(theta) <= 1e-9 * np.maximum(inst.bounds, 1e-300)
                phases = np.where(inst.reflect & ~tiny, np.angle(theta), best.solution.ris_phases)
                alpha *= 0.5
                if not np.linalg.norm(W) > 0:
                    continue
                cand = ctx.point(BeamformingSolution(W, phases, best.solution.rx_beam), register=False)
                if cand is None or not _meets(cand, floors):
                    continue
                cv = _composite(cand, weights, normalizers)
                if cv > value and (improved is None or cv > improved[0]):
                    improved = (cv, cand)
        if improved is None:
            trust *= ctx.opts.trust_shrink
            if trust < ctx.opts.trust_min:
                break
            continue
        gain = (improved[0] - value) / max(abs(value), 1e-12)
        value, best = improved
        trust = min(ctx.opts.trust_init, trust / ctx.opts.trust_shrink)
        if gain < tol:
            break
    ctx.register(best)
    return best


def _seeds(ctx: _Context, first: ParetoPoint, weights, normalizers, floors) -> list:
    """``first`` plus the pool champions of the composite and of each metric."""
    ok = [p for p in ctx.pool if _meets(p, floors)]
    picks = [first]
    if ok:
        picks.append(max(ok, key=lambda p: _composite(p, weights, normalizers)))
        picks.extend(max(ok, key=lambda p, m=m: p.metric(m)) for m in METRICS)
    out = []
    for p in picks:
        if all(p is not q for q in out):
            out.append(p)
    return out


def _multi_ascend(ctx: _Context, first: ParetoPoint, weights, normalizers, floors) -> ParetoPoint:
    # the ascent is local, so start it from designs sitting in different corners
    best = None
    for seed in _seeds(ctx, first, weights, normalizers, floors):
        cand = _ascend(ctx, seed, weights, normalizers, floors)
        if best is None or _composite(cand, weights, normalizers) > _composite(best, weights, normalizers):
            best = cand
    return best


def _unit(objective) -> tuple:
    return tuple(1.0 if m == objective else 0.0 for m in METRICS)


def _constrained(ctx: _Context, objective, floors, max_iter=30) -> ParetoPoint:
    """Bisection on the level of ``objective``, bracketed by SCA ascents."""
    tol = METRIC_TOL[objective]
    weights, ones = _unit(objective), (1.0, 1.0, 1.0)
    best = ctx.best_incumbent(objective, floors)
    if best is None:
        sol = ctx.check_level(dict(floors), ctx.pool[-1].solution if ctx.pool else None)
        if sol is None:
            return _infeasible({"objective": objective, "floors": dict(floors)})
        best = ctx.point(sol)
        if best is None or not _meets(best, floors):
            return _infeasible({"objective": objective, "floors": dict(floors)})
    best = _multi_ascend(ctx, best, weights, ones, floors)
    lo = best.metric(objective)
    hi = max(ctx.upper_bound(objective), lo)
    improved = False
    n_iter = 0
    while hi - lo > tol and n_iter < max_iter:
        n_iter += 1
        mid = 0.5 * (lo + hi)
        sol = ctx.check_level({**floors, objective: mid}, best.solution)
        cand = ctx.point(sol) if sol is not None else None
        if cand is None or not _meets(cand, floors) or cand.metric(objective) < mid * (1.0 - 1e-7):
            hi = mid
            continue
        if cand.metric(objective) > best.metric(objective):
            best, improved = cand, True
        lo = max(mid, best.metric(objective))
    if improved:
        best = _ascend(ctx, best, weights, ones, floors)
    out = ParetoPoint(best.comm, best.sense, best.wpt, best.solution)
    out.meta = {"objective": objective, "floors": dict(floors), "upper": hi, "bisection_iters": n_iter}
    return out


def solve_constrained(objective, thresholds, power_budget, channels, protocol, opts=None, target=None, context=None) -> ParetoPoint:
    """Maximize ``objective`` with floors on the other two metrics (ε-constraint).

    ``thresholds`` is a dict keyed by metric name or a pair ordered as in
    ``METRICS`` with the objective skipped.
    """
    objective = _normalize_metric(objective)
    ctx = context or _Context(power_budget, channels, protocol, opts, target)
    return _constrained(ctx, objective, _thresholds_dict(objective, thresholds))


def solve_lexicographic(priority, slack_fractions, power_budget, channels, protocol, opts=None, target=None, context=None) -> ParetoPoint:
    priority = tuple(_normalize_metric(m) for m in priority)
    if sorted(priority) != sorted(METRICS):
        raise ValueError(f"priority must be a permutation of {METRICS}")
    s1, s2 = (float(s) for s in slack_fractions)
    if not (0 <= s1 <= 1 and 0 <= s2 <= 1):
        raise ValueError("slack fractions must lie in [0, 1]")
    ctx = context or _Context(power_budget, channels, protocol, opts, target)
    m1, m2, m3 = priority
    stage1 = _constrained(ctx, m1, {m2: 0.0, m3: 0.0})
    if not stage1.feasible:
        return stage1
    floor1 = (1.0 - s1) * stage1.metric(m1)
    stage2 = _constrained(ctx, m2, {m1: floor1, m3: 0.0})
    assert stage2.feasible, "stage 2 lost feasibility"
    floor2 = (1.0 - s2) * stage2.metric(m2)
    stage3 = _constrained(ctx, m3, {m1: floor1, m2: floor2})
    assert stage3.feasible, "stage 3 lost feasibility"
    stage3.meta.update({"stage_optima": (stage1.metric(m1), stage2.metric(m2), stage3.metric(m3)), "priority": priority})
    return stage3


def single_objective_optima(context: _Context, rounds: int = 3) -> dict:
    """Per-metric maxima, repeated while a pass still improves some metric.

    Each pass starts from every design found so far, so a later pass can
    lift an earlier metric out of the basin its first ascent stopped in.
    """
    optima: dict = {}
    for _ in range(rounds):
        changed = False
        for m in METRICS:
            p = _constrained(context, m, {o: 0.0 for o in METRICS if o != m})
            old = optima.get(m)
            if old is None or (p.feasible and p.metric(m) > old.metric(m) + METRIC_TOL[m]):
                changed = changed or old is not None
                optima[m] = p
            elif p.feasible and p.metric(m) > old.metric(m):
                optima[m] = p
        if not changed and len(optima) == len(METRICS) and _ > 0:
            break
    return optima


def _default_normalizers(ctx: _Context) -> list:
    optima = single_objective_optima(ctx)
    return [optima[m].metric(m) if optima[m].feasible and optima[m].metric(m) > 0 else 1.0 for m in METRICS]


def solve_weighted_sum(weights, normalizers, power_budget, channels, protocol, opts=None, target=None, context=None) -> ParetoPoint:
    """Maximize ``sum_i w_i * metric_i / normalizer_i``; weights are rescaled to sum 1.

    ``normalizers=None`` uses the single-objective optima of the instance.
    """
    w = np.asarray(weights, dtype=float)
    if w.shape != (3,) or np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be three nonnegative numbers, not all zero")
    w = tuple(w / w.sum())
    ctx = context or _Context(power_budget, channels, protocol, opts, target)
    if normalizers is None:
        normalizers = _default_normalizers(ctx)
    normalizers = tuple(float(v) if v > 0 else 1.0 for v in normalizers)
    if not ctx.pool:
        sol = ctx.check_level({}, None)
        start = ctx.point(sol) if sol is not None else None
        if start is None:
            return _infeasible({"weights": w})
    start = max(ctx.pool, key=lambda p: _composite(p, w, normalizers))
    best = _multi_ascend(ctx, start, w, normalizers, {})
    out = ParetoPoint(best.comm, best.sense, best.wpt, best.solution)
    out.meta = {"weights": w, "normalizers": normalizers, "composite": _composite(best, w, normalizers)}
    return out


def trace_front(method, grid, power_budget, channels, protocol, opts=None, target=None, objective="comm", priority=METRICS, normalizers=None, include_infeasible=False, context=None) -> list:
    """One point per grid node; dominated flags over the feasible set; sorted by comm.

    ``method`` is ``"epsilon"`` (nodes: floors for the two non-objective
    metrics), ``"weighted"`` (nodes: weight triples) or ``"lexicographic"``
    (nodes: slack-fraction pairs for ``priority``).
    """
    grid = list(grid)
    if not grid:
        raise ValueError("grid must be nonempty")
    ctx = context or _Context(power_budget, channels, protocol, opts, target)
    if method == "weighted" and normalizers is None:
        normalizers = _default_normalizers(ctx)
    points = []
    for gid, node in enumerate(grid):
        if method in ("epsilon", "constraint"):
            p = solve_constrained(objective, node, ctx.budget, ctx.channels, ctx.protocol, context=ctx)
        elif method == "weighted":
            p = solve_weighted_sum(node, normalizers, ctx.budget, ctx.channels, ctx.protocol, context=ctx)
        elif method == "lexicographic":
            p = solve_lexicographic(priority, node, ctx.budget, ctx.channels, ctx.protocol, context=ctx)
        else:
            raise ValueError(f"unknown front method {method!r}")
        p.grid_id = gid
        points.append(p)
    feasible = mark_dominated([p for p in points if p.feasible])
    feasible.sort(key=lambda p: (p.comm, p.sense, p.wpt))
    if include_infeasible:
        return feasible + [p for p in points if not p.feasible]
    return feasible


def write_front_csv(points, path, method: str) -> None:
    path = Path(path)
    try:
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(FRONT_COLUMNS)
            for p in points:
                writer.writerow([
                    method,
                    "" if p.grid_id is None else p.grid_id,
                    repr(float(p.comm)),
                    repr(float(p.sense)),
                    repr(float(p.wpt) * 1e3),
                    int(bool(p.dominated)),
                    p.status,
                ])
    except OSError as exc:
        raise OSError(f"cannot write front to {path}: {exc}") from exc
