import csv
import itertools

import numpy as np
import pytest

from sazeris.channel import ScenarioConfig, build_scenario_channels, dbm_to_watts
from sazeris.pareto import (
    METRICS,
    ParetoPoint,
    _Context,
    dominates,
    mark_dominated,
    non_dominated,
    single_objective_optima,
    solve_constrained,
    solve_lexicographic,
    solve_weighted_sum,
    trace_front,
    write_front_csv,
)
from sazeris.protocol import ProtocolConfig
from sazeris.optimizer import SolveOptions

BUDGET = float(dbm_to_watts(50.0))


@pytest.fixture(scope="module")
def ctx():
    ch = build_scenario_channels(ScenarioConfig(n_tx=4, n_ris=20, seed=0))
    c = _Context(BUDGET, ch, ProtocolConfig("PS", 0.5, 20), SolveOptions(convergence_tol=1e-4), None)
    c.optima = single_objective_optima(c)
    return c


def _solve(fn, ctx, *args):
    return fn(*args, ctx.budget, ctx.channels, ctx.protocol, context=ctx)


def audit(points):
    return [(i, j) for (i, p), (j, q) in itertools.permutations(enumerate(points), 2) if dominates(p, q)]


def test_dominance_relation():
    a, b, c = ParetoPoint(1, 1, 1, None), ParetoPoint(1, 1, 0.5, None), ParetoPoint(2, 0, 1, None)
    assert dominates(a, b) and not dominates(b, a)
    assert not dominates(a, a)
    assert not dominates(a, c) and not dominates(c, a)
    marked = mark_dominated([a, b, c])
    assert [p.dominated for p in marked] == [False, True, False]
    assert non_dominated([a, b, c]) == [a, c]


def test_optima_feasible_and_within_budget(ctx):
    for m in METRICS:
        p = ctx.optima[m]
        assert p.feasible and p.metric(m) > 0
        assert p.solution.objective_w <= BUDGET + 1e-8
        assert all(v >= 0 and np.isfinite(v) for v in p.vector())


def test_zero_thresholds_is_single_objective(ctx):
    p = _solve(solve_constrained, ctx, "comm", (0.0, 0.0))
    assert p.comm == pytest.approx(ctx.optima["comm"].comm, rel=1e-3)


def test_thresholds_above_optima_infeasible(ctx):
    floors = {"sense": 1.5 * ctx.optima["sense"].sense, "wpt": 1.5 * ctx.optima["wpt"].wpt}
    assert not _solve(solve_constrained, ctx, "comm", floors).feasible


def test_bisection_matches_level_scan(ctx):
    floors = {"sense": 0.5 * ctx.optima["sense"].sense, "wpt": 0.0}
    p = _solve(solve_constrained, ctx, "comm", floors)
    assert p.feasible and p.sense >= floors["sense"] * (1 - 1e-7)
    # scan comm levels on a 1e-3 grid just above the returned level
    feasible_levels = []
    for k in range(1, 6):
        level = np.floor(p.comm * 1e3) / 1e3 + k * 1e-3
        sol = ctx.check_level({**floors, "comm": level}, p.solution)
        if sol is not None:
            pt = ctx.point(sol, register=False)
            if pt is not None and pt.comm >= level * (1 - 1e-7) and pt.sense >= floors["sense"] * (1 - 1e-7):
                feasible_levels.append(level)
    scan_best = max(feasible_levels, default=-np.inf)
    assert p.comm >= scan_best - 1e-3


def test_weighted_unit_matches_optimum(ctx):
    p = _solve(solve_weighted_sum, ctx, (1.0, 0.0, 0.0), None)
    opt = ctx.optima["comm"].comm
    assert abs(p.comm - opt) <= 1e-3 * opt


def test_weighted_scale_invariance(ctx):
    norm = [ctx.optima[m].metric(m) for m in METRICS]
    a = _solve(solve_weighted_sum, ctx, (0.2, 0.5, 0.3), norm)
    b = _solve(solve_weighted_sum, ctx, (2.0, 5.0, 3.0), norm)
    assert np.allclose(a.vector(), b.vector(), rtol=1e-9)


def test_weighted_rejects_bad_weights(ctx):
    with pytest.raises(ValueError):
        _solve(solve_weighted_sum, ctx, (0.0, 0.0, 0.0), None)
    with pytest.raises(ValueError):
        _solve(solve_weighted_sum, ctx, (1.0, -1.0, 0.0), None)


def test_lexicographic_zero_slack_preserves_top(ctx):
    p = _solve(solve_lexicographic, ctx, ("comm", "sense", "wpt"), (0.0, 0.0))
    opt1 = p.meta["stage_optima"][0]
    assert opt1 == pytest.approx(ctx.optima["comm"].comm, rel=1e-3)
    assert p.comm >= opt1 * (1 - 1e-6)


def test_lexicographic_slack_semantics(ctx):
    p = _solve(solve_lexicographic, ctx, ("sense", "comm", "wpt"), (0.3, 0.5))
    opt1 = p.meta["stage_optima"][0]
    assert p.sense >= 0.7 * opt1 - 1e-6


def test_lexicographic_full_slack_is_last_metric(ctx):
    p = _solve(solve_lexicographic, ctx, ("comm", "sense", "wpt"), (1.0, 1.0))
    assert p.wpt == pytest.approx(ctx.optima["wpt"].wpt, rel=1e-3)


def test_lexicographic_bad_priority(ctx):
    with pytest.raises(ValueError):
        _solve(solve_lexicographic, ctx, ("comm", "comm", "wpt"), (0.1, 0.1))


def test_fronts_pass_audit_and_budget(ctx):
    s_opt, e_opt = ctx.optima["sense"].sense, ctx.optima["wpt"].wpt
    eps_grid = [(a * s_opt, b * e_opt) for a in (0.0, 0.5) for b in (0.0, 0.5)]
    w_grid = [(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1)]
    eps = trace_front("epsilon", eps_grid, BUDGET, ctx.channels, ctx.protocol, context=ctx)
    wts = trace_front("weighted", w_grid, BUDGET, ctx.channels, ctx.protocol, context=ctx)
    for front in (eps, wts):
        filtered = non_dominated(front)
        assert filtered and audit(filtered) == []
        assert [p.comm for p in front] == sorted(p.comm for p in front)
        for p in front:
            assert p.solution.objective_w <= BUDGET + 1e-8
            assert p.dominated == any(dominates(q, p) for q in front)
    union = non_dominated(eps + wts)
    for p in non_dominated(wts):
        assert any(p is q for q in union)


def test_singleton_grid(ctx):
    front = trace_front("epsilon", [(0.0, 0.0)], BUDGET, ctx.channels, ctx.protocol, context=ctx)
    assert len(front) == 1


def test_empty_grid_rejected(ctx):
    with pytest.raises(ValueError):
        trace_front("epsilon", [], BUDGET, ctx.channels, ctx.protocol, context=ctx)


def test_front_csv(tmp_path):
    pts = mark_dominated([ParetoPoint(1.0, 0.5, 2e-3, None, grid_id=0), ParetoPoint(0.5, 0.2, 1e-3, None, grid_id=1)])
    path = tmp_path / "front.csv"
    write_front_csv(pts, path, "epsilon")
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["method", "grid_id", "comm_bpshz", "sense_bpshz", "wpt_mw", "dominated", "status"]
    assert float(rows[1][4]) == pytest.approx(2.0)
    assert rows[2][5] == "1"
