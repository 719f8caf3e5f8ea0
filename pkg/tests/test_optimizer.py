import numpy as np
import pytest

from sazeris.channel import ScenarioConfig, build_scenario_channels
from sazeris.conic import SocpStatus, solve_socp
from sazeris.metrics import (
    BeamformingSolution,
    QosRequirements,
    TargetModel,
    comm_rate,
    harvested_power_ers,
    ris_incident_powers,
    sensing_rate,
)
from sazeris.optimizer import (
    InitStrategy,
    SolveOptions,
    SolveStatus,
    ao_solve,
    build_joint_socp,
    check_feasibility,
    init_solution,
    sca_linearize_quadratic,
    update_receive_beamformer,
)
from sazeris.protocol import ProtocolConfig, power_requirement, ris_harvested_power

VACUOUS = QosRequirements(0.0, 0.0, 0.0)


def crandn(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@pytest.fixture(scope="module")
def small():
    return build_scenario_channels(ScenarioConfig(n_tx=4, n_ris=20, seed=3))


# --- SCA minorant -----------------------------------------------------------

def test_sca_exact_at_reference():
    rng = np.random.default_rng(0)
    a, x = crandn(rng, 4), crandn(rng, 4)
    assert sca_linearize_quadratic(a, x)(x) == pytest.approx(abs(np.vdot(a, x)) ** 2, abs=1e-12)


def test_sca_zero_reference_is_zero():
    rng = np.random.default_rng(1)
    bound = sca_linearize_quadratic(crandn(rng, 4), np.zeros(4))
    for _ in range(20):
        assert bound(crandn(rng, 4)) == 0.0


def test_sca_dominance_random():
    rng = np.random.default_rng(2)
    for _ in range(2000):
        a, xr, x = crandn(rng, 4), crandn(rng, 4), 3 * crandn(rng, 4)
        assert sca_linearize_quadratic(a, xr)(x) <= abs(np.vdot(a, x)) ** 2 + 1e-12


def test_sca_shape_mismatch():
    with pytest.raises(ValueError):
        sca_linearize_quadratic(np.ones(3), np.ones(4))


# --- receive beam -----------------------------------------------------------

def test_receive_beam_white_noise_is_steer(small):
    rng = np.random.default_rng(4)
    sol = BeamformingSolution(crandn(rng, 4, 2), rng.uniform(0, 6, 20), np.ones(10))
    u = update_receive_beamformer(sol, small, TargetModel.for_channels(small))
    a = small.target_sensor / np.linalg.norm(small.target_sensor)
    assert abs(np.vdot(u, a)) == pytest.approx(1.0, abs=1e-10)


def test_receive_beam_single_sensor():
    ch = build_scenario_channels(ScenarioConfig(n_tx=2, n_ris=4, n_sensors=1, seed=0))
    sol = BeamformingSolution(np.ones((2, 2)), np.zeros(4), np.ones(1))
    u = update_receive_beamformer(sol, ch, TargetModel.for_channels(ch))
    assert u.shape == (1,) and abs(u[0]) == pytest.approx(1.0)


def test_receive_beam_zero_echo_default_steer(small):
    sol = BeamformingSolution(np.zeros((4, 2)), np.zeros(20), np.ones(10))
    u = update_receive_beamformer(sol, small, TargetModel.for_channels(small))
    assert np.allclose(u, small.target_sensor / np.linalg.norm(small.target_sensor))


def test_receive_beam_colored_noise_oracle(small):
    rng = np.random.default_rng(5)
    sol = BeamformingSolution(crandn(rng, 4, 2), rng.uniform(0, 6, 20), np.ones(10))
    M = crandn(rng, 10, 10)
    cov = small.noise_power * (np.eye(10) + 0.3 * M @ M.conj().T)
    u = update_receive_beamformer(sol, small, TargetModel.for_channels(small), noise_cov=cov)
    # oracle: maximizer of |u^H a|^2 / u^H C u is C^{-1} a
    v = np.linalg.solve(cov, small.target_sensor)
    assert abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v)) == pytest.approx(1.0, abs=1e-9)


# --- initialization ---------------------------------------------------------

def test_aligned_single_element():
    ch = build_scenario_channels(ScenarioConfig(n_tx=2, n_ris=1, seed=1))
    proto = ProtocolConfig("PS", 0.5, 1, p_circuit=0.0, p_element=0.0)
    sol = init_solution(ch, proto, SolveOptions(), VACUOUS)
    G = ch.bs_ris
    w0 = np.linalg.svd(G)[2][0].conj()
    cascade = np.conj(ch.ris_ir[0, 0]) * np.exp(1j * sol.ris_phases[0]) * (G[0] @ w0)
    direct = np.vdot(ch.direct_ir[0], w0)
    assert abs(np.angle(cascade / direct)) < 1e-9


def test_init_vacuous_near_zero(small):
    proto = ProtocolConfig("PS", 0.5, 20, p_circuit=0.0, p_element=0.0)
    sol = init_solution(small, proto, SolveOptions(), VACUOUS)
    assert sol.objective_w <= 1e-12


def test_init_deterministic(small):
    proto = ProtocolConfig("PS", 0.5, 20)
    o = SolveOptions(init_strategy=InitStrategy.RANDOM, seed=7)
    a, b = init_solution(small, proto, o), init_solution(small, proto, o)
    assert np.array_equal(a.tx_beams, b.tx_beams) and np.array_equal(a.ris_phases, b.ris_phases)


def test_init_is_feasible(small):
    proto = ProtocolConfig("PS", 0.5, 20)
    qos = QosRequirements()
    target = TargetModel.for_channels(small)
    sol = init_solution(small, proto, SolveOptions(), qos, target)
    assert min(check_feasibility(sol, small, proto, qos, target).values()) >= -1e-9


def test_init_power_cap_infeasible(small):
    proto = ProtocolConfig("PS", 0.5, 20)
    rep = ao_solve(small, proto, QosRequirements(), SolveOptions(power_cap_dbm=0.0))
    assert rep.status is SolveStatus.INFEASIBLE and rep.solution is None


# --- joint SOCP -------------------------------------------------------------

def test_joint_socp_dimensions(small):
    proto = ProtocolConfig("PS", 0.5, 20)
    sol = init_solution(small, proto, SolveOptions())
    p = build_joint_socp(sol, small, proto, QosRequirements(), SolveOptions())
    # interleaved reals for W and theta, plus the power epigraph variable
    assert p.n - 1 == 2 * (4 * 2) + 2 * 20 == 56


def test_joint_socp_vacuous_optimum_zero(small):
    proto = ProtocolConfig("PS", 0.5, 20, p_circuit=0.0, p_element=0.0)
    rng = np.random.default_rng(9)
    sol = BeamformingSolution(crandn(rng, 4, 2), np.zeros(20), np.ones(10))
    res = solve_socp(build_joint_socp(sol, small, proto, VACUOUS, SolveOptions(), trust=10.0))
    assert res.status is SocpStatus.OPTIMAL
    assert np.linalg.norm(res.x[:16]) <= 1e-6


def test_constraint_count_linear(small):
    counts = []
    for n_ris in (10, 20, 30):
        ch = build_scenario_channels(ScenarioConfig(n_tx=4, n_ris=n_ris, seed=3))
        proto = ProtocolConfig("PS", 0.5, n_ris)
        rng = np.random.default_rng(n_ris)
        sol = BeamformingSolution(crandn(rng, 4, 2), np.zeros(n_ris), np.ones(10))
        counts.append(len(build_joint_socp(sol, ch, proto, QosRequirements(), SolveOptions()).cones))
    assert counts[2] - counts[1] == counts[1] - counts[0] == 10


def test_sca_safety_at_socp_solution(small):
    # the linearized subproblem around a feasible start is itself feasible
    proto = ProtocolConfig("PS", 0.5, 20)
    qos = QosRequirements()
    target = TargetModel.for_channels(small)
    sol = init_solution(small, proto, SolveOptions(), qos, target)
    p = build_joint_socp(sol, small, proto, qos, SolveOptions(), target, trust=0.2)
    res = solve_socp(p)
    assert res.status is SocpStatus.OPTIMAL
    assert np.max(p.violations(res.x)) <= 1e-6


# --- AO ---------------------------------------------------------------------

def test_ao_vacuous_trace_zero(small):
    proto = ProtocolConfig("PS", 0.5, 20, p_circuit=0.0, p_element=0.0)
    rep = ao_solve(small, proto, VACUOUS)
    assert max(rep.objective_trace) <= 1e-12


@pytest.mark.parametrize("variant", ["PS", "TS", "ES"])
def test_ao_monotone_and_feasible(small, variant):
    proto = ProtocolConfig(variant, 0.6, 20)
    qos = QosRequirements()
    target = TargetModel.for_channels(small)
    rep = ao_solve(small, proto, qos, SolveOptions(convergence_tol=1e-3), target)
    if rep.status is SolveStatus.INFEASIBLE:
        pytest.skip("instance infeasible under the power cap")
    assert np.all(np.diff(rep.objective_trace) <= 1e-9)
    assert min(rep.constraint_slacks.values()) >= -1e-6
    assert rep.solution.objective_w == pytest.approx(rep.objective_trace[-1])


def test_ao_deterministic(small):
    proto = ProtocolConfig("ES", 0.7, 20)
    o = SolveOptions(convergence_tol=1e-3, seed=11)
    a, b = ao_solve(small, proto, opts=o), ao_solve(small, proto, opts=o)
    assert a.objective_trace == b.objective_trace
    assert np.array_equal(a.solution.tx_beams, b.solution.tx_beams)


def test_multistart_not_worse(small):
    proto = ProtocolConfig("TS", 0.7, 20)
    one = ao_solve(small, proto, opts=SolveOptions(convergence_tol=1e-3))
    many = ao_solve(small, proto, opts=SolveOptions(convergence_tol=1e-3, n_starts=3))
    if one.solution is not None:
        assert many.objective_w <= one.objective_w
    assert np.all(np.diff(many.objective_trace) <= 1e-9)


def test_slacks_zero_beams_negative(small):
    proto = ProtocolConfig("PS", 0.5, 20)
    sol = BeamformingSolution(np.zeros((4, 2)), np.zeros(20), np.ones(10))
    slacks = check_feasibility(sol, small, proto, QosRequirements(), TargetModel.for_channels(small))
    assert all(v < 0 for v in slacks.values())


def test_slacks_match_direct_metrics(small):
    rng = np.random.default_rng(12)
    proto = ProtocolConfig("PS", 0.4, 20)
    qos = QosRequirements()
    target = TargetModel.for_channels(small)
    sol = BeamformingSolution(crandn(rng, 4, 2), rng.uniform(0, 6, 20), np.ones(10) / np.sqrt(10))
    prof = sol.profile(proto)
    s = check_feasibility(sol, small, proto, qos, target)
    assert s["comm_1"] == comm_rate(1, sol, small, prof) - 1.0
    assert s["sense"] == sensing_rate(sol, small, prof, target) - 0.2
    assert s["wpt"] == harvested_power_ers(sol, small, prof, 0.8) - 0.5e-3
    assert s["ris"] == ris_harvested_power(proto, prof, ris_incident_powers(sol, small)) - power_requirement(proto)


@pytest.mark.slow
def test_default_scenario_converges():
    proto = ProtocolConfig("PS", 0.6, 100)
    ok = 0
    for seed in range(20):
        ch = build_scenario_channels(ScenarioConfig(seed=seed))
        rep = ao_solve(ch, proto, opts=SolveOptions(seed=seed))
        ok += rep.status is SolveStatus.CONVERGED
    assert ok >= 18


def test_options_validation():
    with pytest.raises(ValueError):
        SolveOptions(max_ao_iters=0)
    with pytest.raises(ValueError):
        SolveOptions(trust_shrink=1.0)
    with pytest.raises(ValueError):
        SolveOptions(n_starts=0)
