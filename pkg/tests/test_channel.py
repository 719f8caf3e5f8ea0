import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sazeris.channel import (
    ScenarioConfig,
    build_scenario_channels,
    dbm_to_watts,
    path_gain,
    sample_rician,
    steering_vector,
    watts_to_dbm,
)


def test_steering_broadside():
    assert np.allclose(steering_vector(4, 0.0), [1, 1, 1, 1])


def test_steering_half_turn():
    assert np.allclose(steering_vector(2, np.pi), [1, -1])


def test_steering_quarter_turn():
    assert np.allclose(steering_vector(4, np.pi / 2), [1, 1j, -1, -1j])


def test_steering_rejects_zero_elements():
    with pytest.raises(ValueError):
        steering_vector(0, 0.3)


@given(st.integers(1, 64), st.floats(-10, 10))
def test_steering_unit_modulus(n, f):
    v = steering_vector(n, f)
    assert v[0] == 1
    assert np.all(np.abs(np.abs(v) - 1) <= 1e-12)


@pytest.mark.parametrize("d, exp, expected", [(1, 2.2, 1e-3), (10, 2.0, 1e-5), (100, 2.0, 1e-7)])
def test_path_gain_values(d, exp, expected):
    assert path_gain(d, exp, -30) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.1, 1e4))
def test_path_gain_doubling(d):
    assert path_gain(d, 2.0, -30) / path_gain(2 * d, 2.0, -30) == pytest.approx(4.0, rel=1e-12)


@pytest.mark.parametrize("d", [0.0, -1.0])
def test_path_gain_rejects_nonpositive(d):
    with pytest.raises(ValueError):
        path_gain(d, 2.0, -30)


def test_rician_large_k_is_los():
    rng = np.random.default_rng(1)
    los = np.exp(1j * rng.uniform(0, 2 * np.pi, (6, 3)))
    h = sample_rician(6, 3, 1e12, los, 2.5, np.random.default_rng(2))
    assert np.max(np.abs(h - np.sqrt(2.5) * los)) / np.sqrt(2.5) <= 1e-5


@pytest.mark.parametrize("k", [1e4, 1e8])
def test_rician_deviation_scales_like_inverse_sqrt_k(k):
    los = np.ones((50, 40), dtype=complex)
    h = sample_rician(50, 40, k, los, 1.0, np.random.default_rng(5))
    dev = np.sqrt(np.mean(np.abs(h - los) ** 2))
    # scatter of unit variance scaled by 1/sqrt(K+1), LoS shrinkage is O(1/K)
    assert 0.8 / np.sqrt(k) < dev < 1.2 / np.sqrt(k)


def test_rician_same_seed_identical():
    los = np.ones((4, 4), dtype=complex)
    a = sample_rician(4, 4, 2.0, los, 1.0, np.random.default_rng(9))
    b = sample_rician(4, 4, 2.0, los, 1.0, np.random.default_rng(9))
    assert np.array_equal(a, b)


def test_rician_rayleigh_power_matches_raw_draws():
    n = 100_000
    h = sample_rician(1, n, 0.0, np.ones((1, n)), 1.0, np.random.default_rng(11))
    # independent oracle: raw complex Gaussian draws from a different stream
    rng = np.random.default_rng(12)
    raw = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
    assert np.mean(np.abs(h) ** 2) == pytest.approx(1.0, abs=0.02)
    assert np.mean(np.abs(raw) ** 2) == pytest.approx(1.0, abs=0.02)


def test_rician_shape_mismatch():
    with pytest.raises(ValueError):
        sample_rician(2, 3, 1.0, np.ones((3, 2)), 1.0, np.random.default_rng(0))


def test_default_geometry_bs_ris_distance():
    cfg = ScenarioConfig()
    d = np.linalg.norm(np.subtract(cfg.ris_position, cfg.bs_position))
    assert d == pytest.approx(5.0)
    # the BS-RIS link's mean power follows the distance law at that range
    gains = [np.mean(np.abs(build_scenario_channels(cfg.with_updates(seed=s)).bs_ris) ** 2) for s in range(40)]
    assert np.mean(gains) == pytest.approx(path_gain(d, 2.2, -30), rel=0.05)


def test_shapes():
    ch = build_scenario_channels(ScenarioConfig(n_ris=100, n_tx=8))
    assert ch.bs_ris.shape == (100, 8)
    assert ch.direct_ir.shape == (2, 8) and ch.direct_er.shape == (2, 8)
    assert ch.ris_ir.shape == (2, 100) and ch.ris_er.shape == (2, 100)
    assert ch.ris_target.shape == (100,) and ch.target_sensor.shape == (10,)
    assert np.all(np.abs(np.abs(ch.ris_target) - 1) <= 1e-12)
    assert ch.noise_power == pytest.approx(1e-12)


def test_determinism_bit_identical():
    cfg = ScenarioConfig(seed=42)
    assert build_scenario_channels(cfg).equals(build_scenario_channels(cfg))
    assert not build_scenario_channels(cfg).equals(build_scenario_channels(cfg.with_updates(seed=43)))


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_determinism_any_seed(seed):
    cfg = ScenarioConfig(n_tx=2, n_ris=6, seed=seed)
    assert build_scenario_channels(cfg).equals(build_scenario_channels(cfg))


@pytest.mark.parametrize("bad", [
    {"n_tx": 0}, {"n_ris": -1}, {"n_sensors": 0}, {"target_range": 0.0},
    {"pathloss_exponents": {"direct": 0.5}}, {"pathloss_exponents": {"bogus": 2.0}},
    {"ris_position": (1.0, 2.0)},
])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        ScenarioConfig(**bad)


def test_dbm_round_trip():
    assert dbm_to_watts(30.0) == pytest.approx(1.0)
    assert watts_to_dbm(1e-3) == pytest.approx(0.0)
