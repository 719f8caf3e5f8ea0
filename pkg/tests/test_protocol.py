import numpy as np
import pytest

from sazeris.protocol import (
    Protocol,
    ProtocolConfig,
    ReflectionProfile,
    power_requirement,
    reflection_profile,
    ris_harvested_power,
    self_power_feasible,
)

RHO_GRID = np.round(np.arange(0, 11) / 10, 1)


def test_power_requirement_ps():
    assert power_requirement(ProtocolConfig("PS", 0.5, 100)) == pytest.approx(50.1e-3, rel=1e-12)


def test_power_requirement_es_zero():
    assert power_requirement(ProtocolConfig("ES", 0.0, 100)) == pytest.approx(50e-3)


def test_power_requirement_es_128():
    cfg = ProtocolConfig("ES", 0.75, 128)
    assert cfg.n_reflect == 96
    assert power_requirement(cfg) == pytest.approx(50.192e-3, rel=1e-12)


def test_profile_ps_full_reflection():
    cfg = ProtocolConfig("PS", 1.0, 16)
    prof = reflection_profile(cfg, np.linspace(0, 3, 16))
    assert np.allclose(np.abs(prof.coefficients), 1.0)
    assert cfg.harvest_share == 0.0
    assert ris_harvested_power(cfg, prof, np.ones(16)) == 0.0


def test_profile_ps_quarter():
    prof = reflection_profile(ProtocolConfig("PS", 0.25, 8), np.zeros(8))
    assert np.allclose(np.abs(prof.coefficients), 0.5)


def test_profile_es_split():
    cfg = ProtocolConfig("ES", 0.75, 128)
    prof = reflection_profile(cfg, np.zeros(128))
    assert np.count_nonzero(prof.harvest_mask) == 32
    assert np.all(prof.harvest_mask[96:]) and not np.any(prof.harvest_mask[:96])
    assert np.all(prof.coefficients[96:] == 0)
    assert np.allclose(np.abs(prof.coefficients[:96]), 1.0)


def test_profile_length_mismatch():
    with pytest.raises(ValueError):
        reflection_profile(ProtocolConfig("PS", 0.5, 4), np.zeros(5))


@pytest.mark.parametrize("variant", list(Protocol))
@pytest.mark.parametrize("rho", RHO_GRID)
def test_modulus_contract(variant, rho):
    cfg = ProtocolConfig(variant, float(rho), 20)
    prof = reflection_profile(cfg, np.random.default_rng(0).uniform(0, 2 * np.pi, 20))
    mod = np.abs(prof.coefficients)
    reflecting = cfg.reflect_mask()
    if variant is Protocol.PS:
        assert np.allclose(mod, np.sqrt(rho), atol=1e-15)
    else:
        assert np.allclose(mod[reflecting], 1.0)
    if variant is Protocol.ES:
        assert np.count_nonzero(prof.harvest_mask) == 20 - cfg.n_reflect
        assert np.all(mod[prof.harvest_mask] == 0)
    if variant is Protocol.TS:
        assert prof.time_share == pytest.approx(rho)
    else:
        assert prof.time_share == 1.0


def test_es_rounding_and_realized_rho():
    cfg = ProtocolConfig("ES", 0.333, 10)
    assert cfg.n_reflect == 3
    assert cfg.realized_rho == pytest.approx(0.3)
    assert ProtocolConfig("ES", 0.25, 10).n_reflect == 3  # half rounds up


def test_harvest_ps_example():
    cfg = ProtocolConfig("PS", 0.5, 4, eta=0.8)
    prof = reflection_profile(cfg, np.zeros(4))
    assert ris_harvested_power(cfg, prof, np.full(4, 0.25e-3)) == pytest.approx(0.4e-3)


def test_harvest_ts_uses_all_elements():
    cfg = ProtocolConfig("TS", 0.3, 5, eta=0.5)
    prof = reflection_profile(cfg, np.zeros(5))
    assert ris_harvested_power(cfg, prof, np.ones(5)) == pytest.approx(0.5 * 0.7 * 5)


def test_harvest_es_masked_only():
    cfg = ProtocolConfig("ES", 0.6, 5, eta=1.0)
    prof = reflection_profile(cfg, np.zeros(5))
    incident = np.array([1, 2, 3, 4, 5.0])
    assert ris_harvested_power(cfg, prof, incident) == pytest.approx(9.0)


def test_harvest_es_empty_mask():
    cfg = ProtocolConfig("ES", 1.0, 5)
    assert ris_harvested_power(cfg, reflection_profile(cfg, np.zeros(5)), np.ones(5)) == 0.0


def test_harvest_rejects_negative():
    cfg = ProtocolConfig("PS", 0.5, 3)
    with pytest.raises(ValueError):
        ris_harvested_power(cfg, reflection_profile(cfg, np.zeros(3)), [1.0, -1.0, 0.0])


def test_self_power_examples():
    cfg = ProtocolConfig("PS", 0.5, 100, eta=0.8)
    prof = reflection_profile(cfg, np.zeros(100))
    ok, slack = self_power_feasible(cfg, prof, np.full(100, 1e-5))
    assert not ok and slack == pytest.approx(-49.7e-3)
    free = ProtocolConfig("PS", 0.5, 100, p_circuit=0.0, p_element=0.0)
    assert self_power_feasible(free, reflection_profile(free, np.zeros(100)), np.zeros(100))[0]


def test_self_power_boundary_inclusive():
    cfg = ProtocolConfig("ES", 0.5, 4, p_circuit=1.0, p_element=0.0, eta=1.0)
    prof = reflection_profile(cfg, np.zeros(4))
    ok, slack = self_power_feasible(cfg, prof, np.array([0, 0, 0.5, 0.5]))
    assert ok and slack == 0.0


def test_requirement_monotone():
    for v in ("PS", "TS"):
        reqs = [power_requirement(ProtocolConfig(v, float(r), 100)) for r in RHO_GRID]
        assert np.all(np.diff(reqs) >= 0)
    reqs = [power_requirement(ProtocolConfig("ES", float(r), 100)) for r in RHO_GRID]
    assert np.all(np.diff(reqs) >= 0)


def test_harvest_linear_and_decreasing():
    incident = np.random.default_rng(3).uniform(0, 1, 10)
    for v in ("PS", "TS"):
        vals = []
        for r in RHO_GRID:
            cfg = ProtocolConfig(v, float(r), 10)
            prof = reflection_profile(cfg, np.zeros(10))
            vals.append(ris_harvested_power(cfg, prof, incident))
            assert ris_harvested_power(cfg, prof, 3 * incident) == pytest.approx(3 * vals[-1])
        assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("kwargs", [{"rho": 1.5}, {"rho": -0.1}, {"eta": 0.0}, {"p_circuit": -1.0}, {"n_ris": 0}])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ProtocolConfig(**kwargs)


def test_protocol_parse_aliases():
    assert Protocol.parse("PowerSplitting") is Protocol.PS
    assert Protocol.parse("element_splitting") is Protocol.ES
    assert Protocol.parse("ts") is Protocol.TS
    with pytest.raises(ValueError):
        Protocol.parse("XX")
