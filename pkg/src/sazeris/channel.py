"""Seeded synthesis of every link in the RIS-aided ISCAP scenario.

Arrays are uniform linear arrays with half-wavelength spacing, so the
spatial frequency toward azimuth ``phi`` is ``pi * sin(phi)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

import numpy as np

DEFAULT_EXPONENTS = {
    "bs_ris": 2.2,
    "ris_user": 2.2,
    "direct": 3.6,
    "ris_target": 2.0,
}


def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def watts_to_dbm(watts):
    return 10.0 * np.log10(np.asarray(watts, dtype=float)) + 30.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Geometry, array sizes and propagation statistics of one scenario.

    Positions are in meters; the target direction is given relative to the
    RIS (azimuth/elevation in radians, range in meters).
    """

    n_tx: int = 8
    n_ris: int = 100
    n_sensors: int = 10
    n_irs: int = 2
    n_ers: int = 2
    bs_position: tuple = (0.0, 0.0, 2.5)
    ris_position: tuple = (5.0, 0.0, 2.5)
    ir_center: tuple = (5.0, 50.0, 0.0)
    er_center: tuple = (5.0, 5.0, 0.0)
    cluster_radius: float = 2.0
    target_azimuth: float = float(np.deg2rad(-30.0))
    target_elevation: float = float(np.deg2rad(40.0))
    target_range: float = 50.0
    rician_k_db: float = 3.0
    pathloss_exponents: dict = field(default_factory=lambda: dict(DEFAULT_EXPONENTS))
    ref_gain_db: float = -30.0
    noise_power_dbm: float = -90.0
    seed: int = 0

    def __post_init__(self):
        for name in ("n_tx", "n_ris", "n_sensors", "n_irs", "n_ers"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ValueError(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("bs_position", "ris_position", "ir_center", "er_center"):
            value = tuple(float(v) for v in getattr(self, name))
            if len(value) != 3:
                raise ValueError(f"{name} must have 3 coordinates")
            object.__setattr__(self, name, value)
        if self.target_range <= 0:
            raise ValueError("target_range must be positive")
        if self.cluster_radius < 0:
            raise ValueError("cluster_radius must be nonnegative")
        exps = dict(DEFAULT_EXPONENTS)
        unknown = set(self.pathloss_exponents) - set(exps)
        if unknown:
            raise ValueError(f"unknown pathloss exponent link(s): {sorted(unknown)}")
        exps.update(self.pathloss_exponents)
        for link, exponent in exps.items():
            if exponent < 1:
                raise ValueError(f"pathloss exponent for {link} must be >= 1, got {exponent}")
        object.__setattr__(self, "pathloss_exponents", exps)
        if int(self.seed) != self.seed:
            raise ValueError("seed must be an integer")
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def noise_power(self) -> float:
        return float(dbm_to_watts(self.noise_power_dbm))

    def with_updates(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        for key in ("bs_position", "ris_position", "ir_center", "er_center"):
            out[key] = list(out[key])
        out["pathloss_exponents"] = dict(out["pathloss_exponents"])
        return out


@dataclass(frozen=True)
class ChannelSet:
    """All channel realizations of one Monte-Carlo trial.

    ``bs_ris`` is ``G`` (N_r x N_t); ``direct_ir``/``direct_er`` hold one row
    per receiver (N_t entries); ``ris_ir``/``ris_er`` hold one row per
    receiver (N_r entries). The target links are unit-modulus steering
    vectors: their path gains live in ``target_path_gain`` so they are
    applied exactly once, together with the RCS.
    """

    bs_ris: np.ndarray
    direct_ir: np.ndarray
    direct_er: np.ndarray
    ris_ir: np.ndarray
    ris_er: np.ndarray
    ris_target: np.ndarray
    target_sensor: np.ndarray
    noise_power: float
    target_path_gain: float = 1.0

    def __post_init__(self):
        n_ris, n_tx = np.shape(self.bs_ris)
        if np.ndim(self.direct_ir) != 2 or np.shape(self.direct_ir)[1] != n_tx:
            raise ValueError("direct_ir must have shape (K, N_t)")
        if np.ndim(self.direct_er) != 2 or np.shape(self.direct_er)[1] != n_tx:
            raise ValueError("direct_er must have shape (M, N_t)")
        if np.shape(self.ris_ir) != (len(self.direct_ir), n_ris):
            raise ValueError("ris_ir must have shape (K, N_r)")
        if np.shape(self.ris_er) != (len(self.direct_er), n_ris):
            raise ValueError("ris_er must have shape (M, N_r)")
        if np.shape(self.ris_target) != (n_ris,):
            raise ValueError("ris_target must have N_r entries")
        if np.ndim(self.target_sensor) != 1 or len(self.target_sensor) < 1:
            raise ValueError("target_sensor must be a nonempty vector")
        if not self.noise_power > 0:
            raise ValueError("noise_power must be positive")
        if self.target_path_gain < 0:
            raise ValueError("target_path_gain must be nonnegative")

    @property
    def n_tx(self) -> int:
        return self.bs_ris.shape[1]

    @property
    def n_ris(self) -> int:
        return self.bs_ris.shape[0]

    @property
    def n_irs(self) -> int:
        return self.direct_ir.shape[0]

    @property
    def n_ers(self) -> int:
        return self.direct_er.shape[0]

    @property
    def n_sensors(self) -> int:
        return self.target_sensor.shape[0]

    def equals(self, other: "ChannelSet") -> bool:
        """Bit-exact comparison of every array and scalar."""
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            for f in fields(self)
        )


def steering_vector(n_elements: int, spatial_frequency: float) -> np.ndarray:
    """Unit-modulus phasors ``exp(1j * i * spatial_frequency)``, i = 0..n-1."""
    if n_elements < 1 or int(n_elements) != n_elements:
        raise ValueError(f"n_elements must be a positive integer, got {n_elements!r}")
    return np.exp(1j * spatial_frequency * np.arange(int(n_elements)))


def path_gain(distance_m: float, exponent: float, ref_gain_db: float) -> float:
    """Distance power-law gain ``10**(ref_gain_db/10) * d**(-exponent)``."""
    if not distance_m > 0:
        raise ValueError(f"distance must be positive, got {distance_m!r}")
    return float(10.0 ** (ref_gain_db / 10.0) * distance_m ** (-exponent))


def sample_rician(rows, cols, k_factor_linear, los_component, gain, rng):
    """Rician fading matrix around a unit-modulus LoS component."""
    los = np.asarray(los_component, dtype=complex)
    if los.shape != (rows, cols):
        raise ValueError(f"los_component shape {los.shape} != {(rows, cols)}")
    if k_factor_linear < 0 or gain < 0:
        raise ValueError("k_factor and gain must be nonnegative")
    scatter = (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)
    k = float(k_factor_linear)
    los_w = np.sqrt(k / (k + 1.0))
    nlos_w = np.sqrt(1.0 / (k + 1.0))
    return np.sqrt(gain) * (los_w * los + nlos_w * scatter)


def azimuth_frequency(src, dst) -> float:
    """Half-wavelength ULA spatial frequency from ``src`` toward ``dst``."""
    d = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    return float(np.pi * np.sin(np.arctan2(d[1], d[0])))


def _draw_in_disc(center, radius, count, rng):
    r = radius * np.sqrt(rng.uniform(size=count))
    ang = rng.uniform(0.0, 2.0 * np.pi, size=count)
    pts = np.tile(np.asarray(center, dtype=float), (count, 1))
    pts[:, 0] += r * np.cos(ang)
    pts[:, 1] += r * np.sin(ang)
    return pts


def draw_positions(cfg: ScenarioConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    irs = _draw_in_disc(cfg.ir_center, cfg.cluster_radius, cfg.n_irs, rng)
    ers = _draw_in_disc(cfg.er_center, cfg.cluster_radius, cfg.n_ers, rng)
    return irs, ers


def build_scenario_channels(cfg: ScenarioConfig) -> ChannelSet:
    rng = np.random.default_rng(cfg.seed)
    exps = cfg.pathloss_exponents
    k_lin = float(db_to_linear(cfg.rician_k_db))
    bs = np.asarray(cfg.bs_position)
    ris = np.asarray(cfg.ris_position)
    ir_pos, er_pos = draw_positions(cfg, rng)

    los_g = np.outer(
        steering_vector(cfg.n_ris, azimuth_frequency(ris, bs)),
        steering_vector(cfg.n_tx, azimuth_frequency(bs, ris)).conj(),
    )
    g_gain = path_gain(np.linalg.norm(ris - bs), exps["bs_ris"], cfg.ref_gain_db)
    bs_ris = sample_rician(cfg.n_ris, cfg.n_tx, k_lin, los_g, g_gain, rng)

    def user_links(positions):
        direct = np.empty((len(positions), cfg.n_tx), dtype=complex)
        reflected = np.empty((len(positions), cfg.n_ris), dtype=complex)
        for i, pos in enumerate(positions):
            gd = path_gain(np.linalg.norm(pos - bs), exps["direct"], cfg.ref_gain_db)
            direct[i] = sample_rician(1, cfg.n_tx, 0.0, np.ones((1, cfg.n_tx)), gd, rng)[0]
            gr = path_gain(np.linalg.norm(pos - ris), exps["ris_user"], cfg.ref_gain_db)
            los = steering_vector(cfg.n_ris, azimuth_frequency(ris, pos))[None, :]
            reflected[i] = sample_rician(1, cfg.n_ris, k_lin, los, gr, rng)[0]
        return direct, reflected

    direct_ir, ris_ir = user_links(ir_pos)
    direct_er, ris_er = user_links(er_pos)

    freq_t = float(np.pi * np.sin(cfg.target_azimuth))
    target_gain = path_gain(cfg.target_range, exps["ris_target"], cfg.ref_gain_db) ** 2
    return ChannelSet(
        bs_ris=bs_ris,
        direct_ir=direct_ir,
        direct_er=direct_er,
        ris_ir=ris_ir,
        ris_er=ris_er,
        ris_target=steering_vector(cfg.n_ris, freq_t),
        target_sensor=steering_vector(cfg.n_sensors, freq_t),
        noise_power=cfg.noise_power,
        target_path_gain=target_gain,
    )
