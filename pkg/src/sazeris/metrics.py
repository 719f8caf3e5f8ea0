"""Communication rate, sensing rate and harvested power of a beamforming design.

Signal model: the scalar received by a user from beam ``w`` is
``(h_d^H + h_r^H diag(theta) G) w``, i.e. ``h_eff^H w`` with
``h_eff = h_d + G^H diag(conj(theta)) h_r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet
from .protocol import ProtocolConfig, ReflectionProfile, reflection_profile


@dataclass(frozen=True)
class QosRequirements:
    r_com_min: float = 1.0  # bps/Hz per IR
    r_sense_min: float = 0.2  # bps/Hz
    e_min_total: float = 0.5e-3  # W, summed over ERs

    def __post_init__(self):
        for name in ("r_com_min", "r_sense_min", "e_min_total"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")

    def gamma_com(self, time_share: float = 1.0) -> float:
        return sinr_threshold(self.r_com_min, time_share)

    def gamma_sense(self, time_share: float = 1.0) -> float:
        return sinr_threshold(self.r_sense_min, time_share)


def sinr_threshold(rate: float, time_share: float = 1.0) -> float:
    """SINR needed for ``time_share * log2(1 + SINR) >= rate``."""
    if rate <= 0:
        return 0.0
    if time_share <= 0:
        return np.inf
    return float(2.0 ** (rate / time_share) - 1.0)


@dataclass(frozen=True)
class TargetModel:
    rcs_mean: float = 0.5  # m^2
    two_way_gain: float = 0.0

    def __post_init__(self):
        if self.rcs_mean < 0 or self.two_way_gain < 0:
            raise ValueError("rcs_mean and two_way_gain must be nonnegative")

    @classmethod
    def for_channels(cls, channels: ChannelSet, rcs_mean: float = 0.5) -> "TargetModel":
        return cls(rcs_mean=rcs_mean, two_way_gain=rcs_mean * channels.target_path_gain)


@dataclass
class BeamformingSolution:
    tx_beams: np.ndarray  # N_t x K
    ris_phases: np.ndarray  # N_r, radians in [0, 2 pi)
    rx_beam: np.ndarray  # N_s, unit norm
    slacks: dict = field(default_factory=dict)

    def __post_init__(self):
        self.tx_beams = np.asarray(self.tx_beams, dtype=complex)
        self.ris_phases = np.mod(np.asarray(self.ris_phases, dtype=float), 2.0 * np.pi)
        self.rx_beam = np.asarray(self.rx_beam, dtype=complex)

    @property
    def objective_w(self) -> float:
        return float(np.sum(np.abs(self.tx_beams) ** 2))

    def profile(self, protocol: ProtocolConfig) -> ReflectionProfile:
        return reflection_profile(protocol, self.ris_phases)

    def copy(self) -> "BeamformingSolution":
        return BeamformingSolution(
            self.tx_beams.copy(), self.ris_phases.copy(), self.rx_beam.copy(), dict(self.slacks)
        )


def _coefficients(profile):
    if isinstance(profile, ReflectionProfile):
        return np.asarray(profile.coefficients)
    return np.asarray(profile, dtype=complex)


def _time_share(profile) -> float:
    return profile.time_share if isinstance(profile, ReflectionProfile) else 1.0


def effective_channel(direct, cascade, profile, bs_ris) -> np.ndarray:
    """Direct plus RIS-reflected channel; the received scalar is ``h_eff^H w``.

    ``profile`` may be a :class:`ReflectionProfile` or a raw coefficient vector.
    """
    direct = np.asarray(direct, dtype=complex)
    cascade = np.asarray(cascade, dtype=complex)
    bs_ris = np.asarray(bs_ris, dtype=complex)
    coeff = _coefficients(profile)
    n_ris, n_tx = bs_ris.shape
    if direct.shape != (n_tx,) or cascade.shape != (n_ris,) or coeff.shape != (n_ris,):
        raise ValueError(
            f"dimension mismatch: direct {direct.shape}, cascade {cascade.shape}, "
            f"coefficients {coeff.shape}, bs_ris {bs_ris.shape}"
        )
    return direct + bs_ris.conj().T @ (np.conj(coeff) * cascade)


def _ir_gains(k, solution, channels, profile):
    h = effective_channel(channels.direct_ir[k], channels.ris_ir[k], profile, channels.bs_ris)
    return np.abs(h.conj() @ solution.tx_beams) ** 2


def comm_sinr(k: int, solution, channels: ChannelSet, profile) -> float:
    if not 0 <= k < channels.n_irs:
        raise ValueError(f"IR index {k} out of range [0, {channels.n_irs})")
    gains = _ir_gains(k, solution, channels, profile)
    interference = gains.sum() - gains[k]
    return float(gains[k] / (interference + channels.noise_power))


def comm_rate(k: int, solution, channels: ChannelSet, profile) -> float:
    return _time_share(profile) * float(np.log2(1.0 + comm_sinr(k, solution, channels, profile)))


def echo_power(solution, channels: ChannelSet, profile) -> float:
    """Power of the RIS-reflected illumination at the target (before path gain)."""
    coeff = _coefficients(profile)
    a = channels.ris_target
    y = (a.conj() * coeff) @ (channels.bs_ris @ solution.tx_beams)
    return float(np.sum(np.abs(y) ** 2))


def sensing_snr(solution, channels: ChannelSet, profile, target: TargetModel) -> float:
    u = np.asarray(solution.rx_beam, dtype=complex)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise ValueError("rx_beam must be nonzero")
    array_gain = np.abs(np.vdot(u, channels.target_sensor)) ** 2 / norm**2
    return float(
        target.two_way_gain * array_gain * echo_power(solution, channels, profile) / channels.noise_power
    )


def sensing_rate(solution, channels: ChannelSet, profile, target: TargetModel) -> float:
    snr = sensing_snr(solution, channels, profile, target)
    return _time_share(profile) * float(np.log2(1.0 + snr))


def er_received_power(solution, channels: ChannelSet, profile) -> float:
    """Total RF power over all ERs and beams, before conversion efficiency."""
    total = 0.0
    for m in range(channels.n_ers):
        g = effective_channel(channels.direct_er[m], channels.ris_er[m], profile, channels.bs_ris)
        total += float(np.sum(np.abs(g.conj() @ solution.tx_beams) ** 2))
    return total


def harvested_power_ers(solution, channels: ChannelSet, profile, eta: float) -> float:
    return _time_share(profile) * eta * er_received_power(solution, channels, profile)


def ris_incident_powers(solution, channels: ChannelSet) -> np.ndarray:
    return np.sum(np.abs(channels.bs_ris @ solution.tx_beams) ** 2, axis=1)
