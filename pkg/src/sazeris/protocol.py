"""Element-, time- and power-splitting operation of a self-powered RIS."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Protocol(str, Enum):
    ES = "ES"
    TS = "TS"
    PS = "PS"

    @classmethod
    def parse(cls, value) -> "Protocol":
        if isinstance(value, Protocol):
            return value
        key = str(value).strip().upper()
        aliases = {
            "ELEMENTSPLITTING": "ES", "ELEMENT": "ES",
            "TIMESPLITTING": "TS", "TIME": "TS",
            "POWERSPLITTING": "PS", "POWER": "PS",
        }
        key = aliases.get(key.replace("_", "").replace("-", ""), key)
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown protocol {value!r}; expected one of ES, TS, PS") from None


@dataclass(frozen=True)
class ProtocolConfig:
    """Protocol variant, splitting factor and RIS power constants (Watts)."""

    variant: Protocol = Protocol.PS
    rho: float = 0.5
    n_ris: int = 100
    p_circuit: float = 50e-3
    p_element: float = 2e-6
    eta: float = 0.8

    def __post_init__(self):
        object.__setattr__(self, "variant", Protocol.parse(self.variant))
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho}")
        if self.n_ris < 1 or int(self.n_ris) != self.n_ris:
            raise ValueError("n_ris must be a positive integer")
        object.__setattr__(self, "n_ris", int(self.n_ris))
        if self.p_circuit < 0 or self.p_element < 0:
            raise ValueError("RIS power constants must be nonnegative")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")

    @property
    def n_reflect(self) -> int:
        """Reflecting elements; ES rounds rho * N_r half-up to an integer."""
        if self.variant is Protocol.ES:
            return int(math.floor(self.rho * self.n_ris + 0.5))
        return self.n_ris

    @property
    def n_harvest(self) -> int:
        if self.variant is Protocol.ES:
            return self.n_ris - self.n_reflect
        return self.n_ris if self.rho < 1.0 else 0

    @property
    def realized_rho(self) -> float:
        if self.variant is Protocol.ES:
            return self.n_reflect / self.n_ris
        return float(self.rho)

    @property
    def modulus(self) -> float:
        """Modulus of every reflecting coefficient."""
        return math.sqrt(self.rho) if self.variant is Protocol.PS else 1.0

    @property
    def time_share(self) -> float:
        return float(self.rho) if self.variant is Protocol.TS else 1.0

    @property
    def harvest_share(self) -> float:
        """Fraction of the incident power on harvesting elements that is absorbed."""
        if self.variant is Protocol.ES:
            return 1.0
        return 1.0 - float(self.rho)

    def reflect_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_ris, dtype=bool)
        mask[: self.n_reflect] = True
        return mask

    def harvest_mask(self) -> np.ndarray:
        if self.variant is Protocol.ES:
            return ~self.reflect_mask()
        return np.full(self.n_ris, self.rho < 1.0)

    def modulus_bounds(self) -> np.ndarray:
        return np.where(self.reflect_mask(), self.modulus, 0.0)


@dataclass(frozen=True)
class ReflectionProfile:
    coefficients: np.ndarray
    harvest_mask: np.ndarray
    time_share: float = 1.0

    @property
    def n_ris(self) -> int:
        return len(self.coefficients)


def power_requirement(cfg: ProtocolConfig) -> float:
    """Power the RIS must harvest to run its circuit and reflecting elements."""
    if cfg.variant is Protocol.ES:
        return cfg.p_circuit + cfg.n_reflect * cfg.p_element
    return cfg.p_circuit + cfg.rho * cfg.n_ris * cfg.p_element


def reflection_profile(cfg: ProtocolConfig, phases) -> ReflectionProfile:
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (cfg.n_ris,):
        raise ValueError(f"expected {cfg.n_ris} phases, got shape {phases.shape}")
    coeff = cfg.modulus_bounds() * np.exp(1j * phases)
    return ReflectionProfile(coeff, cfg.harvest_mask(), cfg.time_share)


def ris_harvested_power(cfg: ProtocolConfig, profile: ReflectionProfile, incident_powers) -> float:
    incident = np.asarray(incident_powers, dtype=float)
    if incident.shape != (cfg.n_ris,):
        raise ValueError(f"expected {cfg.n_ris} incident powers, got shape {incident.shape}")
    if np.any(incident < 0):
        raise ValueError("incident powers must be nonnegative")
    mask = np.asarray(profile.harvest_mask, dtype=bool)
    return float(cfg.eta * cfg.harvest_share * incident[mask].sum())


def self_power_feasible(cfg, profile, incident_powers) -> tuple[bool, float]:
    """Whether harvesting covers the RIS budget, and the surplus in Watts."""
    slack = ris_harvested_power(cfg, profile, incident_powers) - power_requirement(cfg)
    return slack >= 0.0, slack
