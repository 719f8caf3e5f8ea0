"""Beamforming for self-powered, sensor-aided RIS in ISCAP systems."""
from .channel import ChannelSet, ScenarioConfig, build_scenario_channels
from .metrics import BeamformingSolution, QosRequirements, TargetModel
from .optimizer import SolveOptions, SolveReport, SolveStatus, ao_solve
from .protocol import Protocol, ProtocolConfig

__version__ = "0.1.0"

__all__ = [
    "BeamformingSolution",
    "ChannelSet",
    "Protocol",
    "ProtocolConfig",
    "QosRequirements",
    "ScenarioConfig",
    "SolveOptions",
    "SolveReport",
    "SolveStatus",
    "TargetModel",
    "ao_solve",
    "build_scenario_channels",
]
