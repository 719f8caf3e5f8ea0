"""scikit-learn style wrapper around the power-minimizing beamformer.

``fit`` takes one :class:`ChannelSet` (the "data" is a channel realization)
and stores the optimized design; ``predict`` evaluates that design's metrics
on a channel set of the same dimensions.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .channel import ChannelSet
from .metrics import QosRequirements, TargetModel, comm_rate, harvested_power_ers, sensing_rate
from .optimizer import InitStrategy, SolveOptions, SolveStatus, ao_solve
from .protocol import ProtocolConfig


def check_channel_set(channels, n_tx=None, n_ris=None) -> ChannelSet:
    """Type, finiteness and (optionally) dimension checks for estimator input."""
    if not isinstance(channels, ChannelSet):
        raise TypeError(f"expected a ChannelSet, got {type(channels).__name__}")
    for name in ("bs_ris", "direct_ir", "direct_er", "ris_ir", "ris_er", "ris_target", "target_sensor"):
        if not np.all(np.isfinite(getattr(channels, name))):
            raise ValueError(f"channels.{name} contains non-finite entries")
    if n_tx is not None and channels.n_tx != n_tx:
        raise ValueError(f"channels have N_t={channels.n_tx}, estimator was fitted with N_t={n_tx}")
    if n_ris is not None and channels.n_ris != n_ris:
        raise ValueError(f"channels have N_r={channels.n_ris}, estimator was fitted with N_r={n_ris}")
    return channels


class SAZEBeamformer(BaseEstimator):
    """Minimum transmit power beamformer for a self-powered sensing RIS.

    Fitted attributes: ``solution_``, ``report_``, ``objective_trace_``,
    ``status_``, ``power_w_``, ``n_iter_``.
    """

    def __init__(self, protocol="PS", rho=0.5, p_circuit=50e-3, p_element=2e-6, eta=0.8,
                 r_com_min=1.0, r_sense_min=0.2, e_min_total=0.5e-3, rcs_mean=0.5,
                 max_ao_iters=50, max_sca_iters=10, convergence_tol=1e-4,
                 init_strategy="aligned", n_starts=1, seed=0):
        self.protocol = protocol
        self.rho = rho
        self.p_circuit = p_circuit
        self.p_element = p_element
        self.eta = eta
        self.r_com_min = r_com_min
        self.r_sense_min = r_sense_min
        self.e_min_total = e_min_total
        self.rcs_mean = rcs_mean
        self.max_ao_iters = max_ao_iters
        self.max_sca_iters = max_sca_iters
        self.convergence_tol = convergence_tol
        self.init_strategy = init_strategy
        self.n_starts = n_starts
        self.seed = seed

    def _protocol(self, n_ris) -> ProtocolConfig:
        return ProtocolConfig(self.protocol, self.rho, n_ris, self.p_circuit, self.p_element, self.eta)

    def fit(self, X, y=None):
        channels = check_channel_set(X)
        protocol = self._protocol(channels.n_ris)
        qos = QosRequirements(self.r_com_min, self.r_sense_min, self.e_min_total)
        opts = SolveOptions(
            max_ao_iters=self.max_ao_iters, max_sca_iters=self.max_sca_iters,
            convergence_tol=self.convergence_tol, init_strategy=InitStrategy(self.init_strategy),
            n_starts=self.n_starts, seed=self.seed,
        )
        target = TargetModel.for_channels(channels, self.rcs_mean)
        rep = ao_solve(channels, protocol, qos, opts, target)
        self.report_ = rep
        self.status_ = rep.status
        self.objective_trace_ = np.asarray(rep.objective_trace, dtype=float)
        self.n_iter_ = rep.n_ao_iters
        self.protocol_ = protocol
        self.n_tx_, self.n_ris_ = channels.n_tx, channels.n_ris
        self.solution_ = rep.solution
        self.power_w_ = rep.objective_w
        if rep.status is SolveStatus.INFEASIBLE:
            # keeps check_is_fitted meaningful: fitted, but with no design
            self.solution_ = None
        return self

    def predict(self, X) -> np.ndarray:
        """``[rate_1, ..., rate_K, sensing_rate, harvested_power_W]`` of the fitted design."""
        check_is_fitted(self, "report_")
        if self.solution_ is None:
            raise ValueError("the fitted problem was infeasible; there is no design to evaluate")
        channels = check_channel_set(X, self.n_tx_, self.n_ris_)
        if channels.n_irs != self.solution_.tx_beams.shape[1]:
            raise ValueError(f"channels have {channels.n_irs} IRs, the design has {self.solution_.tx_beams.shape[1]} beams")
        profile = self.solution_.profile(self.protocol_)
        target = TargetModel.for_channels(channels, self.rcs_mean)
        rates = [comm_rate(k, self.solution_, channels, profile) for k in range(channels.n_irs)]
        sense = sensing_rate(self.solution_, channels, profile, target)
        wpt = harvested_power_ers(self.solution_, channels, profile, self.protocol_.eta)
        return np.array(rates + [sense, wpt])

    def score(self, X, y=None) -> float:
        """Negative transmit power in dBm, so that larger is better."""
        check_is_fitted(self, "report_")
        if self.solution_ is None:
            return -np.inf
        return -float(10.0 * np.log10(self.power_w_) + 30.0)
