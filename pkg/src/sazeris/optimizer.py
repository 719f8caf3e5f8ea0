"""Transmit-power minimization by alternating optimization.

Each AO round sets the sensor combiner in closed form and then runs a few
SCA steps. One SCA step solves a single SOCP in the transmit beams ``W`` and
the relaxed reflection coefficients ``theta`` jointly: every received
amplitude ``y = d^H w + theta^T D w`` is bilinear, so it is replaced by its
first-order expansion around the current point, and every "quadratic >=
threshold" constraint by its affine minorant. The SOCP solution is projected
back to the protocol's coefficient modulus, rescaled to the smallest power
that meets every true constraint, and accepted only if it is truly feasible
and does not raise the transmit power. Rejections shrink a trust region.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .channel import ChannelSet, dbm_to_watts
from .conic import SocpBuilder, SocpProblem, SocpStatus, generalized_rayleigh_max, solve_socp
from .metrics import (
    BeamformingSolution,
    QosRequirements,
    TargetModel,
    comm_rate,
    effective_channel,
    harvested_power_ers,
    ris_incident_powers,
    sensing_rate,
)
from .protocol import ProtocolConfig, power_requirement, ris_harvested_power

log = logging.getLogger(__name__)

FEASIBILITY_SLACK = 1e-9
_MARGIN = 1.0 + 1e-9


class InitStrategy(str, Enum):
    RANDOM = "random"
    ALIGNED = "aligned"


class SolveStatus(str, Enum):
    CONVERGED = "Converged"
    ITERATION_CAP = "IterationCap"
    INFEASIBLE = "Infeasible"


class InfeasibleStartError(RuntimeError):
    """No initial point meets the QoS constraints under the power cap."""


@dataclass(frozen=True)
class SolveOptions:
    max_ao_iters: int = 50
    max_sca_iters: int = 10
    convergence_tol: float = 1e-4
    init_strategy: InitStrategy = InitStrategy.ALIGNED
    penalty_weight: float = 0.0
    seed: int = 0
    trust_init: float = 1.0
    trust_shrink: float = 0.5
    trust_min: float = 1e-3
    power_cap_dbm: float = 60.0
    socp_tol: float = 1e-8
    restarts: int = 3
    line_search_steps: int = 4
    n_starts: int = 1

    def __post_init__(self):
        object.__setattr__(self, "init_strategy", InitStrategy(self.init_strategy))
        if self.max_ao_iters < 1 or self.max_sca_iters < 1:
            raise ValueError("iteration caps must be >= 1")
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        for name in ("convergence_tol", "trust_init", "trust_min", "socp_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 < self.trust_shrink < 1:
            raise ValueError("trust_shrink must lie in (0, 1)")
        if self.penalty_weight < 0:
            raise ValueError("penalty_weight must be nonnegative")


@dataclass
class SolveReport:
    solution: BeamformingSolution | None
    objective_trace: list
    status: SolveStatus
    constraint_slacks: dict
    n_ao_iters: int = 0
    n_socp: int = 0
    n_rejected: int = 0

    @property
    def objective_w(self) -> float:
        return self.solution.objective_w if self.solution is not None else float("nan")


@dataclass
class AffineLowerBound:
    """``x -> 2 Re(coef^H x) - offset``, a global minorant of ``|a^H x|^2``."""

    coef: np.ndarray
    offset: float

    def __call__(self, x) -> float:
        return float(2.0 * np.real(np.vdot(self.coef, np.asarray(x, dtype=complex))) - self.offset)


def sca_linearize_quadratic(a, x_ref) -> AffineLowerBound:
    a = np.asarray(a, dtype=complex)
    x_ref = np.asarray(x_ref, dtype=complex)
    if a.shape != x_ref.shape:
        raise ValueError(f"shape mismatch: a {a.shape}, x_ref {x_ref.shape}")
    t = np.vdot(a, x_ref)
    return AffineLowerBound(a * t, float(abs(t) ** 2))


def _lift(alpha: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Real rows of ``Re(alpha^T z)`` and ``Im(alpha^T z)`` in interleaved reals."""
    re = np.empty(2 * alpha.size)
    im = np.empty(2 * alpha.size)
    re[0::2], re[1::2] = alpha.real, -alpha.imag
    im[0::2], im[1::2] = alpha.imag, alpha.real
    return re, im


def _to_complex(x: np.ndarray) -> np.ndarray:
    return x[0::2] + 1j * x[1::2]


def _to_real(z: np.ndarray) -> np.ndarray:
    out = np.empty(2 * z.size)
    out[0::2], out[1::2] = z.real, z.imag
    return out


class _Instance:
    """Channel products and thresholds shared by every step of one solve."""

    def __init__(self, channels: ChannelSet, protocol: ProtocolConfig, qos: QosRequirements, target: TargetModel):
        if protocol.n_ris != channels.n_ris:
            raise ValueError(f"protocol has n_ris={protocol.n_ris} but channels have {channels.n_ris}")
        self.ch = channels
        self.protocol = protocol
        self.qos = qos
        self.target = target
        G = channels.bs_ris
        self.n_tx, self.k = channels.n_tx, channels.n_irs
        self.n_ris = channels.n_ris
        self.sigma2 = channels.noise_power
        self.ts = protocol.time_share
        self.ir = [(channels.direct_ir[k].conj(), channels.ris_ir[k].conj()[:, None] * G) for k in range(self.k)]
        self.er = [(channels.direct_er[m].conj(), channels.ris_er[m].conj()[:, None] * G) for m in range(channels.n_ers)]
        self.sense = (np.zeros(self.n_tx, dtype=complex), channels.ris_target.conj()[:, None] * G)
        self.g_harvest = G[protocol.harvest_mask()]
        self.bounds = protocol.modulus_bounds()
        self.reflect = protocol.reflect_mask()

        self.gamma_c = qos.gamma_com(self.ts)
        self.gamma_s = qos.gamma_sense(self.ts)
        self.er_req = qos.e_min_total / (protocol.eta * self.ts) if qos.e_min_total > 0 else 0.0
        p_req = power_requirement(protocol)
        share = protocol.eta * protocol.harvest_share
        if p_req <= 0:
            self.ris_req = 0.0
        elif share <= 0 or self.g_harvest.shape[0] == 0:
            self.ris_req = np.inf
        else:
            self.ris_req = p_req / share

    def sense_req(self, rx_beam) -> float:
        if self.gamma_s <= 0:
            return 0.0
        u = rx_beam / np.linalg.norm(rx_beam)
        gain = self.target.two_way_gain * abs(np.vdot(u, self.ch.target_sensor)) ** 2
        if gain <= 0:
            return np.inf
        return self.gamma_s * self.sigma2 / gain

    def coefficients(self, phases) -> np.ndarray:
        return self.bounds * np.exp(1j * phases)

    @staticmethod
    def amplitudes(pair, W, theta) -> np.ndarray:
        """Received amplitude of every beam at one receiver, ``(d^H + theta^T D) W``."""
        d_conj, D = pair
        return (d_conj + theta @ D) @ W

    def quantities(self, W, theta) -> dict:
        ir = np.array([np.abs(self.amplitudes(p, W, theta)) ** 2 for p in self.ir])
        signal = np.diag(ir).copy()
        return {
            "signal": signal,
            "interference": ir.sum(axis=1) - signal,
            "echo": float(np.sum(np.abs(self.amplitudes(self.sense, W, theta)) ** 2)),
            "er": float(sum(np.sum(np.abs(self.amplitudes(p, W, theta)) ** 2) for p in self.er)),
            "ris": float(np.sum(np.abs(self.g_harvest @ W) ** 2)),
        }

    def min_scale_sq(self, W, theta, rx_beam) -> float:
        """Smallest ``c**2`` such that ``c * W`` meets every constraint (inf if none)."""
        q = self.quantities(W, theta)
        need = [0.0]
        if self.gamma_c > 0:
            margin = q["signal"] - self.gamma_c * q["interference"]
            if np.any(margin <= 0):
                return np.inf
            need.extend(self.gamma_c * self.sigma2 / margin)
        for value, req in ((q["echo"], self.sense_req(rx_beam)), (q["er"], self.er_req), (q["ris"], self.ris_req)):
            if req > 0:
                if not value > 0 or not np.isfinite(req):
                    return np.inf
                need.append(req / value)
        return float(max(need)) * _MARGIN

    def align_phases(self, W, theta) -> np.ndarray:
        """Rotate each beam so its own IR sees a real positive amplitude."""
        W = W.copy()
        for k, pair in enumerate(self.ir):
            y = self.amplitudes(pair, W[:, k], theta)
            if abs(y) > 0:
                W[:, k] *= np.conj(y) / abs(y)
        return W


def _steer(channels: ChannelSet) -> np.ndarray:
    a = channels.target_sensor
    return a / np.linalg.norm(a)


def update_receive_beamformer(solution, channels: ChannelSet, target: TargetModel, protocol=None, noise_cov=None):
    """Sensor combiner maximizing the echo SNR for fixed beams and phases.

    ``noise_cov`` (defaults to white noise) allows colored sensor noise.
    """
    if protocol is None:
        coeff = np.exp(1j * solution.ris_phases)
    else:
        coeff = solution.profile(protocol).coefficients
    y = (channels.ris_target.conj() * coeff) @ (channels.bs_ris @ solution.tx_beams)
    echo = target.two_way_gain * float(np.sum(np.abs(y) ** 2))
    a = channels.target_sensor
    if noise_cov is None:
        noise_cov = channels.noise_power * np.eye(len(a))
    if echo <= 0:
        return _steer(channels)
    A = np.outer(a, a.conj()) * (echo / channels.noise_power)
    _, u = generalized_rayleigh_max(A, np.asarray(noise_cov) / channels.noise_power)
    return u


def check_feasibility(solution, channels: ChannelSet, protocol: ProtocolConfig, qos: QosRequirements, target: TargetModel) -> dict:
    """Constraint slacks in natural units (bps/Hz and Watts); >= 0 means satisfied."""
    profile = solution.profile(protocol)
    slacks = {}
    for k in range(channels.n_irs):
        slacks[f"comm_{k}"] = comm_rate(k, solution, channels, profile) - qos.r_com_min
    slacks["sense"] = sensing_rate(solution, channels, profile, target) - qos.r_sense_min
    slacks["wpt"] = harvested_power_ers(solution, channels, profile, protocol.eta) - qos.e_min_total
    incident = ris_incident_powers(solution, channels)
    slacks["ris"] = ris_harvested_power(protocol, profile, incident) - power_requirement(protocol)
    return slacks


def _aligned_phases(channels: ChannelSet) -> np.ndarray:
    G = channels.bs_ris
    w0 = np.linalg.svd(G)[2][0].conj()
    cascade = channels.ris_ir[0].conj() * (G @ w0)
    direct = np.vdot(channels.direct_ir[0], w0)
    return np.mod(np.angle(direct) - np.angle(cascade), 2.0 * np.pi)


def _beam_candidates(inst: _Instance, theta: np.ndarray):
    H = np.column_stack([
        effective_channel(inst.ch.direct_ir[k], inst.ch.ris_ir[k], theta, inst.ch.bs_ris) for k in range(inst.k)
    ])
    gram = H.conj().T @ H
    load = np.real(np.trace(gram)) / inst.k
    yield H
    for reg in (10.0, 1.0, 0.1, 1e-2, 1e-4):
        yield H @ np.linalg.inv(gram + reg * load * np.eye(inst.k))
    if np.linalg.matrix_rank(gram) == inst.k:
        yield H @ np.linalg.inv(gram)


def _tightened_start(inst: _Instance, phases: np.ndarray, rx_beam: np.ndarray):
    theta = inst.coefficients(phases)
    best = None
    for W in _beam_candidates(inst, theta):
        norms = np.linalg.norm(W, axis=0)
        if np.any(norms == 0):
            continue
        W = W / norms
        c2 = inst.min_scale_sq(W, theta, rx_beam)
        if np.isfinite(c2) and (best is None or c2 * inst.k < best[0]):
            best = (c2 * inst.k, np.sqrt(c2) * W)
    return best


def init_solution(channels: ChannelSet, protocol: ProtocolConfig, opts: SolveOptions, qos=None, target=None) -> BeamformingSolution:
    """Feasible starting point at the least power reachable by scaling.

    Raises :class:`InfeasibleStartError` when every candidate needs more than
    ``opts.power_cap_dbm``.
    """
    qos = QosRequirements() if qos is None else qos
    target = TargetModel.for_channels(channels) if target is None else target
    inst = _Instance(channels, protocol, qos, target)
    rng = np.random.default_rng(opts.seed)
    rx_beam = _steer(channels)
    cap = float(dbm_to_watts(opts.power_cap_dbm))

    attempts = []
    if opts.init_strategy is InitStrategy.ALIGNED:
        attempts.append(_aligned_phases(channels))
    for _ in range(1 + opts.restarts):
        attempts.append(rng.uniform(0.0, 2.0 * np.pi, inst.n_ris))
    for phases in attempts:
        found = _tightened_start(inst, phases, rx_beam)
        if found is not None and found[0] <= cap:
            W = inst.align_phases(found[1], inst.coefficients(phases))
            return BeamformingSolution(W, phases, rx_beam)
    raise InfeasibleStartError(f"no initial point meets the QoS within {opts.power_cap_dbm} dBm")


class _Linearizer:
    """Affine expansions of received amplitudes in the stacked real variable.

    The complex variable is ``z = [w_1; ...; w_K; theta]`` with beams
    normalized by ``sqrt(p_ref)``; its interleaved real lift is followed by
    one epigraph variable for the power.
    """

    def __init__(self, inst: _Instance, W_ref, theta_ref, p_ref: float):
        self.inst = inst
        self.scale = np.sqrt(p_ref)
        self.Wn = W_ref / self.scale
        self.theta = theta_ref
        self.nz = inst.n_tx * inst.k + inst.n_ris
        self.n = 2 * self.nz + 1
        self.s_index = self.n - 1
        self.z_ref = np.concatenate([self.Wn.T.reshape(-1), theta_ref])

    def theta_slice(self) -> slice:
        return slice(2 * self.inst.n_tx * self.inst.k, 2 * self.nz)

    def amplitude(self, pair, j):
        """``(alpha, beta)`` with ``y_lin(z) = alpha^T z + beta`` for beam ``j``."""
        d_conj, D = pair
        n_tx = self.inst.n_tx
        alpha = np.zeros(self.nz, dtype=complex)
        alpha[j * n_tx:(j + 1) * n_tx] = self.scale * (d_conj + self.theta @ D)
        Dw = D @ self.Wn[:, j]
        alpha[n_tx * self.inst.k:] = self.scale * Dw
        beta = -self.scale * (self.theta @ Dw)
        return alpha, beta

    def rows(self, alpha, beta):
        re, im = _lift(alpha)
        return np.append(re, 0.0), np.append(im, 0.0), beta

    def quadratic_minorant(self, terms):
        """Real row and constant of ``sum |y_lin|^2``'s affine minorant at the reference."""
        z_aug = np.append(self.z_ref, 1.0)
        row = np.zeros(self.n)
        const = 0.0
        for alpha, beta in terms:
            bound = sca_linearize_quadratic(np.conj(np.append(alpha, beta)), z_aug)
            # 2 Re(coef^H z_aug): conj(coef) is the complex-linear coefficient vector
            re, _ = _lift(np.conj(bound.coef[:-1]))
            row[:-1] += 2.0 * re
            const += 2.0 * np.real(np.conj(bound.coef[-1])) - bound.offset
        return row, const


def build_joint_socp(solution_ref: BeamformingSolution, channels: ChannelSet, protocol: ProtocolConfig, qos: QosRequirements, opts: SolveOptions, target: TargetModel | None = None, trust: float | None = None) -> SocpProblem:
    target = TargetModel.for_channels(channels) if target is None else target
    inst = _Instance(channels, protocol, qos, target)
    problem, _ = _build(inst, solution_ref, opts, opts.trust_init if trust is None else trust)
    return problem


def _build(inst: _Instance, sol: BeamformingSolution, opts: SolveOptions, trust: float):
    theta_ref = inst.coefficients(sol.ris_phases)
    p_ref = sol.objective_w
    if not p_ref > 0:
        p_ref = 1.0
    lin = _Linearizer(inst, sol.tx_beams, theta_ref, p_ref)
    n, s = lin.n, lin.s_index
    b = SocpBuilder(n)
    n_w = 2 * inst.n_tx * inst.k
    th = lin.theta_slice()

    # power epigraph: ||w||^2 <= s as a rotated cone
    A = np.zeros((n_w + 1, n))
    A[:n_w, :n_w] = 2.0 * np.eye(n_w)
    A[n_w, s] = 1.0
    e_s = np.zeros(n)
    e_s[s] = 1.0
    b.add_cone(A, np.append(np.zeros(n_w), -1.0), e_s, 1.0, "power")
    b.objective[s] = 1.0
    if opts.penalty_weight > 0:
        ref_real = _to_real(np.where(inst.reflect, theta_ref, 0.0))
        b.objective[th] -= 2.0 * opts.penalty_weight * ref_real

    sigma = np.sqrt(inst.sigma2)
    if inst.gamma_c > 0:
        root = np.sqrt(inst.gamma_c)
        for k, pair in enumerate(inst.ir):
            rows, consts = [], []
            for j in range(inst.k):
                alpha, beta = lin.amplitude(pair, j)
                re, im, beta = lin.rows(alpha / sigma, beta / sigma)
                if j == k:
                    b.add_eq(im, -beta.imag)
                    c_row, d_val = re, beta.real
                else:
                    rows.extend([root * re, root * im])
                    consts.extend([root * beta.real, root * beta.imag])
            rows.append(np.zeros(n))
            consts.append(root)
            b.add_cone(np.array(rows), np.array(consts), c_row, d_val, f"sinr_{k}")

    def add_minorant(terms, req, label):
        row, const = lin.quadratic_minorant(terms)
        b.add_linear_ge(row / req, const / req - 1.0, label)

    req_s = inst.sense_req(sol.rx_beam)
    if req_s > 0:
        add_minorant([lin.amplitude(inst.sense, j) for j in range(inst.k)], req_s, "sense")
    if inst.er_req > 0:
        add_minorant([lin.amplitude(p, j) for p in inst.er for j in range(inst.k)], inst.er_req, "wpt")
    if inst.ris_req > 0:
        # ||G_H W||^2 is convex in W alone, so this minorant is exact-safe
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
        sel = np.zeros((2, n))
        sel[0, base + 2 * i] = 1.0
        sel[1, base + 2 * i + 1] = 1.0
        if inst.reflect[i]:
            b.add_cone(sel, np.zeros(2), np.zeros(n), inst.bounds[i], f"modulus_{i}")
        else:
            b.add_eq(sel[0], 0.0)
            b.add_eq(sel[1], 0.0)

    # trust region on both blocks
    n_refl = int(inst.reflect.sum())
    if n_refl:
        sel = np.eye(n)[th]
        radius = trust * float(np.max(inst.bounds)) * np.sqrt(n_refl)
        b.add_cone(sel, -_to_real(theta_ref), np.zeros(n), radius, "trust_theta")
    sel = np.eye(n)[:n_w]
    b.add_cone(sel, -_to_real(lin.Wn.T.reshape(-1)), np.zeros(n), trust, "trust_w")
    return b.build(), lin


def _decode(inst: _Instance, lin: _Linearizer, x: np.ndarray, phases_ref: np.ndarray):
    z = _to_complex(x[:-1])
    n_w = inst.n_tx * inst.k
    W = lin.scale * z[:n_w].reshape(inst.k, inst.n_tx).T
    theta = z[n_w:]
    tiny = np.abs(theta) <= 1e-9 * np.maximum(inst.bounds, 1e-300)
    phases = np.where(inst.reflect & ~tiny, np.angle(theta), phases_ref)
    return W, np.mod(phases, 2.0 * np.pi)


def _line_search(inst, lin, x, sol, power, steps):
    """Best rescaled point along the segment from the reference to the SOCP solution.

    Step lengths 1, 1/2, 1/4, ...; coefficients are projected to the protocol
    modulus before rescaling, so every trial point is a true candidate.
    """
    z = _to_complex(x[:-1])
    n_w = inst.n_tx * inst.k
    W_new = lin.scale * z[:n_w].reshape(inst.k, inst.n_tx).T
    theta_new = z[n_w:]
    best = None
    alpha = 1.0
    for _ in range(max(1, steps)):
        W = sol.tx_beams + alpha * (W_new - sol.tx_beams)
        theta = lin.theta + alpha * (theta_new - lin.theta)
        tiny = np.abs(theta) <= 1e-9 * np.maximum(inst.bounds, 1e-300)
        phases = np.where(inst.reflect & ~tiny, np.angle(theta), sol.ris_phases)
        cand = _tighten(inst, BeamformingSolution(W, phases, sol.rx_beam))
        if cand is not None and cand.objective_w <= power and (best is None or cand.objective_w < best.objective_w):
            best = cand
        alpha *= 0.5
    return best


def _relative_change(old: float, new: float) -> float:
    if old <= 0:
        return 0.0
    return (old - new) / old


def ao_solve(channels: ChannelSet, protocol: ProtocolConfig, qos: QosRequirements | None = None, opts: SolveOptions | None = None, target: TargetModel | None = None, initial: BeamformingSolution | None = None) -> SolveReport:
    """Minimize total transmit power by alternating receive-beam and joint SCA updates.

    With ``opts.n_starts > 1`` (and no ``initial``) the first start uses
    ``opts.init_strategy`` and the rest use random phases drawn from seeds
    spawned off ``opts.seed``; the lowest-power feasible run is returned.
    """
    qos = QosRequirements() if qos is None else qos
    opts = SolveOptions() if opts is None else opts
    target = TargetModel.for_channels(channels) if target is None else target
    if opts.n_starts == 1 or initial is not None:
        return _ao_single(channels, protocol, qos, replace(opts, n_starts=1), target, initial)
    seeds = np.random.SeedSequence(opts.seed).generate_state(opts.n_starts - 1)
    runs = [_ao_single(channels, protocol, qos, replace(opts, n_starts=1), target, None)]
    for s in seeds:
        o = replace(opts, n_starts=1, seed=int(s), init_strategy=InitStrategy.RANDOM)
        runs.append(_ao_single(channels, protocol, qos, o, target, None))
    found = [r for r in runs if r.solution is not None]
    if not found:
        return runs[0]
    best = min(found, key=lambda r: r.objective_w)
    best.n_socp = sum(r.n_socp for r in runs)
    best.n_rejected = sum(r.n_rejected for r in runs)
    return best


def _ao_single(channels, protocol, qos, opts, target, initial) -> SolveReport:
    inst = _Instance(channels, protocol, qos, target)

    sol = None
    if initial is not None:
        sol = _tighten(inst, initial)
    if sol is None:
        try:
            sol = init_solution(channels, protocol, opts, qos, target)
        except InfeasibleStartError as exc:
            log.debug("infeasible start: %s", exc)
            return SolveReport(None, [], SolveStatus.INFEASIBLE, {}, 0, 0, 0)

    power = sol.objective_w
    trace = [power]
    trust = opts.trust_init
    n_socp = n_rejected = 0
    status = SolveStatus.ITERATION_CAP
    n_iters = 0
    for it in range(opts.max_ao_iters):
        n_iters = it + 1
        start_power = power
        sol.rx_beam = update_receive_beamformer(sol, channels, target, protocol)
        tightened = _tighten(inst, sol)
        if tightened is not None and tightened.objective_w <= power:
            sol, power = tightened, tightened.objective_w
        stalled = power <= 0
        for _ in range(opts.max_sca_iters):
            if stalled:
                break
            problem, lin = _build(inst, sol, opts, trust)
            res = solve_socp(problem, opts.socp_tol)
            n_socp += 1
            candidate = None
            if res.status is SocpStatus.OPTIMAL:
                candidate = _line_search(inst, lin, res.x, sol, power, opts.line_search_steps)
            if candidate is not None:
                slacks = check_feasibility(candidate, channels, protocol, qos, target)
                if min(slacks.values()) < -FEASIBILITY_SLACK or candidate.objective_w > power:
                    candidate = None
            if candidate is None:
                n_rejected += 1
                trust *= opts.trust_shrink
                if trust < opts.trust_min:
                    stalled = True
                continue
            step = _relative_change(power, candidate.objective_w)
            sol, power = candidate, candidate.objective_w
            trust = min(opts.trust_init, trust / opts.trust_shrink)
            if step < opts.convergence_tol:
                break
        trace.append(power)
        if stalled or _relative_change(start_power, power) < opts.convergence_tol:
            status = SolveStatus.CONVERGED
            break

    slacks = check_feasibility(sol, channels, protocol, qos, target)
    sol.slacks = dict(slacks)
    return SolveReport(sol, trace, status, slacks, n_iters, n_socp, n_rejected)


def _tighten(inst: _Instance, sol: BeamformingSolution) -> BeamformingSolution | None:
    theta = inst.coefficients(sol.ris_phases)
    c2 = inst.min_scale_sq(sol.tx_beams, theta, sol.rx_beam)
    if not np.isfinite(c2):
        return None
    W = inst.align_phases(np.sqrt(c2) * sol.tx_beams, theta)
    return BeamformingSolution(W, sol.ris_phases.copy(), sol.rx_beam.copy())
