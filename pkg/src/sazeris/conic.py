"""Second-order cone programs and the generalized Rayleigh-quotient eigensolver.

A problem is ``min c^T x`` subject to cone constraints
``||A x + b||_2 <= c_i^T x + d_i`` and linear equalities ``E x = f``. A cone
with zero rows in ``A`` is a plain linear inequality ``c_i^T x + d_i >= 0``.

Complex quantities are lifted to reals by interleaving: complex entry ``i``
occupies reals ``2i`` (real part) and ``2i + 1`` (imaginary part).

Solves are delegated to Clarabel's primal-dual interior-point method. Status
semantics: ``Optimal`` is returned only when the recovered point satisfies
every constraint within ``feas_tol``; ``Infeasible`` carries a certificate,
``"primal"`` for an empty feasible set and ``"dual"`` for an unbounded
objective; anything else (iteration cap, stalled progress) is
``MaxIterations``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp

import clarabel


class SocpStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    MAX_ITERATIONS = "MaxIterations"


@dataclass(frozen=True)
class ConeConstraint:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float
    label: str = ""

    @property
    def is_linear(self) -> bool:
        return self.A.shape[0] == 0


@dataclass(frozen=True)
class SocpProblem:
    n: int
    objective: np.ndarray
    cones: tuple = ()
    eq_matrix: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None

    def __post_init__(self):
        obj = np.asarray(self.objective, dtype=float)
        if obj.shape != (self.n,):
            raise ValueError(f"objective has shape {obj.shape}, expected ({self.n},)")
        object.__setattr__(self, "objective", obj)
        for i, cone in enumerate(self.cones):
            if cone.A.ndim != 2 or cone.A.shape[1] != self.n or cone.b.shape != (cone.A.shape[0],):
                raise ValueError(f"cone {i} ({cone.label}) has inconsistent A/b shapes")
            if cone.c.shape != (self.n,):
                raise ValueError(f"cone {i} ({cone.label}) has c of shape {cone.c.shape}")
        eq = np.zeros((0, self.n)) if self.eq_matrix is None else np.asarray(self.eq_matrix, dtype=float)
        rhs = np.zeros(0) if self.eq_rhs is None else np.asarray(self.eq_rhs, dtype=float)
        if eq.ndim != 2 or eq.shape[1] != self.n or rhs.shape != (eq.shape[0],):
            raise ValueError("equality block has inconsistent shapes")
        object.__setattr__(self, "eq_matrix", eq)
        object.__setattr__(self, "eq_rhs", rhs)
        A, b, *_ = self.stacked()
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(obj))):
            bad = next((f"cone {i} ({c.label})" for i, c in enumerate(self.cones)
                        if not (np.isfinite(c.d) and np.all(np.isfinite(c.A)) and np.all(np.isfinite(c.b)) and np.all(np.isfinite(c.c)))),
                       "objective or equality block")
            raise ValueError(f"{bad} has non-finite data")

    @property
    def n_constraints(self) -> int:
        return len(self.cones) + self.eq_matrix.shape[0]

    def data_scale(self) -> float:
        vals = [abs(c.d) for c in self.cones]
        vals += [np.max(np.abs(c.b)) for c in self.cones if c.b.size]
        if self.eq_rhs.size:
            vals.append(np.max(np.abs(self.eq_rhs)))
        return float(max(vals, default=0.0))

    def stacked(self):
        """Constraint data in ``b - A x`` form, cached.

        Rows are ordered equalities, linear inequalities, then one block per
        proper cone (scalar side first). Returns ``(A, b, n_eq, n_lin, sizes)``.
        """
        cached = self.__dict__.get("_stacked")
        if cached is not None:
            return cached
        linear = [c for c in self.cones if c.is_linear]
        proper = [c for c in self.cones if not c.is_linear]
        sizes = [c.A.shape[0] + 1 for c in proper]
        n_eq, n_lin = self.eq_rhs.size, len(linear)
        rows = n_eq + n_lin + sum(sizes)
        A = np.zeros((rows, self.n))
        b = np.zeros(rows)
        A[:n_eq] = self.eq_matrix
        b[:n_eq] = self.eq_rhs
        r = n_eq
        for c in linear:
            A[r] = -c.c
            b[r] = c.d
            r += 1
        for c in proper:
            m = c.A.shape[0]
            A[r] = -c.c
            b[r] = c.d
            A[r + 1:r + 1 + m] = -c.A
            b[r + 1:r + 1 + m] = c.b
            r += m + 1
        out = (A, b, n_eq, n_lin, sizes)
        object.__setattr__(self, "_stacked", out)
        return out

    def violations(self, x) -> np.ndarray:
        """Per-constraint violations: equalities last, cones in stored order."""
        x = np.asarray(x, dtype=float)
        A, b, n_eq, n_lin, sizes = self.stacked()
        s = b - A @ x  # slack in the cone: s must lie in the product cone
        eq = np.abs(s[:n_eq])
        lin = np.maximum(0.0, -s[n_eq:n_eq + n_lin])
        start = n_eq + n_lin
        if sizes:
            heads = start + np.concatenate([[0], np.cumsum(sizes)[:-1]])
            sq = s[start:] ** 2
            tails = np.add.reduceat(sq, heads - start) - sq[heads - start]
            soc = np.maximum(0.0, np.sqrt(np.maximum(tails, 0.0)) - s[heads])
        else:
            soc = np.zeros(0)
        # restore stored cone order
        out = np.empty(len(self.cones))
        is_lin = np.array([c.is_linear for c in self.cones], dtype=bool)
        out[is_lin] = lin
        out[~is_lin] = soc
        return np.concatenate([out, eq])

    def max_violation(self, x) -> float:
        v = self.violations(x)
        return float(v.max()) if v.size else 0.0


class SocpBuilder:
    """Incremental assembly of a :class:`SocpProblem`."""

    def __init__(self, n: int):
        self.n = int(n)
        self.objective = np.zeros(self.n)
        self._cones: list[ConeConstraint] = []
        self._eq_rows: list[np.ndarray] = []
        self._eq_rhs: list[float] = []

    def add_cone(self, A, b, c, d, label=""):
        A = np.atleast_2d(np.asarray(A, dtype=float)).reshape(-1, self.n)
        self._cones.append(
            ConeConstraint(A, np.asarray(b, dtype=float).reshape(-1), np.asarray(c, dtype=float), float(d), label)
        )

    def add_linear_ge(self, c, d, label=""):
        """``c^T x + d >= 0``."""
        self.add_cone(np.zeros((0, self.n)), np.zeros(0), c, d, label)

    def add_eq(self, row, rhs):
        self._eq_rows.append(np.asarray(row, dtype=float))
        self._eq_rhs.append(float(rhs))

    def build(self) -> SocpProblem:
        eq = np.array(self._eq_rows).reshape(-1, self.n)
        return SocpProblem(self.n, self.objective.copy(), tuple(self._cones), eq, np.array(self._eq_rhs))


@dataclass
class SocpSolution:
    x: np.ndarray
    status: SocpStatus
    objective_value: float
    max_violation: float
    feas_tol: float = 0.0
    certificate: str | None = None
    iterations: int = 0
    solver_status: str = ""


def solve_socp(p: SocpProblem, tol: float = 1e-8, max_iter: int = 200) -> SocpSolution:
    if not isinstance(p, SocpProblem):
        raise ValueError("expected a SocpProblem")
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = p.n
    feas_tol = max(tol, 1e-9) * 100.0 * (1.0 + p.data_scale())

    if p.n_constraints == 0:
        if np.any(p.objective != 0):
            return SocpSolution(np.zeros(n), SocpStatus.INFEASIBLE, -np.inf, 0.0, feas_tol, "dual")
        return SocpSolution(np.zeros(n), SocpStatus.OPTIMAL, 0.0, 0.0, feas_tol)

    A_dense, b, n_eq, n_lin, sizes = p.stacked()
    cones = []
    if n_eq:
        cones.append(clarabel.ZeroConeT(n_eq))
    if n_lin:
        cones.append(clarabel.NonnegativeConeT(n_lin))
    cones.extend(clarabel.SecondOrderConeT(m) for m in sizes)
    A = sp.csc_matrix(A_dense)
    P = sp.csc_matrix((n, n))
    settings = clarabel.DefaultSettings()
    settings.verbose = False
    settings.tol_gap_abs = tol
    settings.tol_gap_rel = tol
    settings.tol_feas = tol
    settings.max_iter = max_iter
    result = clarabel.DefaultSolver(P, p.objective, A, b, cones, settings).solve()

    x = np.asarray(result.x, dtype=float)
    status_name = str(result.status).split(".")[-1]
    S = clarabel.SolverStatus
    if result.status in (S.PrimalInfeasible, S.AlmostPrimalInfeasible):
        return SocpSolution(x, SocpStatus.INFEASIBLE, np.inf, np.inf, feas_tol, "primal", result.iterations, status_name)
    if result.status in (S.DualInfeasible, S.AlmostDualInfeasible):
        return SocpSolution(x, SocpStatus.INFEASIBLE, -np.inf, np.inf, feas_tol, "dual", result.iterations, status_name)
    if not np.all(np.isfinite(x)):
        return SocpSolution(np.zeros(n), SocpStatus.MAX_ITERATIONS, np.nan, np.inf, feas_tol, None, result.iterations, status_name)
    viol = p.max_violation(x)
    ok = result.status in (S.Solved, S.AlmostSolved) and viol <= feas_tol
    status = SocpStatus.OPTIMAL if ok else SocpStatus.MAX_ITERATIONS
    return SocpSolution(x, status, float(p.objective @ x), viol, feas_tol, None, result.iterations, status_name)


def dump_triplets(p: SocpProblem, path) -> None:
    """Write ``p`` as sparse triplets ``row_id variable_id coefficient``.

    Row ids: ``obj`` for the cost, ``cone<i>.t`` for the scalar side
    ``c_i^T x + d_i`` of cone ``i``, ``cone<i>.<r>`` for row ``r`` of
    ``A_i x + b_i``, and ``eq<j>`` for equality ``j`` (``E_j x = f_j``).
    Variable id ``-1`` carries the constant term. A ``# cone<i> rows <m>``
    comment fixes each cone's row count so empty rows survive a round trip.
    """
    lines = ["# socp-triplets v1", f"# n {p.n}"]

    def emit(row_id, coeffs, const):
        for j in np.flatnonzero(coeffs):
            lines.append(f"{row_id} {j} {float(coeffs[j])!r}")
        if const != 0:
            lines.append(f"{row_id} -1 {float(const)!r}")

    emit("obj", p.objective, 0.0)
    for i, c in enumerate(p.cones):
        lines.append(f"# cone{i} rows {c.A.shape[0]}")
        emit(f"cone{i}.t", c.c, c.d)
        for r in range(c.A.shape[0]):
            emit(f"cone{i}.{r}", c.A[r], c.b[r])
    for j in range(p.eq_rhs.size):
        lines.append(f"# eq{j}")
        emit(f"eq{j}", p.eq_matrix[j], p.eq_rhs[j])
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_triplets(path) -> SocpProblem:
    n = None
    cone_rows: dict[int, int] = {}
    n_eq = 0
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            parts = line[1:].split()
            if parts[:1] == ["n"]:
                n = int(parts[1])
            elif parts and parts[0].startswith("cone"):
                cone_rows[int(parts[0][4:])] = int(parts[2])
            elif parts and parts[0].startswith("eq"):
                n_eq = max(n_eq, int(parts[0][2:]) + 1)
            continue
        if line.strip():
            row_id, var, coef = line.split()
            entries.append((row_id, int(var), float(coef)))
    if n is None:
        raise ValueError(f"{path}: missing '# n' header")
    builder = SocpBuilder(n)
    A = {i: np.zeros((m, n)) for i, m in cone_rows.items()}
    b = {i: np.zeros(m) for i, m in cone_rows.items()}
    c = {i: np.zeros(n) for i in cone_rows}
    d = {i: 0.0 for i in cone_rows}
    E = np.zeros((n_eq, n))
    f = np.zeros(n_eq)
    for row_id, var, coef in entries:
        if row_id == "obj":
            builder.objective[var] = coef
        elif row_id.startswith("eq"):
            j = int(row_id[2:])
            if var < 0:
                f[j] = coef
            else:
                E[j, var] = coef
        else:
            head, sub = row_id.split(".")
            i = int(head[4:])
            if sub == "t":
                if var < 0:
                    d[i] = coef
                else:
                    c[i][var] = coef
            elif var < 0:
                b[i][int(sub)] = coef
            else:
                A[i][int(sub), var] = coef
    for i in sorted(cone_rows):
        builder.add_cone(A[i], b[i], c[i], d[i])
    for j in range(n_eq):
        builder.add_eq(E[j], f[j])
    return builder.build()


def generalized_rayleigh_max(A, B) -> tuple[float, np.ndarray]:
    """Maximize ``u^H A u / u^H B u``; returns the top eigenvalue and unit ``u``.

    The phase of ``u`` is fixed so its largest-modulus entry is real positive.
    """
    A = np.atleast_2d(np.asarray(A, dtype=complex))
    B = np.atleast_2d(np.asarray(B, dtype=complex))
    if A.shape != B.shape or A.shape[0] != A.shape[1]:
        raise ValueError(f"A {A.shape} and B {B.shape} must be equal square matrices")
    scale = max(np.abs(A).max(), np.abs(B).max(), 1.0)
    if not np.allclose(A, A.conj().T, atol=1e-10 * scale) or not np.allclose(B, B.conj().T, atol=1e-10 * scale):
        raise ValueError("A and B must be Hermitian")
    try:
        np.linalg.cholesky(B)
    except np.linalg.LinAlgError:
        raise ValueError("B must be positive definite") from None
    vals, vecs = scipy.linalg.eigh(A, B)
    u = vecs[:, -1]
    u = u / np.linalg.norm(u)
    pivot = u[np.argmax(np.abs(u))]
    u = u * (abs(pivot) / pivot)
    return float(vals[-1]), u
