"""Small dense SDP solves over complex Hermitian PSD matrices.

Problems are linear in trace pairings tr(A_i Y) with Hermitian data.  They are
embedded into real symmetric programs through the standard block map
[[Re Y, -Im Y], [Im Y, Re Y]] (trace doubles under the embedding) and handed to
an interior-point backend; the structured complex solution is recovered by
averaging the blocks, which preserves positive semidefiniteness and every
trace pairing.  Problems in this codebase are at most 13x13 complex, so tight
tolerances are cheap.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum

import cvxpy as cp
import numpy as np

__all__ = [
    "SdpStatus",
    "SdpConstraint",
    "SdpProblem",
    "SdpSolution",
    "hermitize",
    "real_embedding",
    "complex_from_embedding",
    "solve_sdp",
    "numerical_rank",
    "psd_factorize",
]

FEAS_TOL = 1e-8
GAP_TOL = 1e-8
RANK_TOL_FRACTION = 1e-7

SENSES = ("<=", "==", ">=")


class SdpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_TROUBLE = "numerical_trouble"


def hermitize(a: np.ndarray) -> np.ndarray:
    """Exact Hermitian part (A + A^H)/2; a no-op for Hermitian input."""
    return (a + a.conj().T) / 2


def real_embedding(a: np.ndarray) -> np.ndarray:
    """Real symmetric embedding [[Re A, -Im A], [Im A, Re A]] of Hermitian A."""
    re, im = a.real, a.imag
    return np.block([[re, -im], [im, re]])


def complex_from_embedding(w: np.ndarray) -> np.ndarray:
    """Recover the structured complex matrix from a 2n x 2n real symmetric one.

    Averages the embedding blocks, i.e. projects onto the image of the
    embedding; for PSD input the result is Hermitian PSD with the same trace
    pairings against embedded Hermitian matrices.
    """
    n = w.shape[0] // 2
    re = (w[:n, :n] + w[n:, n:]) / 2
    im = (w[n:, :n] - w[:n, n:]) / 2
    return hermitize(re + 1j * im)


@dataclass(frozen=True)
class SdpConstraint:
    matrix: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        if self.sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}")


@dataclass(frozen=True)
class SdpProblem:
    """minimize tr(objective @ Y) over Hermitian Y >= 0 subject to trace constraints."""

    objective: np.ndarray
    constraints: tuple[SdpConstraint, ...]
    n: int

    def __post_init__(self):
        if self.objective.shape != (self.n, self.n):
            raise ValueError("objective dimension mismatch")
        for con in self.constraints:
            if con.matrix.shape != (self.n, self.n):
                raise ValueError("constraint dimension mismatch")


@dataclass
class SdpSolution:
    y: np.ndarray | None
    objective_value: float
    status: SdpStatus
    duality_gap: float
    duals: list[float] | None
    numerical_rank: int
    eigenvalues: np.ndarray | None = None
    eigenvectors: np.ndarray | None = None
    max_violation: float = 0.0
    solver_name: str = ""


def _violation(con: SdpConstraint, value: float) -> float:
    if con.sense == "<=":
        return max(0.0, value - con.rhs)
    if con.sense == ">=":
        return max(0.0, con.rhs - value)
    return abs(value - con.rhs)


def _dual_objective(problem: SdpProblem, duals: list[float]) -> float:
    # Lagrangian bound for the minimization; cvxpy reports nonnegative
    # multipliers for both inequality senses and a free one for equalities
    # whose sign convention requires negation here.
    total = 0.0
    for con, z in zip(problem.constraints, duals):
        if con.sense == "<=":
            total -= z * con.rhs
        elif con.sense == ">=":
            total += z * con.rhs
        else:
            total -= z * con.rhs
    return total


_SOLVER_CHAIN = (
    ("CLARABEL", dict(tol_gap_abs=1e-10, tol_gap_rel=1e-10, tol_feas=1e-10)),
    ("SCS", dict(eps=1e-10, max_iters=20_000)),
    ("CVXOPT", dict()),
)


def solve_sdp(problem: SdpProblem, feas_tol: float = FEAS_TOL, gap_tol: float = GAP_TOL) -> SdpSolution:
    """Solve the Hermitian SDP, certifying feasibility and gap tolerances.

    Returns a solution with status OPTIMAL only if the recovered primal
    violates no constraint by more than ``feas_tol`` and the duality gap is
    within ``gap_tol`` relative; otherwise a definitive non-optimal status.
    Backends are tried in order until one certifies.
    """
    n = problem.n
    w = cp.Variable((2 * n, 2 * n), PSD=True)

    def paired(mat: np.ndarray):
        # embedded trace equals twice the complex trace pairing
        return cp.sum(cp.multiply(real_embedding(hermitize(mat)), w)) / 2.0

    cons = []
    for con in problem.constraints:
        expr = paired(con.matrix)
        if con.sense == "<=":
            cons.append(expr <= con.rhs)
        elif con.sense == ">=":
            cons.append(expr >= con.rhs)
        else:
            cons.append(expr == con.rhs)
    cvx_problem = cp.Problem(cp.Minimize(paired(problem.objective)), cons)

    last_status = SdpStatus.NUMERICAL_TROUBLE
    for solver_name, opts in _SOLVER_CHAIN:
        try:
            with warnings.catch_warnings():
                # accuracy is certified below; the backend's own warning is noise
                warnings.simplefilter("ignore", UserWarning)
                cvx_problem.solve(solver=solver_name, **opts)
        except cp.SolverError:
            continue
        except (ValueError, ArithmeticError):
            continue
        status = cvx_problem.status
        if status in (cp.INFEASIBLE, cp.INFEASIBLE_INACCURATE):
            return SdpSolution(None, np.nan, SdpStatus.INFEASIBLE, np.nan, None, 0,
                               solver_name=solver_name)
        if status in (cp.UNBOUNDED, cp.UNBOUNDED_INACCURATE):
            return SdpSolution(None, np.nan, SdpStatus.UNBOUNDED, np.nan, None, 0,
                               solver_name=solver_name)
        if status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
            continue

        y = complex_from_embedding(w.value)
        # clamp the tiny negative eigenvalues interior-point solvers leave
        # behind; beyond the feasibility tolerance the solve is not trusted
        eigvals, eigvecs = np.linalg.eigh(y)
        if eigvals.size and eigvals[0] < -feas_tol * max(1.0, abs(eigvals[-1])):
            last_status = SdpStatus.NUMERICAL_TROUBLE
            continue
        if eigvals.size and eigvals[0] < 0.0:
            eigvals = np.maximum(eigvals, 0.0)
            y = hermitize((eigvecs * eigvals) @ eigvecs.conj().T)
        values = [np.trace(hermitize(con.matrix) @ y).real for con in problem.constraints]
        max_violation = max(
            (_violation(con, v) for con, v in zip(problem.constraints, values)), default=0.0
        )
        objective_value = float(np.trace(hermitize(problem.objective) @ y).real)

        duals = None
        gap = np.inf
        try:
            duals = [float(c.dual_value) for c in cons]
            gap = objective_value - _dual_objective(problem, duals)
        except (TypeError, ValueError):
            pass
        gap_ok = np.isfinite(gap) and abs(gap) <= gap_tol * max(1.0, abs(objective_value))
        if max_violation <= feas_tol and gap_ok:
            rank = _rank_from_eigs(eigvals)
            return SdpSolution(
                y=y,
                objective_value=objective_value,
                status=SdpStatus.OPTIMAL,
                duality_gap=float(gap),
                duals=duals,
                numerical_rank=rank,
                eigenvalues=eigvals,
                eigenvectors=eigvecs,
                max_violation=float(max_violation),
                solver_name=solver_name,
            )
        last_status = SdpStatus.NUMERICAL_TROUBLE
    return SdpSolution(None, np.nan, last_status, np.nan, None, 0)


def _rank_from_eigs(eigvals: np.ndarray, tol_fraction: float = RANK_TOL_FRACTION) -> int:
    lam_max = float(eigvals[-1]) if eigvals.size else 0.0
    if lam_max <= 0.0:
        return 0
    return int(np.count_nonzero(eigvals > tol_fraction * lam_max))


def numerical_rank(y: np.ndarray, tol_fraction: float = RANK_TOL_FRACTION) -> int:
    """Count of eigenvalues above ``tol_fraction`` times the largest one."""
    eigvals = np.linalg.eigvalsh(hermitize(y))
    _check_psd(eigvals, y)
    return _rank_from_eigs(eigvals, tol_fraction)


def _check_psd(eigvals: np.ndarray, y: np.ndarray) -> None:
    lam_max = max(float(eigvals[-1]), 0.0) if eigvals.size else 0.0
    floor = -1e-10 * max(1.0, lam_max)
    if eigvals.size and eigvals[0] < floor:
        raise ValueError(f"matrix has negative eigenvalue {eigvals[0]:.3e} beyond tolerance")


def psd_factorize(y: np.ndarray, tol_fraction: float = RANK_TOL_FRACTION) -> list[np.ndarray]:
    """Split PSD ``y`` into rank-one factors: y ~= sum of p p^H.

    Returns eigenvalue-scaled eigenvectors, largest eigenvalue first, one per
    numerically significant eigenvalue.
    """
    yh = hermitize(y)
    eigvals, eigvecs = np.linalg.eigh(yh)
    _check_psd(eigvals, yh)
    lam_max = max(float(eigvals[-1]), 0.0)
    keep = eigvals > tol_fraction * lam_max if lam_max > 0 else np.zeros_like(eigvals, bool)
    order = np.nonzero(keep)[0][::-1]
    return [np.sqrt(eigvals[i]) * eigvecs[:, i] for i in order]
