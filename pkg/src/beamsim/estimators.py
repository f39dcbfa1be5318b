"""Steering-vector estimators built on SDP relaxation plus rank-one extraction.

Six solvers share one pattern: relax the quadratic estimation problem to a
small Hermitian SDP, then constructively extract a feasible vector whose
objective matches the relaxation optimum, which certifies global optimality.
The two norm-only problems and the two similarity-ball problems admit an
always-tight extraction; the two ellipsoid problems walk an ordered list of
sufficient conditions and fall back to an explicitly approximate span search
when none applies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.linalg

from . import rank_one
from .sectors import SectorModel, UncertaintyModel
from .sdp import (
    SdpConstraint,
    SdpProblem,
    SdpStatus,
    hermitize,
    psd_factorize,
    solve_sdp,
)

__all__ = [
    "Certificate",
    "EstimateResult",
    "InfeasibleProblemError",
    "EstimationError",
    "solve_kvh",
    "solve_kvh_variant",
    "solve_alg1",
    "solve_alg2",
    "solve_alg3",
    "solve_alg4",
]

GAP_TOL = 1e-6          # |achieved - sdp_value| <= GAP_TOL * max(1, sdp_value)
FEAS_TOL = 1e-7         # max constraint violation of the returned estimate
STRICT_MARGIN = 1e-7    # slack required to call an inequality strictly inactive
T_ZERO_FRACTION = 1e-6  # |t| below this times ||y|| counts as a zero divisor
IM_TOL = 1e-8           # real-nonnegativity test tolerance
COND_LIMIT = 1e12
# factorizations inside extractions keep eigenvalues down to this fraction of
# the top one: the solver's tail mass (about the rank threshold, 1e-7) must
# stay in the factors or it reappears as constraint violations of that size
EXTRACT_TOL = 1e-9


class Certificate(Enum):
    GLOBALLY_OPTIMAL = "globally_optimal"
    APPROXIMATE = "approximate"
    FAILED = "failed"


class EstimationError(Exception):
    """Estimation could not produce a usable result."""


class InfeasibleProblemError(EstimationError):
    """The constraint set of the estimation problem is empty."""


@dataclass
class EstimateResult:
    """Steering-vector estimate with its optimality certificate.

    ``sdp_value`` is the relaxation optimum, ``achieved_value`` the quadratic
    objective of the returned vector; a GLOBALLY_OPTIMAL certificate means the
    two agree to tolerance and every source constraint is met.  ``branch``
    names the extraction path, and ``diagnostics`` carries the trace values
    and condition flags the path decisions were based on.
    """

    a_star: np.ndarray | None
    sdp_value: float
    achieved_value: float
    certificate: Certificate
    branch: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return self.achieved_value - self.sdp_value


def _inverse_hermitian_pd(r_hat: np.ndarray) -> np.ndarray:
    """Inverse of a Hermitian positive definite matrix via Cholesky.

    Refuses condition numbers above 1e12 instead of silently regularizing.
    """
    r_hat = hermitize(r_hat)
    eigvals = np.linalg.eigvalsh(r_hat)
    if eigvals[0] <= 0:
        raise np.linalg.LinAlgError("covariance matrix is not positive definite")
    if eigvals[-1] / eigvals[0] > COND_LIMIT:
        raise np.linalg.LinAlgError(
            f"covariance condition number {eigvals[-1] / eigvals[0]:.2e} exceeds {COND_LIMIT:.0e}"
        )
    chol = scipy.linalg.cho_factor(r_hat, lower=True)
    return hermitize(scipy.linalg.cho_solve(chol, np.eye(r_hat.shape[0], dtype=complex)))


def _objective(a: np.ndarray, r_inv: np.ndarray) -> float:
    return float((a.conj() @ r_inv @ a).real)


@dataclass(frozen=True)
class _SectorSide:
    """Which sector quadratic bounds the estimate, and from which side."""

    matrix: np.ndarray
    sense: str  # "<=" for the complement matrix, ">=" for the sector matrix
    rhs: float

    def violation(self, value: float) -> float:
        return max(0.0, value - self.rhs) if self.sense == "<=" else max(0.0, self.rhs - value)

    def strictly_inactive(self, value: float) -> bool:
        margin = STRICT_MARGIN * max(1.0, abs(self.rhs))
        return value < self.rhs - margin if self.sense == "<=" else value > self.rhs + margin


def _complement_side(model: SectorModel) -> _SectorSide:
    return _SectorSide(model.c_tilde, "<=", model.delta0)


def _sector_side(model: SectorModel) -> _SectorSide:
    return _SectorSide(model.c, ">=", model.delta1)


def _norm_only_violation(a: np.ndarray, side: _SectorSide, n: int) -> float:
    sector_value = float((a.conj() @ side.matrix @ a).real)
    return max(side.violation(sector_value), abs(float(np.linalg.norm(a) ** 2) - n))


def _full_violation(a: np.ndarray, side: _SectorSide, unc: UncertaintyModel, n: int) -> float:
    sector_value = float((a.conj() @ side.matrix @ a).real)
    norm_sq = float(np.linalg.norm(a) ** 2)
    qdiff = unc.q.conj().T @ (a - unc.a0)
    return max(
        side.violation(sector_value),
        max(0.0, n * (1.0 - unc.eta1) - norm_sq),
        max(0.0, norm_sq - n * (1.0 + unc.eta2)),
        max(0.0, float(np.linalg.norm(qdiff) ** 2) - unc.epsilon),
    )


def _certify(sdp_value: float, achieved: float, violation: float) -> bool:
    return violation <= FEAS_TOL and abs(achieved - sdp_value) <= GAP_TOL * max(1.0, abs(sdp_value))


# ---------------------------------------------------------------------------
# norm-constrained problems (no similarity term)
# ---------------------------------------------------------------------------


def _solve_norm_constrained(r_hat: np.ndarray, model: SectorModel, side: _SectorSide) -> EstimateResult:
    n = model.n_elements
    r_inv = _inverse_hermitian_pd(r_hat)
    problem = SdpProblem(
        objective=r_inv,
        constraints=(
            SdpConstraint(side.matrix, side.sense, side.rhs),
            SdpConstraint(np.eye(n, dtype=complex), "==", float(n)),
        ),
        n=n,
    )
    sol = solve_sdp(problem)
    if sol.status == SdpStatus.INFEASIBLE:
        raise InfeasibleProblemError("norm-constrained estimation problem is infeasible")
    if sol.status != SdpStatus.OPTIMAL:
        raise EstimationError(f"SDP solve failed with status {sol.status.value}")
    x_star = sol.y
    b1 = float(np.trace(side.matrix @ x_star).real)
    b2 = float(np.trace(x_star).real)
    diag = {"b1": b1, "b2": b2, "rank": sol.numerical_rank}

    shifted = side.matrix - (b1 / b2) * np.eye(n)
    d1 = rank_one.decompose_d1(x_star, shifted, np.eye(n, dtype=complex), EXTRACT_TOL)
    # every factor has squared norm b2/rank, so the objective ratio decides
    best = min(d1.vectors, key=lambda p: _objective(p, r_inv) / float(np.linalg.norm(p) ** 2))
    a = best * np.sqrt(n) / np.linalg.norm(best)
    achieved = _objective(a, r_inv)
    violation = _norm_only_violation(a, side, n)
    certificate = (
        Certificate.GLOBALLY_OPTIMAL
        if _certify(sol.objective_value, achieved, violation)
        else Certificate.APPROXIMATE
        if violation <= FEAS_TOL
        else Certificate.FAILED
    )
    return EstimateResult(a, sol.objective_value, achieved, certificate, "d1", diag)


def solve_kvh(r_hat: np.ndarray, sector_model: SectorModel) -> EstimateResult:
    """Baseline estimator: minimize the whitened power with the estimate's
    norm pinned and its complement-sector quadratic form capped."""
    return _solve_norm_constrained(r_hat, sector_model, _complement_side(sector_model))


def solve_kvh_variant(r_hat: np.ndarray, sector_model: SectorModel) -> EstimateResult:
    """Baseline variant that lower-bounds the in-sector quadratic form instead."""
    return _solve_norm_constrained(r_hat, sector_model, _sector_side(sector_model))


# ---------------------------------------------------------------------------
# homogenized problems (norm band + similarity/ellipsoid)
# ---------------------------------------------------------------------------


def _homogenized_matrices(r_inv: np.ndarray, side: _SectorSide, unc: UncertaintyModel):
    """Constraint matrices of the homogenized problem in the (a, t) variable."""
    n = r_inv.shape[0]
    m = n + 1
    a0mat = np.zeros((m, m), dtype=complex)
    a0mat[:n, :n] = r_inv
    a1 = np.zeros((m, m), dtype=complex)
    a1[:n, :n] = side.matrix
    a2 = np.zeros((m, m), dtype=complex)
    a2[:n, :n] = np.eye(n)
    qqh = unc.q @ unc.q.conj().T
    qa0 = qqh @ unc.a0
    a3 = np.zeros((m, m), dtype=complex)
    a3[:n, :n] = qqh
    a3[:n, n] = -qa0
    a3[n, :n] = -qa0.conj()
    a3[n, n] = float((unc.a0.conj() @ qa0).real)
    a4 = np.zeros((m, m), dtype=complex)
    a4[n, n] = 1.0
    return a0mat, a1, a2, a3, a4


def _solve_relaxation(r_inv: np.ndarray, side: _SectorSide, unc: UncertaintyModel, n: int):
    a0m, a1, a2, a3, a4 = _homogenized_matrices(r_inv, side, unc)
    problem = SdpProblem(
        objective=a0m,
        constraints=(
            SdpConstraint(a1, side.sense, side.rhs),
            SdpConstraint(a2, ">=", n * (1.0 - unc.eta1)),
            SdpConstraint(a2, "<=", n * (1.0 + unc.eta2)),
            SdpConstraint(a3, "<=", unc.epsilon),
            SdpConstraint(a4, "==", 1.0),
        ),
        n=n + 1,
    )
    sol = solve_sdp(problem)
    if sol.status == SdpStatus.INFEASIBLE:
        raise InfeasibleProblemError(
            "estimation problem is infeasible; the similarity radius may be too small"
        )
    if sol.status != SdpStatus.OPTIMAL:
        raise EstimationError(f"SDP solve failed with status {sol.status.value}")
    return sol, (a0m, a1, a2, a3, a4)


def _require_spherical(unc: UncertaintyModel) -> None:
    if not unc.is_spherical:
        raise ValueError("this solver expects a spherical (identity-shape) uncertainty model")


def _solve_similarity(r_hat: np.ndarray, model: SectorModel, unc: UncertaintyModel,
                      side: _SectorSide) -> EstimateResult:
    _require_spherical(unc)
    n = model.n_elements
    r_inv = _inverse_hermitian_pd(r_hat)
    sol, _ = _solve_relaxation(r_inv, side, unc, n)
    x_star = hermitize(sol.y[:n, :n])
    a0 = unc.a0
    b1 = float(np.trace(side.matrix @ x_star).real)
    b2 = float(np.trace(x_star).real)
    b3 = float((a0.conj() @ x_star @ a0).real)
    diag = {"b1": b1, "b2": b2, "b3": b3, "rank": sol.numerical_rank}

    first = side.matrix - (b1 / b2) * np.eye(n)
    second = np.outer(a0, a0.conj()) - (b3 / b2) * np.eye(n)
    d1 = rank_one.decompose_d1(x_star, first, second, EXTRACT_TOL)
    best = min(d1.vectors, key=lambda p: _objective(p, r_inv) / float(np.linalg.norm(p) ** 2))
    x = best * np.sqrt(b2) / np.linalg.norm(best)
    a = rank_one.phase_rotate(x, a0)
    achieved = _objective(a, r_inv)
    violation = _full_violation(a, side, unc, n)
    certificate = (
        Certificate.GLOBALLY_OPTIMAL
        if _certify(sol.objective_value, achieved, violation)
        else Certificate.APPROXIMATE
        if violation <= FEAS_TOL
        else Certificate.FAILED
    )
    return EstimateResult(a, sol.objective_value, achieved, certificate, "d1", diag)


def solve_alg1(r_hat: np.ndarray, sector_model: SectorModel, similarity: UncertaintyModel) -> EstimateResult:
    """Norm band + similarity ball, complement-sector cap; always tight."""
    return _solve_similarity(r_hat, sector_model, similarity, _complement_side(sector_model))


def solve_alg3(r_hat: np.ndarray, sector_model: SectorModel, similarity: UncertaintyModel) -> EstimateResult:
    """Norm band + similarity ball, in-sector floor; always tight."""
    return _solve_similarity(r_hat, sector_model, similarity, _sector_side(sector_model))


# ---------------------------------------------------------------------------
# general (ellipsoid) problems: ordered sufficient-condition branches
# ---------------------------------------------------------------------------


def _real_nonnegative(value: complex) -> bool:
    return abs(value.imag) <= IM_TOL * abs(value) and value.real >= -IM_TOL


def _split(y: np.ndarray):
    return y[:-1], y[-1]


def _qualifying_candidates(vectors, qualify, r_inv):
    """Vectors with a usable homogenization component passing ``qualify``,
    ordered by the objective of the dehomogenized estimate."""
    out = []
    for y in vectors:
        x, t = _split(y)
        if abs(t) <= T_ZERO_FRACTION * np.linalg.norm(y):
            continue
        if not qualify(y):
            continue
        a = x / t
        out.append((_objective(a, r_inv), a))
    out.sort(key=lambda pair: pair[0])
    return [a for _, a in out]


def _span_search_basis(y_star: np.ndarray, rng: np.random.Generator):
    """Orthonormal bases mixing Range(Y*) with one outside direction."""
    factors = psd_factorize(y_star)
    v = np.column_stack(factors) if factors else np.zeros((y_star.shape[0], 0))
    q, _ = np.linalg.qr(v) if v.size else (np.zeros((y_star.shape[0], 0)), None)
    m = y_star.shape[0]
    for _ in range(8):
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        z -= q @ (q.conj().T @ z) if q.size else 0.0
        nz = np.linalg.norm(z)
        if nz < 1e-8:
            continue
        z = z / nz
        if q.shape[1] >= 2:
            yield np.column_stack([q[:, :2], z])
        if q.shape[1] >= 3:
            yield q[:, :3]


def _solve_general(r_hat: np.ndarray, model: SectorModel, unc: UncertaintyModel,
                   side: _SectorSide) -> EstimateResult:
    n = model.n_elements
    if np.linalg.norm(unc.q.conj().T @ unc.a0) < 1e-12:
        raise ValueError("uncertainty model has q^H a0 = 0")
    r_inv = _inverse_hermitian_pd(r_hat)
    sol, mats = _solve_relaxation(r_inv, side, unc, n)
    _, a1, a2, a3, a4 = mats
    y_star = sol.y
    v_star = sol.objective_value
    x_star = hermitize(y_star[:n, :n])
    x_vec = y_star[:n, n]
    rank = sol.numerical_rank

    b1 = float(np.trace(side.matrix @ x_star).real)
    b2 = float(np.trace(x_star).real)
    b3 = float((unc.a0.conj() @ x_star @ unc.a0).real)
    similarity_value = float(np.trace(a3 @ y_star).real)
    qqh = unc.q @ unc.q.conj().T
    corner = np.vdot(unc.a0, qqh @ x_vec)  # a0^H Q Q^H x*

    sector_strict = side.strictly_inactive(b1)
    sim_margin = STRICT_MARGIN * max(1.0, unc.epsilon)
    similarity_strict = similarity_value < unc.epsilon - sim_margin
    similarity_active = abs(similarity_value - unc.epsilon) <= sim_margin
    phase_ok = _real_nonnegative(corner)
    diag = {
        "b1": b1,
        "b2": b2,
        "b3": b3,
        "similarity_value": similarity_value,
        "rank": rank,
        "cond_sector_strict": sector_strict,
        "cond_similarity_strict": similarity_strict,
        "similarity_active": similarity_active,
        "phase_real_nonneg": phase_ok,
    }

    # primed matrices absorb the right-hand sides into the homogenization slot
    sector_primed = np.array(a1)
    sector_primed[n, n] = -side.rhs
    norm_primed = np.array(a2)
    norm_primed[n, n] = -b2
    sim_primed = np.array(a3)
    sim_primed[n, n] -= unc.epsilon

    sector_sign = -1.0 if side.sense == "<=" else 1.0  # wanted sign of the primed sector form

    def qualify_sector(y):
        return sector_sign * float((y.conj() @ sector_primed @ y).real) > 0.0

    def qualify_similarity(y):
        return float((y.conj() @ sim_primed @ y).real) < 0.0

    def evaluate(a, branch, approximate):
        # the band edge is often active at the optimum while the extraction
        # carries the solver's truncation error; a rescale of that size back
        # into the band is legitimate (all constraints are re-checked after)
        norm_sq = float(np.linalg.norm(a) ** 2)
        lo, hi = n * (1.0 - unc.eta1), n * (1.0 + unc.eta2)
        clipped = min(max(norm_sq, lo), hi)
        if clipped != norm_sq and abs(clipped - norm_sq) <= 1e-5 * n:
            a = a * np.sqrt(clipped / norm_sq)
        achieved = _objective(a, r_inv)
        violation = _full_violation(a, side, unc, n)
        if not approximate and _certify(v_star, achieved, violation):
            return EstimateResult(a, v_star, achieved, Certificate.GLOBALLY_OPTIMAL, branch, dict(diag))
        if violation <= FEAS_TOL:
            return EstimateResult(a, v_star, achieved, Certificate.APPROXIMATE, branch, dict(diag))
        return None

    fallback: EstimateResult | None = None

    def consider(result):
        nonlocal fallback
        if result is None:
            return None
        if result.certificate == Certificate.GLOBALLY_OPTIMAL:
            return result
        if fallback is None or result.achieved_value < fallback.achieved_value:
            fallback = result
        return None

    # (i) rank-one relaxation optimum: read the estimate off directly
    if rank == 1:
        y = psd_factorize(y_star, EXTRACT_TOL)[0]
        x, t = _split(y)
        if abs(t) > T_ZERO_FRACTION * np.linalg.norm(y):
            found = consider(evaluate(x / t, "rank1", approximate=False))
            if found:
                return found

    # (ii) sector constraint strictly inactive; candidates come sorted by
    # objective, so the first one that validates is the best valid factor
    if sector_strict:
        d1 = rank_one.decompose_d1(y_star, norm_primed, sim_primed, EXTRACT_TOL)
        for a in _qualifying_candidates(d1.vectors, qualify_sector, r_inv):
            found = consider(evaluate(a, "sector_strict_d1", approximate=False))
            if found:
                return found

    # (iii) similarity constraint strictly inactive
    def similarity_branch(y_mat, branch):
        d1 = rank_one.decompose_d1(y_mat, sector_primed, norm_primed, EXTRACT_TOL)
        for a in _qualifying_candidates(d1.vectors, qualify_similarity, r_inv):
            result = evaluate(a, branch, approximate=False)
            if result is not None and result.certificate == Certificate.GLOBALLY_OPTIMAL:
                return result
            consider(result)
        return None

    if similarity_strict:
        found = consider(similarity_branch(y_star, "similarity_strict_d1"))
        if found:
            return found

    # (iv) similarity active but the corner product's phase frees it:
    # rotating the homogenization column leaves every other pairing unchanged
    # and strictly deactivates the similarity constraint
    if similarity_active and not phase_ok and abs(corner) > 0.0:
        theta = np.angle(corner)
        y_bar = np.array(y_star)
        y_bar[:n, n] = np.exp(-1j * theta) * x_vec
        y_bar[n, :n] = y_bar[:n, n].conj()
        found = consider(similarity_branch(hermitize(y_bar), "phase_rotation_d1"))
        if found:
            return found

    # (v) rank three or above: four-target decomposition inside Range(Y*)
    if rank >= 3:
        try:
            y = rank_one.decompose_d2(y_star, [a1, a2, a3, a4])
            x, t = _split(y)
            if abs(t) > T_ZERO_FRACTION * np.linalg.norm(y):
                found = consider(evaluate(x / t, "range_d2", approximate=False))
                if found:
                    return found
        except rank_one.DecompositionError:
            pass

    # (vi) span extension: feasible but possibly suboptimal
    rng = np.random.default_rng(0xA11CE)
    if rank == 2:
        for _ in range(4):
            z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
            try:
                y = rank_one.extend_span_rank2(y_star, [a1, a2, a3, a4], z)
            except rank_one.DecompositionError:
                continue
            x, t = _split(y)
            if abs(t) > T_ZERO_FRACTION * np.linalg.norm(y):
                found = evaluate(x / t, "span_extension", approximate=True)
                if found:
                    return found
    else:
        targets = [float(np.trace(m @ y_star).real) for m in (a1, a2, a3, a4)]
        for basis in _span_search_basis(y_star, rng):
            y = rank_one._quadratic_point(basis, [a1, a2, a3, a4], targets, rng)
            if y is None:
                continue
            x, t = _split(y)
            if abs(t) > T_ZERO_FRACTION * np.linalg.norm(y):
                found = evaluate(x / t, "span_search", approximate=True)
                if found:
                    return found

    if fallback is not None:
        return fallback
    return EstimateResult(None, v_star, np.nan, Certificate.FAILED, "none", dict(diag))


def solve_alg2(r_hat: np.ndarray, sector_model: SectorModel, ellipsoid: UncertaintyModel) -> EstimateResult:
    """Norm band + ellipsoid, complement-sector cap; optimal under any of the
    checklist conditions, otherwise explicitly approximate."""
    return _solve_general(r_hat, sector_model, ellipsoid, _complement_side(sector_model))


def solve_alg4(r_hat: np.ndarray, sector_model: SectorModel, ellipsoid: UncertaintyModel) -> EstimateResult:
    """Norm band + ellipsoid, in-sector floor; same branch structure as the
    complement-cap version with the sector inequality mirrored."""
    return _solve_general(r_hat, sector_model, ellipsoid, _sector_side(sector_model))
