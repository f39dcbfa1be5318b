"""Constructive Hermitian rank-one matrix decompositions.

Two primitives are provided.  The two-matrix decomposition splits a PSD matrix
X of rank R into R rank-one terms whose quadratic forms against two given
Hermitian matrices all equal the corresponding trace averages; it exists for
every input and is built by pairwise rotations of an eigenfactorization.  The
four-matrix decomposition asks for a single vector in Range(X) matching four
trace values exactly; it is found by reducing two of the targets with the
two-matrix routine and root-finding over three-factor complex combinations for
the remaining two.  The four-matrix search reports failure explicitly rather
than ever returning a silently wrong vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.optimize import root

from .sdp import hermitize, psd_factorize

__all__ = [
    "DecompositionResult",
    "DecompositionError",
    "RankTooLowError",
    "ConstructionFailedError",
    "decompose_d1",
    "decompose_d2",
    "extend_span_rank2",
    "phase_rotate",
]

RESIDUAL_ZERO_FRACTION = 1e-10  # residuals below this times the matrix scale count as zero
_SEARCH_SEED = 0x5EED


class DecompositionError(Exception):
    """Base class for decomposition failures."""


class RankTooLowError(DecompositionError):
    """Input rank below what the requested decomposition supports."""


class ConstructionFailedError(DecompositionError):
    """The constructive search did not produce a vector meeting the targets."""


@dataclass(frozen=True)
class DecompositionResult:
    """Rank-one factors plus the residual bookkeeping used by the tests."""

    vectors: list[np.ndarray]
    residuals: np.ndarray  # per-vector, per-matrix deviation from the target values
    reconstruction_error: float


def _form(p: np.ndarray, m: np.ndarray) -> float:
    return float((p.conj() @ m @ p).real)


def _choose_root(rho: float, ri: float, rj: float) -> float:
    """Smaller-magnitude real root of rj t^2 + 2 rho t + ri = 0 (ri*rj < 0)."""
    disc = rho * rho - ri * rj
    sq = np.sqrt(max(disc, 0.0))
    q = -(rho + np.copysign(sq, rho if rho != 0.0 else 1.0))
    candidates = []
    if rj != 0.0:
        candidates.append(q / rj)
    if q != 0.0:
        candidates.append(ri / q)
    # deterministic tie rule: smallest magnitude, nonnegative preferred
    return min(candidates, key=lambda t: (abs(t), -np.sign(t)))


def _pair_update(pi, pj, m, target, preserve):
    """Rotate the pair so the first output hits ``target`` under ``m``.

    The pair sum of outer products is preserved.  With ``preserve`` given, the
    rotation phase is constrained so both outputs keep their quadratic form
    under that matrix unchanged.
    """
    ri = _form(pi, m) - target
    rj = _form(pj, m) - target
    d = pi.conj() @ (m @ pj)
    if preserve is None:
        phase = 1.0  # real rotation suffices when nothing must be preserved
        rho = d.real
    else:
        c = pi.conj() @ (preserve @ pj)
        if abs(c) > 1e-14:
            phase = np.exp(1j * (np.pi / 2 - np.angle(c)))  # makes Re(phase*c) = 0
        elif abs(d) > 1e-14:
            phase = np.exp(-1j * np.angle(d))
        else:
            phase = 1.0
        rho = (phase * d).real
    t = _choose_root(rho, ri, rj)
    g = t * phase
    s = np.sqrt(1.0 + abs(g) ** 2)
    w = (pi + g * pj) / s
    u = (-np.conj(g) * pi + pj) / s
    return w, u


def _equalize(vectors, m, target, preserve, zero_tol):
    """Pairwise rotations until every vector's form under ``m`` equals ``target``."""
    pool = list(vectors)
    done: list[np.ndarray] = []
    max_updates = 4 * len(pool) + 4  # construction needs at most len(pool)-1
    for _ in range(max_updates):
        residuals = [_form(p, m) - target for p in pool]
        pos = [k for k, r in enumerate(residuals) if r > zero_tol]
        neg = [k for k, r in enumerate(residuals) if r < -zero_tol]
        if not pos or not neg:
            return done + pool
        i, j = pos[0], neg[0]
        w, u = _pair_update(pool[i], pool[j], m, target, preserve)
        done.append(w)
        pool = [p for k, p in enumerate(pool) if k not in (i, j)] + [u]
    raise ConstructionFailedError("pairwise equalization did not terminate")


def _zero_tol(m: np.ndarray, x_scale: float) -> float:
    return RESIDUAL_ZERO_FRACTION * max(np.linalg.norm(m), 1e-30) * max(1.0, x_scale)


def decompose_d1(x: np.ndarray, a: np.ndarray, b: np.ndarray,
                 rank_tol_fraction: float | None = None) -> DecompositionResult:
    """Rank-one decomposition of PSD ``x`` matching two Hermitian quadratic targets.

    Produces R = rank(x) vectors x_r with sum x_r x_r^H = x and, for every r,
    x_r^H a x_r = tr(a x)/R and x_r^H b x_r = tr(b x)/R.  Deterministic for a
    fixed input: factors start from the eigendecomposition in descending
    eigenvalue order and pair selection follows a fixed index rule.
    ``rank_tol_fraction`` overrides the eigenvalue cutoff; a finer cutoff keeps
    more of an inexact input's trace mass in the factors.
    """
    a = hermitize(a)
    b = hermitize(b)
    if rank_tol_fraction is None:
        factors = psd_factorize(x)
    else:
        factors = psd_factorize(x, rank_tol_fraction)
    if not factors:
        return DecompositionResult([], np.zeros((0, 2)), float(np.linalg.norm(x)))
    r = len(factors)
    target_a = float(np.trace(a @ x).real) / r
    target_b = float(np.trace(b @ x).real) / r
    x_scale = float(np.trace(hermitize(x)).real) / r

    factors = _equalize(factors, a, target_a, None, _zero_tol(a, x_scale))
    factors = _equalize(factors, b, target_b, a, _zero_tol(b, x_scale))

    residuals = np.array(
        [[_form(p, a) - target_a, _form(p, b) - target_b] for p in factors]
    )
    recon = sum(np.outer(p, p.conj()) for p in factors)
    return DecompositionResult(
        vectors=factors,
        residuals=residuals,
        reconstruction_error=float(np.linalg.norm(recon - x)),
    )


def _quadratic_point(basis: np.ndarray, mats, targets, rng, starts: int = 10):
    """Search for c with Re(c^H B_i c) = targets_i, B_i the reduced matrices.

    ``basis`` has three columns; one coefficient is pinned to 1 (every pivot is
    tried, removing the phase gauge) and the remaining two complex coefficients
    are found with a damped root-finder on the four real equations.  Returns
    the combined vector or None.
    """
    reduced = [basis.conj().T @ m @ basis for m in mats]
    scale = max(max(np.linalg.norm(m) for m in reduced), *(abs(t) for t in targets), 1e-12)
    for pivot in range(3):
        free = [k for k in range(3) if k != pivot]

        def equations(u):
            c = np.zeros(3, dtype=complex)
            c[pivot] = 1.0
            c[free[0]] = u[0] + 1j * u[1]
            c[free[1]] = u[2] + 1j * u[3]
            return np.array([(c.conj() @ m @ c).real - t for m, t in zip(reduced, targets)])

        for attempt in range(starts):
            if attempt == 0:
                u0 = np.full(4, 0.1)
            else:
                u0 = rng.standard_normal(4) * (0.25 + 0.35 * attempt)
            sol = root(equations, u0, method="hybr")
            if sol.success and np.max(np.abs(equations(sol.x))) <= 1e-8 * scale:
                c = np.zeros(3, dtype=complex)
                c[pivot] = 1.0
                c[free[0]] = sol.x[0] + 1j * sol.x[1]
                c[free[1]] = sol.x[2] + 1j * sol.x[3]
                return basis @ c
    return None


def decompose_d2(x: np.ndarray, mats: list[np.ndarray]) -> np.ndarray:
    """Vector in Range(x) whose quadratic forms match tr(A_i x) for four matrices.

    Requires rank(x) >= 3 (raises RankTooLowError otherwise, signalling the
    span-extension path) and the nondegeneracy premise that the four traces of
    ``x`` itself do not all vanish.  Raises ConstructionFailedError when the
    search stalls; never returns an unverified vector.
    """
    if len(mats) != 4:
        raise ValueError("exactly four Hermitian matrices required")
    n = x.shape[0]
    if n < 3:
        raise ValueError("matrix dimension must be at least 3")
    mats = [hermitize(m) for m in mats]
    factors = psd_factorize(x)
    rank = len(factors)
    if rank < 3:
        raise RankTooLowError(f"rank {rank} < 3")
    tau = float(np.trace(hermitize(x)).real)
    targets = [float(np.trace(m @ x).real) for m in mats]
    if max(abs(t) for t in targets) <= 1e-12 * max(1.0, tau):
        raise ConstructionFailedError("all four trace targets vanish on the input")

    # shift each matrix so its target is zero; the first two are then met by
    # every factor of the two-matrix decomposition, leaving two to root-find
    shifted = [m - (t / tau) * np.eye(n) for m, t in zip(mats, targets)]
    d1 = decompose_d1(x, shifted[0], shifted[1])
    v = np.column_stack(d1.vectors)
    rng = np.random.default_rng(_SEARCH_SEED)
    for triple in combinations(range(rank), 3):
        y = _quadratic_point(v[:, triple], shifted, [0.0, 0.0, 0.0, 0.0], rng)
        if y is None:
            continue
        out = y * np.sqrt(tau / float(np.linalg.norm(y) ** 2))
        errs = [
            abs(_form(out, m) - t) / max(1.0, abs(t)) for m, t in zip(mats, targets)
        ]
        if max(errs) <= 1e-6:
            return out
    raise ConstructionFailedError("no factor triple produced a vector meeting all four targets")


def extend_span_rank2(x: np.ndarray, mats: list[np.ndarray], z: np.ndarray) -> np.ndarray:
    """Four-target vector for a rank-two PSD matrix, searched in span(Range(x), z).

    The output is feasible for the trace targets but carries no optimality
    guarantee; callers should flag it as approximate.  ``z`` must be linearly
    independent of Range(x).
    """
    if len(mats) != 4:
        raise ValueError("exactly four Hermitian matrices required")
    mats = [hermitize(m) for m in mats]
    factors = psd_factorize(x)
    if len(factors) != 2:
        raise RankTooLowError(f"span extension expects rank 2, got {len(factors)}")
    basis, _ = np.linalg.qr(np.column_stack(factors))
    z = np.asarray(z, dtype=complex)
    z_perp = z - basis @ (basis.conj().T @ z)
    if np.linalg.norm(z_perp) <= 1e-10 * max(np.linalg.norm(z), 1.0):
        raise ValueError("z lies in Range(x); pick a direction outside it")
    full_basis = np.column_stack([basis, z_perp / np.linalg.norm(z_perp)])
    targets = [float(np.trace(m @ x).real) for m in mats]
    rng = np.random.default_rng(_SEARCH_SEED)
    y = _quadratic_point(full_basis, mats, targets, rng, starts=16)
    if y is None:
        raise ConstructionFailedError("span-extension search stalled")
    errs = [abs(_form(y, m) - t) / max(1.0, abs(t)) for m, t in zip(mats, targets)]
    if max(errs) > 1e-6:
        raise ConstructionFailedError("span-extension result failed verification")
    return y


def phase_rotate(a: np.ndarray, a0: np.ndarray) -> np.ndarray:
    """Rotate ``a`` by a global phase so its inner product with ``a0`` is real
    nonnegative.

    Moduli, norms, and every Hermitian quadratic form are unchanged; applying
    the rotation twice gives the same vector as applying it once.  If the
    inner product vanishes, ``a`` is returned unchanged.
    """
    inner = np.vdot(a0, a)  # a0^H a
    if abs(inner) == 0.0:
        return a.copy()
    return a * np.exp(-1j * np.angle(inner))
