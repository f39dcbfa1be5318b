"""Angular-sector constraint data: quadratic matrices, benchmark lines, and
uncertainty models for the steering-vector estimators.

Two integral matrices are built by midpoint quadrature over direction space:
one over the complement of the signal sector (its quadratic form should stay
small inside the sector) and one over the sector itself (its form should stay
large there).  The benchmark thresholds are extremized over the same quadrature
grid so that the defining inequalities hold exactly on-grid.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .array_model import steering_vector

__all__ = [
    "SectorModel",
    "UncertaintyModel",
    "build_sector_model",
    "build_similarity_model",
    "build_ellipsoid_model",
    "benchmark_curves",
    "sector_grid",
    "dump_sector_model",
]

FULL_RANGE = (-90.0, 90.0)
DEFAULT_GRID_STEP = 0.1


@dataclass(frozen=True)
class SectorModel:
    """Precomputed sector data shared by all estimators.

    ``c_tilde`` integrates steering outer products over the complement of the
    sector, ``c`` over the sector itself.  ``delta0`` is the maximum of the
    c_tilde form over the sector grid and ``delta1`` the minimum of the c
    form, so on-grid directions inside the sector satisfy both benchmark
    inequalities by construction.  ``a0`` is the sector-center response unless
    a different presumed direction was requested.
    """

    c_tilde: np.ndarray
    c: np.ndarray
    delta0: float
    delta1: float
    a0: np.ndarray
    sector: tuple[float, float]
    grid_step: float
    n_elements: int


@dataclass(frozen=True)
class UncertaintyModel:
    """Norm band plus similarity/ellipsoid constraint on the estimate.

    The membership condition is ||q^H (a - a0)||^2 <= epsilon together with
    N(1 - eta1) <= ||a||^2 <= N(1 + eta2).  ``q`` equal to the identity gives
    the plain similarity ball.
    """

    eta1: float
    eta2: float
    epsilon: float
    q: np.ndarray
    a0: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.eta1 < 1.0:
            raise ValueError("eta1 must lie in [0, 1)")
        if self.eta2 < 0.0:
            raise ValueError("eta2 must be nonnegative")
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        if np.linalg.norm(self.q.conj().T @ self.a0) < 1e-12:
            raise ValueError("q^H a0 vanishes; the similarity constraint is meaningless")

    @property
    def is_spherical(self) -> bool:
        q = self.q
        return q.shape[0] == q.shape[1] and np.allclose(q, np.eye(q.shape[0]))


def _midpoint_grid(lo: float, hi: float, step: float) -> np.ndarray:
    """Midpoints of a uniform partition of [lo, hi] with width <= step."""
    if hi <= lo:
        return np.empty(0)
    m = int(np.ceil((hi - lo) / step))
    h = (hi - lo) / m
    return lo + h * (np.arange(m) + 0.5)


def _extremization_grid(lo: float, hi: float, step: float) -> np.ndarray:
    return np.concatenate([[lo], _midpoint_grid(lo, hi, step), [hi]])


def sector_grid(model: "SectorModel") -> np.ndarray:
    """The in-sector grid over which the benchmark thresholds are exact."""
    lo, hi = model.sector
    return _extremization_grid(lo, hi, model.grid_step)


def _manifold(thetas_deg: np.ndarray, n: int) -> np.ndarray:
    """n x len(thetas) matrix of steering vectors."""
    phases = np.pi * np.sin(np.deg2rad(thetas_deg))
    return np.exp(1j * np.outer(np.arange(n), phases))


def _integral_matrix(intervals, n: int, step: float, in_degrees: bool) -> np.ndarray:
    """Midpoint-rule integral of d(theta) d(theta)^H over a union of intervals."""
    acc = np.zeros((n, n), dtype=complex)
    for lo, hi in intervals:
        grid = _midpoint_grid(lo, hi, step)
        if grid.size == 0:
            continue
        h = (hi - lo) / grid.size
        if not in_degrees:
            h = np.deg2rad(h)
        d = _manifold(grid, n)
        acc = acc + h * (d @ d.conj().T)
    return (acc + acc.conj().T) / 2


def build_sector_model(
    sector: tuple[float, float],
    n: int,
    grid_step: float = DEFAULT_GRID_STEP,
    center_direction: float | None = None,
    angle_measure: str = "radians",
) -> SectorModel:
    """Build the sector matrices and benchmark thresholds for a signal sector.

    Parameters
    ----------
    sector : (theta_min, theta_max) in degrees, strictly inside (-90, 90).
    n : number of array elements.
    grid_step : quadrature resolution in degrees.
    center_direction : presumed direction for the default center response;
        defaults to the sector midpoint.
    angle_measure : 'radians' (default) or 'degrees' for the integration
        measure.  The feasible sets are invariant to this choice because the
        thresholds rescale with the matrices; the knob exists for exactly that
        diagnostic check.
    """
    lo, hi = sector
    if not (FULL_RANGE[0] <= lo < hi <= FULL_RANGE[1]):
        raise ValueError("sector must be a nondegenerate interval inside [-90, 90]")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if angle_measure not in ("radians", "degrees"):
        raise ValueError("angle_measure must be 'radians' or 'degrees'")
    in_degrees = angle_measure == "degrees"

    c_tilde = _integral_matrix([(FULL_RANGE[0], lo), (hi, FULL_RANGE[1])], n, grid_step, in_degrees)
    c = _integral_matrix([(lo, hi)], n, grid_step, in_degrees)

    # extremize over the quadrature midpoints plus the sector endpoints: the
    # extremizers sit at the sector edges, so thresholds computed without the
    # endpoints would drift as the grid is refined
    grid = _extremization_grid(lo, hi, grid_step)
    d = _manifold(grid, n)
    tilde_form = np.einsum("ij,ik,kj->j", d.conj(), c_tilde, d).real
    c_form = np.einsum("ij,ik,kj->j", d.conj(), c, d).real
    delta0 = float(tilde_form.max())
    delta1 = float(c_form.min())

    theta0 = (lo + hi) / 2.0 if center_direction is None else center_direction
    return SectorModel(
        c_tilde=c_tilde,
        c=c,
        delta0=delta0,
        delta1=delta1,
        a0=steering_vector(theta0, n),
        sector=(lo, hi),
        grid_step=grid_step,
        n_elements=n,
    )


def benchmark_curves(model: SectorModel, thetas_deg: np.ndarray):
    """Evaluate both benchmark quadratic forms along the given directions."""
    d = _manifold(np.asarray(thetas_deg, dtype=float), model.n_elements)
    tilde_form = np.einsum("ij,ik,kj->j", d.conj(), model.c_tilde, d).real
    c_form = np.einsum("ij,ik,kj->j", d.conj(), model.c, d).real
    return tilde_form, c_form


def build_similarity_model(
    sector_model: SectorModel, eta1: float, eta2: float, epsilon: float
) -> UncertaintyModel:
    """Spherical similarity constraint centered at the sector model's a0."""
    n = sector_model.n_elements
    return UncertaintyModel(
        eta1=eta1, eta2=eta2, epsilon=epsilon, q=np.eye(n, dtype=complex), a0=sector_model.a0
    )


def build_ellipsoid_model(
    sector: tuple[float, float],
    n: int,
    l: int,
    epsilon: float,
    eta1: float,
    eta2: float,
    ridge: float = 0.1,
) -> UncertaintyModel:
    """Ellipsoidal uncertainty fit to sampled in-sector steering vectors.

    ``l`` equally spaced directions spanning the sector endpoints give sample
    responses; their mean is the center and their ridge-regularized sample
    covariance P defines the shape through q q^H = P^{-1}.
    """
    if l < 2:
        raise ValueError("need at least two sample directions")
    lo, hi = sector
    mid, width = (lo + hi) / 2.0, hi - lo
    thetas = mid + (-0.5 + np.arange(l) / (l - 1)) * width
    samples = _manifold(thetas, n)  # n x l
    center = samples.mean(axis=1)
    diffs = samples - center[:, None]
    p = diffs @ diffs.conj().T / l + ridge * np.eye(n)
    p = (p + p.conj().T) / 2
    try:
        chol = np.linalg.cholesky(p)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - ridge prevents this
        raise np.linalg.LinAlgError("ellipsoid shape matrix is numerically singular") from exc
    q = np.linalg.inv(chol).conj().T  # q q^H = P^{-1}
    return UncertaintyModel(eta1=eta1, eta2=eta2, epsilon=epsilon, q=q, a0=center)


def _format_complex_matrix(name: str, m: np.ndarray, out: io.StringIO) -> None:
    out.write(f"{name} shape={m.shape[0]}x{m.shape[1]}\n")
    for row in m:
        out.write("  " + " ".join(f"{v.real:+.12e}{v.imag:+.12e}j" for v in row) + "\n")


def dump_sector_model(model: SectorModel) -> str:
    """Text dump of the sector model (matrices and scalars) for inspection."""
    out = io.StringIO()
    out.write(f"sector = [{model.sector[0]}, {model.sector[1]}] deg\n")
    out.write(f"n_elements = {model.n_elements}\n")
    out.write(f"grid_step = {model.grid_step} deg\n")
    out.write(f"delta0 = {model.delta0:.12e}\n")
    out.write(f"delta1 = {model.delta1:.12e}\n")
    out.write("a0 = " + " ".join(f"{v.real:+.12e}{v.imag:+.12e}j" for v in model.a0) + "\n")
    _format_complex_matrix("c_tilde", model.c_tilde, out)
    _format_complex_matrix("c", model.c, out)
    return out.getvalue()
