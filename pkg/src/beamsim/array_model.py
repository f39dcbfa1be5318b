"""Uniform linear array model: steering vectors, mismatch, snapshots, covariances.

The array is a half-wavelength ULA of N omnidirectional elements.  Angles are
degrees at every API boundary and converted to radians internally.  All random
draws go through an explicit numpy Generator so that runs are reproducible and
independent streams can be handed to concurrent Monte Carlo workers.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

__all__ = [
    "ScenarioConfig",
    "SnapshotBlock",
    "steering_vector",
    "apply_phase_distortion",
    "generate_snapshots",
    "interference_plus_noise_cov",
    "sample_covariance",
]


def steering_vector(theta_deg: float, n: int) -> np.ndarray:
    """Array response of an n-element half-wavelength ULA toward ``theta_deg``.

    Entry k (0-based) is exp(j*pi*k*sin(theta)).  Every entry has unit modulus,
    so the squared norm is exactly n.

    Parameters
    ----------
    theta_deg : float
        Direction of arrival in degrees, restricted to [-90, 90].
    n : int
        Number of array elements, at least 1.
    """
    if not -90.0 <= theta_deg <= 90.0:
        raise ValueError(f"direction {theta_deg} deg outside [-90, 90]")
    if n < 1:
        raise ValueError("array needs at least one element")
    phase = np.pi * np.sin(np.deg2rad(theta_deg))
    return np.exp(1j * phase * np.arange(n))


def apply_phase_distortion(d: np.ndarray, sigma_phi: float, rng: np.random.Generator) -> np.ndarray:
    """Distort a steering vector with accumulated independent phase increments.

    Element k picks up the running sum of k+1 i.i.d. zero-mean Gaussian phase
    increments with standard deviation ``sigma_phi`` (radians); the first
    element receives the first increment.  Moduli are untouched, so the norm
    is preserved.  The draw is meant to happen once per simulation run and the
    distorted vector reused for every snapshot of that run.
    """
    if sigma_phi < 0:
        raise ValueError("phase increment std must be nonnegative")
    if sigma_phi == 0.0:
        return d.copy()
    increments = rng.normal(0.0, sigma_phi, size=d.shape[0])
    return d * np.exp(1j * np.cumsum(increments))


@dataclass(frozen=True)
class ScenarioConfig:
    """Complete description of one array/signal/interference scenario.

    ``interferers`` is a tuple of (angle_deg, inr_db) pairs; interferer angles
    must lie outside the signal sector.  Noise power is fixed at one, so the
    linear signal power equals 10**(snr_db/10).
    """

    n_elements: int
    sector: tuple[float, float]
    presumed_direction: float
    actual_direction: float
    interferers: tuple[tuple[float, float], ...]
    snr_db: float
    snapshots: int
    phase_distortion_std: float = 0.0
    rng_seed: int = 0
    element_spacing: float = 0.5

    def __post_init__(self):
        lo, hi = self.sector
        if not lo < hi:
            raise ValueError("sector must satisfy theta_min < theta_max")
        if self.snapshots < 1:
            raise ValueError("need at least one snapshot")
        if self.n_elements < 1:
            raise ValueError("need at least one element")
        for ang, _ in self.interferers:
            if lo <= ang <= hi:
                raise ValueError(f"interferer at {ang} deg lies inside the sector")

    @property
    def signal_power(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def with_updates(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        """Load a scenario from a plain-text ``key = value`` file.

        Recognized keys (one per line, ``#`` starts a comment)::

            n_elements = 12
            sector = 0, 10
            presumed_direction = 5
            actual_direction = 7
            interferers = -15:30, 15:30     # angle_deg:inr_db pairs
            snr_db = 30
            snapshots = 100
            phase_distortion_std = 0.0
            rng_seed = 20240601
        """
        raw: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            raw[key.strip()] = value.strip()

        def require(key: str) -> str:
            if key not in raw:
                raise ValueError(f"{path}: missing required key '{key}'")
            return raw[key]

        sector = tuple(float(x) for x in require("sector").split(","))
        if len(sector) != 2:
            raise ValueError(f"{path}: sector needs exactly two angles")
        interferers: list[tuple[float, float]] = []
        text = raw.get("interferers", "").strip()
        if text:
            for item in text.split(","):
                ang, _, inr = item.partition(":")
                if not inr:
                    raise ValueError(f"{path}: interferer '{item}' is not angle:inr_db")
                interferers.append((float(ang), float(inr)))
        return cls(
            n_elements=int(require("n_elements")),
            sector=sector,  # type: ignore[arg-type]
            presumed_direction=float(require("presumed_direction")),
            actual_direction=float(require("actual_direction")),
            interferers=tuple(interferers),
            snr_db=float(require("snr_db")),
            snapshots=int(require("snapshots")),
            phase_distortion_std=float(raw.get("phase_distortion_std", "0.0")),
            rng_seed=int(raw.get("rng_seed", "0")),
        )


@dataclass(frozen=True)
class SnapshotBlock:
    """One simulated training block: N x T samples plus its ground truth."""

    samples: np.ndarray
    true_steering: np.ndarray
    true_interference_plus_noise_cov: np.ndarray


def _complex_gaussian(rng: np.random.Generator, power: float, shape) -> np.ndarray:
    # circularly symmetric: real and imaginary parts independent N(0, power/2)
    scale = np.sqrt(power / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def interference_plus_noise_cov(cfg: ScenarioConfig) -> np.ndarray:
    """Exact interference-plus-noise covariance: sum of INR-weighted rank-one
    terms over the interferers plus identity noise."""
    n = cfg.n_elements
    r = np.eye(n, dtype=complex)
    for angle, inr_db in cfg.interferers:
        d = steering_vector(angle, n)
        r = r + 10.0 ** (inr_db / 10.0) * np.outer(d, d.conj())
    return (r + r.conj().T) / 2


def generate_snapshots(
    cfg: ScenarioConfig,
    rng: np.random.Generator,
    true_steering: np.ndarray | None = None,
) -> SnapshotBlock:
    """Draw a block of T array snapshots for the scenario.

    Each snapshot is signal + interference + unit-power white noise, with the
    signal riding on the (possibly phase-distorted) actual steering vector.
    Pass ``true_steering`` to reuse a distortion drawn elsewhere (one draw per
    simulation run); otherwise it is drawn here first, from the same ``rng``.
    """
    n, t = cfg.n_elements, cfg.snapshots
    if true_steering is None:
        a = steering_vector(cfg.actual_direction, n)
        a = apply_phase_distortion(a, cfg.phase_distortion_std, rng)
    else:
        a = np.asarray(true_steering, dtype=complex)
    s = _complex_gaussian(rng, cfg.signal_power, t)
    x = np.outer(a, s)
    for angle, inr_db in cfg.interferers:
        d = steering_vector(angle, n)
        i_m = _complex_gaussian(rng, 10.0 ** (inr_db / 10.0), t)
        x = x + np.outer(d, i_m)
    x = x + _complex_gaussian(rng, 1.0, (n, t))
    return SnapshotBlock(
        samples=x,
        true_steering=a,
        true_interference_plus_noise_cov=interference_plus_noise_cov(cfg),
    )


def sample_covariance(samples: np.ndarray) -> np.ndarray:
    """Sample covariance (1/T) sum of snapshot outer products, exactly Hermitian."""
    t = samples.shape[1]
    if t < 1:
        raise ValueError("need at least one snapshot")
    r = samples @ samples.conj().T / t
    return (r + r.conj().T) / 2
