"""MVDR weights and beamformer performance metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "BeamformerOutput",
    "mvdr_weights",
    "output_power",
    "output_sinr",
    "evaluate_beamformer",
    "to_db",
]


def to_db(value: float) -> float:
    return float(10.0 * np.log10(value))


@dataclass(frozen=True)
class BeamformerOutput:
    """Weights plus the two scalar performance figures, in dB."""

    weights: np.ndarray
    output_sinr_db: float
    output_power_db: float


def _solve_pd(r: np.ndarray, a: np.ndarray) -> np.ndarray:
    chol = scipy.linalg.cho_factor((r + r.conj().T) / 2, lower=True)
    return scipy.linalg.cho_solve(chol, a)


def mvdr_weights(r_hat: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Minimum-variance distortionless-response weights for steering vector a.

    w = R^{-1} a / (a^H R^{-1} a), so w^H a = 1 exactly up to rounding.
    """
    if np.linalg.norm(a) == 0:
        raise ValueError("steering vector must be nonzero")
    ra = _solve_pd(r_hat, a)
    return ra / np.vdot(a, ra)


def output_power(r_hat: np.ndarray, a: np.ndarray) -> float:
    """Array output power 1 / (a^H R^{-1} a) of the MVDR beamformer."""
    ra = _solve_pd(r_hat, a)
    return 1.0 / float(np.vdot(a, ra).real)


def output_sinr(w: np.ndarray, a_true: np.ndarray, signal_power: float, r_in: np.ndarray) -> float:
    """Output SINR of weights ``w`` against the true steering vector and the
    exact interference-plus-noise covariance (linear scale)."""
    num = signal_power * abs(np.vdot(w, a_true)) ** 2
    den = float((w.conj() @ r_in @ w).real)
    return num / den


def evaluate_beamformer(
    r_hat: np.ndarray,
    a_estimate: np.ndarray,
    a_true: np.ndarray,
    signal_power: float,
    r_in: np.ndarray,
) -> BeamformerOutput:
    """Build MVDR weights from the estimate and score them against the truth."""
    w = mvdr_weights(r_hat, a_estimate)
    return BeamformerOutput(
        weights=w,
        output_sinr_db=to_db(output_sinr(w, a_true, signal_power, r_in)),
        output_power_db=to_db(output_power(r_hat, a_estimate)),
    )
