"""Random-matrix helpers shared across the test modules."""

import numpy as np


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (a + a.conj().T) / 2


def random_psd(rng: np.random.Generator, n: int, rank: int) -> np.ndarray:
    p = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    return p @ p.conj().T


def random_spd(rng: np.random.Generator, n: int) -> np.ndarray:
    return random_psd(rng, n, n) + np.eye(n)
