"""Hermitian SDP engine: embedding, solves, rank, factorization."""

import numpy as np
import pytest

from beamsim.sdp import (
    SdpConstraint,
    SdpProblem,
    SdpStatus,
    complex_from_embedding,
    hermitize,
    numerical_rank,
    psd_factorize,
    real_embedding,
    solve_sdp,
)
from helpers import random_hermitian, random_psd, random_spd
from oracles import brute_force_lowrank_sdp


def test_embedding_trace_identity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(2, 10))
        a = random_hermitian(rng, n)
        y = random_psd(rng, n, n)
        lhs = np.trace(real_embedding(a) @ real_embedding(y)) / 2.0
        rhs = np.trace(a @ y).real
        assert lhs == pytest.approx(rhs, abs=1e-12 * max(1.0, abs(rhs)))


def test_embedding_roundtrip_and_psd():
    rng = np.random.default_rng(1)
    y = random_psd(rng, 5, 3)
    w = real_embedding(y)
    back = complex_from_embedding(w)
    assert np.allclose(back, hermitize(y), atol=1e-14)
    assert np.linalg.eigvalsh(w).min() > -1e-12


def test_trivial_unit_pin():
    n = 2
    e = np.zeros((n, n), dtype=complex)
    e[-1, -1] = 1.0
    problem = SdpProblem(np.eye(n, dtype=complex), (SdpConstraint(e, "==", 1.0),), n)
    sol = solve_sdp(problem)
    assert sol.status == SdpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(1.0, abs=1e-7)
    assert np.allclose(sol.y, e, atol=1e-6)
    assert sol.numerical_rank == 1


def test_infeasible_negative_trace():
    n = 3
    problem = SdpProblem(
        np.diag([1.0, 2.0, 3.0]).astype(complex),
        (SdpConstraint(np.eye(n, dtype=complex), "==", -1.0),),
        n,
    )
    sol = solve_sdp(problem)
    assert sol.status == SdpStatus.INFEASIBLE


def test_weak_duality_and_gap():
    rng = np.random.default_rng(2)
    n = 5
    obj = random_spd(rng, n)
    x0 = random_psd(rng, n, n)
    x0 /= np.trace(x0).real
    a1 = random_hermitian(rng, n)
    problem = SdpProblem(
        obj,
        (
            SdpConstraint(np.eye(n, dtype=complex), "==", 1.0),
            SdpConstraint(a1, "<=", float(np.trace(a1 @ x0).real) + 0.5),
        ),
        n,
    )
    sol = solve_sdp(problem)
    assert sol.status == SdpStatus.OPTIMAL
    assert sol.duals is not None
    # weak duality: signed gap nonnegative up to the certified tolerance
    assert sol.duality_gap >= -1e-8 * max(1.0, abs(sol.objective_value))
    assert abs(sol.duality_gap) <= 1e-8 * max(1.0, abs(sol.objective_value))


def test_random_instances_match_brute_force():
    # independent oracle: dense sampling of low-rank feasible factorizations
    # plus local polish; at most four constraints keeps the optimum low-rank
    rng = np.random.default_rng(3)
    for trial in range(4):
        n = 6
        obj = random_spd(rng, n)
        x0 = random_psd(rng, n, n)
        x0 /= np.trace(x0).real
        constraints = [(np.eye(n, dtype=complex), "==", 1.0)]
        for _ in range(int(rng.integers(1, 4))):
            a = random_hermitian(rng, n)
            slack = float(rng.uniform(0.1, 0.6))
            constraints.append((a, "<=", float(np.trace(a @ x0).real) + slack))
        problem = SdpProblem(obj, tuple(SdpConstraint(*c) for c in constraints), n)
        sol = solve_sdp(problem)
        assert sol.status == SdpStatus.OPTIMAL
        oracle = brute_force_lowrank_sdp(obj, constraints, n, rank=2,
                                         n_samples=4000, seed=100 + trial)
        assert sol.objective_value == pytest.approx(
            oracle, abs=1e-4 * max(1.0, abs(oracle))
        )
        # the SDP value can never exceed the oracle's feasible value
        assert sol.objective_value <= oracle + 1e-6


def test_numerical_rank_cases():
    rng = np.random.default_rng(4)
    y = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    assert numerical_rank(np.outer(y, y.conj())) == 1
    assert numerical_rank(np.eye(3, dtype=complex)) == 3
    assert numerical_rank(np.diag([1.0, 1e-9, 0.0]).astype(complex)) == 1
    with pytest.raises(ValueError):
        numerical_rank(np.diag([1.0, -1.0]).astype(complex))


def test_psd_factorize_scaled_unit():
    e1 = np.zeros(3, dtype=complex)
    e1[0] = 1.0
    factors = psd_factorize(4.0 * np.outer(e1, e1.conj()))
    assert len(factors) == 1
    assert abs(np.abs(factors[0][0]) - 2.0) < 1e-12


def test_psd_factorize_identity():
    factors = psd_factorize(np.eye(2, dtype=complex))
    assert len(factors) == 2
    gram = np.array([[np.vdot(a, b) for b in factors] for a in factors])
    assert np.allclose(gram, np.eye(2), atol=1e-12)


def test_psd_factorize_reconstruction_property():
    rng = np.random.default_rng(5)
    for _ in range(25):
        n = 6
        y = random_psd(rng, n, 3)
        factors = psd_factorize(y)
        assert len(factors) == 3
        recon = sum(np.outer(p, p.conj()) for p in factors)
        assert np.linalg.norm(recon - y) <= 1e-8 * np.linalg.norm(y)


def test_homogenization_pin_invariant():
    # any problem with the corner pinned returns a primal honoring the pin
    rng = np.random.default_rng(6)
    n = 5
    corner = np.zeros((n, n), dtype=complex)
    corner[-1, -1] = 1.0
    problem = SdpProblem(
        random_spd(rng, n),
        (
            SdpConstraint(corner, "==", 1.0),
            SdpConstraint(np.eye(n, dtype=complex), "<=", 4.0),
        ),
        n,
    )
    sol = solve_sdp(problem)
    assert sol.status == SdpStatus.OPTIMAL
    assert np.trace(corner @ sol.y).real == pytest.approx(1.0, abs=1e-8)


def test_problem_validation():
    with pytest.raises(ValueError):
        SdpProblem(np.eye(3, dtype=complex), (SdpConstraint(np.eye(2, dtype=complex), "<=", 1.0),), 3)
    with pytest.raises(ValueError):
        SdpConstraint(np.eye(2, dtype=complex), "<", 1.0)
