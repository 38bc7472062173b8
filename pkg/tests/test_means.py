import math
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st

from normcomp.errors import DomainError, RegularizationWarning, SingularMatrixError
from normcomp.means import (
    geometric_mean,
    log_majorizes,
    power_mean,
    riccati_residual,
    solve_riccati,
    thompson_distance,
)
from normcomp.rng import SplitMix64, random_pd, random_unitary

seeds = st.integers(0, 10**6)
dims = st.integers(1, 4)


def sqrtm_oracle(A, B):
    """``A # B`` through scipy's Schur-based square root."""
    r = scipy.linalg.sqrtm(A)
    ri = np.linalg.inv(r)
    return r @ scipy.linalg.sqrtm(ri @ B @ ri) @ r


@given(dims, seeds)
def test_geometric_mean_matches_scipy(n, seed):
    gen = SplitMix64(seed)
    A, B = random_pd(n, gen), random_pd(n, gen)
    np.testing.assert_allclose(geometric_mean(A, B), sqrtm_oracle(A, B), atol=1e-10)


@given(dims, seeds)
def test_geometric_mean_properties(n, seed):
    gen = SplitMix64(seed)
    A, B = random_pd(n, gen), random_pd(n, gen)
    X = geometric_mean(A, B)
    np.testing.assert_allclose(X, geometric_mean(B, A), atol=1e-10)
    np.testing.assert_allclose(X @ np.linalg.inv(A) @ X, B, atol=1e-10)
    M = gen.complex_normal(n, n) + 2 * np.eye(n)
    np.testing.assert_allclose(
        geometric_mean(M @ A @ M.conj().T, M @ B @ M.conj().T), M @ X @ M.conj().T, atol=1e-8
    )
    np.testing.assert_allclose(np.linalg.inv(X), geometric_mean(np.linalg.inv(A), np.linalg.inv(B)), atol=1e-9)


def test_commuting_and_singular_inputs():
    np.testing.assert_allclose(geometric_mean(np.diag([1.0, 4.0]), np.diag([9.0, 1.0])), np.diag([3.0, 2.0]), atol=1e-14)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        # nested ranges: the regularized mean is linear in eps and extrapolates to full accuracy
        np.testing.assert_allclose(geometric_mean(np.diag([1.0, 0.0]), np.diag([4.0, 0.0])), np.diag([2.0, 0.0]), atol=1e-9)
    # transversal ranges: the regularized mean is about sqrt(eps), so the result is flagged
    with pytest.warns(RegularizationWarning):
        X = geometric_mean(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))
    assert np.abs(X).max() <= 1e-3
    # rank-one P # rank-one P = P
    U = random_unitary(3, 2)
    P = np.outer(U[:, 0], U[:, 0].conj())
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        np.testing.assert_allclose(geometric_mean(P, P), P, atol=1e-6)


def test_power_mean_endpoints():
    gen = SplitMix64(4)
    A, B = random_pd(3, gen), random_pd(3, gen)
    np.testing.assert_allclose(power_mean(A, B, 0.0), A, atol=1e-12)
    np.testing.assert_allclose(power_mean(A, B, 1.0), B, atol=1e-12)
    np.testing.assert_allclose(power_mean(A, B, 0.5), geometric_mean(A, B), atol=1e-12)
    with pytest.raises(DomainError):
        power_mean(A, B, 1.5)


def test_riccati():
    gen = SplitMix64(8)
    A, B = random_pd(4, gen), random_pd(4, gen)
    X = solve_riccati(A, B)
    assert riccati_residual(A, B, X) <= 1e-12
    with pytest.raises(SingularMatrixError):
        solve_riccati(np.diag([1.0, 0.0]), np.eye(2))


@given(dims, seeds)
def test_thompson_metric_axioms(n, seed):
    gen = SplitMix64(seed)
    A, B, C = random_pd(n, gen), random_pd(n, gen), random_pd(n, gen)
    dab = thompson_distance(A, B)
    assert dab == pytest.approx(thompson_distance(B, A), abs=1e-10)
    assert thompson_distance(A, A) <= 1e-12
    assert dab <= thompson_distance(A, C) + thompson_distance(C, B) + 1e-10
    assert thompson_distance(np.linalg.inv(A), np.linalg.inv(B)) == pytest.approx(dab, abs=1e-9)
    M = gen.complex_normal(n, n) + 2 * np.eye(n)
    assert thompson_distance(M @ A @ M.conj().T, M @ B @ M.conj().T) == pytest.approx(dab, abs=1e-8)


def test_thompson_scalar_case():
    assert thompson_distance(np.diag([2.0, 1.0]), np.diag([1.0, 3.0])) == pytest.approx(math.log(3.0))


def test_log_majorization():
    assert log_majorizes(np.diag([2.0, 2.0]), np.diag([4.0, 1.0]))
    assert not log_majorizes(np.diag([4.0, 1.0]), np.diag([2.0, 2.0]))
    assert not log_majorizes(np.diag([1.0, 1.0]), np.diag([2.0, 2.0]))  # totals differ
    assert log_majorizes(np.diag([1.0, 0.0]), np.diag([3.0, 0.0]))


@given(dims, seeds)
def test_araki_lieb_thirring_log_majorization(n, seed):
    # (A^{1/2} B A^{1/2})^2 is log-majorized by A B^2 A
    gen = SplitMix64(seed)
    A, B = random_pd(n, gen), random_pd(n, gen)
    ra = scipy.linalg.sqrtm(A)
    left = np.linalg.matrix_power(ra @ B @ ra, 2)
    right = A @ B @ B @ A
    assert log_majorizes((left + left.conj().T) / 2, (right + right.conj().T) / 2, tol=1e-8)
