import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from normcomp.perturb import (
    MeanExpansion,
    PowerExpansion,
    distance_delta,
    divided_difference,
    second_divided_difference,
)
from normcomp.means import geometric_mean, thompson_distance
from normcomp.rng import SplitMix64

mpmath.mp.dps = 60


def mp_divided(a, b, p):
    a, b, p = mpmath.mpf(a), mpmath.mpf(b), mpmath.mpf(p)
    if a == b:
        return p * b ** (p - 1)
    return b ** p * mpmath.powm1(a / b, p) / (a - b)


def mp_second(a, b, c, p):
    a, b, c = (mpmath.mpf(v) for v in (a, b, c))
    return (mp_divided(a, b, p) - mp_divided(b, c, p)) / (a - c)


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(-2, 2))
def test_divided_difference_against_mpmath(a, b, p):
    got = float(divided_difference(np.array(a), np.array(b), p))
    assert got == pytest.approx(float(mp_divided(a, b, p)), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("gap", [0.0, 1e-14, 1e-9, 1e-3])
def test_divided_difference_near_confluence(gap):
    a, b, p = 2.0 + gap, 2.0, -0.7
    assert float(divided_difference(np.array(a), np.array(b), p)) == pytest.approx(
        float(mp_divided(a, b, p)), rel=1e-12
    )


@pytest.mark.parametrize("points", [(3.0, 2.0, 1.0), (2.0, 2.0 + 1e-9, 2.0 - 1e-9), (5.0, 5.0, 5.0), (4.0, 1.0, 1.0)])
def test_second_divided_difference_against_mpmath(points):
    a, b, c = points
    p = 0.4
    got = float(second_divided_difference(np.array(a), np.array(b), np.array(c), p))
    if len(set(points)) == 3:
        want = mp_second(*sorted(points, reverse=True), p)
    else:
        # confluent limit: evaluate at slightly separated points in high precision
        h = mpmath.mpf("1e-25")
        want = mp_second(mpmath.mpf(a) + 2 * h, mpmath.mpf(b) + h, c, p)
    assert got == pytest.approx(float(want), rel=1e-6)


def mp_power_delta(lam, E, p):
    """``(diag(lam) + E)^p - diag(lam)^p`` in 60-digit arithmetic for real symmetric ``E``."""
    n = len(lam)
    M = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            M[i, j] = mpmath.mpf(E[i, j]) + (mpmath.mpf(lam[i]) if i == j else 0)
    w, Q = mpmath.eigsy(M)
    out = Q * mpmath.diag([v ** p for v in w]) * Q.T
    for i in range(n):
        out[i, i] -= mpmath.mpf(lam[i]) ** p
    return np.array(out.tolist(), dtype=float)


@pytest.mark.parametrize("p", [0.5, -0.5, 1.7])
@pytest.mark.parametrize("size", [1e-4, 1e-7])
def test_power_expansion_is_second_order(p, size):
    gen = SplitMix64(1)
    lam = np.array([0.5, 1.0, 1.0 + 1e-3, 3.0])
    R = gen.normal(16).reshape(4, 4)
    E = size * (R + R.T) / 2
    want = mp_power_delta(lam, E, p)
    got = PowerExpansion(lam, p)(E.astype(complex)).real
    # truncation is third order in |E|
    assert np.abs(got - want).max() <= 50 * size ** 3 + 1e-300
    assert np.abs(got - want).max() <= 1e-6 * np.abs(want).max()


def test_mean_expansion_matches_direct_evaluation():
    gen = SplitMix64(2)
    x, z = np.array([1.0, 2.0, 0.5]), np.array([3.0, 0.2, 1.0])
    R1, R2 = gen.normal(9).reshape(3, 3), gen.normal(9).reshape(3, 3)
    X, Z = 1e-4 * (R1 + R1.T), 1e-4 * (R2 + R2.T)
    m, M = MeanExpansion(x, z)(X, Z)
    np.testing.assert_allclose(m, np.sqrt(x * z))
    direct = geometric_mean(np.diag(x) + X, np.diag(z) + Z) - np.diag(m)
    assert np.abs(M - direct).max() <= 1e-10


def test_distance_delta_matches_thompson():
    lam = np.array([1.0, 2.0, 5.0])
    gen = SplitMix64(3)
    R = gen.normal(9).reshape(3, 3)
    E = 1e-3 * (R + R.T)
    assert distance_delta(lam, E) == pytest.approx(thompson_distance(np.diag(lam) + E, np.diag(lam)), rel=1e-9)
    # tiny perturbations keep full relative accuracy
    assert distance_delta(lam, 1e-14 * np.diag([1.0, 0.0, 0.0])) == pytest.approx(1e-14, rel=1e-12)
