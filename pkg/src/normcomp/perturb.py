"""Second-order perturbation calculus around a diagonal positive definite base.

Near a fixed point the iterates of the contractive maps differ from the
target by a tiny Hermitian perturbation ``E``.  Evaluating the maps on
``diag(lam) + E`` directly loses everything below roughly ``1e-15 * |lam|``, and
the floor of the contraction certificate sits well below the size of that
noise.  Here every quantity is carried as a pair ``(base, delta)`` with
``base`` a positive vector (a diagonal matrix) and ``delta`` a dense Hermitian
correction.  Spectral functions are expanded through divided differences:

    f(L + E) - f(L) = [f1(l_i, l_j) E_ij] + [sum_k f2(l_i, l_k, l_j) E_ik E_kj] + O(|E|^3)

so the correction is computed to full relative accuracy and the truncation
error is third order in ``|E| / |L|``.
"""
from __future__ import annotations

import numpy as np

from .linalg import symmetrize


def divided_difference(a: np.ndarray, b: np.ndarray, p: float) -> np.ndarray:
    """``(a^p - b^p) / (a - b)``, or ``p b^(p-1)`` when ``a == b``, for positive ``a, b``."""
    t = (a - b) / b
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(t == 0, p, np.expm1(p * np.log1p(t)) / np.where(t == 0, 1.0, t))
    return b ** (p - 1) * ratio


def second_divided_difference(a, b, c, p: float, confluence: float = 1e-6) -> np.ndarray:
    """Second divided difference of ``x^p`` at three positive points."""
    hi, mid, lo = np.sort(np.stack(np.broadcast_arrays(a, b, c)), axis=0)[::-1]
    gap = hi - lo
    spread = gap > confluence * hi
    with np.errstate(invalid="ignore", divide="ignore"):
        generic = (divided_difference(hi, mid, p) - divided_difference(mid, lo, p)) / np.where(
            spread, gap, 1.0
        )
    mean = (hi + mid + lo) / 3.0
    return np.where(spread, generic, 0.5 * p * (p - 1) * mean ** (p - 2))


class PowerExpansion:
    """Second-order expansion of ``E -> (diag(lam) + E)^p - diag(lam)^p``.

    The divided-difference kernels depend only on ``lam`` and ``p`` and are
    computed once.
    """

    def __init__(self, lam: np.ndarray, p: float):
        self.p = float(p)
        self.first = divided_difference(lam[:, None], lam[None, :], p)
        self.second = second_divided_difference(
            lam[:, None, None], lam[None, :, None], lam[None, None, :], p
        )

    def __call__(self, E: np.ndarray) -> np.ndarray:
        if self.p == 0:
            return np.zeros_like(E)
        return symmetrize(self.first * E + np.einsum("ikj,ik,kj->ij", self.second, E, E))


def power_delta(lam: np.ndarray, E: np.ndarray, p: float) -> np.ndarray:
    """Second-order ``(diag(lam) + E)^p - diag(lam)^p``."""
    return PowerExpansion(lam, p)(E)


def product(a: np.ndarray, A: np.ndarray, b: np.ndarray, B: np.ndarray):
    """``(diag(a) + A)(diag(b) + B)`` as a (base, delta) pair."""
    return a * b, a[:, None] * B + A * b[None, :] + A @ B


class MeanExpansion:
    """Second-order expansion of ``(diag(x) + X) # (diag(z) + Z)`` around fixed ``x, z``."""

    def __init__(self, x: np.ndarray, z: np.ndarray):
        self.x, self.z = x, z
        self.root, self.inv_root = np.sqrt(x), x ** -0.5
        self.root_exp = PowerExpansion(x, 0.5)
        self.inv_root_exp = PowerExpansion(x, -0.5)
        self.w = self.inv_root * z * self.inv_root
        self.w_root = np.sqrt(self.w)
        self.w_root_exp = PowerExpansion(self.w, 0.5)

    def __call__(self, X: np.ndarray, Z: np.ndarray):
        root_d, inv_root_d = self.root_exp(X), self.inv_root_exp(X)
        _, W = product(*product(self.inv_root, inv_root_d, self.z, Z), self.inv_root, inv_root_d)
        w_root_d = self.w_root_exp(symmetrize(W))
        m, M = product(*product(self.root, root_d, self.w_root, w_root_d), self.root, root_d)
        return m, symmetrize(M)


def geometric_mean_delta(x: np.ndarray, X: np.ndarray, z: np.ndarray, Z: np.ndarray):
    """``(diag(x) + X) # (diag(z) + Z)`` as a (base, delta) pair."""
    return MeanExpansion(x, z)(X, Z)


def distance_delta(lam: np.ndarray, E: np.ndarray) -> float:
    """Thompson distance between ``diag(lam) + E`` and ``diag(lam)``."""
    s = lam ** -0.5
    mu = np.linalg.eigvalsh(symmetrize(s[:, None] * E * s[None, :]))
    return float(np.abs(np.log1p(mu)).max())
