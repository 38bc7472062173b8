"""Matrix geometric and power means, the Riccati solver, Thompson metric, log-majorization."""
from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import ConditioningError, DomainError, RegularizationWarning, ShapeError
from .linalg import (
    SpectralDecomposition,
    as_square,
    eig_hermitian,
    pd_decompose,
    psd_decompose,
    psd_tol,
    symmetrize,
)

RICCATI_RTOL = 1e-8
REGULARIZATION_RTOL = 1e-6
REGULARIZATION_FLAG_RTOL = 1e-6


def _same_dim(A: np.ndarray, B: np.ndarray) -> None:
    if A.shape != B.shape:
        raise ShapeError(f"dimension mismatch: {A.shape} vs {B.shape}")


def _mean_from(dec_a: SpectralDecomposition, B: np.ndarray, alpha: float) -> np.ndarray:
    """``A^{1/2} (A^{-1/2} B A^{-1/2})^alpha A^{1/2}`` from the decomposition of a PD ``A``."""
    root = dec_a.apply(np.sqrt)
    inv_root = dec_a.apply(lambda lam: 1.0 / np.sqrt(lam))
    # Hermitian by construction; symmetrize so roundoff does not trip the check
    inner = psd_decompose(symmetrize(inv_root @ B @ inv_root), name="congruence")
    if alpha == 0:
        middle = np.eye(B.shape[0])
    else:
        middle = inner.apply(lambda lam: np.where(lam > 0, lam, 0.0) ** alpha)
    return symmetrize(root @ middle @ root)


def mean_positive_definite(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``A # B`` for inputs already known to be positive definite; no regularization."""
    return _mean_from(eig_hermitian(A), symmetrize(B), 0.5)


def _project_psd(M: np.ndarray) -> np.ndarray:
    return psd_decompose(M, name="mean").reconstruct()


def geometric_mean(A, B) -> np.ndarray:
    """Matrix geometric mean ``A # B``.

    For positive definite inputs this is ``A^{1/2}(A^{-1/2} B A^{-1/2})^{1/2} A^{1/2}``.
    If either input is singular the mean is the limit of ``(A + eps I) # (B + eps I)``,
    estimated by linear extrapolation from ``eps = 1e-6 (1 + max trace)`` and
    ``eps / 4``.  A ``RegularizationWarning`` is issued when those two
    evaluations differ by more than ``1e-6`` relative.
    """
    dec_a = psd_decompose(A, name="A")
    dec_b = psd_decompose(B, name="B")
    A = dec_a.reconstruct()
    B = dec_b.reconstruct()
    _same_dim(A, B)
    singular = (dec_a.eigenvalues[0] <= psd_tol(dec_a.eigenvalues)
                or dec_b.eigenvalues[0] <= psd_tol(dec_b.eigenvalues))
    if not singular:
        return _mean_from(dec_a, B, 0.5)

    n = A.shape[0]
    eps = REGULARIZATION_RTOL * (1.0 + max(np.trace(A).real, np.trace(B).real))
    eye = np.eye(n)

    def shifted(e: float) -> np.ndarray:
        return _mean_from(psd_decompose(A + e * eye), B + e * eye, 0.5)

    coarse, fine = shifted(eps), shifted(eps / 4)
    scale = max(float(np.linalg.norm(fine)), np.finfo(float).tiny)
    spread = float(np.linalg.norm(coarse - fine)) / scale
    if spread > REGULARIZATION_FLAG_RTOL:
        warnings.warn(
            f"singular geometric mean: regularized evaluations differ by {spread:.2e} relative",
            RegularizationWarning,
            stacklevel=2,
        )
    # linear in eps: X(0) ~ X(eps/4) - (X(eps) - X(eps/4)) / 3
    return _project_psd(fine - (coarse - fine) / 3.0)


def power_mean(A, B, alpha: float) -> np.ndarray:
    """Weighted mean ``A #_alpha B = A^{1/2}(A^{-1/2} B A^{-1/2})^alpha A^{1/2}``.

    ``A`` must be positive definite, ``B`` PSD, ``0 <= alpha <= 1``.
    """
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise DomainError(f"alpha = {alpha!r} out of range [0, 1]")
    dec_a = pd_decompose(A, name="A")
    B = psd_decompose(B, name="B").reconstruct()
    _same_dim(dec_a.vectors, B)
    return _mean_from(dec_a, B, alpha)


def riccati_residual(A, B, X) -> float:
    """Frobenius norm of ``X A^{-1} X - B``."""
    A, B, X = as_square(A), as_square(B), as_square(X)
    inv = pd_decompose(A, name="A").apply(lambda lam: 1.0 / lam)
    return float(np.linalg.norm(X @ inv @ X - B))


def riccati_tolerance(B) -> float:
    return RICCATI_RTOL * (1.0 + float(np.linalg.norm(as_square(B))))


def solve_riccati(A, B) -> np.ndarray:
    """Positive definite solution of ``X A^{-1} X = B``, namely ``X = A # B``.

    Raises
    ------
    ConditioningError
        If the residual exceeds ``1e-8 (1 + ||B||_F)``.
    """
    pd_decompose(A, name="A")
    pd_decompose(B, name="B")
    X = geometric_mean(A, B)
    residual = riccati_residual(A, B, X)
    if residual > riccati_tolerance(B):
        raise ConditioningError(f"Riccati residual {residual:.3e} exceeds tolerance", residual)
    return X


def thompson_distance(A, B) -> float:
    """Thompson metric ``max |log eig(B^{-1/2} A B^{-1/2})|`` between PD matrices."""
    A = pd_decompose(A, name="A").reconstruct()
    dec_b = pd_decompose(B, name="B")
    _same_dim(A, dec_b.vectors)
    inv_root = dec_b.apply(lambda lam: 1.0 / np.sqrt(lam))
    lam = np.linalg.eigvalsh(symmetrize(inv_root @ A @ inv_root))
    return float(max(abs(math.log(lam[-1])), abs(math.log(lam[0]))))


def log_majorizes(A, B, tol: float = 1e-10) -> bool:
    """True when ``A`` is log-majorized by ``B``.

    Prefix products of the decreasing eigenvalues satisfy
    ``prod_{i<=k} a_i <= (1 + tol) prod_{i<=k} b_i`` for every ``k``, and the full
    products agree to relative ``tol`` when both are nonzero.  The comparison
    is done on logarithms with ``log 0 = -inf``.
    """
    a = psd_decompose(A, name="A").eigenvalues[::-1]
    b = psd_decompose(B, name="B").eigenvalues[::-1]
    if a.shape != b.shape:
        raise ShapeError(f"dimension mismatch: {a.size} vs {b.size}")
    with np.errstate(divide="ignore"):
        pa = np.cumsum(np.log(a))
        pb = np.cumsum(np.log(b))
    slack = math.log1p(tol)
    for x, y in zip(pa, pb):
        if x == -np.inf:
            continue
        if y == -np.inf or x > y + slack:
            return False
    if np.isfinite(pa[-1]) and np.isfinite(pb[-1]):
        return abs(pa[-1] - pb[-1]) <= slack
    return True
