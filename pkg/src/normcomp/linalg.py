"""Dense Hermitian linear algebra: validation, eigendecomposition, spectral functions.

All matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.  The
helpers here validate and normalize inputs (finite entries, Hermitian within
tolerance, PSD within tolerance) and then apply spectral functions through an
eigendecomposition.

Two eigensolvers are available.  ``"lapack"`` (the default) calls
``numpy.linalg.eigh``.  ``"jacobi"`` is a self-contained cyclic complex Jacobi
method that is deterministic by construction and serves as an independent
cross-check.
"""
from __future__ import annotations

from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    ConvergenceError,
    NotHermitianError,
    NotPositiveSemidefiniteError,
    ShapeError,
    SingularMatrixError,
)

HERMITIAN_RTOL = 1e-12
PSD_RTOL = 1e-10
JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 64

EIGENSOLVERS = ("lapack", "jacobi")
_default_solver = "lapack"


class SpectralDecomposition(NamedTuple):
    """Eigenvalues in ascending order and the unitary matrix of eigenvectors."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def apply(self, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        """Return ``V diag(func(eigenvalues)) V*``."""
        return _rebuild(self.vectors, func(self.eigenvalues))

    def reconstruct(self) -> np.ndarray:
        return _rebuild(self.vectors, self.eigenvalues)


def _rebuild(vectors: np.ndarray, values: np.ndarray) -> np.ndarray:
    return symmetrize((vectors * values) @ vectors.conj().T)


def set_default_eigensolver(name: str) -> None:
    """Choose the eigensolver used when ``eig_hermitian`` gets no ``method``."""
    global _default_solver
    if name not in EIGENSOLVERS:
        raise ValueError(f"unknown eigensolver {name!r}; expected one of {EIGENSOLVERS}")
    _default_solver = name


def default_eigensolver() -> str:
    return _default_solver


# ---------------------------------------------------------------- validation

def as_matrix(M, *, name: str = "matrix") -> np.ndarray:
    """Convert to a finite 2-D complex array (a copy is made)."""
    arr = np.array(M, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square(M, *, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(M, name=name)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    return arr


def symmetrize(M: np.ndarray) -> np.ndarray:
    """Return ``(M + M*) / 2``."""
    return 0.5 * (M + M.conj().T)


def hermitian(M, *, name: str = "matrix") -> np.ndarray:
    """Validate that ``M`` is Hermitian and return its exactly symmetrized copy.

    The pre-symmetrization asymmetry must not exceed ``1e-12 * max|entry|``.
    """
    arr = as_square(M, name=name)
    asym = float(np.max(np.abs(arr - arr.conj().T), initial=0.0))
    scale = float(np.max(np.abs(arr), initial=0.0))
    if asym > HERMITIAN_RTOL * scale:
        raise NotHermitianError(
            f"{name} is not Hermitian (asymmetry {asym:.3e}, scale {scale:.3e})", asym
        )
    return symmetrize(arr)


def psd_tol(eigenvalues: np.ndarray) -> float:
    """PSD tolerance ``1e-10 * (1 + spectral radius)``."""
    radius = float(np.max(np.abs(eigenvalues), initial=0.0))
    return PSD_RTOL * (1.0 + radius)


def psd_decompose(A, *, name: str = "matrix", method: str | None = None) -> SpectralDecomposition:
    """Eigendecomposition of a PSD matrix with small negative eigenvalues clamped to 0.

    Raises
    ------
    NotPositiveSemidefiniteError
        If some eigenvalue is below ``-psd_tol``.
    """
    dec = eig_hermitian(hermitian(A, name=name), method=method)
    lam = dec.eigenvalues
    tol = psd_tol(lam)
    if lam.size and lam[0] < -tol:
        raise NotPositiveSemidefiniteError(
            f"{name} is not positive semidefinite (min eigenvalue {lam[0]:.6e})", float(lam[0])
        )
    return SpectralDecomposition(np.maximum(lam, 0.0), dec.vectors)


def psd(A, *, name: str = "matrix") -> np.ndarray:
    """Validate a PSD matrix and return its symmetrized copy."""
    psd_decompose(A, name=name)
    return hermitian(A, name=name)


def is_psd(A) -> bool:
    try:
        psd_decompose(A)
    except (NotPositiveSemidefiniteError, NotHermitianError):
        return False
    return True


def min_eigenvalue(A) -> float:
    return float(eig_hermitian(hermitian(A)).eigenvalues[0])


def pd_decompose(A, *, name: str = "matrix") -> SpectralDecomposition:
    """Decompose a matrix that must be positive definite (all eigenvalues above psd_tol)."""
    dec = psd_decompose(A, name=name)
    lam = dec.eigenvalues
    tol = psd_tol(lam)
    bad = np.flatnonzero(lam <= tol)
    if bad.size:
        i = int(bad[0])
        raise SingularMatrixError(
            f"{name} is singular: eigenvalue {i} is {lam[i]:.3e} (tolerance {tol:.3e})", i
        )
    return dec


# ---------------------------------------------------------------- eigensolvers

def eig_hermitian(H, *, method: str | None = None) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Parameters
    ----------
    H : array_like
        Hermitian matrix.  Only the exactly symmetrized part is used.
    method : {"lapack", "jacobi"}, optional
        Eigensolver; defaults to the module-wide choice (``"lapack"``).
    """
    method = method or _default_solver
    H = symmetrize(as_square(H))
    if method == "lapack":
        try:
            lam, vecs = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            off = float(np.linalg.norm(H - np.diag(np.diag(H))))
            raise ConvergenceError(f"eigh failed: {exc}", off) from exc
        return SpectralDecomposition(lam, vecs)
    if method == "jacobi":
        return jacobi_eigh(H)
    raise ValueError(f"unknown eigensolver {method!r}; expected one of {EIGENSOLVERS}")


def jacobi_eigh(
    H: np.ndarray, *, tol: float = JACOBI_TOL, max_sweeps: int = JACOBI_MAX_SWEEPS
) -> SpectralDecomposition:
    """Cyclic complex Jacobi eigensolver.

    Pivots sweep the upper triangle in row-major order.  Iteration stops when
    the off-diagonal Frobenius mass is at most ``tol * (1 + ||H||_F)``.
    """
    A = symmetrize(np.array(H, dtype=np.complex128))
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    threshold = tol * (1.0 + float(np.linalg.norm(A)))

    def off_mass() -> float:
        mask = ~np.eye(n, dtype=bool)
        return float(np.linalg.norm(A[mask]))

    for _ in range(max_sweeps):
        if off_mass() <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                b = abs(apq)
                if b == 0.0:
                    continue
                w = apq / b
                tau = (A[q, q].real - A[p, p].real) / (2.0 * b)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                # A <- J* A J with J = [[c, s w], [-s conj(w), c]] on (p, q)
                col_p = A[:, p].copy()
                col_q = A[:, q]
                A[:, p] = c * col_p - s * np.conj(w) * col_q
                A[:, q] = s * w * col_p + c * col_q
                row_p = A[p, :].copy()
                row_q = A[q, :]
                A[p, :] = c * row_p - s * w * row_q
                A[q, :] = s * np.conj(w) * row_p + c * row_q
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q]
                V[:, p] = c * vp - s * np.conj(w) * vq
                V[:, q] = s * w * vp + c * vq
    else:
        residual = off_mass()
        if residual > threshold:
            raise ConvergenceError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal {residual:.3e})",
                residual,
            )
    lam = np.diag(A).real.copy()
    order = np.argsort(lam, kind="stable")
    return SpectralDecomposition(lam[order], V[:, order])


# ---------------------------------------------------------------- spectral functions

def _powers(lam: np.ndarray, p: float) -> np.ndarray:
    if p == 0:
        return np.ones_like(lam)
    out = np.zeros_like(lam)
    pos = lam > 0
    out[pos] = lam[pos] ** p
    return out


def matrix_power(A, p: float, *, name: str = "matrix") -> np.ndarray:
    """Spectral power ``V diag(lambda^p) V*`` of a PSD matrix.

    Zero eigenvalues map to 0 for ``p > 0`` and the result is the identity for
    ``p == 0``.  Negative powers require every eigenvalue above ``psd_tol``.
    """
    p = float(p)
    if p < 0:
        dec = pd_decompose(A, name=name)
        return dec.apply(lambda lam: lam ** p)
    dec = psd_decompose(A, name=name)
    return dec.apply(lambda lam: _powers(lam, p))


def matrix_function(H, func: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Apply a real scalar function to the spectrum of a Hermitian matrix."""
    return eig_hermitian(hermitian(H)).apply(func)


def trace_power(A, p: float, *, name: str = "matrix") -> float:
    """``Tr A^p`` for PSD ``A``; for ``p < 0`` the matrix must be positive definite.

    Zero eigenvalues contribute nothing when ``p > 0``.
    """
    p = float(p)
    lam = (pd_decompose(A, name=name) if p < 0 else psd_decompose(A, name=name)).eigenvalues
    return float(np.sum(_powers(lam, p)))


def polar_decompose(C, *, name: str = "matrix") -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition ``C = U P`` with ``P = (C* C)^{1/2}`` and ``U`` unitary.

    When ``C`` is rank deficient, the partial isometry on the range is
    completed by Gram-Schmidt over the canonical basis vectors.
    """
    C = as_square(C, name=name)
    n = C.shape[0]
    dec = eig_hermitian(symmetrize(C.conj().T @ C))
    s2 = np.maximum(dec.eigenvalues, 0.0)
    s = np.sqrt(s2)
    P = _rebuild(dec.vectors, s)
    cutoff = 1e-8 * (1.0 + float(s.max(initial=0.0)))
    live = s > cutoff
    left = C @ dec.vectors[:, live] / s[live]
    # orthonormalize the range part and extend it over the canonical basis
    basis: list[np.ndarray] = []
    for vec in list(left.T) + list(np.eye(n, dtype=np.complex128)):
        v = vec.copy()
        for _ in range(2):
            for u in basis:
                v -= (u.conj() @ v) * u
        norm = np.linalg.norm(v)
        if len(basis) < int(live.sum()) or norm > 1e-6:
            basis.append(v / norm)
        if len(basis) == n:
            break
    cols = np.empty((n, n), dtype=np.complex128)
    cols[:, np.flatnonzero(live)] = np.array(basis[: int(live.sum())]).T
    if (~live).any():
        cols[:, np.flatnonzero(~live)] = np.array(basis[int(live.sum()):]).T
    U = cols @ dec.vectors.conj().T
    return U, P
