"""Schatten norms, block partitions, norm compression and pinching."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, ShapeError
from .linalg import as_matrix, eig_hermitian, hermitian, psd, symmetrize

Q_MIN = 1.0
Q_MAX = 64.0


def check_exponent(q: float, *, low: float = Q_MIN, high: float = Q_MAX, name: str = "q") -> float:
    """Validate a Schatten exponent and return it as float."""
    q = float(q)
    if not math.isfinite(q) or q < low or q > high:
        raise DomainError(f"{name} = {q!r} out of range [{low:g}, {high:g}]")
    return q


def singular_values(M) -> np.ndarray:
    """Singular values in descending order.

    Hermitian input uses ``|eig(M)|``.  Otherwise the eigenvalues of the
    smaller Gram matrix are clamped at 0 before the square root.
    """
    M = as_matrix(M)
    rows, cols = M.shape
    if M.size == 0:
        return np.zeros(0)
    if rows == cols and np.array_equal(M, M.conj().T):
        sv = np.abs(eig_hermitian(M).eigenvalues)
    else:
        gram = M @ M.conj().T if rows <= cols else M.conj().T @ M
        sv = np.sqrt(np.maximum(eig_hermitian(symmetrize(gram)).eigenvalues, 0.0))
    return np.sort(sv)[::-1]


def schatten_norm_q_power(M, q: float) -> float:
    """``sum(sigma_i ** q)``, the q-th power of the Schatten q-norm."""
    q = check_exponent(q)
    return float(np.sum(singular_values(M) ** q))


def schatten_norm(M, q: float) -> float:
    """Schatten q-norm ``(sum sigma_i^q)^(1/q)``, with ``1 <= q <= 64``."""
    q = check_exponent(q)
    sv = singular_values(M)
    top = float(sv.max(initial=0.0))
    if top == 0.0:
        return 0.0
    # scale out the largest value so sigma^q cannot overflow
    return top * float(np.sum((sv / top) ** q)) ** (1.0 / q)


def conjugate_exponent(q: float) -> float:
    """``p`` with ``1/p + 1/q = 1``; infinite for ``q == 1``."""
    return math.inf if q == 1 else q / (q - 1.0)


@dataclass(frozen=True)
class Partition:
    """Sizes of the diagonal blocks of a symmetrically partitioned matrix."""

    sizes: tuple[int, ...]

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes:
            raise ShapeError("a partition needs at least one block")
        if any(s <= 0 for s in sizes) or any(int(s) != s for s in self.sizes):
            raise ShapeError(f"block sizes must be positive integers, got {list(self.sizes)}")
        object.__setattr__(self, "sizes", sizes)

    @classmethod
    def parse(cls, text: str) -> Partition:
        """Parse a comma separated list such as ``"2,2"``."""
        try:
            return cls(tuple(int(part) for part in text.split(",")))
        except ValueError as exc:
            raise ShapeError(f"malformed partition {text!r}") from exc

    @classmethod
    def scalar(cls, dim: int) -> Partition:
        return cls((1,) * dim)

    @property
    def total(self) -> int:
        return sum(self.sizes)

    @property
    def count(self) -> int:
        return len(self.sizes)

    @property
    def offsets(self) -> tuple[int, ...]:
        out = [0]
        for s in self.sizes:
            out.append(out[-1] + s)
        return tuple(out)

    def slice(self, i: int) -> slice:
        if not 0 <= i < self.count:
            raise IndexError(f"block index {i} out of range for {self.count} blocks")
        off = self.offsets
        return slice(off[i], off[i + 1])

    def __str__(self) -> str:
        return ",".join(str(s) for s in self.sizes)


def as_partition(value: Partition | Sequence[int] | str) -> Partition:
    if isinstance(value, Partition):
        return value
    if isinstance(value, str):
        return Partition.parse(value)
    return Partition(tuple(value))


class BlockMatrix:
    """A Hermitian (by default PSD) matrix together with a symmetric block partition.

    Parameters
    ----------
    matrix : array_like
        Square Hermitian matrix of size ``partition.total``.
    partition : Partition or sequence of ints
        Diagonal block sizes.
    require_psd : bool
        Reject matrices with an eigenvalue below ``-psd_tol``.  Disable only to
        inspect indefinite inputs, which no inequality here is claimed for.
    """

    __slots__ = ("matrix", "partition")

    def __init__(self, matrix, partition, *, require_psd: bool = True):
        part = as_partition(partition)
        arr = psd(matrix) if require_psd else hermitian(matrix)
        if arr.shape[0] != part.total:
            raise ShapeError(
                f"partition {list(part.sizes)} sums to {part.total}, matrix has dim {arr.shape[0]}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "matrix", arr)
        object.__setattr__(self, "partition", part)

    def __setattr__(self, key, value):
        raise AttributeError("BlockMatrix is immutable")

    def __repr__(self) -> str:
        return f"BlockMatrix(dim={self.dim}, partition={list(self.partition.sizes)})"

    @property
    def dim(self) -> int:
        return self.partition.total

    @property
    def count(self) -> int:
        return self.partition.count

    def block(self, i: int, j: int) -> np.ndarray:
        """Copy of the block at block coordinates ``(i, j)``."""
        return self.matrix[self.partition.slice(i), self.partition.slice(j)].copy()

    def diagonal_blocks(self) -> list[np.ndarray]:
        return [self.block(i, i) for i in range(self.count)]


def extract_block(A: BlockMatrix, i: int, j: int) -> np.ndarray:
    return A.block(i, j)


def block_diagonal(blocks: Iterable) -> np.ndarray:
    """Direct sum of square blocks."""
    blocks = [as_matrix(b) for b in blocks]
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n), dtype=np.complex128)
    k = 0
    for b in blocks:
        m = b.shape[0]
        out[k:k + m, k:k + m] = b
        k += m
    return out


def norm_compression(A: BlockMatrix, q: float) -> np.ndarray:
    """Real matrix of blockwise Schatten norms ``||A_ij||_q``.

    Only the upper triangle is computed and mirrored, so the result is
    exactly symmetric.
    """
    q = check_exponent(q)
    k = A.count
    out = np.zeros((k, k))
    for i in range(k):
        for j in range(i, k):
            out[i, j] = out[j, i] = schatten_norm(A.block(i, j), q)
    return out


def pinch_diagonal(A: BlockMatrix) -> np.ndarray:
    """Keep the diagonal blocks of ``A`` and zero the rest."""
    return block_diagonal(A.diagonal_blocks())
