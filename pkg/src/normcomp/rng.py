"""Reproducible pseudo-random matrices from a fixed counter-based generator.

The generator is SplitMix64: output ``i`` (counting from 1) is the SplitMix64
finalizer applied to ``seed + i * 0x9E3779B97F4A7C15`` modulo 2**64, with

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z = z ^ (z >> 31)

Uniforms use the top 53 bits, ``((z >> 11) + 0.5) / 2**53``, so they lie in
the open interval (0, 1).  Normals come from the Box-Muller transform applied
to consecutive pairs of uniforms.  Every stage is elementwise IEEE arithmetic,
so identical seeds give identical streams on any platform.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import polar_decompose, symmetrize
from .norms import BlockMatrix, as_partition

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB

_GAMMA = np.uint64(GOLDEN_GAMMA)
_MIX1 = np.uint64(MIX1)
_MIX2 = np.uint64(MIX2)


def _mix_array(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a Python integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(*parts: int) -> int:
    """Hash a tuple of integers into one 64-bit seed."""
    h = 0x6A09E667F3BCC909
    for part in parts:
        h = mix64(h + GOLDEN_GAMMA + (int(part) & MASK64))
    return h


class SplitMix64:
    """Counter-based SplitMix64 stream."""

    def __init__(self, seed: int):
        self.seed = int(seed) & MASK64
        self.counter = 0

    def uint64(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        return _mix_array(np.uint64(self.seed) + idx * _GAMMA)

    def uniform(self, n: int) -> np.ndarray:
        """``n`` doubles in the open interval (0, 1)."""
        bits = self.uint64(n) >> np.uint64(11)
        return (bits.astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, n: int) -> np.ndarray:
        """``n`` standard normal deviates (Box-Muller)."""
        pairs = (n + 1) // 2
        u = self.uniform(2 * pairs).reshape(pairs, 2)
        radius = np.sqrt(-2.0 * np.log(u[:, 0]))
        angle = 2.0 * math.pi * u[:, 1]
        out = np.empty((pairs, 2))
        out[:, 0] = radius * np.cos(angle)
        out[:, 1] = radius * np.sin(angle)
        return out.reshape(-1)[:n]

    def complex_normal(self, rows: int, cols: int) -> np.ndarray:
        """Complex standard normals: real and imaginary parts each N(0, 1/2)."""
        z = self.normal(2 * rows * cols).reshape(rows, cols, 2)
        return (z[..., 0] + 1j * z[..., 1]) / math.sqrt(2.0)


def as_generator(source: int | SplitMix64) -> SplitMix64:
    return source if isinstance(source, SplitMix64) else SplitMix64(source)


@dataclass(frozen=True)
class RandomSpec:
    """Shape, rank, scale and seed of a random PSD matrix ``scale * M M*``."""

    dim: int
    rank: int | None = None
    scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError(f"dim must be positive, got {self.dim}")
        rank = self.dim if self.rank is None else self.rank
        if not 0 <= rank <= self.dim:
            raise DomainError(f"rank {rank} must lie in [0, dim={self.dim}]")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise DomainError(f"scale must be positive and finite, got {self.scale}")
        object.__setattr__(self, "rank", rank)


def random_complex(rows: int, cols: int, source: int | SplitMix64) -> np.ndarray:
    return as_generator(source).complex_normal(rows, cols)


def random_psd(spec: RandomSpec, source: SplitMix64 | None = None) -> np.ndarray:
    """PSD matrix ``scale * M M*`` with ``M`` a ``dim x rank`` complex Gaussian.

    The seed in ``spec`` is used unless an explicit generator is passed.
    """
    gen = source if source is not None else SplitMix64(spec.seed)
    M = gen.complex_normal(spec.dim, spec.rank)
    return symmetrize(spec.scale * (M @ M.conj().T))


def random_pd(dim: int, source: int | SplitMix64, *, floor: float = 0.1) -> np.ndarray:
    """Well conditioned positive definite matrix ``M M*/dim + floor * I``."""
    gen = as_generator(source)
    M = gen.complex_normal(dim, dim)
    return symmetrize(M @ M.conj().T / dim + floor * np.eye(dim))


def random_hermitian(dim: int, source: int | SplitMix64) -> np.ndarray:
    return symmetrize(as_generator(source).complex_normal(dim, dim))


def random_unitary(dim: int, source: int | SplitMix64) -> np.ndarray:
    """Unitary factor of the polar decomposition of a complex Gaussian matrix."""
    U, _ = polar_decompose(as_generator(source).complex_normal(dim, dim))
    return U


def random_block_psd(partition, source: int | SplitMix64) -> BlockMatrix:
    """Full-rank random PSD matrix ``M M*/n`` partitioned as requested.

    The whole matrix is drawn first and then partitioned, so it is PSD as a
    whole rather than blockwise.
    """
    part = as_partition(partition)
    n = part.total
    return BlockMatrix(random_psd(RandomSpec(n, n, 1.0 / n), as_generator(source)), part)
