"""Checkers, witnesses and counterexamples for Schatten-norm block inequalities.

Every checker returns an :class:`InequalityReport`.  ``slack`` is
``rhs - lhs`` for a claimed ``lhs <= rhs`` and ``lhs - rhs`` for
``lhs >= rhs``; a report is satisfied when ``slack >= -abs_tol`` with
``abs_tol = 1e-9 (1 + |lhs| + |rhs|)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .linalg import (
    as_matrix,
    as_square,
    hermitian,
    pd_decompose,
    psd,
    psd_decompose,
    symmetrize,
    trace_power,
)
from .norms import (
    BlockMatrix,
    Partition,
    as_partition,
    check_exponent,
    conjugate_exponent,
    norm_compression,
    schatten_norm,
    schatten_norm_q_power,
)

TOLERANCE_RTOL = 1e-9
LE, GE = "<=", ">="
KING_COUNTEREXAMPLE = (
    (2.0, 0.0, -2.0, -2.0),
    (0.0, 2.0, 2.0, -1.0),
    (-2.0, 2.0, 3.0, 0.0),
    (-2.0, -1.0, 0.0, 2.0),
)


@dataclass(frozen=True)
class InequalityReport:
    """Both sides of one inequality instance and the verdict."""

    name: str
    q: float
    lhs: float
    rhs: float
    relation: str
    slack: float
    satisfied: bool
    abs_tol: float
    seed: int | None = None

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "q": self.q,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "relation": self.relation,
            "slack": self.slack,
            "satisfied": self.satisfied,
            "tolerance": self.abs_tol,
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out


def tolerance(lhs: float, rhs: float) -> float:
    return TOLERANCE_RTOL * (1.0 + abs(lhs) + abs(rhs))


def make_report(name: str, q: float, lhs: float, rhs: float, relation: str) -> InequalityReport:
    lhs, rhs = float(lhs), float(rhs)
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        raise ArithmeticError(f"{name}: non-finite sides lhs={lhs}, rhs={rhs}")
    slack = rhs - lhs if relation == LE else lhs - rhs
    tol = tolerance(lhs, rhs)
    return InequalityReport(name, float(q), lhs, rhs, relation, slack, slack >= -tol, tol)


def _two_blocks(A: BlockMatrix, name: str) -> None:
    if A.count != 2:
        raise ShapeError(f"{name} needs a 2-block partition, got {A.count} blocks")


def _compression_bound(A: BlockMatrix, q: float) -> float:
    """``sum_i ||A_ii||^q + (2^q - 2) sum_{i<j} ||A_ij||^q``."""
    diag = sum(schatten_norm_q_power(A.block(i, i), q) for i in range(A.count))
    off = sum(
        schatten_norm_q_power(A.block(i, j), q)
        for i in range(A.count)
        for j in range(i + 1, A.count)
    )
    return diag + (2.0 ** q - 2.0) * off


def _compression_report(A: BlockMatrix, q: float, name: str) -> InequalityReport:
    relation = LE if q <= 2 else GE
    return make_report(name, q, schatten_norm_q_power(A.matrix, q), _compression_bound(A, q), relation)


def check_theorem1(A: BlockMatrix, q: float) -> InequalityReport:
    """``||A||_q^q <= (2^q - 2)||C||_q^q + ||B||_q^q + ||D||_q^q`` for ``1 <= q <= 2``.

    ``A = [[B, C], [C*, D]]`` is PSD with a 2-block partition.
    """
    _two_blocks(A, "theorem1")
    q = check_exponent(q, high=2.0)
    return _compression_report(A, q, "theorem1")


def check_reverse(A: BlockMatrix, q: float) -> InequalityReport:
    """The reversed 2-block bound ``||A||_q^q >= ...`` for ``q >= 2``."""
    _two_blocks(A, "reverse")
    q = check_exponent(q, low=2.0)
    return make_report("reverse", q, schatten_norm_q_power(A.matrix, q), _compression_bound(A, q), GE)


def check_general(A: BlockMatrix, q: float) -> InequalityReport:
    """Bound for any number of blocks: ``<=`` for ``q <= 2``, ``>=`` for ``q > 2``."""
    q = check_exponent(q)
    return _compression_report(A, q, "general")


def check_pinching(A: BlockMatrix, q: float) -> InequalityReport:
    """``||A||_q >= (sum_i ||A_ii||_q^q)^(1/q)``."""
    q = check_exponent(q)
    diag = sum(schatten_norm_q_power(A.block(i, i), q) for i in range(A.count))
    return make_report("pinching", q, schatten_norm(A.matrix, q), diag ** (1.0 / q), GE)


def check_diag_sum(A: BlockMatrix, q: float) -> InequalityReport:
    """``||A||_q <= sum_i ||A_ii||_q`` for PSD ``A``."""
    q = check_exponent(q)
    diag = sum(schatten_norm(A.block(i, i), q) for i in range(A.count))
    return make_report("diag_sum", q, schatten_norm(A.matrix, q), diag, LE)


def check_king(A: BlockMatrix, q: float) -> InequalityReport:
    """Compare ``||A||_q`` with the q-norm of its norm compression.

    ``>=`` for ``q <= 2`` and ``<=`` for ``q >= 2``.  Proven for 2-block
    partitions; other partitions are accepted for exploratory runs.
    """
    q = check_exponent(q)
    relation = GE if q <= 2 else LE
    compressed = schatten_norm(norm_compression(A, q), q)
    return make_report("king", q, schatten_norm(A.matrix, q), compressed, relation)


def check_bhatia_kittaneh(T, partition, q: float) -> tuple[InequalityReport, InequalityReport]:
    """Blockwise bounds for a general square matrix ``T`` with ``k`` blocks.

    For ``q >= 2``: ``k^(2-q) ||T||_q^q <= sum_ij ||T_ij||_q^q <= ||T||_q^q``;
    both relations reverse for ``q <= 2``.  Returns the (outer, inner) pair.
    """
    q = check_exponent(q)
    T = as_square(T, name="T")
    part = as_partition(partition)
    if part.total != T.shape[0]:
        raise ShapeError(f"partition sums to {part.total}, T has dim {T.shape[0]}")
    k = part.count
    total = sum(
        schatten_norm_q_power(T[part.slice(i), part.slice(j)], q) for i in range(k) for j in range(k)
    )
    full = schatten_norm_q_power(T, q)
    relation = LE if q >= 2 else GE
    outer = make_report("bhatia_kittaneh_outer", q, k ** (2.0 - q) * full, total, relation)
    inner = make_report("bhatia_kittaneh_inner", q, total, full, relation)
    return outer, inner


def check_horn_mathias(C, D, q: float) -> InequalityReport:
    """``||C D^{-1} C*||_q >= ||C||_q^2 / ||D||_q`` for positive definite ``D``."""
    q = check_exponent(q)
    C = as_matrix(C, name="C")
    dec = pd_decompose(D, name="D")
    if C.shape[1] != dec.vectors.shape[0]:
        raise ShapeError(f"C has {C.shape[1]} columns, D has dim {dec.vectors.shape[0]}")
    middle = symmetrize(C @ dec.apply(lambda lam: 1.0 / lam) @ C.conj().T)
    lhs = schatten_norm(middle, q)
    rhs = schatten_norm(C, q) ** 2 / schatten_norm(dec.reconstruct(), q)
    return make_report("horn_mathias", q, lhs, rhs, GE)


def check_lieb_thirring(A, B, q: float) -> InequalityReport:
    """``Tr (B^{1/2} A B^{1/2})^q <= Tr (B^{q/2} A^q B^{q/2})`` for PSD ``A, B``, ``q >= 1``."""
    q = check_exponent(q)
    dec_a = psd_decompose(A, name="A")
    dec_b = psd_decompose(B, name="B")
    if dec_a.vectors.shape != dec_b.vectors.shape:
        raise ShapeError("A and B must have the same dimension")
    root_b = dec_b.apply(np.sqrt)
    half_b = dec_b.apply(lambda lam: lam ** (q / 2.0))
    a_pow = dec_a.apply(lambda lam: lam ** q)
    lhs = trace_power(symmetrize(root_b @ dec_a.reconstruct() @ root_b), q)
    rhs = trace_power(symmetrize(half_b @ a_pow @ half_b), 1.0)
    return make_report("lieb_thirring", q, lhs, rhs, LE)


def check_clarkson_mccarthy(A, B, q: float) -> InequalityReport:
    """``||A+B||_q^p + ||A-B||_q^p <= 2 (||A||_q^q + ||B||_q^q)^(p/q)`` for ``1 < q <= 2``.

    ``p`` is the conjugate exponent of ``q``.
    """
    q = float(q)
    if not 1.0 < q <= 2.0:
        raise DomainError(f"q = {q!r} out of range (1, 2]")
    A = as_matrix(A, name="A")
    B = as_matrix(B, name="B")
    if A.shape != B.shape:
        raise ShapeError(f"shape mismatch: {A.shape} vs {B.shape}")
    p = conjugate_exponent(q)
    lhs = schatten_norm(A + B, q) ** p + schatten_norm(A - B, q) ** p
    rhs = 2.0 * (schatten_norm_q_power(A, q) + schatten_norm_q_power(B, q)) ** (p / q)
    return make_report("clarkson_mccarthy", q, lhs, rhs, LE)


# ---------------------------------------------------------------- witnesses and demos

def sharpness_witness(b: float, c: float, d: float) -> BlockMatrix:
    """Blocks ``B = diag(b, c)``, ``C = diag(0, c)``, ``D = diag(d, c)``.

    The spectrum is ``{b, d, 2c, 0}``, which makes the 2-block bound an
    equality for every ``q``.
    """
    b, c, d = float(b), float(c), float(d)
    if min(b, c, d) < 0 or not all(map(math.isfinite, (b, c, d))):
        raise DomainError(f"witness parameters must be nonnegative, got {(b, c, d)}")
    A = np.zeros((4, 4))
    A[0, 0], A[1, 1], A[2, 2], A[3, 3] = b, c, d, c
    A[1, 3] = A[3, 1] = c
    return BlockMatrix(A, (2, 2))


def king_counterexample() -> tuple[np.ndarray, InequalityReport]:
    """The fixed 4x4 matrix with scalar blocks and its King check at ``q = 1.5``.

    At ``q = 1.5`` its Schatten norm is about 7.7617 while the norm of its
    entrywise absolute value is about 7.9761, so the ``>=`` direction fails.
    The matrix is indefinite (minimum eigenvalue about -0.677), so it is
    wrapped without the PSD requirement.
    """
    M = np.array(KING_COUNTEREXAMPLE, dtype=np.complex128)
    A = BlockMatrix(M, Partition.scalar(4), require_psd=False)
    return M, check_king(A, 1.5)


@dataclass(frozen=True)
class NonSharpnessReport:
    """Exact norm of ``A = J_d (x) diag(x)`` against the many-block bound."""

    blocks: int
    q: float
    weights: tuple[float, ...]
    block_norm: float
    exact: float
    bound: float
    gap: float
    computed_exact: float
    computed_bound: float

    def to_dict(self) -> dict:
        return {
            "blocks": self.blocks,
            "q": self.q,
            "weights": list(self.weights),
            "block_norm": self.block_norm,
            "exact": self.exact,
            "bound": self.bound,
            "gap": self.gap,
            "computed_exact": self.computed_exact,
            "computed_bound": self.computed_bound,
        }


def nonsharpness_matrix(d: int, weights) -> BlockMatrix:
    """``d x d`` block matrix whose every block is ``diag(weights)``."""
    x = np.asarray(weights, dtype=float)
    return BlockMatrix(np.kron(np.ones((d, d)), np.diag(x)), (x.size,) * d)


def nonsharpness_demo(d: int, q: float, weights=(1.0,)) -> NonSharpnessReport:
    """Gap between the exact ``||A||_q^q = a^q d^q`` and the many-block bound.

    ``A`` is the direct sum of ``x_j J`` with ``J`` the ``d x d`` all-ones matrix,
    rearranged into ``d x d`` blocks each equal to ``diag(x)``, so every block
    has q-norm ``a = (sum_j x_j^q)^(1/q)``.  The bound is
    ``(2^q - 2) d(d-1)/2 a^q + d a^q``; the gap is zero for ``d = 2``.
    """
    if int(d) != d or d < 2:
        raise DomainError(f"need at least 2 blocks, got {d}")
    d = int(d)
    q = float(q)
    if not 1.0 < q < 2.0:
        raise DomainError(f"q = {q!r} must satisfy 1 < q < 2")
    x = tuple(float(v) for v in weights)
    if not x or min(x) <= 0:
        raise DomainError("weights must be positive")
    aq = sum(v ** q for v in x)
    exact = aq * d ** q
    bound = (2.0 ** q - 2.0) * d * (d - 1) / 2.0 * aq + d * aq
    A = nonsharpness_matrix(d, x)
    report = check_general(A, q)
    return NonSharpnessReport(
        d, q, x, aq ** (1.0 / q), exact, bound, bound - exact, report.lhs, report.rhs
    )


# ---------------------------------------------------------------- boundary sweep

DEFAULT_SMALL_EPSILONS = tuple(10.0 ** -k for k in range(21))
DEFAULT_LARGE_EPSILONS = tuple(10.0 ** k for k in range(21))


def _pair_term(u: np.ndarray, v: float, q: float) -> np.ndarray:
    """``(u + v)^q - u^q - v^q`` without cancellation, elementwise in ``u >= 0``."""
    big = np.maximum(u, v)
    small = np.minimum(u, v)
    t = small / big
    return big ** q * (np.expm1(q * np.log1p(t)) - t ** q)


def boundary_term(R, P, q: float, eps: float) -> float:
    """Direct matrix evaluation of ``Tr(R/eps + eps P)^q - Tr(R/eps)^q - Tr(eps P)^q``."""
    R = psd(R, name="R")
    P = psd(P, name="P")
    return (
        trace_power(R / eps + eps * P, q)
        - trace_power(R / eps, q)
        - trace_power(eps * P, q)
    )


@dataclass(frozen=True)
class BoundarySweep:
    """Remainder term along grids toward 0 and toward infinity."""

    q: float
    support_eigenvalues: tuple[float, ...]
    small_epsilons: tuple[float, ...]
    small_terms: tuple[float, ...]
    small_bounds: tuple[float, ...]
    large_epsilons: tuple[float, ...]
    large_terms: tuple[float, ...]
    small_ratio: float
    large_ratio: float
    bound_holds: bool
    tail_monotone: bool
    threshold: float = 1e-6

    @property
    def vanishes(self) -> bool:
        return self.small_ratio <= self.threshold and self.large_ratio <= self.threshold

    @property
    def passed(self) -> bool:
        return self.vanishes and self.bound_holds and self.tail_monotone

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "small_epsilons": list(self.small_epsilons),
            "small_terms": list(self.small_terms),
            "large_epsilons": list(self.large_epsilons),
            "large_terms": list(self.large_terms),
            "small_ratio": self.small_ratio,
            "large_ratio": self.large_ratio,
            "bound_holds": self.bound_holds,
            "tail_monotone": self.tail_monotone,
            "passed": self.passed,
        }


def _is_projector(P: np.ndarray) -> bool:
    return float(np.max(np.abs(P @ P - P), initial=0.0)) <= 1e-9


def boundary_sweep(
    C,
    P,
    q: float,
    small_epsilons=DEFAULT_SMALL_EPSILONS,
    large_epsilons=DEFAULT_LARGE_EPSILONS,
) -> BoundarySweep:
    """Evaluate the remainder ``Tr(R/eps + eps P)^q - Tr(R/eps)^q - Tr(eps P)^q``.

    ``P`` is an orthogonal projector and ``R = P C^2 P``.  ``R`` commutes with
    ``P``, so on the range of ``P`` with eigenvalues ``r_i`` of ``R`` the term is
    ``sum_i (r_i/eps + eps)^q - (r_i/eps)^q - eps^q``.  It is evaluated in that
    form, which is free of cancellation for any ``eps``.

    Both grids must start from their largest (respectively smallest) value;
    the reported ratios are last over first.  The bound
    ``2 eps^(2-q) Tr R^(q-1) + eps^(4-q) Tr R^(q-2)`` is checked on the small
    grid, and monotone decay is checked past the peak of each tail.
    """
    q = float(q)
    if not 1.0 < q < 2.0:
        raise DomainError(f"q = {q!r} must satisfy 1 < q < 2")
    C = psd(C, name="C")
    P = hermitian(P, name="P")
    if not _is_projector(P):
        raise DomainError("P must be an orthogonal projector")
    if C.shape != P.shape:
        raise ShapeError(f"C and P must have the same shape, got {C.shape} and {P.shape}")
    dec = psd_decompose(P, name="P")
    support = dec.vectors[:, dec.eigenvalues > 0.5]
    if support.shape[1] == 0:
        raise DomainError("P must be nonzero")
    R = symmetrize(P @ C @ C @ P)
    r = np.maximum(np.linalg.eigvalsh(symmetrize(support.conj().T @ R @ support)), 0.0)
    live = r[r > 0]

    def term(eps: float) -> float:
        return float(np.sum(_pair_term(r / eps, eps, q)))

    small_eps = tuple(float(e) for e in small_epsilons)
    large_eps = tuple(float(e) for e in large_epsilons)
    small = tuple(term(e) for e in small_eps)
    large = tuple(term(e) for e in large_eps)
    bounds = tuple(
        2.0 * e ** (2.0 - q) * float(np.sum(live ** (q - 1.0)))
        + e ** (4.0 - q) * float(np.sum(live ** (q - 2.0)))
        for e in small_eps
    )
    bound_holds = all(t <= b * (1.0 + 1e-12) for t, b in zip(small, bounds))

    # the term rises before it falls; monotonicity is asserted only in the tails
    low_edge = math.sqrt(float(live.min())) if live.size else math.inf
    high_edge = math.sqrt(float(live.max())) if live.size else 0.0
    tail_small = [t for e, t in zip(small_eps, small) if e <= low_edge]
    tail_large = [t for e, t in zip(large_eps, large) if e >= high_edge]
    monotone = all(b <= a * (1.0 + 1e-12) for a, b in zip(tail_small, tail_small[1:])) and all(
        b <= a * (1.0 + 1e-12) for a, b in zip(tail_large, tail_large[1:])
    )

    def ratio(values: tuple[float, ...]) -> float:
        return values[-1] / values[0] if values[0] > 0 else 0.0

    return BoundarySweep(
        q=q,
        support_eigenvalues=tuple(float(v) for v in r),
        small_epsilons=small_eps,
        small_terms=small,
        small_bounds=bounds,
        large_epsilons=large_eps,
        large_terms=large,
        small_ratio=ratio(small),
        large_ratio=ratio(large),
        bound_holds=bound_holds,
        tail_monotone=monotone,
    )
