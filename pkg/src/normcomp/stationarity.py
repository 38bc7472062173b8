"""The objective f(D), its gradient, and the contractive maps Phi_D and Psi_A.

For PSD ``C`` and positive definite ``D`` put ``G = D^{-1/2} C^2 D^{-1/2}`` and

    f(D) = Tr (G + D)^q - Tr G^q - Tr D^q,      1 < q < 2.

``D = C`` is a stationary point, and the map ``Phi_D`` built from the gradient
has ``D`` as its unique fixed point, contracting toward it in the Thompson
metric by the factor ``beta(p) = p / (2^(p+1) - 2)`` with ``p = q - 2``.  The
companion map ``Psi_A(X) = A (X^q # A^(-q-2)) A`` contracts toward ``A`` by
``q / 2``.

The iteration drivers work in the eigenbasis of the fixed point and switch
to a second-order perturbative evaluation (see ``normcomp.perturb``) once the
iterate is within ``refine_below`` of the target.  That keeps the recorded
distances accurate far below the float64 noise of a direct evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import perturb
from .errors import ConditioningError, DomainError, NumericalBreakdownError, ShapeError
from .linalg import (
    hermitian,
    pd_decompose,
    psd,
    symmetrize,
    trace_power,
)
from .means import mean_positive_definite
from .rng import RandomSpec, SplitMix64, random_psd

DEFAULT_TOL = 1e-11
DEFAULT_MAX_STEPS = 200
REFINE_BELOW = 1e-5
CERTIFICATE_SLACK = 1e-8
CERTIFICATE_FLOOR = 1e-13
BREAKDOWN_LIMIT = -1e-9
SHIFT_BELOW = 1e-12
PSI_RESIDUAL_RTOL = 1e-7
MAXIMIZE_SCALES = (0.1, 0.5, 1.0, 2.0)


def check_power(p: float) -> float:
    """Validate ``-1 < p < 1, p != 0``."""
    p = float(p)
    if not (math.isfinite(p) and -1.0 < p < 1.0) or p == 0.0:
        raise DomainError(f"p = {p!r} must satisfy -1 < p < 1 and p != 0")
    return p


def check_objective_exponent(q: float) -> float:
    q = float(q)
    if not (math.isfinite(q) and 1.0 < q < 2.0):
        raise DomainError(f"q = {q!r} must satisfy 1 < q < 2")
    return q


def check_psi_exponent(q: float) -> float:
    q = float(q)
    if not (math.isfinite(q) and 0.0 <= q < 2.0):
        raise DomainError(f"q = {q!r} must satisfy 0 <= q < 2")
    return q


def _same_shape(**mats: np.ndarray) -> None:
    shapes = {name: m.shape for name, m in mats.items()}
    if len(set(shapes.values())) > 1:
        raise ShapeError(f"dimension mismatch: {shapes}")


# ---------------------------------------------------------------- scalar helpers

def beta(p: float) -> float:
    """Certified contraction factor ``p / (2^(p+1) - 2)`` of Phi_D.

    It increases from 1/2 at ``p = 1`` toward 1 as ``p -> -1``; the removable
    point ``p = 0`` has limit ``1 / (2 ln 2)``.
    """
    p = check_power(p)
    return p / (2.0 ** (p + 1.0) - 2.0)


def phi_scalar(x: float, p: float) -> float:
    """Scalar form of Phi: ``sqrt(((1+x)^p - 1) / ((1+x)^p - x^p))`` for ``x > 0``."""
    p = check_power(p)
    x = float(x)
    if not x > 0:
        raise DomainError(f"x = {x!r} must be positive")
    numerator = math.expm1(p * math.log1p(x))
    denominator = x ** p * math.expm1(p * math.log1p(1.0 / x))
    return math.sqrt(numerator / denominator)


def h_function(x: float, p: float) -> float:
    """``log phi(e^x)``; odd in ``x`` with slope at most ``beta(p)``."""
    return math.log(phi_scalar(math.exp(x), p))


# ---------------------------------------------------------------- objective and gradient

def gamma_of(C, D) -> np.ndarray:
    """``G = D^{-1/2} C^2 D^{-1/2}``."""
    C = psd(C, name="C")
    dec = pd_decompose(D, name="D")
    _same_shape(C=C, D=dec.vectors)
    inv_root = dec.apply(lambda lam: lam ** -0.5)
    return symmetrize(inv_root @ C @ C @ inv_root)


def f_objective(C, D, q: float) -> float:
    """``f(D) = Tr (G + D)^q - Tr G^q - Tr D^q`` with ``G = gamma_of(C, D)``."""
    q = check_objective_exponent(q)
    G = gamma_of(C, D)
    D = hermitian(D, name="D")
    return trace_power(G + D, q) - trace_power(G, q) - trace_power(D, q)


def f_gradient(C, D, q: float) -> np.ndarray:
    r"""Gradient of ``f`` with respect to ``D``.

    .. math::

        \nabla f = q D^{-1/2}\,[D(S^{q-2} - D^{q-2})D - G(S^{q-2} - G^{q-2})G]\,D^{-1/2},
        \qquad S = D + G.

    Both ``D`` and ``G`` must be positive definite because ``q - 2 < 0``.
    """
    q = check_objective_exponent(q)
    G = gamma_of(C, D)
    D = hermitian(D, name="D")
    p = q - 2.0
    dec_d = pd_decompose(D, name="D")
    dec_g = pd_decompose(G, name="G")
    dec_s = pd_decompose(D + G, name="D + G")
    s_pow = dec_s.apply(lambda lam: lam ** p)
    inner = D @ (s_pow - dec_d.apply(lambda lam: lam ** p)) @ D - G @ (
        s_pow - dec_g.apply(lambda lam: lam ** p)
    ) @ G
    inv_root = dec_d.apply(lambda lam: lam ** -0.5)
    return symmetrize(q * inv_root @ inner @ inv_root)


# ---------------------------------------------------------------- maps

def _guard(M: np.ndarray, label: str) -> np.ndarray:
    """Shift a mean argument whose positivity is lost to roundoff; abort on real failure."""
    M = symmetrize(M)
    low = float(np.linalg.eigvalsh(M)[0])
    if low <= BREAKDOWN_LIMIT:
        raise NumericalBreakdownError(
            f"{label} argument of the geometric mean is indefinite (min eigenvalue {low:.3e})"
        )
    if low < SHIFT_BELOW:
        M = M + SHIFT_BELOW * (1.0 + float(np.trace(M).real)) * np.eye(M.shape[0])
    return M


def phi_map(D, G, p: float) -> np.ndarray:
    """``Phi_D(G)``.

    For ``p > 0``: ``(D((D+G)^p - D^p)D) # ((D+G)^p - G^p)^{-1}``.
    For ``p < 0``: ``(D(D^p - (D+G)^p)D) # (G^p - (D+G)^p)^{-1}``.
    """
    p = check_power(p)
    dec_d = pd_decompose(D, name="D")
    dec_g = pd_decompose(G, name="G")
    D = hermitian(D, name="D")
    G = hermitian(G, name="G")
    _same_shape(D=D, G=G)
    s_pow = pd_decompose(D + G, name="D + G").apply(lambda lam: lam ** p)
    d_pow = dec_d.apply(lambda lam: lam ** p)
    g_pow = dec_g.apply(lambda lam: lam ** p)
    sign = 1.0 if p > 0 else -1.0
    left = _guard(sign * (D @ (s_pow - d_pow) @ D), "first")
    right = _guard(sign * (s_pow - g_pow), "second")
    right_inv = pd_decompose(right, name="second argument").apply(lambda lam: 1.0 / lam)
    return mean_positive_definite(left, right_inv)


def psi_map(A, X, q: float) -> np.ndarray:
    """``Psi_A(X) = A (X^q # A^(-q-2)) A`` for ``0 <= q < 2``."""
    q = check_psi_exponent(q)
    dec_a = pd_decompose(A, name="A")
    dec_x = pd_decompose(X, name="X")
    A = hermitian(A, name="A")
    _same_shape(A=A, X=dec_x.vectors)
    x_pow = dec_x.apply(lambda lam: lam ** q)
    a_pow = dec_a.apply(lambda lam: lam ** (-q - 2.0))
    return symmetrize(A @ mean_positive_definite(x_pow, a_pow) @ A)


class _PhiExpansion:
    """``E -> Phi_D(D + E) - D`` to second order, ``D = diag(d)``."""

    def __init__(self, d: np.ndarray, p: float):
        self.d = d
        self.sign = 1.0 if p > 0 else -1.0
        self.doubled = perturb.PowerExpansion(2.0 * d, p)
        self.single = perturb.PowerExpansion(d, p)
        base = self.sign * (2.0 ** p - 1.0) * d ** p
        self.inverse = perturb.PowerExpansion(base, -1.0)
        self.mean = perturb.MeanExpansion(base * d * d, 1.0 / base)

    def __call__(self, E: np.ndarray) -> np.ndarray:
        d, sign = self.d, self.sign
        doubled = self.doubled(E)
        X = sign * d[:, None] * doubled * d[None, :]
        Y = symmetrize(sign * (doubled - self.single(E)))
        _, M = self.mean(symmetrize(X), self.inverse(Y))
        return M


class _PsiExpansion:
    """``E -> Psi_A(A + E) - A`` to second order, ``A = diag(a)``."""

    def __init__(self, a: np.ndarray, q: float):
        self.a = a
        self.power = perturb.PowerExpansion(a, q)
        self.mean = perturb.MeanExpansion(a ** q, a ** (-q - 2.0))

    def __call__(self, E: np.ndarray) -> np.ndarray:
        _, M = self.mean(self.power(E), np.zeros_like(E))
        return symmetrize(self.a[:, None] * M * self.a[None, :])


# ---------------------------------------------------------------- iteration

@dataclass
class IterationTrace:
    """Record of a fixed-point iteration toward a known target.

    ``distances[k]`` is the Thompson distance of iterate ``k`` to the target
    (``k = 0`` is the start) and ``ratios[k] = distances[k+1] / distances[k]``.
    """

    distances: list[float]
    ratios: list[float]
    converged: bool
    steps: int
    beta_certified: float
    final: np.ndarray
    refined_from: int | None = None
    iterates: list[np.ndarray] | None = field(default=None, repr=False)

    def certificate_violations(
        self, slack: float = CERTIFICATE_SLACK, floor: float = CERTIFICATE_FLOOR
    ) -> list[int]:
        """Steps whose ratio exceeds ``beta_certified + slack`` while above ``floor``."""
        return [
            k for k, r in enumerate(self.ratios)
            if self.distances[k] > floor and r > self.beta_certified + slack
        ]

    @property
    def certified(self) -> bool:
        return not self.certificate_violations()

    @property
    def final_distance(self) -> float:
        return self.distances[-1]

    def to_dict(self) -> dict:
        return {
            "converged": self.converged,
            "steps": self.steps,
            "distances": list(self.distances),
            "ratios": list(self.ratios),
            "beta_certified": self.beta_certified,
        }


def _iterate(
    target: np.ndarray,
    start: np.ndarray,
    plain_step: Callable[[np.ndarray, np.ndarray], np.ndarray],
    expansion: Callable[[np.ndarray], Callable[[np.ndarray], np.ndarray]],
    certified: float,
    tol: float,
    max_steps: int,
    keep_iterates: bool,
    refine_below: float,
) -> IterationTrace:
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    if max_steps < 0:
        raise DomainError(f"max_steps must be nonnegative, got {max_steps}")
    dec = pd_decompose(target, name="target")
    lam, V = dec.eigenvalues, dec.vectors
    base = np.diag(lam).astype(np.complex128)
    current = symmetrize(V.conj().T @ start @ V)
    error = symmetrize(current - base)
    distances = [perturb.distance_delta(lam, error)]
    iterates = [V @ current @ V.conj().T] if keep_iterates else None
    refined_from = None
    delta_step = None
    steps = 0
    while distances[-1] > tol and steps < max_steps:
        if refined_from is None:
            current = plain_step(base, current)
            error = symmetrize(current - base)
        else:
            error = delta_step(error)
        steps += 1
        distances.append(perturb.distance_delta(lam, error))
        if refined_from is None and distances[-1] < refine_below:
            refined_from = steps
            delta_step = expansion(lam)
        if keep_iterates:
            iterates.append(symmetrize(V @ (base + error) @ V.conj().T))
    ratios = [b / a for a, b in zip(distances[:-1], distances[1:])]
    final = symmetrize(V @ (base + error) @ V.conj().T)
    return IterationTrace(
        distances=distances,
        ratios=ratios,
        converged=distances[-1] <= tol,
        steps=steps,
        beta_certified=certified,
        final=final,
        refined_from=refined_from,
        iterates=iterates,
    )


def iterate_phi(
    D,
    G0,
    p: float,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    *,
    keep_iterates: bool = False,
    refine_below: float = REFINE_BELOW,
) -> IterationTrace:
    """Iterate ``G <- Phi_D(G)`` from ``G0`` until ``delta(G, D) <= tol``.

    The trace certifies against ``beta(p)``.
    """
    p = check_power(p)
    D = hermitian(D, name="D")
    G0 = hermitian(G0, name="G0")
    pd_decompose(G0, name="G0")
    _same_shape(D=D, G0=G0)
    return _iterate(
        D, G0,
        lambda base, G: phi_map(base, G, p),
        lambda lam: _PhiExpansion(lam, p),
        beta(p), tol, max_steps, keep_iterates, refine_below,
    )


def psi_residual(A, X, q: float) -> float:
    """Frobenius norm of ``A X^q A - X A^q X``."""
    A = hermitian(A, name="A")
    X = hermitian(X, name="X")
    x_pow = pd_decompose(X, name="X").apply(lambda lam: lam ** q)
    a_pow = pd_decompose(A, name="A").apply(lambda lam: lam ** q)
    return float(np.linalg.norm(A @ x_pow @ A - X @ a_pow @ X))


def iterate_psi(
    A,
    X0,
    q: float,
    tol: float = DEFAULT_TOL,
    max_steps: int = DEFAULT_MAX_STEPS,
    *,
    keep_iterates: bool = False,
    refine_below: float = REFINE_BELOW,
) -> IterationTrace:
    """Iterate ``X <- Psi_A(X)`` from ``X0``; the trace certifies against ``q / 2``.

    Raises
    ------
    ConditioningError
        If the run converged but ``||A X^q A - X A^q X||_F`` exceeds
        ``1e-7 (1 + ||A||_F^(q+2))``.
    """
    q = check_psi_exponent(q)
    A = hermitian(A, name="A")
    X0 = hermitian(X0, name="X0")
    pd_decompose(X0, name="X0")
    _same_shape(A=A, X0=X0)
    trace = _iterate(
        A, X0,
        lambda base, X: psi_map(base, X, q),
        lambda lam: _PsiExpansion(lam, q),
        q / 2.0, tol, max_steps, keep_iterates, refine_below,
    )
    if trace.converged:
        residual = psi_residual(A, trace.final, q)
        limit = PSI_RESIDUAL_RTOL * (1.0 + float(np.linalg.norm(A)) ** (q + 2.0))
        if residual > limit:
            raise ConditioningError(f"fixed-point residual {residual:.3e} exceeds {limit:.3e}", residual)
    return trace


# ---------------------------------------------------------------- maximization over B

@dataclass(frozen=True)
class MaximizationReport:
    """Outcome of probing that ``B0 = C D^{-1} C`` maximizes the block objective."""

    worst_slack: float
    worst_trial: int
    worst_scale: float
    trials: int
    satisfied: bool


def block_objective(B, C, D, q: float) -> float:
    """``Tr M(B)^q - Tr B^q - Tr D^q`` with ``M(B) = [[B, C], [C, D]]``."""
    full = np.block([[B, C], [C, D]])
    return trace_power(full, q, name="block matrix") - trace_power(B, q, name="B") - trace_power(
        D, q, name="D"
    )


def maximize_over_B_check(
    C, D, q: float, trials: int, seed: int = 0, scales=MAXIMIZE_SCALES, tol: float = 1e-9
) -> MaximizationReport:
    """Check that moving ``B`` up from ``B0 = C D^{-1} C`` never increases the objective.

    For each trial a random PSD increment ``Delta`` is drawn and the objective
    is compared at ``B0`` and ``B0 + t Delta`` for every ``t`` in ``scales``.
    """
    q = check_objective_exponent(q)
    C = psd(C, name="C")
    dec = pd_decompose(D, name="D")
    D = hermitian(D, name="D")
    _same_shape(C=C, D=D)
    B0 = symmetrize(C @ dec.apply(lambda lam: 1.0 / lam) @ C)
    top = block_objective(B0, C, D, q)
    gen = SplitMix64(seed)
    n = C.shape[0]
    worst, worst_trial, worst_scale = math.inf, -1, 0.0
    for trial in range(trials):
        delta = random_psd(RandomSpec(n, n, 1.0 / n), gen)
        for t in scales:
            slack = top - block_objective(B0 + t * delta, C, D, q)
            if slack < worst:
                worst, worst_trial, worst_scale = slack, trial, float(t)
    return MaximizationReport(worst, worst_trial, worst_scale, trials, worst >= -tol)
