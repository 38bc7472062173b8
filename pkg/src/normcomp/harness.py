"""Seeded randomized harness over (inequality, shape, q) cells.

Each trial draws its instance from ``derive_seed(base_seed, cell_index,
trial_index)``, so any recorded seed replays to the identical report with
``run_instance``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import DomainError
from .inequalities import (
    InequalityReport,
    check_bhatia_kittaneh,
    check_clarkson_mccarthy,
    check_diag_sum,
    check_general,
    check_horn_mathias,
    check_king,
    check_lieb_thirring,
    check_pinching,
    check_reverse,
    check_theorem1,
)
from .norms import Partition, as_partition
from .rng import (
    RandomSpec,
    SplitMix64,
    derive_seed,
    random_block_psd,
    random_complex,
    random_pd,
    random_psd,
)

DEFAULT_Q_GRID = (1.0, 1.1, 1.25, 1.5, 1.75, 1.9, 2.0, 2.5, 3.0, 4.0)
TWO_BLOCK_PARTITIONS = tuple((m, n) for m in (2, 3, 4) for n in (2, 3, 4))
DEFAULT_PARTITIONS = ((1, 1),) + TWO_BLOCK_PARTITIONS + ((1, 1, 1), (2, 2, 2), (2, 3, 4))
DEFAULT_DIMS = (2, 3, 4)


def _block_runner(check) -> Callable:
    def run(seed: int, shape: tuple[int, ...], q: float) -> list[InequalityReport]:
        return [check(random_block_psd(shape, seed), q)]
    return run


def _bhatia_kittaneh(seed: int, shape: tuple[int, ...], q: float) -> list[InequalityReport]:
    part = Partition(shape)
    n = part.total
    T = random_complex(n, n, seed)
    return list(check_bhatia_kittaneh(T, part, q))


def _horn_mathias(seed: int, dim: int, q: float) -> list[InequalityReport]:
    gen = SplitMix64(seed)
    C = random_complex(dim, dim, gen)
    D = random_pd(dim, gen)
    return [check_horn_mathias(C, D, q)]


def _lieb_thirring(seed: int, dim: int, q: float) -> list[InequalityReport]:
    gen = SplitMix64(seed)
    spec = RandomSpec(dim, dim, 1.0 / dim)
    return [check_lieb_thirring(random_psd(spec, gen), random_psd(spec, gen), q)]


def _clarkson_mccarthy(seed: int, dim: int, q: float) -> list[InequalityReport]:
    gen = SplitMix64(seed)
    return [check_clarkson_mccarthy(random_complex(dim, dim, gen), random_complex(dim, dim, gen), q)]


@dataclass(frozen=True)
class InequalitySpec:
    """How to draw instances of one inequality and where it is claimed."""

    name: str
    runner: Callable
    kind: str  # "block": shape is a partition; "pair": shape is a dimension
    q_low: float
    q_high: float
    q_low_open: bool = False
    blocks: int | None = None  # required number of blocks
    min_blocks: int = 1
    search: bool = False  # open question; failures are findings, not errors

    def q_valid(self, q: float) -> bool:
        above = q > self.q_low if self.q_low_open else q >= self.q_low
        return above and q <= self.q_high

    def shape_valid(self, shape) -> bool:
        if self.kind == "pair":
            return isinstance(shape, int)
        if isinstance(shape, int):
            return False
        if self.blocks is not None:
            return len(shape) == self.blocks
        return len(shape) >= self.min_blocks

    def range_text(self) -> str:
        left = "(" if self.q_low_open else "["
        return f"{left}{self.q_low:g},{self.q_high:g}]"


INEQUALITIES: dict[str, InequalitySpec] = {
    spec.name: spec
    for spec in (
        InequalitySpec("theorem1", _block_runner(check_theorem1), "block", 1.0, 2.0, blocks=2),
        InequalitySpec("reverse", _block_runner(check_reverse), "block", 2.0, 64.0, blocks=2),
        InequalitySpec("general", _block_runner(check_general), "block", 1.0, 64.0),
        InequalitySpec("pinching", _block_runner(check_pinching), "block", 1.0, 64.0),
        InequalitySpec("diag_sum", _block_runner(check_diag_sum), "block", 1.0, 64.0),
        InequalitySpec("king", _block_runner(check_king), "block", 1.0, 64.0, blocks=2),
        InequalitySpec(
            "king3", _block_runner(check_king), "block", 1.0, 64.0, blocks=3, search=True
        ),
        InequalitySpec("bhatia_kittaneh", _bhatia_kittaneh, "block", 1.0, 64.0),
        InequalitySpec("horn_mathias", _horn_mathias, "pair", 1.0, 64.0),
        InequalitySpec("lieb_thirring", _lieb_thirring, "pair", 1.0, 64.0),
        InequalitySpec(
            "clarkson_mccarthy", _clarkson_mccarthy, "pair", 1.0, 2.0, q_low_open=True
        ),
    )
}


def inequality(name: str) -> InequalitySpec:
    try:
        return INEQUALITIES[name]
    except KeyError:
        raise DomainError(
            f"unknown inequality {name!r}; known: {', '.join(INEQUALITIES)}"
        ) from None


def run_instance(name: str, shape, q: float, seed: int) -> list[InequalityReport]:
    """Replay one trial: draw the instance for ``seed`` and check it."""
    spec = inequality(name)
    if spec.kind == "block":
        shape = tuple(as_partition(shape).sizes)
    return [_with_seed(r, seed) for r in spec.runner(seed, shape, float(q))]


def _with_seed(report: InequalityReport, seed: int) -> InequalityReport:
    return replace(report, seed=seed)


@dataclass(frozen=True)
class HarnessConfig:
    """Which cells to run and how many trials per cell.

    Cells are the product of inequalities, shapes and q values, restricted to
    each inequality's valid shapes and q range.  Block inequalities draw
    their shapes from ``partitions``, pair inequalities from ``dims``.
    """

    inequalities: tuple[str, ...] = tuple(INEQUALITIES)
    partitions: tuple[tuple[int, ...], ...] = DEFAULT_PARTITIONS
    dims: tuple[int, ...] = DEFAULT_DIMS
    q_grid: tuple[float, ...] = DEFAULT_Q_GRID
    trials: int = 20
    base_seed: int = 0

    def __post_init__(self):
        if self.trials < 1:
            raise DomainError(f"trials must be at least 1, got {self.trials}")
        for name in self.inequalities:
            inequality(name)
        parts = tuple(tuple(as_partition(p).sizes) for p in self.partitions)
        object.__setattr__(self, "partitions", parts)
        object.__setattr__(self, "inequalities", tuple(self.inequalities))
        dims = tuple(int(d) for d in self.dims)
        if any(d < 1 for d in dims):
            raise DomainError(f"dims must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)
        qs = tuple(float(q) for q in self.q_grid)
        if any(not math.isfinite(q) or q < 1.0 or q > 64.0 for q in qs):
            raise DomainError(f"q grid values must lie in [1, 64], got {qs}")
        object.__setattr__(self, "q_grid", qs)

    def cells(self) -> list[tuple[str, object, float]]:
        out = []
        for name in self.inequalities:
            spec = INEQUALITIES[name]
            shapes = self.dims if spec.kind == "pair" else self.partitions
            for shape in shapes:
                if not spec.shape_valid(shape):
                    continue
                for q in self.q_grid:
                    if spec.q_valid(q):
                        out.append((name, shape, q))
        return out

    def instance_count(self) -> int:
        return len(self.cells()) * self.trials


@dataclass(frozen=True)
class CellResult:
    inequality: str
    dim: int
    partition: tuple[int, ...] | None
    q: float
    trials: int
    failures: int
    worst_slack: float
    worst_seed: int
    search: bool = False

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality,
            "dim": self.dim,
            "partition": list(self.partition) if self.partition is not None else None,
            "q": self.q,
            "trials": self.trials,
            "failures": self.failures,
            "worst_slack": self.worst_slack,
            "worst_seed": self.worst_seed,
            "search": self.search,
        }


@dataclass
class HarnessSummary:
    cells: list[CellResult] = field(default_factory=list)
    runtime_ms: float = 0.0

    @property
    def failures(self) -> int:
        """Failures outside search-mode cells."""
        return sum(c.failures for c in self.cells if not c.search)

    @property
    def findings(self) -> int:
        """Failures inside search-mode cells."""
        return sum(c.failures for c in self.cells if c.search)

    @property
    def instances(self) -> int:
        return sum(c.trials for c in self.cells)

    def to_dict(self, include_runtime: bool = True) -> dict:
        out: dict = {"cells": [c.to_dict() for c in self.cells]}
        if include_runtime:
            out["runtime_ms"] = self.runtime_ms
        return out


def run_cell(config: HarnessConfig, index: int, cell: tuple[str, object, float]) -> CellResult:
    name, shape, q = cell
    spec = INEQUALITIES[name]
    failures = 0
    worst, worst_seed = math.inf, 0
    for trial in range(config.trials):
        seed = derive_seed(config.base_seed, index, trial)
        reports = spec.runner(seed, shape, q)
        if not all(r.satisfied for r in reports):
            failures += 1
        for report in reports:
            if report.slack < worst:
                worst, worst_seed = report.slack, seed
    if spec.kind == "pair":
        dim, partition = int(shape), None
    else:
        dim, partition = sum(shape), tuple(shape)
    return CellResult(name, dim, partition, q, config.trials, failures, worst, worst_seed, spec.search)


def run_harness(config: HarnessConfig | None = None) -> HarnessSummary:
    """Run every cell of ``config`` in order and aggregate."""
    config = config or HarnessConfig()
    start = time.perf_counter()
    results = [run_cell(config, i, cell) for i, cell in enumerate(config.cells())]
    return HarnessSummary(results, (time.perf_counter() - start) * 1000.0)

