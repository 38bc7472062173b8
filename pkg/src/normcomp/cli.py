"""Command-line front end: ``normcomp verify | solve | repro | harness``.

Exit codes: 0 when every check holds, 1 on usage or input errors, 2 when a
mathematical violation (or a failed numerical certificate) is detected.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import harness as harness_mod
from .errors import (
    ConditioningError,
    ConvergenceError,
    DomainError,
    NormCompError,
    NumericalBreakdownError,
)
from .inequalities import (
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
    king_counterexample,
    nonsharpness_demo,
    sharpness_witness,
)
from .linalg import is_psd, min_eigenvalue, pd_decompose
from .matio import dumps, load_block_matrix, load_matrix, matrix_to_dict, read_json
from .means import geometric_mean, riccati_residual, riccati_tolerance
from .norms import BlockMatrix, Partition, norm_compression, schatten_norm
from .rng import SplitMix64, derive_seed, random_block_psd, random_pd
from .stationarity import check_power, check_psi_exponent, iterate_phi, iterate_psi

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION = 0, 1, 2
SEED_ENV = "NORMCOMP_SEED"

BLOCK_CHECKS = {
    "theorem1": check_theorem1,
    "reverse": check_reverse,
    "general": check_general,
    "pinching": check_pinching,
    "diag_sum": check_diag_sum,
    "king": check_king,
    "king3": check_king,
}
PAIR_CHECKS = {
    "horn_mathias": check_horn_mathias,
    "lieb_thirring": check_lieb_thirring,
    "clarkson_mccarthy": check_clarkson_mccarthy,
}


class UsageError(Exception):
    """Bad flags or inputs; reported on stderr with exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None and env.strip():
        try:
            return int(env, 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return args.seed


def _emit(args, payload, text_lines: Sequence[str]) -> None:
    if args.format == "json":
        print(dumps(payload))
    else:
        print("\n".join(text_lines))


# ---------------------------------------------------------------- verify

def _report_line(report) -> str:
    verdict = "satisfied" if report.satisfied else "VIOLATED"
    return (
        f"{report.name} q={report.q:g}: lhs={report.lhs:.12g} {report.relation} "
        f"rhs={report.rhs:.12g}  slack={report.slack:.3e} (tol {report.abs_tol:.1e})  {verdict}"
    )


def _load_block(path: str, partition: Partition | None) -> BlockMatrix:
    data = read_json(path)
    if partition is None and not (isinstance(data, dict) and "partition" in data):
        n = load_matrix(path).shape[0]
        partition = Partition.scalar(n)
    A = load_block_matrix(path, partition, require_psd=False)
    if not is_psd(A.matrix):
        print(
            f"note: {path} is not positive semidefinite (min eigenvalue "
            f"{min_eigenvalue(A.matrix):.6g}); the inequality is only claimed for PSD input",
            file=sys.stderr,
        )
    return A


def _random_shape(spec, args):
    if spec.kind == "pair":
        if args.dim is None:
            raise UsageError(f"--random with {spec.name} needs --dim")
        return args.dim
    if args.partition is not None:
        part = args.partition
    elif args.dim is not None:
        if args.dim < 2:
            raise UsageError("--dim must be at least 2 to split into blocks")
        half = args.dim // 2
        part = Partition((half, args.dim - half))
    else:
        raise UsageError(f"--random with {spec.name} needs --partition or --dim")
    if args.dim is not None and args.dim != part.total:
        raise UsageError(f"--dim {args.dim} does not match partition total {part.total}")
    if not spec.shape_valid(part.sizes):
        raise UsageError(f"{spec.name} does not accept partition {part}")
    return part.sizes


def cmd_verify(args) -> int:
    try:
        spec = harness_mod.inequality(args.inequality)
    except DomainError:
        raise UsageError(
            f"unknown inequality {args.inequality!r}; known: {', '.join(harness_mod.INEQUALITIES)}"
        ) from None
    if not spec.q_valid(args.q):
        raise UsageError(f"q out of range {spec.range_text()} for {spec.name}")
    seed = None
    if args.random:
        seed = _seed(args)
        reports = harness_mod.run_instance(spec.name, _random_shape(spec, args), args.q, seed)
    elif args.input is None:
        raise UsageError("give --input PATH or --random")
    elif spec.kind == "pair":
        if args.input_b is None:
            raise UsageError(f"{spec.name} needs a second matrix via --input-b")
        first, second = load_matrix(args.input), load_matrix(args.input_b)
        reports = [PAIR_CHECKS[spec.name](first, second, args.q)]
    elif spec.name == "bhatia_kittaneh":
        T = load_matrix(args.input)
        data = read_json(args.input)
        part = args.partition
        if part is None:
            part = Partition(tuple(data["partition"])) if "partition" in data else Partition.scalar(T.shape[0])
        reports = list(check_bhatia_kittaneh(T, part, args.q))
    else:
        A = _load_block(args.input, args.partition)
        if spec.name in ("theorem1", "reverse") and A.count != 2:
            raise UsageError(f"{spec.name} needs 2 blocks, input has {A.count}")
        reports = [BLOCK_CHECKS[spec.name](A, args.q)]
    payload = [r.to_dict() for r in reports]
    if seed is not None:
        for entry in payload:
            entry["seed"] = seed
    _emit(args, payload if len(payload) > 1 else payload[0], [_report_line(r) for r in reports])
    return EXIT_OK if all(r.satisfied for r in reports) else EXIT_VIOLATION



# ---------------------------------------------------------------- solve

def _input_pd(path: str | None, flag: str) -> np.ndarray:
    if path is None:
        raise UsageError(f"missing --{flag} PATH (or use --random)")
    M = load_matrix(path)
    try:
        pd_decompose(M, name=f"--{flag} ({path})")
    except NormCompError as exc:
        raise UsageError(str(exc)) from None
    return M


def _random_pair(args) -> tuple[np.ndarray, np.ndarray, int]:
    if args.dim is None or args.dim < 1:
        raise UsageError("--random needs --dim N with N >= 1")
    seed = _seed(args)
    gen = SplitMix64(seed)
    return random_pd(args.dim, gen), random_pd(args.dim, gen), seed


def cmd_solve(args) -> int:
    seed = None
    if args.equation == "riccati":
        if args.random:
            A, B, seed = _random_pair(args)
        else:
            A, B = _input_pd(args.a, "a"), _input_pd(args.b, "b")
        X = geometric_mean(A, B)
        residual = riccati_residual(A, B, X)
        limit = riccati_tolerance(B)
        ok = residual <= limit
        payload = {
            "equation": "riccati",
            "converged": ok,
            "residual": residual,
            "tolerance": limit,
            "solution": matrix_to_dict(X),
        }
        lines = [f"riccati: residual {residual:.3e} (tolerance {limit:.3e})  {'ok' if ok else 'FAILED'}"]
    else:
        if args.equation == "phi":
            if args.p is None:
                raise UsageError("solve phi needs --p")
            try:
                p = check_power(args.p)
            except DomainError as exc:
                raise UsageError(str(exc)) from None
            if args.random:
                target, start, seed = _random_pair(args)
            else:
                target, start = _input_pd(args.d, "d"), _input_pd(args.g0, "g0")
            trace = iterate_phi(target, start, p, args.tol, args.max_steps)
            params = {"p": p}
        else:
            if args.q is None:
                raise UsageError("solve psi needs --q")
            try:
                q = check_psi_exponent(args.q)
            except DomainError as exc:
                raise UsageError(str(exc)) from None
            if args.random:
                target, start, seed = _random_pair(args)
            else:
                target, start = _input_pd(args.a, "a"), _input_pd(args.x0, "x0")
            trace = iterate_psi(target, start, q, args.tol, args.max_steps)
            params = {"q": q}
        ok = trace.converged and trace.certified
        payload = {"equation": args.equation, **params, **trace.to_dict()}
        payload.update(
            certified=trace.certified,
            final_distance=trace.final_distance,
            solution=matrix_to_dict(trace.final),
        )
        lines = [
            f"{args.equation}: {'converged' if trace.converged else 'NOT converged'} in "
            f"{trace.steps} steps, final distance {trace.final_distance:.3e}",
            f"max ratio {max(trace.ratios, default=0.0):.6f} vs certified "
            f"{trace.beta_certified:.6f}: {'certified' if trace.certified else 'CERTIFICATE VIOLATED'}",
        ]
    if seed is not None:
        payload["seed"] = seed
        lines.append(f"seed {seed}")
    _emit(args, payload, lines)
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------- repro

@dataclass(frozen=True)
class Check:
    target: str
    item: str
    expected: float
    computed: float
    tolerance: float
    relation: str = "=="  # "==": |computed - expected| <= tol; ">": computed > expected

    @property
    def passed(self) -> bool:
        if self.relation == ">":
            return self.computed > self.expected
        return abs(self.computed - self.expected) <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "item": self.item,
            "expected": self.expected,
            "computed": self.computed,
            "relation": self.relation,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }

    def line(self) -> str:
        if self.relation == ">":
            want = f"> {self.expected:g}"
        else:
            want = f"{self.expected:.6g} +/- {self.tolerance:.0e}"
        return f"{self.target}: {self.item}: computed {self.computed:.10g}, expected {want}  " + (
            "PASS" if self.passed else "FAIL"
        )


SHARPNESS_TRIPLES = ((3.0, 2.0, 5.0), (1.0, 1.0, 1.0), (0.5, 2.0, 7.0), (4.0, 0.25, 0.0))


def repro_counterexample(seed: int) -> list[Check]:
    M, report = king_counterexample()
    norm = schatten_norm(M, 1.5)
    compressed = schatten_norm(np.abs(M), 1.5)
    return [
        Check("counterexample", "||A||_1.5", 7.7617, norm, 5e-4),
        Check("counterexample", "|| |A| ||_1.5", 7.9761, compressed, 5e-4),
        Check("counterexample", "gap", 0.2, compressed - norm, 0.0, ">"),
        Check("counterexample", "compression equals |A|",
              0.0, float(np.max(np.abs(norm_compression(
                  BlockMatrix(M, Partition.scalar(4), require_psd=False), 1.5) - np.abs(M)))), 1e-12),
    ]


def repro_sharpness(seed: int, q_grid=harness_mod.DEFAULT_Q_GRID) -> list[Check]:
    gen = SplitMix64(seed)
    triples = list(SHARPNESS_TRIPLES) + [tuple(3.0 * gen.uniform(3)) for _ in range(4)]
    out = []
    for b, c, d in triples:
        A = sharpness_witness(b, c, d)
        for q in q_grid:
            checks = ([check_theorem1(A, q)] if q <= 2 else []) + ([check_reverse(A, q)] if q >= 2 else [])
            for r in checks:
                out.append(Check("sharpness", f"{r.name} (b,c,d)=({b:.4g},{c:.4g},{d:.4g}) q={q:g}",
                                 0.0, r.slack, 1e-9))
    return out


def repro_nonsharpness(seed: int) -> list[Check]:
    demo = nonsharpness_demo(3, 1.5, (1.0,))
    out = [
        Check("nonsharpness", "exact d=3 q=1.5", 3 ** 1.5, demo.computed_exact, 1e-9),
        Check("nonsharpness", "bound d=3 q=1.5", (2 ** 1.5 - 2) * 3 + 3, demo.computed_bound, 1e-9),
        Check("nonsharpness", "gap d=3 q=1.5", 0.25, demo.bound - demo.exact, 0.0, ">"),
    ]
    for d in (3, 4, 5):
        for q in (1.1, 1.5, 1.9):
            rep = nonsharpness_demo(d, q, (1.0, 0.5))
            out.append(Check("nonsharpness", f"gap d={d} q={q:g}", 0.0, rep.computed_bound - rep.computed_exact, 0.0, ">"))
    return out


def repro_equality_endpoints(seed: int, count: int = 1000) -> list[Check]:
    partitions = harness_mod.TWO_BLOCK_PARTITIONS
    out = []
    for q in (1.0, 2.0):
        worst = 0.0
        for k in range(count):
            A = random_block_psd(partitions[k % len(partitions)], derive_seed(seed, int(q), k))
            worst = max(worst, abs(check_theorem1(A, q).slack))
        out.append(Check("equality-endpoints", f"max |slack| q={q:g} over {count} instances", 0.0, worst, 1e-10))
    return out


REPRO_TARGETS = {
    "counterexample": repro_counterexample,
    "sharpness": repro_sharpness,
    "nonsharpness": repro_nonsharpness,
    "equality-endpoints": repro_equality_endpoints,
}


def cmd_repro(args) -> int:
    seed = _seed(args)
    targets = list(REPRO_TARGETS) if args.target == "all" else [args.target]
    checks = [c for t in targets for c in REPRO_TARGETS[t](seed)]
    ok = all(c.passed for c in checks)
    lines = [c.line() for c in checks]
    if "counterexample" in targets:
        M, _ = king_counterexample()
        lines.append(f"note: counterexample matrix min eigenvalue {min_eigenvalue(M):.6g}")
    lines.append(f"{sum(c.passed for c in checks)}/{len(checks)} checks passed")
    _emit(args, {"seed": seed, "passed": ok, "checks": [c.to_dict() for c in checks]}, lines)
    return EXIT_OK if ok else EXIT_VIOLATION


# ---------------------------------------------------------------- harness

CONFIG_FIELDS = ("inequalities", "partitions", "dims", "q_grid", "trials", "base_seed")


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    import json

    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    for key in data:
        if key not in CONFIG_FIELDS:
            raise UsageError(f"{path}: unknown field {key!r}; allowed: {', '.join(CONFIG_FIELDS)}")
    for key in ("inequalities", "partitions", "dims", "q_grid"):
        if key in data and not isinstance(data[key], list):
            raise UsageError(f"{path}: field {key!r} must be a list")
    for key in ("trials", "base_seed"):
        if key in data and (isinstance(data[key], bool) or not isinstance(data[key], int)):
            raise UsageError(f"{path}: field {key!r} must be an integer")
    for name in data.get("inequalities", []):
        if name not in harness_mod.INEQUALITIES:
            raise UsageError(f"{path}: field 'inequalities': unknown inequality {name!r}")
    return data


def cmd_harness(args) -> int:
    data = load_config(args.config)
    if args.base_seed is not None:
        data["base_seed"] = args.base_seed
    if os.environ.get(SEED_ENV, "").strip():
        data["base_seed"] = _seed(args)
    if args.trials is not None:
        data["trials"] = args.trials
    if args.inequality:
        for name in args.inequality:
            if name not in harness_mod.INEQUALITIES:
                raise UsageError(f"unknown inequality {name!r}")
        data["inequalities"] = args.inequality
    try:
        config = harness_mod.HarnessConfig(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})
    except (NormCompError, TypeError, ValueError) as exc:
        raise UsageError(f"invalid harness config: {exc}") from None
    summary = harness_mod.run_harness(config)
    document = summary.to_dict(include_runtime=args.record_runtime)
    if args.out:
        try:
            Path(args.out).write_text(dumps(document) + "\n")
        except OSError as exc:
            raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    failing = [c for c in summary.cells if c.failures and not c.search]
    lines = [
        f"{len(summary.cells)} cells, {summary.instances} instances, "
        f"{summary.failures} failures, {summary.findings} search findings, "
        f"{summary.runtime_ms / 1000.0:.1f} s"
    ]
    for c in failing:
        shape = c.partition if c.partition is not None else c.dim
        lines.append(f"FAIL {c.inequality} shape={shape} q={c.q:g}: {c.failures} failures, worst seed {c.worst_seed}")
    if args.format == "json" and not args.out:
        print(dumps(document))
    else:
        print("\n".join(lines))
    return EXIT_OK if summary.failures == 0 else EXIT_VIOLATION


# ---------------------------------------------------------------- parser

def _partition(text: str) -> Partition:
    try:
        return Partition.parse(text)
    except NormCompError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _real(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="normcomp", description="Schatten-norm block inequalities and fixed-point solvers.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0, help=f"random seed ({SEED_ENV} overrides)")

    v = sub.add_parser("verify", help="check one inequality on a matrix file or a random instance")
    v.add_argument("inequality")
    v.add_argument("--q", type=_real, required=True)
    v.add_argument("--input", help="matrix or block matrix JSON file")
    v.add_argument("--input-b", help="second matrix for two-matrix inequalities")
    v.add_argument("--partition", type=_partition, help="block sizes, e.g. 2,2")
    v.add_argument("--random", action="store_true", help="draw a seeded random instance")
    v.add_argument("--dim", type=int)
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("solve", help="solve the Riccati equation or run a contraction iteration")
    s.add_argument("equation", choices=("riccati", "phi", "psi"))
    s.add_argument("--a", help="riccati: A; psi: A (the fixed point)")
    s.add_argument("--b", help="riccati: B")
    s.add_argument("--d", help="phi: D (the fixed point)")
    s.add_argument("--g0", help="phi: starting point")
    s.add_argument("--x0", help="psi: starting point")
    s.add_argument("--p", type=_real)
    s.add_argument("--q", type=_real)
    s.add_argument("--tol", type=_real, default=1e-11)
    s.add_argument("--max-steps", type=int, default=200)
    s.add_argument("--random", action="store_true")
    s.add_argument("--dim", type=int)
    common(s)
    s.set_defaults(func=cmd_solve)

    r = sub.add_parser("repro", help="reproduce the reference values")
    r.add_argument("target", choices=tuple(REPRO_TARGETS) + ("all",))
    common(r)
    r.set_defaults(func=cmd_repro)

    h = sub.add_parser("harness", help="run the randomized harness")
    h.add_argument("--config", help="JSON config with fields " + ", ".join(CONFIG_FIELDS))
    h.add_argument("--out", help="write the summary JSON here")
    h.add_argument("--base-seed", type=int)
    h.add_argument("--trials", type=int)
    h.add_argument("--inequality", action="append", help="restrict to this inequality (repeatable)")
    h.add_argument("--record-runtime", action="store_true", help="include runtime_ms in the summary JSON")
    common(h)
    h.set_defaults(func=cmd_harness)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConditioningError, ConvergenceError, NumericalBreakdownError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except NormCompError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
