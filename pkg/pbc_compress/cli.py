# /pbc-compress/pbc_compress/cli.py
"""
``pbc-compress`` command line: compile, verify, gen and stats.

Reports are printed as ``key=value`` lines. Every command is deterministic
given ``--seed``; without one the seed is drawn from system entropy and
printed on stderr.
"""

from __future__ import annotations

import argparse
import sys
import uuid
from pathlib import Path
from typing import Optional

from . import circuit_format
from .circuit import Circuit, classify
from .classes import (
    anticoncentration_estimate,
    closure_sweep,
    eq5_check,
    generate,
    theta_sampling_check,
)
from .config import settings
from .constants import (
    DEFAULT_CONFIDENCE,
    EXIT_BUDGET,
    EXIT_CONTRACT,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PROBABILITY_ZERO,
    EXIT_TOLERANCE,
    IQP_ALPHA_REFERENCE,
)
from .emit import compress_pipeline, driver_distribution
from .exceptions import (
    BudgetExceededError,
    CircuitParseError,
    ConfigurationError,
    ContractError,
    DimensionError,
    PBCError,
    PostselectionMissError,
    ProbabilityZeroError,
)
from .flags import CircuitShape, ClassId, CompileMode, EmitTarget, PipelinePath
from .compiler import compile as compile_program, compile_postselected
from .gadgets import gadgetize, gadgetize_postselected
from .logging import setup_logger
from .models import VerifyReport
from .oracle import Distribution, distance, exact_distribution, exact_distribution_static
from .utils import log_structured, make_rng
from .version import __version__

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)

CLASS_ALIASES = {"conjugated": ClassId.CONJUGATED_CLIFFORD}
EXIT_CODES: list[tuple[type, int]] = [
    (CircuitParseError, EXIT_PARSE),
    (ConfigurationError, EXIT_PARSE),
    (ProbabilityZeroError, EXIT_PROBABILITY_ZERO),
    (PostselectionMissError, EXIT_PROBABILITY_ZERO),
    (BudgetExceededError, EXIT_BUDGET),
    (ContractError, EXIT_CONTRACT),
    (DimensionError, EXIT_CONTRACT),
]


def exit_code_for(error: Exception) -> int:
    for kind, code in EXIT_CODES:
        if isinstance(error, kind):
            return code
    if isinstance(error, (OSError, ValueError)):
        return EXIT_PARSE
    return EXIT_CONTRACT


def _class_id(text: str) -> ClassId:
    if text in CLASS_ALIASES:
        return CLASS_ALIASES[text]
    try:
        return ClassId(text)
    except ValueError:
        raise ConfigurationError(f"unknown class {text!r}") from None


def _seeded(seed: Optional[int]):
    """Generator and seed; a drawn seed is announced on stderr."""
    if seed is None:
        seed = settings.DEFAULT_SEED
    rng, used = make_rng(seed)
    if seed is None:
        print(f"seed={used}", file=sys.stderr)
    return rng, used


def _write(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _mode_for(c: Circuit, mode: Optional[str]) -> CompileMode:
    if mode is not None:
        return CompileMode(mode)
    return CompileMode.POSTSELECTED if c.postselected_records() else CompileMode.PLAIN


# --- compile ------------------------------------------------------------------------

def cmd_compile(args: argparse.Namespace) -> int:
    c = circuit_format.load(args.input)
    rng, seed = _seeded(args.seed)
    mode = _mode_for(c, args.mode)
    result = compress_pipeline(c, mode, args.path, seed=seed, rng=rng, emit=args.emit)
    emit = EmitTarget(args.emit)
    if result.driver is not None:
        text = result.driver.dump(seed)
    elif emit is EmitTarget.PBC and result.static is not None:
        text = result.static.dump()
    else:
        text = circuit_format.serialize(result.circuit)
    _write(text, args.out)
    _write(result.report.to_kv_lines(), args.report)
    return EXIT_OK


# --- verify -------------------------------------------------------------------------

def compiled_distribution(
    c: Circuit, mode: CompileMode, path: Optional[str], max_lines: Optional[int] = None
) -> Distribution:
    """Exact law of what ``compile`` would emit for ``c``, enumerating every coin.

    ``max_lines`` caps every dense simulation on the compiled side.
    """
    if mode is CompileMode.POSTSELECTED and PipelinePath(path or PipelinePath.EXTENDED_GK) is PipelinePath.MAGIC_PREFIX:
        result = compress_pipeline(c, mode, path, seed=0, run_driver=False)
        return exact_distribution(result.circuit, max_lines=max_lines)
    g = gadgetize(c) if mode is CompileMode.PLAIN else gadgetize_postselected(c)
    if classify(g).shape is not CircuitShape.ADAPTIVE:
        return exact_distribution_static(g, max_lines=max_lines)
    prog = compile_program(g) if mode is CompileMode.PLAIN else compile_postselected(g)
    return driver_distribution(prog, max_lines=max_lines)


def cmd_verify(args: argparse.Namespace) -> int:
    c = circuit_format.load(args.input)
    budget = args.budget if args.budget is not None else settings.MAX_DENSE_LINES
    tol = args.tol if args.tol is not None else settings.TOLERANCE
    reference = exact_distribution(c, max_lines=budget)
    if args.against == "compiled":
        other = compiled_distribution(c, _mode_for(c, args.mode), args.path, max_lines=budget)
    elif args.against == "self":
        other = exact_distribution(gadgetize(c), max_lines=budget)
    else:
        other = exact_distribution(circuit_format.load(args.against), max_lines=budget)
    d = distance(reference, other)
    report = VerifyReport(
        against=args.against, additive=d.additive, tvd=d.tvd, tolerance=tol, passed=d.additive <= tol,
        acceptance=reference.weight if c.postselected_records() else None, pruned_mass=reference.pruned_mass,
    )
    _write(report.to_kv_lines(), args.report)
    return EXIT_OK if report.passed else EXIT_TOLERANCE


# --- gen / stats ---------------------------------------------------------------------

def _v_word(text: str) -> list[str]:
    return [g for g in text.split(",") if g]


def cmd_gen(args: argparse.Namespace) -> int:
    class_id = _class_id(args.class_id)
    if args.count < 1:
        raise ConfigurationError("--count must be at least 1")
    rng, _ = _seeded(args.seed)
    outdir: Path = args.outdir
    outdir.mkdir(parents=True, exist_ok=True)
    manifests = []
    for index in range(args.count):
        seed = int(rng.integers(2 ** 63))
        inst = generate(class_id, args.n, seed, p=args.p, depth=args.depth, v_word=_v_word(args.v_word))
        name = f"{class_id.value}_n{args.n}_{index:04d}.circ"
        circuit_format.dump(inst.circuit, outdir / name)
        manifests.append(inst.manifest(index=index, file=name).to_kv_lines())
    (outdir / "manifest.txt").write_text("\n".join(manifests))
    print(f"instances={args.count}")
    print(f"manifest={outdir / 'manifest.txt'}")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    class_id = _class_id(args.class_id)
    rng, _ = _seeded(args.seed)
    report = anticoncentration_estimate(
        class_id, args.n, args.samples, args.alpha, rng,
        p=args.p, depth=args.depth, v_word=_v_word(args.v_word), confidence=args.confidence,
    )
    blocks = [report.to_kv_lines()]
    if args.checks:
        if class_id not in (ClassId.IQP_ISING, ClassId.SPARSE_IQP):
            raise ConfigurationError("swap checks need an IQP class")
        instances = [
            generate(class_id, args.n, int(rng.integers(2 ** 63)), p=args.p) for _ in range(args.instances)
        ]
        blocks.append(closure_sweep(instances).to_kv_lines())
        blocks.append(eq5_check(instances).to_kv_lines())
        samples = None if args.n <= 2 else args.samples
        blocks.append(theta_sampling_check(class_id, args.n, samples, p=args.p, rng=rng,
                                           confidence=args.confidence).to_kv_lines())
    _write("\n".join(blocks), args.report)
    return EXIT_OK


# --- argument parsing --------------------------------------------------------------------

def _class_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--class", dest="class_id", required=True,
                     help="iqp-ising, sparse-iqp, rcs, conjugated(-clifford) or hadamard")
    sub.add_argument("--n", type=int, required=True, help="Number of lines.")
    sub.add_argument("--p", type=float, default=1.0, help="Pair-gate probability for sparse-iqp.")
    sub.add_argument("--depth", type=int, default=4, help="Layer count for rcs.")
    sub.add_argument("--v-word", default="T", help="Comma-separated 1-qubit word V for conjugated-clifford.")
    sub.add_argument("--seed", type=int, default=None)


def _parse_args(argv: Optional[list[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="pbc-compress",
        description="Compress Clifford+T circuits onto their magic-state register and verify the result.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("compile", help="Gadgetize, compile and emit a circuit.")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--mode", choices=[m.value for m in CompileMode], default=None,
                   help="Defaults to postselected when the circuit postselects.")
    p.add_argument("--path", choices=[x.value for x in PipelinePath], default=None)
    p.add_argument("--emit", choices=[e.value for e in EmitTarget], default=EmitTarget.CM.value)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=cmd_compile)

    p = commands.add_parser("verify", help="Compare exact output distributions.")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.add_argument("--against", default="compiled", help="compiled, self, or a circuit file.")
    p.add_argument("--mode", choices=[m.value for m in CompileMode], default=None)
    p.add_argument("--path", choices=[x.value for x in PipelinePath], default=None)
    p.add_argument("--budget", type=int, default=None, help="Largest line count for the dense oracle.")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=cmd_verify)

    p = commands.add_parser("gen", help="Write class instances and their manifest.")
    _class_args(p)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--outdir", type=Path, required=True)
    p.set_defaults(handler=cmd_gen)

    p = commands.add_parser("stats", help="Anticoncentration estimate and swap checks.")
    _class_args(p)
    p.add_argument("--alpha", type=float, default=IQP_ALPHA_REFERENCE)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--confidence", type=float, default=DEFAULT_CONFIDENCE)
    p.add_argument("--checks", action="store_true", help="Also run the closure and T/T-dagger swap checks.")
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=cmd_stats)
    return parser.parse_args(argv)


def main(argv: Optional[list[str]] = None) -> int:
    args = _parse_args(argv)
    run_id = uuid.uuid4()
    log_structured(log, "info", "command started", run_id=run_id, command=args.command)
    try:
        code = args.handler(args)
    except (PBCError, OSError, ValueError) as e:
        code = exit_code_for(e)
        print(f"error: {e}", file=sys.stderr)
        log_structured(log, "warning", "command failed", run_id=run_id, command=args.command, exit_code=code,
                       error=type(e).__name__)
        return code
    log_structured(log, "info", "command finished", run_id=run_id, command=args.command, exit_code=code)
    return code


if __name__ == "__main__":
    sys.exit(main())
