# /pbc-compress/pbc_compress/emit.py
"""
Emission of compiled programs as circuits over the |A> register, and the
end-to-end compression pipeline.

* ``emit_cm`` turns a static measurement list into one Clifford followed by
  Z measurements of lines 0..s-1.
* ``emit_adaptive`` wraps an interactive program in a driver that realizes
  each quantum measurement as a Clifford block and a Z measurement on one line.
* ``compress_pipeline`` chains gadgetization, compilation and emission.
"""

from __future__ import annotations

from collections import defaultdict
from typing import NamedTuple, Optional, Union

import numpy as np

from .circuit import (
    Circuit,
    Gate,
    Measure,
    classify,
    defer_measurements,
    gate_count,
    materialize_outputs,
    normalize_measurements_to_end,
)
from .compiler import (
    CompiledProgram,
    Done,
    DrawRandom,
    EmitClassical,
    MeasurePauli,
    StaticProgram,
    compile,
    compile_nonadaptive,
    compile_postselected,
)
from .config import settings
from .constants import ADAPTIVE_HEADER, DRIVER_LINE, PIPELINE_RETRIES, QUANTUM_RECORD_PREFIX
from .exceptions import BudgetExceededError, ContractError, PostselectionMissError, ProbabilityZeroError
from .flags import CircuitShape, CompileMode, EmitTarget, InputKind, PipelinePath
from .gadgets import convert_zero_inputs, gadgetize, gadgetize_postselected
from .logging import setup_logger
from .models import CompileReport
from .oracle import DenseCliffordExecutor, Distribution
from .pauli import PauliOperator
from .synthesis import synthesize
from .tableau import CliffordGate, invert_gates
from .utils import log_structured, make_rng

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)


def emit_cm(static: StaticProgram) -> Circuit:
    """
    CM circuit for a static program: t lines fed |A>, the synthesized U, then
    ``measure k -> p<k>`` for every quantum measurement k, postselection kept.
    Outputs are the measurements without postselection.
    """
    if not isinstance(static, StaticProgram):
        raise ContractError("emit_cm needs a static program; use emit_adaptive for interactive ones")
    t = static.t
    gates = synthesize(static.operators, t) if static.operators else []
    steps: list = [Gate(g.name, g.targets) for g in gates]
    for k, post in enumerate(static.postselect):
        steps.append(Measure(k, f"{QUANTUM_RECORD_PREFIX}{k}", post))
    bits = tuple(f"{QUANTUM_RECORD_PREFIX}{k}" for k in static.free_measurements())
    return Circuit(num_lines=t, inputs=(InputKind.MAGIC,) * t, steps=tuple(steps), output_bits=bits)


# --- adaptive driver ----------------------------------------------------------------

class TranscriptEntry(NamedTuple):
    kind: str  # block, measure, coin or classical
    record_id: Optional[str] = None
    outcome: Optional[int] = None
    gates: tuple[CliffordGate, ...] = ()


class AdaptiveDriver:
    """
    Runs an interactive program on a |A>^t register using only Clifford
    blocks and Z measurements of ``DRIVER_LINE``.

    Measurement i applies ``W_i = U_{i-1}† U_i`` (gate order: undo the last
    frame, then the new one) where ``U_i† Z U_i = P̃_i``, then measures Z.
    """

    def __init__(self, prog: CompiledProgram, executor: Optional[DenseCliffordExecutor] = None):
        self.prog = prog
        self.executor = executor
        self._undo: list[CliffordGate] = []
        self.transcript: list[TranscriptEntry] = []
        self.blocks_emitted = 0
        self.gates_emitted = 0

    def fork(self) -> "AdaptiveDriver":
        out = AdaptiveDriver(self.prog.fork(), self.executor.copy() if self.executor else None)
        out._undo = list(self._undo)
        out.transcript = list(self.transcript)
        out.blocks_emitted = self.blocks_emitted
        out.gates_emitted = self.gates_emitted
        return out

    def block_for(self, P: PauliOperator) -> list[CliffordGate]:
        # U with U† Z_0 U = P
        frame = synthesize([P], self.prog.t)
        block = self._undo + frame
        self._undo = invert_gates(frame)
        self.blocks_emitted += 1
        self.gates_emitted += len(block)
        self.transcript.append(TranscriptEntry("block", gates=tuple(block)))
        return block

    def _ensure_executor(self, max_lines: Optional[int] = None) -> DenseCliffordExecutor:
        if self.executor is None:
            limit = settings.MAX_DENSE_LINES if max_lines is None else max_lines
            if self.prog.t > limit:
                raise BudgetExceededError("driver register exceeds the dense budget",
                                          limit=limit, requested=self.prog.t)
            self.executor = DenseCliffordExecutor(self.prog.t)
        return self.executor

    def run(self, rng: np.random.Generator) -> dict[str, int]:
        """
        One sample of the original circuit's outputs.

        Raises:
            PostselectionMissError: a measured outcome violates its postselection.
        """
        executor = self._ensure_executor()
        while True:
            action = self.prog.next_action()
            if isinstance(action, Done):
                return dict(action.sample)
            if isinstance(action, EmitClassical):
                self.transcript.append(TranscriptEntry("classical", action.record_id, action.outcome))
            elif isinstance(action, DrawRandom):
                lam = 1 if rng.integers(2) == 0 else -1
                self.transcript.append(TranscriptEntry("coin", action.record_id, lam))
                self.prog.submit(lam)
            elif isinstance(action, MeasurePauli):
                executor.apply(self.block_for(action.operator))
                outcome = executor.measure_z(DRIVER_LINE, rng)
                self.transcript.append(TranscriptEntry("measure", action.record_id, outcome))
                self.prog.submit(outcome)

    def dump(self, seed: Optional[int] = None) -> str:
        """Text transcript: the blocks, measured line and outcomes of this run."""
        head = f"{ADAPTIVE_HEADER} t={self.prog.t}"
        if seed is not None:
            head += f" seed={seed}"
        lines = [head]
        for e in self.transcript:
            if e.kind == "block":
                body = ", ".join(f"{g.name} " + " ".join(map(str, g.targets)) for g in e.gates)
                lines.append(f"block {body}".rstrip())
            elif e.kind == "measure":
                lines.append(f"measure {DRIVER_LINE} -> {e.record_id} = {e.outcome:+d}")
            else:
                lines.append(f"{e.kind} {e.record_id} = {e.outcome:+d}")
        if self.prog.is_done:
            lines.append(" ".join(["output"] + list(self.prog.output_records)))
            lines.append(f"sample {self.prog.output_key()}")
        return "\n".join(lines) + "\n"


def emit_adaptive(prog: CompiledProgram) -> AdaptiveDriver:
    if not isinstance(prog, CompiledProgram):
        raise ContractError("emit_adaptive needs an interactive program")
    return AdaptiveDriver(prog)


def driver_distribution(
    prog: CompiledProgram, prune: Optional[float] = None, max_lines: Optional[int] = None
) -> Distribution:
    """
    Exact output law of the adaptive driver: every Z outcome of every block,
    both values of every coin. Forced coins weigh 1/2.
    """
    prune = settings.PRUNE_THRESHOLD if prune is None else prune
    root = AdaptiveDriver(prog.fork())
    root._ensure_executor(max_lines)
    acc: dict[str, float] = defaultdict(float)
    stack = [(root, 1.0)]
    while stack:
        drv, w = stack.pop()
        while True:
            try:
                action = drv.prog.next_action()
            except PostselectionMissError:
                break
            if isinstance(action, Done):
                acc[drv.prog.output_key()] += w
                break
            if isinstance(action, EmitClassical):
                if action.forced:
                    w *= 0.5
                continue
            if isinstance(action, DrawRandom):
                for lam in (1, -1):
                    child = drv.fork()
                    child.prog.submit(lam)
                    stack.append((child, w * 0.5))
                break
            drv.executor.apply(drv.block_for(action.operator))
            targets = (1, -1) if action.postselect is None else (action.postselect,)
            for outcome in targets:
                pr = drv.executor.probability_z(DRIVER_LINE, outcome)
                if w * pr < prune:
                    continue
                child = drv.fork()
                child.executor.project_z(DRIVER_LINE, outcome)
                child.prog.submit(outcome)
                stack.append((child, w * pr))
            break
    weight = float(sum(acc.values()))
    if weight <= 0.0:
        raise ProbabilityZeroError("every driver branch is rejected")
    return Distribution(prog.output_records, {k: v / weight for k, v in acc.items()}, weight=weight)


# --- pipeline -----------------------------------------------------------------------

class PipelineResult(NamedTuple):
    """What ``compress_pipeline`` produced: a CM circuit, a program, a driver, or several."""
    report: CompileReport
    circuit: Optional[Circuit] = None
    static: Optional[StaticProgram] = None
    program: Optional[CompiledProgram] = None
    driver: Optional[AdaptiveDriver] = None
    sample: Optional[dict] = None


def _static_with_retries(c: Circuit, rng: np.random.Generator) -> StaticProgram:
    for attempt in range(PIPELINE_RETRIES):
        try:
            return compile_nonadaptive(c, rng=rng)
        except PostselectionMissError as e:
            log_structured(log, "debug", "coin draw rejected", attempt=attempt, record_id=e.record_id)
    raise PostselectionMissError(f"no coin draw satisfied the postselection in {PIPELINE_RETRIES} attempts")


def compress_pipeline(
    c: Circuit,
    mode: Union[CompileMode, str] = CompileMode.PLAIN,
    path: Union[PipelinePath, str, None] = None,
    *,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
    emit: Union[EmitTarget, str] = EmitTarget.CM,
    run_driver: bool = True,
) -> PipelineResult:
    """
    Compresses a Clifford+T circuit onto its |A> register.

    plain: gadgets with corrections, then the interactive compile and the
    adaptive driver; a circuit that stays free of parity controls takes the
    static route to a single CM circuit instead.

    postselected, path a: postselected gadgets, then the static compile and
    ``emit_cm`` (the interactive postselected compile for adaptive input).

    postselected, path b: postselected gadgets, deferral, and the |A> -> |0>
    prefix for every |0> line; the result is a postselected CM circuit on
    all-|A> lines, no compilation involved.

    Raises:
        ContractError: bad mode/path combination or precondition.
        ProbabilityZeroError: the postselection can never be met.
    """
    mode = CompileMode(mode)
    emit = EmitTarget(emit)
    if rng is None:
        rng, seed = make_rng(seed)
    original = c
    report = dict(
        mode=mode.value, original_lines=c.num_lines, input_gate_count=gate_count(c), seed=seed, emit=emit.value,
    )

    if mode is CompileMode.PLAIN:
        if path is not None:
            raise ContractError("a pipeline path only applies to postselected mode")
        if c.postselected_records():
            raise ContractError("postselected measurements need the postselected mode")
        g = gadgetize(c)
    else:
        path = PipelinePath(path or PipelinePath.EXTENDED_GK)
        report["path"] = path.value
        g = gadgetize_postselected(c)
    report["gadget_count"] = g.num_lines - c.num_lines

    if mode is CompileMode.POSTSELECTED and path is PipelinePath.MAGIC_PREFIX:
        if original.is_adaptive:
            raise ContractError("path b needs a circuit without parity controls")
        deferred = defer_measurements(materialize_outputs(g))
        out = normalize_measurements_to_end(convert_zero_inputs(deferred))
        report.update(t=len(deferred.magic_lines), n=len(deferred.zero_lines), emitted_gate_count=gate_count(out),
                      emitted_lines=out.num_lines)
        result = PipelineResult(CompileReport(**report), circuit=out)
    elif classify(g).shape is not CircuitShape.ADAPTIVE:
        static = _static_with_retries(g, rng)
        cm = emit_cm(static)
        report.update(
            t=static.t, n=static.n, s=static.s, lambda_count=static.free_lambda_count,
            forced_count=static.forced_count, classical_count=static.classical_count,
            emitted_gate_count=gate_count(cm), emitted_lines=cm.num_lines,
        )
        result = PipelineResult(CompileReport(**report), circuit=cm, static=static)
    else:
        prog = compile(g) if mode is CompileMode.PLAIN else compile_postselected(g)
        driver = emit_adaptive(prog)
        sample = None
        if run_driver:
            sample = driver.run(rng)
        report.update(
            t=prog.t, n=prog.n, s=prog.quantum_count, lambda_count=prog.free_lambda_count,
            forced_count=prog.forced_count, classical_count=prog.classical_count,
            emitted_gate_count=driver.gates_emitted, emitted_lines=prog.t,
        )
        result = PipelineResult(CompileReport(**report), program=prog, driver=driver, sample=sample)

    log_structured(log, "info", "pipeline finished", **result.report.model_dump(exclude_none=True))
    return result
