# /pbc-compress/pbc_compress/circuit.py
"""
Circuit intermediate representation.

A :class:`Circuit` is an ordered list of steps (gates and non-destructive Z
measurements) over ``num_lines`` lines, each declared ``Z0`` (|0>) or ``A``
(|A>).  Adaptivity is restricted to parity controls: a gate fires iff the XOR
of the referenced outcome bits (+1 -> 0, -1 -> 1), XOR ``invert``, is 1.

The module also holds the structural rewrites other passes share: output
materialization, moving final measurements to the end, and measurement
deferral through fresh ancillas.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping, NamedTuple, Optional, Sequence, Union

from .constants import (
    NON_CLIFFORD_GATES,
    OUTPUT_RECORD_PREFIX,
    SINGLE_QUBIT_GATES,
    T_COUNT_PER_GATE,
    TWO_QUBIT_GATES,
)
from .exceptions import ContractError
from .flags import CircuitShape, GateContent, InputKind
from .pauli import DependenceTracker, PauliOperator, commutes
from .utils import outcome_to_bit, parity


@dataclass(frozen=True)
class ParityControl:
    """
    Affine GF(2) condition on earlier measurement records.

    Attributes:
        record_ids (tuple[str, ...]): Referenced records, non-empty.
        invert (bool): XOR-ed into the parity.
    """
    record_ids: tuple[str, ...]
    invert: bool = False

    def __post_init__(self):
        object.__setattr__(self, "record_ids", tuple(self.record_ids))
        if not self.record_ids:
            raise ContractError("parity control needs at least one record")

    def fires(self, outcomes: Mapping[str, int]) -> bool:
        """Evaluates the control against ±1 outcomes."""
        bits = [outcome_to_bit(outcomes[rid]) for rid in self.record_ids]
        return bool(parity(bits) ^ self.invert)


@dataclass(frozen=True)
class Gate:
    name: str
    targets: tuple[int, ...]
    control: Optional[ParityControl] = None

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))

    @property
    def is_clifford(self) -> bool:
        return self.name not in NON_CLIFFORD_GATES


@dataclass(frozen=True)
class Measure:
    line: int
    record_id: str
    postselect: Optional[int] = None


Step = Union[Gate, Measure]


class Classification(NamedTuple):
    shape: CircuitShape
    content: GateContent
    t_count: int


@dataclass(frozen=True)
class Circuit:
    """
    Gate/measurement program with input declarations and an output register.

    Attributes:
        num_lines (int): Number of lines.
        inputs (tuple[InputKind, ...]): Per-line input state.
        steps (tuple[Step, ...]): Program order.
        stab_block (tuple[PauliOperator, ...]): Optional pure stabilizer state on
            lines ``0..r-1`` given by r generators of length r; those lines are
            declared ``Z0``.
        output_lines (tuple[int, ...]): Quantum output register, measured in Z at the end.
        output_bits (tuple[str, ...]): Classical output records.
    """
    num_lines: int
    inputs: tuple[InputKind, ...]
    steps: tuple[Step, ...] = ()
    stab_block: tuple[PauliOperator, ...] = ()
    output_lines: tuple[int, ...] = ()
    output_bits: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(InputKind(k) for k in self.inputs))
        object.__setattr__(self, "steps", tuple(self.steps))
        object.__setattr__(self, "stab_block", tuple(self.stab_block))
        object.__setattr__(self, "output_lines", tuple(int(l) for l in self.output_lines))
        object.__setattr__(self, "output_bits", tuple(self.output_bits))
        self.validate()

    # --- validation ---------------------------------------------------

    def validate(self) -> None:
        """Raises ContractError (with the offending step index) on any semantic problem."""
        if self.num_lines < 0 or len(self.inputs) != self.num_lines:
            raise ContractError(f"{len(self.inputs)} input declarations for {self.num_lines} lines")
        self._validate_stab_block()
        seen: set[str] = set()
        post_lines: set[int] = set()
        for idx, step in enumerate(self.steps):
            if isinstance(step, Gate):
                arity = 1 if step.name in SINGLE_QUBIT_GATES else 2 if step.name in TWO_QUBIT_GATES else None
                if arity is None:
                    raise ContractError(f"unknown gate {step.name!r}", indices=(idx,))
                if len(step.targets) != arity:
                    raise ContractError(f"gate {step.name} takes {arity} target(s)", indices=(idx,))
                if any(not 0 <= t < self.num_lines for t in step.targets):
                    raise ContractError(f"gate {step.name} target out of range", indices=(idx,))
                if arity == 2 and step.targets[0] == step.targets[1]:
                    raise ContractError(f"gate {step.name} repeats line {step.targets[0]}", indices=(idx,))
                if step.control is not None:
                    missing = [r for r in step.control.record_ids if r not in seen]
                    if missing:
                        raise ContractError(f"control references undefined record {missing[0]}", indices=(idx,))
            elif isinstance(step, Measure):
                if not 0 <= step.line < self.num_lines:
                    raise ContractError(f"measurement line {step.line} out of range", indices=(idx,))
                if step.record_id in seen:
                    raise ContractError(f"duplicate record id {step.record_id}", indices=(idx,))
                if step.postselect not in (None, 1, -1):
                    raise ContractError("postselection target must be +1 or -1", indices=(idx,))
                seen.add(step.record_id)
                if step.postselect is not None:
                    post_lines.add(step.line)
            else:
                raise ContractError(f"unknown step type {type(step).__name__}", indices=(idx,))
        if len(set(self.output_lines)) != len(self.output_lines):
            raise ContractError("output lines repeat")
        for line in self.output_lines:
            if not 0 <= line < self.num_lines:
                raise ContractError(f"output line {line} out of range")
        clash = sorted(set(self.output_lines) & post_lines)
        if clash:
            raise ContractError("output lines overlap postselected lines", indices=tuple(clash))
        postselected = self.postselected_records()
        for rid in self.output_bits:
            if rid not in seen:
                raise ContractError(f"output record {rid} is never measured")
            if rid in postselected:
                raise ContractError(f"postselected record {rid} cannot be an output")

    def _validate_stab_block(self) -> None:
        if not self.stab_block:
            return
        r = len(self.stab_block)
        if r > self.num_lines:
            raise ContractError(f"stabilizer block of {r} generators exceeds {self.num_lines} lines")
        tracker = DependenceTracker(r)
        for k, g in enumerate(self.stab_block):
            if g.n != r:
                raise ContractError(f"stabilizer generator {g} must act on {r} lines", indices=(k,))
            for j in range(k):
                if not commutes(self.stab_block[j], g):
                    raise ContractError("stabilizer generators anticommute", indices=(j, k))
            if not tracker.is_independent(g):
                raise ContractError("stabilizer generators are dependent", indices=(k,))
            tracker.add(g)
        bad = [i for i in range(r) if self.inputs[i] is not InputKind.ZERO]
        if bad:
            raise ContractError("stabilizer block lines must be declared Z0", indices=tuple(bad))

    # --- views --------------------------------------------------------

    @property
    def gates(self) -> list[Gate]:
        return [s for s in self.steps if isinstance(s, Gate)]

    @property
    def measurements(self) -> list[Measure]:
        return [s for s in self.steps if isinstance(s, Measure)]

    def record_ids(self) -> list[str]:
        return [m.record_id for m in self.measurements]

    def postselected_records(self) -> dict[str, int]:
        return {m.record_id: m.postselect for m in self.measurements if m.postselect is not None}

    @property
    def magic_lines(self) -> list[int]:
        return [i for i, k in enumerate(self.inputs) if k is InputKind.MAGIC]

    @property
    def zero_lines(self) -> list[int]:
        return [i for i, k in enumerate(self.inputs) if k is InputKind.ZERO]

    @property
    def t_count(self) -> int:
        return sum(T_COUNT_PER_GATE.get(g.name, 0) for g in self.gates)

    @property
    def is_clifford(self) -> bool:
        return all(g.is_clifford for g in self.gates)

    @property
    def is_adaptive(self) -> bool:
        return any(g.control is not None for g in self.gates)

    def output_records(self) -> list[str]:
        """
        Records forming the classical output once outputs are materialized:
        declared output bits, else every record that is not postselected.
        """
        if self.output_bits or self.output_lines:
            return list(self.output_bits)
        post = self.postselected_records()
        return [rid for rid in self.record_ids() if rid not in post]

    def with_steps(self, steps: Iterable[Step], **changes) -> "Circuit":
        return replace(self, steps=tuple(steps), **changes)


def fresh_record_id(taken: set[str], prefix: str, start: int = 0) -> str:
    i = start
    while f"{prefix}{i}" in taken:
        i += 1
    rid = f"{prefix}{i}"
    taken.add(rid)
    return rid


def classify(c: Circuit) -> Classification:
    """
    Adaptivity and gate-content class of a circuit.

    unitary: no parity controls and no gate after the first measurement.
    non-adaptive: measurements interleaved with gates, no parity controls.
    adaptive: any parity-controlled gate.
    """
    content = GateContent.CLIFFORD_ONLY if c.is_clifford else GateContent.HAS_T
    if c.is_adaptive:
        shape = CircuitShape.ADAPTIVE
    else:
        measured = False
        shape = CircuitShape.UNITARY
        for step in c.steps:
            if isinstance(step, Measure):
                measured = True
            elif measured:
                shape = CircuitShape.NON_ADAPTIVE
                break
    return Classification(shape, content, c.t_count)


def materialize_outputs(c: Circuit) -> Circuit:
    """Turns the quantum output register into final Z measurements appended to ``output_bits``."""
    if not c.output_lines:
        return c
    taken = set(c.record_ids())
    steps = list(c.steps)
    bits = list(c.output_bits)
    for line in c.output_lines:
        rid = f"{OUTPUT_RECORD_PREFIX}{line}"
        if rid in taken:
            rid = fresh_record_id(taken, f"{rid}_")
        taken.add(rid)
        steps.append(Measure(line, rid))
        bits.append(rid)
    return replace(c, steps=tuple(steps), output_lines=(), output_bits=tuple(bits))


def _touches(step: Step, line: int) -> bool:
    if isinstance(step, Gate):
        return line in step.targets
    return False


def normalize_measurements_to_end(c: Circuit) -> Circuit:
    """
    Moves every measurement to the end when no later gate touches its line and no
    later control reads its record. Relative order of measurements is kept.
    """
    steps = list(c.steps)
    movable: list[int] = []
    for idx, step in enumerate(steps):
        if not isinstance(step, Measure):
            continue
        later = steps[idx + 1:]
        if any(_touches(s, step.line) for s in later):
            continue
        if any(isinstance(s, Gate) and s.control is not None and step.record_id in s.control.record_ids
               for s in later):
            continue
        movable.append(idx)
    keep = [s for i, s in enumerate(steps) if i not in set(movable)]
    return c.with_steps(keep + [steps[i] for i in movable])


def defer_measurements(c: Circuit) -> Circuit:
    """
    Rewrites a non-adaptive circuit into unitary form: every measurement whose line
    is used again becomes ``CX(line, ancilla)`` with the ancilla (fresh ``Z0`` line)
    measured at the end under the same record id and postselection.
    """
    if c.is_adaptive:
        raise ContractError("measurement deferral needs a circuit without parity controls")
    steps = list(c.steps)
    inputs = list(c.inputs)
    body: list[Step] = []
    tail: list[Measure] = []
    for idx, step in enumerate(steps):
        if isinstance(step, Measure):
            if any(_touches(s, step.line) for s in steps[idx + 1:]):
                anc = len(inputs)
                inputs.append(InputKind.ZERO)
                body.append(Gate("CX", (step.line, anc)))
                tail.append(Measure(anc, step.record_id, step.postselect))
            else:
                tail.append(step)
        else:
            body.append(step)
    return replace(c, num_lines=len(inputs), inputs=tuple(inputs), steps=tuple(body + tail))


def lower_gates(c: Circuit, table: Mapping[str, Sequence[tuple[str, Sequence[int]]]]) -> Circuit:
    """Replaces every gate named in ``table`` by its word; controls are copied onto each gate of the word."""
    out: list[Step] = []
    for step in c.steps:
        if isinstance(step, Gate) and step.name in table:
            for name, slots in table[step.name]:
                out.append(Gate(name, tuple(step.targets[s] for s in slots), step.control))
        else:
            out.append(step)
    return c.with_steps(out)


def gate_count(c: Circuit) -> int:
    return len(c.gates)
