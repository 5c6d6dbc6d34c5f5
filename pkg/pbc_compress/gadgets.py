# /pbc-compress/pbc_compress/gadgets.py
"""
Local circuit rewrites built from magic-state gadgets.

A T gadget on line k appends a fresh |A> ancilla a, applies CX(k, a) and
measures a.  Outcome +1 leaves T on line k, outcome -1 leaves T^dagger, which
an S correction turns back into T.  The T^dagger gadget is the same
measurement with an S^3 = Z.S correction on outcome +1.  Ancillas are added in
program order of the T/T^dagger gates and never reused.
"""

from __future__ import annotations

import re
from dataclasses import replace
from typing import Iterable, NamedTuple, Sequence

from .circuit import (
    Circuit,
    Gate,
    Measure,
    ParityControl,
    Step,
    fresh_record_id,
    lower_gates,
    materialize_outputs,
    normalize_measurements_to_end,
)
from .config import settings
from .constants import CS_WORD, CSDG_WORD, GADGET_RECORD_PREFIX, T_TYPE_GATES, ZERO_RECORD_PREFIX
from .exceptions import ContractError
from .flags import InputKind
from .logging import setup_logger
from .utils import log_structured

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)

_GADGET_ID_RE = re.compile(rf"^{GADGET_RECORD_PREFIX}\d+$")


class GadgetRecord(NamedTuple):
    """Where a gadget lives: its record, the line it acts on, its ancilla, and whether it replaced T^dagger."""
    record_id: str
    line: int
    ancilla: int
    inverted: bool


def expand_cs(c: Circuit) -> Circuit:
    """
    Lowers CS and CS^dagger to Clifford+T words (three T-type gates each).

    CS = T_a T_b CX(a,b) T^dagger_b CX(a,b) as diagonal phases: the parity
    phase on ``a xor b`` cancels the doubled phase of the ``11`` basis state.
    """
    return lower_gates(c, {"CS": CS_WORD, "CSdg": CSDG_WORD})


def _gadget_steps(
    gate: Gate, ancilla: int, record_id: str, postselected: bool
) -> list[Step]:
    line = gate.targets[0]
    inverted = gate.name == "Tdg"
    steps: list[Step] = [Gate("CX", (line, ancilla))]
    if postselected:
        steps.append(Measure(ancilla, record_id, -1 if inverted else 1))
        return steps
    steps.append(Measure(ancilla, record_id))
    if inverted:
        fire = ParityControl((record_id,), invert=True)
        steps += [Gate("Z", (line,), fire), Gate("S", (line,), fire)]
    else:
        steps.append(Gate("S", (line,), ParityControl((record_id,))))
    return steps


def _gadgetize(c: Circuit, postselected: bool) -> Circuit:
    c = expand_cs(c)
    if not any(isinstance(s, Gate) and s.name in T_TYPE_GATES for s in c.steps):
        return c
    taken = set(c.record_ids())
    inputs = list(c.inputs)
    steps: list[Step] = []
    count = 0
    for idx, step in enumerate(c.steps):
        if not (isinstance(step, Gate) and step.name in T_TYPE_GATES):
            steps.append(step)
            continue
        if step.control is not None:
            raise ContractError(f"parity-controlled {step.name} cannot be gadgetized", indices=(idx,))
        ancilla = len(inputs)
        inputs.append(InputKind.MAGIC)
        rid = fresh_record_id(taken, GADGET_RECORD_PREFIX, start=count)
        steps.extend(_gadget_steps(step, ancilla, rid, postselected))
        count += 1
    outputs = {}
    if not c.output_bits and not c.output_lines:
        # keep the output register equal to the original records
        outputs["output_bits"] = tuple(c.output_records())
    log_structured(log, "debug", "gadgetized", gadgets=count, postselected=postselected)
    return replace(c, num_lines=len(inputs), inputs=tuple(inputs), steps=tuple(steps), **outputs)


def gadgetize(c: Circuit) -> Circuit:
    """
    Replaces every T and T^dagger (after CS lowering) by an adaptive gadget.

    The result is Clifford-only. When the circuit declared no outputs, its
    original non-postselected records become explicit ``output_bits`` so that
    gadget records stay out of the output.

    Raises:
        ContractError: a T/T^dagger gate carries a parity control.
    """
    return _gadgetize(c, postselected=False)


def gadgetize_postselected(c: Circuit) -> Circuit:
    """Gadgets postselected onto the outcome that needs no correction: +1 for T, -1 for T^dagger."""
    return _gadgetize(c, postselected=True)


def gadget_records(c: Circuit) -> list[GadgetRecord]:
    """
    Gadgets present in a gadgetized circuit, in creation order.

    A gadget is a ``g<k>`` record measured on an |A> line whose only gate is
    the CX that feeds it.
    """
    out: list[GadgetRecord] = []
    steps = list(c.steps)
    for idx, step in enumerate(steps):
        if not isinstance(step, Measure) or not _GADGET_ID_RE.match(step.record_id):
            continue
        a = step.line
        if c.inputs[a] is not InputKind.MAGIC:
            continue
        touching = [s for s in steps if isinstance(s, Gate) and a in s.targets]
        if len(touching) != 1 or touching[0].name != "CX" or touching[0].targets[1] != a:
            continue
        line = touching[0].targets[0]
        if step.postselect is not None:
            inverted = step.postselect < 0
        else:
            corrections = [
                s for s in steps[idx + 1:]
                if isinstance(s, Gate) and s.control is not None and s.control.record_ids == (step.record_id,)
            ]
            inverted = bool(corrections) and corrections[0].control.invert
        out.append(GadgetRecord(step.record_id, line, a, inverted))
    return out


def strip_corrections(c: Circuit) -> Circuit:
    """
    Drops every gadget correction and appends the gadget records to the output.

    The result measures ``(x, b)``: the original outputs followed by one bit
    per gadget, where b = 0 means the gadget applied T and b = 1 T^dagger.

    Raises:
        ContractError: a control references anything but a single gadget record.
    """
    c = materialize_outputs(c)
    gadgets = gadget_records(c)
    gadget_ids = {g.record_id for g in gadgets}
    kept: list[Step] = []
    for idx, step in enumerate(c.steps):
        if isinstance(step, Gate) and step.control is not None:
            ids = step.control.record_ids
            if len(ids) != 1 or ids[0] not in gadget_ids:
                raise ContractError("control is not a gadget correction", indices=(idx,))
            continue
        kept.append(step)
    base = [rid for rid in c.output_records() if rid not in gadget_ids]
    bits = tuple(base) + tuple(g.record_id for g in gadgets)
    return normalize_measurements_to_end(c.with_steps(kept, output_bits=bits))


def a_to_zero_prefix(
    lines: Sequence[int], num_lines: int, taken: Iterable[str] = ()
) -> Circuit:
    """
    Fragment that turns |A> on each of ``lines`` into |0>.

    Per line: a fresh |A> ancilla, CX(line, ancilla), the ancilla measured and
    postselected onto -1 (leaving T^dagger|A> = |+>), then H. The fragment has
    ``num_lines + len(lines)`` lines, all fed |A>.
    """
    taken = set(taken)
    steps: list[Step] = []
    width = num_lines
    for line in lines:
        if not 0 <= line < num_lines:
            raise ContractError(f"conversion line {line} out of range")
        ancilla = width
        width += 1
        rid = fresh_record_id(taken, ZERO_RECORD_PREFIX)
        steps += [Gate("CX", (line, ancilla)), Measure(ancilla, rid, -1), Gate("H", (line,))]
    return Circuit(num_lines=width, inputs=(InputKind.MAGIC,) * width, steps=tuple(steps))


def convert_zero_inputs(c: Circuit) -> Circuit:
    """
    Realizes a mixed |0>/|A> circuit on an all-|A> register by prefixing
    :func:`a_to_zero_prefix` for every ``Z0`` line. Conversion ancillas are
    appended after the circuit's own lines.
    """
    if c.stab_block:
        raise ContractError("stabilizer-block inputs cannot be converted to |A> inputs")
    c = materialize_outputs(c)
    fragment = a_to_zero_prefix(c.zero_lines, c.num_lines, taken=c.record_ids())
    outputs = c.output_records()
    return replace(
        c,
        num_lines=fragment.num_lines,
        inputs=fragment.inputs,
        steps=fragment.steps + c.steps,
        output_bits=tuple(outputs),
    )
