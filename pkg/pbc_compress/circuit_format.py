# /pbc-compress/pbc_compress/circuit_format.py
"""
Line-oriented text format for circuits.

    qubits N
    input K0 K1 ...                    (Z0 or A per line)
    input-stab "<pauli>" ...           (r generators on lines 0..r-1)
    gate NAME t0 [t1] [if m3^m7[^1]]
    measure LINE -> mID [post +1|-1]
    output LINE ...
    output-bits mID ...

One statement per line, ``#`` starts a comment.  ``serialize`` writes the
canonical form, so ``serialize(parse(serialize(c))) == serialize(c)``.
"""

from __future__ import annotations

import re
import shlex
from pathlib import Path
from typing import Optional

from .circuit import Circuit, Gate, Measure, ParityControl, Step
from .constants import (
    COMMENT_CHAR,
    KW_GATE,
    KW_INPUT,
    KW_INPUT_STAB,
    KW_MEASURE,
    KW_OUTPUT,
    KW_OUTPUT_BITS,
    KW_QUBITS,
    SINGLE_QUBIT_GATES,
    TWO_QUBIT_GATES,
)
from .exceptions import CircuitParseError, ContractError
from .flags import InputKind
from .pauli import PauliOperator

RECORD_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_GATE_NAMES = {name.lower(): name for name in SINGLE_QUBIT_GATES | TWO_QUBIT_GATES}


def _int(token: str, what: str, line_no: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise CircuitParseError(f"{what} must be an integer, got {token!r}", line_no) from None


def _record_id(token: str, line_no: int) -> str:
    if not RECORD_ID_RE.match(token):
        raise CircuitParseError(f"invalid record id {token!r}", line_no)
    return token


def _parse_control(expr: str, line_no: int) -> ParityControl:
    parts = [p.strip() for p in expr.split("^")]
    invert = False
    records: list[str] = []
    for p in parts:
        if p in ("0", "1"):
            invert ^= p == "1"
        else:
            records.append(_record_id(p, line_no))
    if not records:
        raise CircuitParseError("parity control names no record", line_no)
    return ParityControl(tuple(records), invert)


class _Parser:
    """Single-pass statement parser; semantic checks carry the source line number."""

    def __init__(self):
        self.num_lines: Optional[int] = None
        self.inputs: Optional[list[InputKind]] = None
        self.stab_block: list[PauliOperator] = []
        self.steps: list[Step] = []
        self.output_lines: list[int] = []
        self.output_bits: list[str] = []
        self.records: set[str] = set()
        self.post_records: set[str] = set()

    def _need_qubits(self, line_no: int) -> int:
        if self.num_lines is None:
            raise CircuitParseError(f"'{KW_QUBITS}' must come first", line_no)
        return self.num_lines

    def _line(self, token: str, line_no: int) -> int:
        n = self._need_qubits(line_no)
        value = _int(token, "line", line_no)
        if not 0 <= value < n:
            raise CircuitParseError(f"line {value} out of range 0..{n - 1}", line_no)
        return value

    def statement(self, tokens: list[str], line_no: int) -> None:
        kw, args = tokens[0], tokens[1:]
        if kw == KW_QUBITS:
            if self.num_lines is not None:
                raise CircuitParseError(f"duplicate '{KW_QUBITS}'", line_no)
            if len(args) != 1:
                raise CircuitParseError(f"'{KW_QUBITS}' takes one count", line_no)
            self.num_lines = _int(args[0], "qubit count", line_no)
            if self.num_lines < 0:
                raise CircuitParseError("qubit count must be non-negative", line_no)
        elif kw == KW_INPUT:
            n = self._need_qubits(line_no)
            if self.inputs is not None:
                raise CircuitParseError(f"duplicate '{KW_INPUT}'", line_no)
            if len(args) != n:
                raise CircuitParseError(f"'{KW_INPUT}' needs {n} kinds, got {len(args)}", line_no)
            try:
                self.inputs = [InputKind(a) for a in args]
            except ValueError as e:
                raise CircuitParseError(f"unknown input kind: {e}", line_no) from None
        elif kw == KW_INPUT_STAB:
            self._need_qubits(line_no)
            if self.stab_block:
                raise CircuitParseError(f"duplicate '{KW_INPUT_STAB}'", line_no)
            try:
                self.stab_block = [PauliOperator.from_string(a) for a in args]
            except ValueError as e:
                raise CircuitParseError(str(e), line_no) from None
            if not self.stab_block:
                raise CircuitParseError(f"'{KW_INPUT_STAB}' needs at least one generator", line_no)
        elif kw == KW_GATE:
            self._gate(args, line_no)
        elif kw == KW_MEASURE:
            self._measure(args, line_no)
        elif kw == KW_OUTPUT:
            for a in args:
                line = self._line(a, line_no)
                if line in self.output_lines:
                    raise CircuitParseError(f"output line {line} repeated", line_no)
                self.output_lines.append(line)
        elif kw == KW_OUTPUT_BITS:
            for a in args:
                rid = _record_id(a, line_no)
                if rid not in self.records:
                    raise CircuitParseError(f"output record {rid} is not measured before this point", line_no)
                if rid in self.post_records:
                    raise CircuitParseError(f"postselected record {rid} cannot be an output", line_no)
                self.output_bits.append(rid)
        else:
            raise CircuitParseError(f"unknown statement {kw!r}", line_no)

    def _gate(self, args: list[str], line_no: int) -> None:
        self._need_qubits(line_no)
        if not args:
            raise CircuitParseError("gate needs a name", line_no)
        name = _GATE_NAMES.get(args[0].lower())
        if name is None:
            raise CircuitParseError(f"unknown gate {args[0]!r}", line_no)
        rest = args[1:]
        control = None
        if "if" in rest:
            at = rest.index("if")
            if at != len(rest) - 2:
                raise CircuitParseError("'if' must be followed by exactly one parity expression", line_no)
            control = _parse_control(rest[-1], line_no)
            undefined = [r for r in control.record_ids if r not in self.records]
            if undefined:
                raise CircuitParseError(f"control references undefined record {undefined[0]}", line_no)
            rest = rest[:at]
        arity = 1 if name in SINGLE_QUBIT_GATES else 2
        if len(rest) != arity:
            raise CircuitParseError(f"gate {name} takes {arity} target(s)", line_no)
        targets = tuple(self._line(a, line_no) for a in rest)
        if arity == 2 and targets[0] == targets[1]:
            raise CircuitParseError(f"gate {name} repeats line {targets[0]}", line_no)
        self.steps.append(Gate(name, targets, control))

    def _measure(self, args: list[str], line_no: int) -> None:
        if len(args) not in (3, 5) or args[1] != "->":
            raise CircuitParseError("expected 'measure LINE -> ID [post +1|-1]'", line_no)
        line = self._line(args[0], line_no)
        rid = _record_id(args[2], line_no)
        if rid in self.records:
            raise CircuitParseError(f"duplicate record id {rid}", line_no)
        post = None
        if len(args) == 5:
            if args[3] != "post" or args[4] not in ("+1", "-1", "1"):
                raise CircuitParseError("postselection must read 'post +1' or 'post -1'", line_no)
            post = -1 if args[4] == "-1" else 1
            self.post_records.add(rid)
        self.records.add(rid)
        self.steps.append(Measure(line, rid, post))

    def finish(self) -> Circuit:
        if self.num_lines is None:
            raise CircuitParseError(f"missing '{KW_QUBITS}' statement")
        inputs = self.inputs if self.inputs is not None else [InputKind.ZERO] * self.num_lines
        try:
            return Circuit(
                num_lines=self.num_lines,
                inputs=tuple(inputs),
                steps=tuple(self.steps),
                stab_block=tuple(self.stab_block),
                output_lines=tuple(self.output_lines),
                output_bits=tuple(self.output_bits),
            )
        except ContractError as e:
            # step-level problems were reported above with their line; what is left is circuit-wide
            raise CircuitParseError(str(e)) from e


def parse(text: str) -> Circuit:
    """
    Parses circuit text.

    Raises:
        CircuitParseError: syntax or semantic problem, with the 1-based line number when known.
    """
    parser = _Parser()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split(COMMENT_CHAR, 1)[0].strip()
        if not body:
            continue
        try:
            tokens = shlex.split(body)
        except ValueError as e:
            raise CircuitParseError(f"unbalanced quotes: {e}", line_no) from None
        parser.statement(tokens, line_no)
    return parser.finish()


def load(path: str | Path) -> Circuit:
    return parse(Path(path).read_text(encoding="utf-8"))


def _format_step(step: Step) -> str:
    if isinstance(step, Gate):
        text = f"{KW_GATE} {step.name} " + " ".join(str(t) for t in step.targets)
        if step.control is not None:
            expr = "^".join(step.control.record_ids)
            if step.control.invert:
                expr += "^1"
            text += f" if {expr}"
        return text
    text = f"{KW_MEASURE} {step.line} -> {step.record_id}"
    if step.postselect is not None:
        text += f" post {'+1' if step.postselect > 0 else '-1'}"
    return text


def serialize(c: Circuit) -> str:
    """Canonical text form; output statements come last."""
    lines = [f"{KW_QUBITS} {c.num_lines}"]
    if c.num_lines:
        lines.append(f"{KW_INPUT} " + " ".join(k.value for k in c.inputs))
    if c.stab_block:
        lines.append(f"{KW_INPUT_STAB} " + " ".join(f'"{g}"' for g in c.stab_block))
    lines.extend(_format_step(s) for s in c.steps)
    if c.output_lines:
        lines.append(f"{KW_OUTPUT} " + " ".join(str(l) for l in c.output_lines))
    if c.output_bits:
        lines.append(f"{KW_OUTPUT_BITS} " + " ".join(c.output_bits))
    return "\n".join(lines) + "\n"


def dump(c: Circuit, path: str | Path) -> None:
    Path(path).write_text(serialize(c), encoding="utf-8")
