# /pbc-compress/pbc_compress/compiler.py
"""
Compiler from Clifford circuits with |A> inputs to Pauli-based computations.

The compiler never simulates the |0> lines.  It keeps the gates seen so far as
a Clifford frame and, at each measurement of line l, turns Z_l into the
operator P it measures on the initial state.  P is then resolved in one of
three ways:

* P anticommutes with a tracked generator N: the outcome is a fair coin λ and
  every later operator is conjugated by ``V = (λN·N + λ·P)/√2``.
* P commutes with everything and lies in the tracked group: the outcome is
  the product of earlier outcomes.
* Otherwise P is measured on the |A> register, after its |0> prefix (all Z
  or I once the input block is rotated to |0>) is stripped.

Tracked generators are the input stabilizers ("dummies", outcome +1) and the
quantum measurements so far.  Gates are folded into the frame only when the
program reaches them, so a parity control is always evaluated on known
outcomes.

Execution is an action loop: ``next_action()`` returns what the caller must
do next and ``submit()`` answers ``DrawRandom`` and ``MeasurePauli``.
``compile_nonadaptive`` runs the same loop with every coin drawn up front
and quantum outcomes kept symbolic, giving a fixed measurement list.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np

from .circuit import Circuit, Gate, Measure, Step, classify, defer_measurements, materialize_outputs
from .config import settings
from .constants import PBC_HEADER
from .exceptions import CircuitParseError, ContractError, PostselectionMissError, ProbabilityZeroError
from .flags import CircuitShape, Direction, RecordKind
from .logging import setup_logger
from .pauli import (
    DependenceTracker,
    PauliOperator,
    RecordedMeasurement,
    commutes,
    conjugate_by_v,
    multiply_hermitian,
    restrict,
)
from .synthesis import synthesize
from .tableau import CliffordGate, conjugate_pauli, expand_to_basic
from .utils import log_structured, outcome_to_bit

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)


# --- actions -------------------------------------------------------------------

@dataclass(frozen=True)
class MeasurePauli:
    """Measure ``operator`` on the t-line |A> register and submit the ±1 outcome."""
    operator: PauliOperator
    postselect: Optional[int] = None
    index: int = 0
    record_id: Optional[str] = None


@dataclass(frozen=True)
class EmitClassical:
    """A record resolved without the quantum register; ``forced`` marks a postselected coin."""
    record_id: str
    outcome: int
    forced: bool = False


@dataclass(frozen=True)
class DrawRandom:
    """Submit a uniform ±1 coin for ``record_id``."""
    record_id: str


@dataclass(frozen=True)
class Done:
    sample: Mapping[str, int]


NextAction = Union[MeasurePauli, EmitClassical, DrawRandom, Done]


# --- symbolic outcomes ----------------------------------------------------------

class OutcomeExpr(NamedTuple):
    """
    ``sign · ∏ q_k`` over quantum measurement indices k.

    ``sign`` is this run's value. ``depends`` names the free coins
    (``("c", i)``) and unconstrained quantum outcomes (``("q", k)``) that
    were multiplied into it; an empty set means the sign is the same on
    every run.
    """
    sign: int
    quantum: frozenset = frozenset()
    depends: frozenset = frozenset()

    def times(self, other: "OutcomeExpr") -> "OutcomeExpr":
        return OutcomeExpr(self.sign * other.sign, self.quantum ^ other.quantum, self.depends ^ other.depends)

    def evaluate(self, values: Mapping[int, int] | Sequence[int]) -> int:
        out = self.sign
        for k in self.quantum:
            out *= values[k]
        return out


class RecordSource(NamedTuple):
    """How one circuit record is rebuilt from the quantum outcomes."""
    kind: RecordKind
    expr: OutcomeExpr
    lam_index: Optional[int] = None


class Substitution(NamedTuple):
    partner: PauliOperator
    partner_outcome: int
    operator: PauliOperator
    outcome: int
    # randomness behind partner_outcome · outcome
    depends: frozenset = frozenset()


def _require_clifford(c: Circuit) -> None:
    bad = tuple(i for i, s in enumerate(c.steps) if isinstance(s, Gate) and not s.is_clifford)
    if bad:
        raise ContractError("compiler input must be Clifford-only; gadgetize T gates first", indices=bad)


def _block_frame(stab_block: Sequence[PauliOperator]) -> list[CliffordGate]:
    """Gates U on lines 0..r-1 with U S_k U† = Z_k."""
    if not stab_block:
        return []
    return synthesize(stab_block, len(stab_block))


def _dummy_generators(c: Circuit) -> list[PauliOperator]:
    r = len(c.stab_block)
    gens = [g.embed(c.num_lines, range(r)) for g in c.stab_block]
    gens += [PauliOperator.single(c.num_lines, line, "Z") for line in c.zero_lines if line >= r]
    return gens


class CompiledProgram:
    """
    Interactive Pauli-based program for one Clifford circuit.

    Attributes:
        t (int): Size of the |A> register.
        n (int): Number of |0> lines eliminated.
        dummy_gens (list[PauliOperator]): Input stabilizers, outcome +1.
        history (list[RecordedMeasurement]): Every resolved record in program order.
        output_records (tuple[str, ...]): Records forming a sample.
    """

    def __init__(
        self,
        circuit: Circuit,
        *,
        postselected: bool = False,
        static: bool = False,
        lambdas: Optional[Sequence[int]] = None,
        rng: Optional[np.random.Generator] = None,
        strict: bool = True,
    ):
        c = materialize_outputs(circuit)
        _require_clifford(c)
        post = c.postselected_records()
        if post and not postselected:
            raise ContractError(f"circuit postselects {sorted(post)}; use compile_postselected")
        self.circuit = c
        self.postselected = postselected
        self.static = static
        self.strict = strict
        # first record whose coin-dependent postselection failed, in a non-strict static compile
        self.rejected: Optional[str] = None
        self._lambda_queue = list(lambdas) if lambdas is not None else None
        self._rng = rng
        self.num_lines = c.num_lines
        self.n = len(c.zero_lines)
        self.t = len(c.magic_lines)
        self._order = c.zero_lines + c.magic_lines
        self._block = _block_frame(c.stab_block)
        self.dummy_gens = _dummy_generators(c)
        self.output_records = tuple(c.output_records())

        self.tracker = DependenceTracker(c.num_lines)
        self._gen_values: list[OutcomeExpr] = []
        self.history: list[RecordedMeasurement] = []
        for g in self.dummy_gens:
            self.tracker.add(g)
            self._gen_values.append(OutcomeExpr(1))
            self.history.append(RecordedMeasurement(g, 1, RecordKind.DUMMY))

        self.frame: list[CliffordGate] = []
        self.substitutions: list[Substitution] = []
        self.quantum_ops: list[PauliOperator] = []
        self.quantum_post: list[Optional[int]] = []
        self._quantum_values: dict[int, int] = {}
        self.lambdas: list[int] = []
        self.lambda_forced: list[bool] = []
        self.sources: dict[str, RecordSource] = {}
        self.outcomes: dict[str, int] = {}
        self._cursor = 0
        self._awaiting: Optional[NextAction] = None
        self._pending: Optional[tuple] = None
        self._done: Optional[Done] = None

    # --- views ---------------------------------------------------------

    @property
    def quantum_count(self) -> int:
        return len(self.quantum_ops)

    @property
    def is_done(self) -> bool:
        return self._done is not None

    @property
    def pending(self) -> tuple[Step, ...]:
        """Circuit steps not yet processed."""
        return self.circuit.steps[self._cursor:]

    @property
    def free_lambda_count(self) -> int:
        return sum(1 for f in self.lambda_forced if not f)

    @property
    def forced_count(self) -> int:
        return sum(self.lambda_forced)

    @property
    def classical_count(self) -> int:
        return sum(1 for s in self.sources.values() if s.kind is RecordKind.CLASSICAL)

    def fork(self) -> "CompiledProgram":
        """Independent copy, used to branch the interactive loop."""
        return copy.deepcopy(self)

    def output_key(self) -> str:
        return "".join(str(outcome_to_bit(self.outcomes[rid])) for rid in self.output_records)

    # --- action loop ---------------------------------------------------

    def next_action(self) -> NextAction:
        """
        Advances to the next action. Repeated calls while an action awaits
        ``submit`` return that same action.

        Raises:
            ProbabilityZeroError: a deterministic postselection can never hold.
            PostselectionMissError: this run's coins or outcomes violate a postselection.
        """
        if self._awaiting is not None:
            return self._awaiting
        if self._done is not None:
            return self._done
        steps = self.circuit.steps
        while self._cursor < len(steps):
            step = steps[self._cursor]
            if isinstance(step, Gate):
                self._cursor += 1
                if step.control is None or step.control.fires(self.outcomes):
                    self.frame.extend(expand_to_basic(step))
                continue
            return self._measure(step)
        self._done = self._finish()
        return self._done

    def submit(self, value: int) -> None:
        """Answers the awaiting ``DrawRandom`` or ``MeasurePauli``."""
        action = self._awaiting
        if action is None:
            raise ContractError("no action is waiting for an outcome")
        if value not in (1, -1):
            raise ValueError(f"outcome must be +1 or -1, got {value!r}")
        if isinstance(action, DrawRandom):
            self._resolve_coin(value, forced=False)
        else:
            if action.postselect is not None and value != action.postselect:
                raise PostselectionMissError(
                    f"record {action.record_id} postselected on {action.postselect:+d}",
                    record_id=action.record_id, expected=action.postselect, observed=value,
                )
            self._quantum_values[action.index] = value
            self.outcomes[action.record_id] = value
            full = self.tracker.generators[len(self.dummy_gens) + action.index]
            self.history.append(RecordedMeasurement(full, value, RecordKind.QUANTUM, action.record_id))
            self._cursor += 1
        self._awaiting = None

    # --- measurement resolution ------------------------------------------

    def _measured_operator(self, line: int) -> tuple[PauliOperator, frozenset]:
        """The operator measured on the initial state, with the randomness its sign picked up."""
        P = conjugate_pauli(self.frame, PauliOperator.single(self.num_lines, line, "Z"), Direction.REVERSE)
        depends = frozenset()
        for sub in self.substitutions:
            # only the one-sided cases multiply by partner_outcome · outcome
            if commutes(P, sub.partner) != commutes(P, sub.operator):
                depends ^= sub.depends
            P = conjugate_by_v(P, sub.partner, sub.partner_outcome, sub.operator, sub.outcome)
        return P, depends

    def _free_labels(self, expr: OutcomeExpr) -> frozenset:
        """Randomness an outcome expression still varies with on this run's path."""
        free = {("q", k) for k in expr.quantum if self.quantum_post[k] is None}
        return expr.depends ^ frozenset(free)

    def _compressed(self, P: PauliOperator) -> PauliOperator:
        """Rotates the input block to |0>, moves the |0> lines first and strips them."""
        if self._block:
            P = conjugate_pauli(self._block, P, Direction.FORWARD)
        return restrict(P.permuted(self._order), self.n)

    def _measure(self, step: Measure) -> NextAction:
        P, depends = self._measured_operator(step.line)
        anti = self.tracker.anticommuting(P)
        if anti:
            return self._anticommuting(P, anti, step)
        found = self.tracker.decompose(P)
        if found is not None:
            return self._dependent(P, found, step, depends)
        return self._independent(P, step)

    def _anticommuting(self, P: PauliOperator, anti: list[int], step: Measure) -> NextAction:
        dummies = [i for i in anti if i < len(self.dummy_gens)]
        partner = dummies[0] if dummies else anti[0]
        value = self._gen_values[partner]
        if value.quantum:
            if self.static:
                raise ContractError(
                    f"record {step.record_id} anticommutes only with quantum measurements; "
                    "the static compile cannot resolve it", indices=(self._cursor,),
                )
            lam_n = value.evaluate(self._quantum_values)
        else:
            lam_n = value.sign
        self._pending = (self.tracker.generators[partner], lam_n, self._free_labels(value), P, step.record_id)
        if step.postselect is not None:
            self._resolve_coin(step.postselect, forced=True)
            return EmitClassical(step.record_id, step.postselect, forced=True)
        if self.static:
            lam = self._next_coin()
            self._resolve_coin(lam, forced=False)
            return EmitClassical(step.record_id, lam)
        self._awaiting = DrawRandom(step.record_id)
        return self._awaiting

    def _next_coin(self) -> int:
        if self._lambda_queue is not None:
            if not self._lambda_queue:
                raise ContractError("not enough coin values supplied for the static compile")
            lam = int(self._lambda_queue.pop(0))
            if lam not in (1, -1):
                raise ValueError(f"coin values must be +1 or -1, got {lam!r}")
            return lam
        if self._rng is None:
            self._rng = np.random.default_rng()
        return 1 if self._rng.integers(2) == 0 else -1

    def _resolve_coin(self, lam: int, forced: bool) -> None:
        partner, lam_n, depends, P, rid = self._pending
        self._pending = None
        if not forced:
            depends ^= {("c", len(self.lambdas))}
        self.substitutions.append(Substitution(partner, lam_n, P, lam, depends))
        self.sources[rid] = RecordSource(RecordKind.RANDOM, OutcomeExpr(lam), len(self.lambdas))
        self.lambdas.append(lam)
        self.lambda_forced.append(forced)
        self.outcomes[rid] = lam
        self.history.append(RecordedMeasurement(P, lam, RecordKind.RANDOM, rid))
        self._cursor += 1

    def _fold_postselected(self, expr: OutcomeExpr) -> OutcomeExpr:
        sign = expr.sign
        free = set()
        for k in expr.quantum:
            if self.quantum_post[k] is None:
                free.add(k)
            else:
                sign *= self.quantum_post[k]
        return OutcomeExpr(sign, frozenset(free), expr.depends)

    def _reject(self, step: Measure, value: int, expr: OutcomeExpr) -> None:
        """
        A determined record contradicts its postselection. The failure is
        certain when ``expr`` varies with no free coin and no unconstrained
        quantum outcome; otherwise only this run misses.
        """
        msg = f"record {step.record_id} is determined as {value:+d} but postselected on {step.postselect:+d}"
        if not self._free_labels(expr):
            raise ProbabilityZeroError(msg, record_id=step.record_id)
        if self.static and not self.strict:
            self.rejected = self.rejected or step.record_id
            return
        raise PostselectionMissError(msg, record_id=step.record_id, expected=step.postselect, observed=value)

    def _dependent(
        self, P: PauliOperator, found: tuple[int, tuple[int, ...]], step: Measure, depends: frozenset = frozenset()
    ) -> NextAction:
        sign, indices = found
        expr = OutcomeExpr(sign, depends=depends)
        for i in indices:
            expr = expr.times(self._gen_values[i])
        rid = step.record_id
        if not self.static:
            value = expr.evaluate(self._quantum_values)
            if step.postselect is not None and value != step.postselect:
                self._reject(step, value, expr)
            return self._emit_classical(P, rid, OutcomeExpr(value), value)

        expr = self._fold_postselected(expr)
        if step.postselect is None:
            value = expr.sign if not expr.quantum else None
            return self._emit_classical(P, rid, expr, value)
        if not expr.quantum:
            if expr.sign != step.postselect:
                self._reject(step, expr.sign, expr)
        else:
            self._rebase(expr, step.postselect)
        return self._emit_classical(P, rid, OutcomeExpr(step.postselect), step.postselect)

    def _rebase(self, expr: OutcomeExpr, target: int) -> None:
        """
        Turns a postselection on ``expr`` into a postselected quantum measurement.

        The last free measurement j in ``expr`` is replaced by the product
        operator ``sign · ∏ P̃_k``, whose outcome m_j is postselected; every
        expression using q_j is rewritten with ``q_j = sign · m_j · ∏_{k≠j} q_k``.
        """
        j = max(expr.quantum)
        rest = expr.quantum - {j}
        op = self.quantum_ops[j] if expr.sign > 0 else -self.quantum_ops[j]
        for k in sorted(rest):
            op = multiply_hermitian(op, self.quantum_ops[k])
        self.quantum_ops[j] = op
        self.quantum_post[j] = target

        def rewrite(e: OutcomeExpr) -> OutcomeExpr:
            if j not in e.quantum:
                return e
            return self._fold_postselected(OutcomeExpr(e.sign * expr.sign, e.quantum ^ rest, e.depends ^ expr.depends))

        self._gen_values = [rewrite(e) for e in self._gen_values]
        self.sources = {rid: s._replace(expr=rewrite(s.expr)) for rid, s in self.sources.items()}

    def _emit_classical(self, P: PauliOperator, rid: str, expr: OutcomeExpr, value: Optional[int]) -> EmitClassical:
        self.sources[rid] = RecordSource(RecordKind.CLASSICAL, expr)
        if value is not None:
            self.outcomes[rid] = value
        self.history.append(RecordedMeasurement(P, value, RecordKind.CLASSICAL, rid))
        self._cursor += 1
        return EmitClassical(rid, value if value is not None else expr.sign)

    def _independent(self, P: PauliOperator, step: Measure) -> NextAction:
        compressed = self._compressed(P)
        k = len(self.quantum_ops)
        self.tracker.add(P)
        self._gen_values.append(OutcomeExpr(1, frozenset({k})))
        self.quantum_ops.append(compressed)
        self.quantum_post.append(step.postselect)
        self.sources[step.record_id] = RecordSource(RecordKind.QUANTUM, OutcomeExpr(1, frozenset({k})))
        action = MeasurePauli(compressed, step.postselect, k, step.record_id)
        if self.static:
            if step.postselect is not None:
                self.outcomes[step.record_id] = step.postselect
            self.history.append(RecordedMeasurement(P, step.postselect, RecordKind.QUANTUM, step.record_id))
            self._cursor += 1
            return action
        self._awaiting = action
        return action

    def _finish(self) -> Done:
        if self.quantum_count > self.t:
            raise ContractError(f"{self.quantum_count} quantum measurements on {self.t} lines")
        log_structured(
            log, "info", "program compiled",
            t=self.t, n=self.n, s=self.quantum_count, lambda_count=self.free_lambda_count,
            forced_count=self.forced_count, classical_count=self.classical_count, static=self.static,
        )
        if self.static:
            return Done({})
        return Done({rid: self.outcomes[rid] for rid in self.output_records})

    def to_static(self) -> "StaticProgram":
        if not self.static or self._done is None:
            raise ContractError("only a finished static compile has a fixed measurement list")
        return StaticProgram(
            t=self.t,
            n=self.n,
            operators=list(self.quantum_ops),
            postselect=list(self.quantum_post),
            lambdas=list(self.lambdas),
            forced=list(self.lambda_forced),
            sources=dict(self.sources),
            output_records=self.output_records,
            rejected=self.rejected,
        )


# --- static programs ------------------------------------------------------------

class StaticProgram:
    """
    Fixed list of commuting, independent Pauli measurements on t lines plus
    the table rebuilding every record from their outcomes.

    Attributes:
        operators (list[PauliOperator]): P̃_1..P̃_s, each on t qubits.
        postselect (list[int | None]): Per-measurement postselection target.
        lambdas (list[int]): Coin values in draw order.
        forced (list[bool]): Whether each coin was fixed by a postselection.
        sources (dict[str, RecordSource]): Rebuild rule per record.
        output_records (tuple[str, ...]): Records forming a sample.
        rejected (str | None): Record whose postselection these coins violate.
    """

    def __init__(self, t, n, operators, postselect, lambdas, forced, sources, output_records, rejected=None):
        self.t = t
        self.n = n
        self.operators = list(operators)
        self.postselect = list(postselect)
        self.lambdas = list(lambdas)
        self.forced = list(forced)
        self.sources = dict(sources)
        self.output_records = tuple(output_records)
        self.rejected = rejected

    @property
    def s(self) -> int:
        return len(self.operators)

    @property
    def free_lambda_count(self) -> int:
        return sum(1 for f in self.forced if not f)

    @property
    def forced_count(self) -> int:
        return sum(self.forced)

    @property
    def classical_count(self) -> int:
        return sum(1 for s in self.sources.values() if s.kind is RecordKind.CLASSICAL)

    def free_measurements(self) -> list[int]:
        return [k for k, p in enumerate(self.postselect) if p is None]

    def reconstruct(self, quantum_outcomes: Sequence[int]) -> dict[str, int]:
        """
        Output record values for one joint outcome of the measurement list.

        Raises:
            PostselectionMissError: an outcome differs from its postselection.
        """
        if len(quantum_outcomes) != self.s:
            raise ContractError(f"expected {self.s} outcomes, got {len(quantum_outcomes)}")
        for k, (got, want) in enumerate(zip(quantum_outcomes, self.postselect)):
            if want is not None and got != want:
                raise PostselectionMissError(f"measurement {k} postselected on {want:+d}",
                                             expected=want, observed=got)
        return {rid: self.sources[rid].expr.evaluate(quantum_outcomes) for rid in self.output_records}

    def output_key(self, quantum_outcomes: Sequence[int]) -> str:
        values = self.reconstruct(quantum_outcomes)
        return "".join(str(outcome_to_bit(values[rid])) for rid in self.output_records)

    def output_key_from_cm(self, key: str) -> str:
        """
        Maps a bit string over the free measurements (the emitted CM circuit's
        outputs) to a bit string over this program's output records.
        """
        free = self.free_measurements()
        if len(key) != len(free):
            raise ContractError(f"key {key!r} does not cover the {len(free)} free measurements")
        outcomes = [p if p is not None else 0 for p in self.postselect]
        for k, bit in zip(free, key):
            outcomes[k] = -1 if bit == "1" else 1
        return self.output_key(outcomes)

    # --- text form -----------------------------------------------------

    def dump(self) -> str:
        lines = [f"{PBC_HEADER} t={self.t} s={self.s}", f"n {self.n}"]
        for op, post in zip(self.operators, self.postselect):
            text = str(op)
            if post is not None:
                text += f" post {post:+d}"
            lines.append(text)
        coins = [f"{lam:+d}" + ("*" if forced else "") for lam, forced in zip(self.lambdas, self.forced)]
        lines.append(" ".join(["lambda"] + coins))
        for rid, src in self.sources.items():
            if src.kind is RecordKind.RANDOM:
                lines.append(f"record {rid} random {src.lam_index}")
            elif src.kind is RecordKind.QUANTUM and src.expr.sign == 1 and len(src.expr.quantum) == 1:
                lines.append(f"record {rid} quantum {next(iter(src.expr.quantum))}")
            else:
                idx = " ".join(str(k) for k in sorted(src.expr.quantum))
                lines.append(f"record {rid} classical {src.expr.sign:+d} {idx}".rstrip())
        lines.append(" ".join(["output"] + list(self.output_records)))
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "StaticProgram":
        rows = [(i, l.strip()) for i, l in enumerate(text.splitlines(), start=1) if l.strip()]
        if not rows:
            raise CircuitParseError("empty program")
        line_no, header = rows[0]
        parts = header.split()
        try:
            if parts[0] != PBC_HEADER:
                raise ValueError
            fields = dict(p.split("=", 1) for p in parts[1:])
            t, s = int(fields["t"]), int(fields["s"])
        except (ValueError, KeyError, IndexError):
            raise CircuitParseError(f"bad header {header!r}", line_no) from None
        n = 0
        operators: list[PauliOperator] = []
        postselect: list[Optional[int]] = []
        lambdas: list[int] = []
        forced: list[bool] = []
        sources: dict[str, RecordSource] = {}
        outputs: tuple[str, ...] = ()
        for line_no, body in rows[1:]:
            tok = body.split()
            try:
                if tok[0] == "n":
                    n = int(tok[1])
                elif tok[0][0] in "+-" and len(operators) < s:
                    op = PauliOperator.from_string(tok[0])
                    if op.n != t:
                        raise ValueError(f"operator {tok[0]} is not on {t} lines")
                    post = None
                    if len(tok) == 3 and tok[1] == "post":
                        post = int(tok[2])
                    elif len(tok) != 1:
                        raise ValueError("expected '<pauli> [post +1|-1]'")
                    operators.append(op)
                    postselect.append(post)
                elif tok[0] == "lambda":
                    for c in tok[1:]:
                        forced.append(c.endswith("*"))
                        lambdas.append(int(c.rstrip("*")))
                elif tok[0] == "record":
                    rid, kind = tok[1], tok[2]
                    if kind == "random":
                        k = int(tok[3])
                        sources[rid] = RecordSource(RecordKind.RANDOM, OutcomeExpr(lambdas[k]), k)
                    elif kind == "quantum":
                        sources[rid] = RecordSource(RecordKind.QUANTUM, OutcomeExpr(1, frozenset({int(tok[3])})))
                    elif kind == "classical":
                        expr = OutcomeExpr(int(tok[3]), frozenset(int(k) for k in tok[4:]))
                        sources[rid] = RecordSource(RecordKind.CLASSICAL, expr)
                    else:
                        raise ValueError(f"unknown record kind {kind!r}")
                elif tok[0] == "output":
                    outputs = tuple(tok[1:])
                else:
                    raise ValueError(f"unknown statement {tok[0]!r}")
            except (ValueError, IndexError) as e:
                raise CircuitParseError(str(e) or f"malformed line {body!r}", line_no) from None
        if len(operators) != s:
            raise CircuitParseError(f"header announces {s} measurements, found {len(operators)}")
        missing = [r for r in outputs if r not in sources]
        if missing:
            raise CircuitParseError(f"output record {missing[0]} has no reconstruction entry")
        return cls(t, n, operators, postselect, lambdas, forced, sources, outputs)


# --- entry points ---------------------------------------------------------------

def compile(c: Circuit) -> CompiledProgram:
    """
    Interactive program for a Clifford circuit without postselection.

    Raises:
        ContractError: non-Clifford gates, postselected measurements or a bad input block.
    """
    return CompiledProgram(c)


def compile_postselected(c: Circuit) -> CompiledProgram:
    """
    Like :func:`compile`, but postselected anticommuting measurements fix
    their coin to the target and postselected quantum measurements carry the
    flag. A determined record that contradicts its postselection raises
    :class:`ProbabilityZeroError` when its value varies with no free coin and
    no unconstrained quantum outcome, and :class:`PostselectionMissError`
    when only this run's draws violate it.
    """
    return CompiledProgram(c, postselected=True)


def compile_nonadaptive(
    c: Circuit,
    *,
    rng: Optional[np.random.Generator] = None,
    lambdas: Optional[Sequence[int]] = None,
    strict: bool = True,
) -> StaticProgram:
    """
    Fixed measurement list for a circuit without parity controls.

    Intermediate measurements are deferred first, so every anticommuting
    partner is an input stabilizer and all coins can be drawn up front,
    either from ``lambdas`` (free coins in draw order) or from ``rng``.
    With ``strict=False`` a coin assignment that violates a postselection is
    marked in ``rejected`` instead of raising.

    Raises:
        ContractError: adaptive or non-Clifford input, or leftover coin values.
        PostselectionMissError: strict compile whose coins violate a postselection.
    """
    if classify(c).shape is CircuitShape.ADAPTIVE:
        raise ContractError("adaptive circuit; use compile() for the interactive program")
    deferred = defer_measurements(materialize_outputs(c))
    prog = CompiledProgram(deferred, postselected=True, static=True, lambdas=lambdas, rng=rng, strict=strict)
    while not isinstance(prog.next_action(), Done):
        pass
    if prog._lambda_queue:
        raise ContractError(f"{len(prog._lambda_queue)} coin values left unused")
    return prog.to_static()


def run_with(prog: CompiledProgram | StaticProgram, backend, rng: np.random.Generator) -> dict[str, int]:
    """
    Drives a program to a sample of the original circuit's outputs.

    ``backend.measure(P, rng)`` answers quantum measurements; coins come from ``rng``.

    Raises:
        PostselectionMissError: the backend outcome violates a postselection.
    """
    if isinstance(prog, StaticProgram):
        outcomes = [backend.measure(P, rng) for P in prog.operators]
        return prog.reconstruct(outcomes)
    calls = 0
    while True:
        action = prog.next_action()
        if isinstance(action, Done):
            return dict(action.sample)
        if isinstance(action, DrawRandom):
            prog.submit(1 if rng.integers(2) == 0 else -1)
        elif isinstance(action, MeasurePauli):
            calls += 1
            if calls > prog.t:
                raise ContractError(f"more than t={prog.t} quantum measurements requested")
            prog.submit(backend.measure(action.operator, rng))
