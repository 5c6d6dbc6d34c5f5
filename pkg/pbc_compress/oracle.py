# /pbc-compress/pbc_compress/oracle.py
"""
Dense reference semantics.

Everything else in the package is checked against this module at desk scale:
statevectors are complex tensors of shape ``(2,) * n`` with line 0 as the
most significant axis, measurement branches are enumerated exhaustively, and
postselection keeps the unnormalized branch weight so that the acceptance
probability can be reported next to the conditional law.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from functools import reduce
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .circuit import Circuit, Gate, Measure, classify, materialize_outputs
from .config import settings
from .constants import MAGIC_A_AMPLITUDES
from .exceptions import BudgetExceededError, ContractError, DimensionError, ProbabilityZeroError, PostselectionMissError
from .flags import CircuitShape, InputKind, Metric
from .logging import setup_logger
from .models import DistanceReport
from .pauli import PauliOperator
from .utils import bit_to_outcome, format_probability, log_structured, outcome_to_bit

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)

_SQ2 = 1 / math.sqrt(2)
_W = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

GATE_MATRICES: dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2,
    "S": np.array([[1, 0], [0, 1j]], dtype=complex),
    "Sdg": np.array([[1, 0], [0, -1j]], dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
    "T": np.array([[1, 0], [0, _W]], dtype=complex),
    "Tdg": np.array([[1, 0], [0, np.conj(_W)]], dtype=complex),
    "SqrtX": np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
    "SqrtXdg": np.array([[1 - 1j, 1 + 1j], [1 + 1j, 1 - 1j]], dtype=complex) / 2,
    "SqrtY": np.array([[1 + 1j, -1 - 1j], [1 + 1j, 1 + 1j]], dtype=complex) / 2,
    "SqrtYdg": np.array([[1 - 1j, 1 - 1j], [-1 + 1j, 1 - 1j]], dtype=complex) / 2,
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "CS": np.diag([1, 1, 1, 1j]).astype(complex),
    "CSdg": np.diag([1, 1, 1, -1j]).astype(complex),
}


# --- Distribution -------------------------------------------------------------

class Distribution:
    """
    Exact finite law over bitstrings.

    Keys are bitstrings over ``records`` in order (+1 -> '0', -1 -> '1').

    Attributes:
        records (tuple[str, ...]): Record ids labelling the key positions.
        probs (dict[str, float]): Probabilities, keys sorted.
        weight (float): Pre-normalization weight (postselection acceptance).
        pruned_mass (float): Mass of branches dropped below the pruning threshold.
    """

    def __init__(
        self,
        records: Sequence[str],
        probs: Mapping[str, float],
        weight: float = 1.0,
        pruned_mass: float = 0.0,
    ):
        self.records = tuple(records)
        for key in probs:
            if len(key) != len(self.records):
                raise DimensionError(f"outcome {key!r} does not match {len(self.records)} records",
                                     expected=len(self.records), actual=len(key))
        self.probs = {k: float(probs[k]) for k in sorted(probs)}
        self.weight = float(weight)
        self.pruned_mass = float(pruned_mass)

    @classmethod
    def point(cls, records: Sequence[str], key: str) -> "Distribution":
        return cls(records, {key: 1.0})

    def __getitem__(self, key: str) -> float:
        return self.probs.get(key, 0.0)

    def __iter__(self):
        return iter(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def items(self):
        return self.probs.items()

    def total(self) -> float:
        return float(sum(self.probs.values()))

    def marginal(self, keep: Sequence[str]) -> "Distribution":
        """Law of the ``keep`` records, in the given order."""
        pos = []
        for rid in keep:
            if rid not in self.records:
                raise ContractError(f"record {rid} is not part of this distribution")
            pos.append(self.records.index(rid))
        acc: dict[str, float] = defaultdict(float)
        for key, p in self.probs.items():
            acc["".join(key[i] for i in pos)] += p
        return Distribution(keep, acc, self.weight, self.pruned_mass)

    def dump(self) -> str:
        """One ``bits probability`` line per outcome, sorted, 15 significant digits."""
        lines = ["# records " + " ".join(self.records)]
        lines += [f"{key or '-'} {format_probability(p)}" for key, p in self.probs.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        records: tuple[str, ...] = ()
        probs: dict[str, float] = {}
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("# records"):
                records = tuple(line.split()[2:])
                continue
            if not line or line.startswith("#"):
                continue
            key, value = line.split()
            probs["" if key == "-" else key] = float(value)
        return cls(records, probs)

    def __repr__(self) -> str:
        return f"Distribution(records={self.records}, probs={self.probs})"


# --- tensor helpers -----------------------------------------------------------

def apply_matrix(state: np.ndarray, matrix: np.ndarray, targets: Sequence[int]) -> np.ndarray:
    """Applies a 1- or 2-qubit matrix to the leading line axes of ``state``."""
    if len(targets) == 1:
        out = np.tensordot(matrix, state, axes=([1], [targets[0]]))
        return np.moveaxis(out, 0, targets[0])
    a, b = targets
    out = np.tensordot(matrix.reshape(2, 2, 2, 2), state, axes=([2, 3], [a, b]))
    return np.moveaxis(out, [0, 1], [a, b])


def apply_gate(state: np.ndarray, gate) -> np.ndarray:
    try:
        matrix = GATE_MATRICES[gate.name]
    except KeyError:
        raise ContractError(f"no dense matrix for gate {gate.name!r}") from None
    return apply_matrix(state, matrix, tuple(gate.targets))


def apply_pauli(state: np.ndarray, P: PauliOperator, offset: int = 0) -> np.ndarray:
    """P applied to lines ``offset .. offset + P.n - 1``."""
    out = state
    for q in range(P.n):
        axis = offset + q
        x, z = int(P.x_bits[q]), int(P.z_bits[q])
        if z:
            out = out.copy()
            idx = [slice(None)] * out.ndim
            idx[axis] = 1
            out[tuple(idx)] *= -1
        if x:
            out = np.flip(out, axis=axis)
        if x and z:
            out = out * 1j
    return out * P.sign


def _line_probability(state: np.ndarray, line: int, bit: int) -> float:
    return float(np.sum(np.abs(np.take(state, bit, axis=line)) ** 2))


def _project_line(state: np.ndarray, line: int, bit: int) -> np.ndarray:
    out = state.copy()
    idx = [slice(None)] * out.ndim
    idx[line] = 1 - bit
    out[tuple(idx)] = 0
    return out


def _normalize(state: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(state)
    return state / norm if norm > 0 else state


def stabilizer_block_state(gens: Sequence[PauliOperator]) -> np.ndarray:
    """The pure state fixed by r independent commuting generators on r lines."""
    r = len(gens)
    for k in range(2 ** r):
        v = np.zeros((2,) * r, dtype=complex)
        v[np.unravel_index(k, (2,) * r)] = 1
        for g in gens:
            v = (v + apply_pauli(v, g)) / 2
        if np.linalg.norm(v) > 1e-6:
            return _normalize(v)
    raise ContractError("stabilizer generators fix no state")


def initial_state(c: Circuit) -> np.ndarray:
    single = {
        InputKind.ZERO: np.array([1, 0], dtype=complex),
        InputKind.MAGIC: np.array(MAGIC_A_AMPLITUDES, dtype=complex),
    }
    r = len(c.stab_block)
    parts = [stabilizer_block_state(c.stab_block)] if r else []
    parts += [single[k] for k in c.inputs[r:]]
    if not parts:
        return np.ones((), dtype=complex)
    return reduce(np.multiply.outer, parts).astype(complex)


def _check_lines(num_lines: int, max_lines: Optional[int]) -> None:
    limit = settings.MAX_DENSE_LINES if max_lines is None else max_lines
    if num_lines > limit:
        log_structured(log, "warning", "dense budget exceeded", limit=limit, requested=num_lines)
        raise BudgetExceededError(f"{num_lines} lines exceed the dense budget", limit=limit, requested=num_lines)


def _key(outcomes: Mapping[str, int], records: Sequence[str]) -> str:
    return "".join(str(outcome_to_bit(outcomes[r])) for r in records)


# --- exact distributions ----------------------------------------------------------

def _unitary_fast_path(c: Circuit, records: tuple[str, ...], prune: float) -> Distribution:
    state = initial_state(c)
    measures: list[Measure] = []
    for step in c.steps:
        if isinstance(step, Gate):
            state = apply_gate(state, step)
        else:
            measures.append(step)
    lines = sorted({m.line for m in measures})
    probs = np.abs(state) ** 2
    other = tuple(i for i in range(c.num_lines) if i not in lines)
    marg = probs.sum(axis=other) if other else probs
    acc: dict[str, float] = defaultdict(float)
    pruned = 0.0
    for bits in itertools.product((0, 1), repeat=len(lines)):
        p = float(marg[bits]) if lines else float(marg)
        by_line = dict(zip(lines, bits))
        if any(m.postselect is not None and by_line[m.line] != outcome_to_bit(m.postselect) for m in measures):
            continue
        if p < prune:
            pruned += p
            continue
        outcomes = {m.record_id: bit_to_outcome(by_line[m.line]) for m in measures}
        acc[_key(outcomes, records)] += p
    return _finish(c, records, acc, pruned)


def _finish(c: Circuit, records, acc: Mapping[str, float], pruned: float,
            zero_record: Optional[str] = None) -> Distribution:
    weight = float(sum(acc.values()))
    if weight <= 0.0:
        if zero_record is None:
            post = list(c.postselected_records())
            zero_record = post[0] if post else None
        raise ProbabilityZeroError("postselection rejects every branch", record_id=zero_record)
    if pruned > 0:
        log_structured(log, "info", "pruned probability mass", pruned_mass=pruned)
    return Distribution(records, {k: v / weight for k, v in acc.items()}, weight=weight, pruned_mass=pruned)


def exact_distribution(
    c: Circuit,
    *,
    max_lines: Optional[int] = None,
    max_branches: Optional[int] = None,
    prune: Optional[float] = None,
) -> Distribution:
    """
    Exact output law of a circuit by branch enumeration.

    Outputs are materialized first, so the keys follow ``output_records()``.
    Postselected branches keep their unnormalized weight; the returned
    distribution is conditional and ``weight`` is the acceptance probability.

    Raises:
        BudgetExceededError: too many lines or branches.
        ProbabilityZeroError: no branch survives postselection.
    """
    c = materialize_outputs(c)
    records = tuple(c.output_records())
    _check_lines(c.num_lines, max_lines)
    prune = settings.PRUNE_THRESHOLD if prune is None else prune
    limit = settings.MAX_BRANCHES if max_branches is None else max_branches
    if classify(c).shape is CircuitShape.UNITARY:
        return _unitary_fast_path(c, records, prune)

    steps = list(c.steps)
    acc: dict[str, float] = defaultdict(float)
    pruned = 0.0
    created = 1
    zero_record = None
    stack = [(initial_state(c), 1.0, {}, 0)]
    while stack:
        state, prob, outcomes, cursor = stack.pop()
        while cursor < len(steps) and isinstance(steps[cursor], Gate):
            gate = steps[cursor]
            if gate.control is None or gate.control.fires(outcomes):
                state = apply_gate(state, gate)
            cursor += 1
        if cursor == len(steps):
            acc[_key(outcomes, records)] += prob
            continue
        m = steps[cursor]
        targets = (1, -1) if m.postselect is None else (m.postselect,)
        survivors = 0
        for outcome in targets:
            bit = outcome_to_bit(outcome)
            p = _line_probability(state, m.line, bit)
            w = prob * p
            if w < prune:
                if p > 0 or m.postselect is None:
                    pruned += w
                continue
            created += 1
            if created > limit:
                log_structured(log, "warning", "branch budget exceeded", limit=limit)
                raise BudgetExceededError("measurement branches exceed the budget", limit=limit, requested=created)
            survivors += 1
            stack.append((_project_line(state, m.line, bit) / math.sqrt(p), w, {**outcomes, m.record_id: outcome},
                          cursor + 1))
        if m.postselect is not None and not survivors:
            zero_record = m.record_id
    return _finish(c, records, acc, pruned, zero_record)


class DensePauliBackend:
    """
    Statevector of ``t`` lines fed |A>, answering Pauli measurements.

    Attributes:
        t (int): Register size.
        calls (int): Number of measurements performed.
    """

    def __init__(self, t: int, state: Optional[np.ndarray] = None):
        _check_lines(t, None)
        self.t = t
        if state is None:
            a = np.array(MAGIC_A_AMPLITUDES, dtype=complex)
            state = reduce(np.multiply.outer, [a] * t) if t else np.ones((), dtype=complex)
        self.state = np.asarray(state, dtype=complex)
        self.calls = 0

    def copy(self) -> "DensePauliBackend":
        out = DensePauliBackend(self.t, self.state.copy())
        out.calls = self.calls
        return out

    def _projected(self, P: PauliOperator, outcome: int) -> np.ndarray:
        if P.n != self.t:
            raise DimensionError("measurement on wrong register", expected=self.t, actual=P.n)
        return (self.state + outcome * apply_pauli(self.state, P)) / 2

    def probability(self, P: PauliOperator, outcome: int) -> float:
        return float(np.linalg.norm(self._projected(P, outcome)) ** 2)

    def project(self, P: PauliOperator, outcome: int) -> None:
        self.state = _normalize(self._projected(P, outcome))
        self.calls += 1

    def measure(self, P: PauliOperator, rng: np.random.Generator) -> int:
        p_plus = self.probability(P, 1)
        outcome = 1 if rng.random() < p_plus else -1
        self.project(P, outcome)
        return outcome


class DenseCliffordExecutor:
    """Runs emitted Clifford blocks and Z measurements on an all-|A> register."""

    def __init__(self, num_lines: int):
        self.backend = DensePauliBackend(num_lines)
        self.num_lines = num_lines

    @property
    def calls(self) -> int:
        return self.backend.calls

    def copy(self) -> "DenseCliffordExecutor":
        out = DenseCliffordExecutor.__new__(DenseCliffordExecutor)
        out.backend = self.backend.copy()
        out.num_lines = self.num_lines
        return out

    def apply(self, gates: Iterable) -> None:
        state = self.backend.state
        for g in gates:
            state = apply_gate(state, g)
        self.backend.state = state

    def z_operator(self, line: int) -> PauliOperator:
        return PauliOperator.single(self.num_lines, line, "Z")

    def probability_z(self, line: int, outcome: int) -> float:
        return self.backend.probability(self.z_operator(line), outcome)

    def project_z(self, line: int, outcome: int) -> None:
        self.backend.project(self.z_operator(line), outcome)

    def measure_z(self, line: int, rng: np.random.Generator) -> int:
        return self.backend.measure(self.z_operator(line), rng)


def exact_distribution_hybrid(
    prog,
    *,
    max_branches: Optional[int] = None,
    prune: Optional[float] = None,
) -> Distribution:
    """
    Full law of an interactive compiled program: every quantum branch on the
    dense |A>^t backend and both values of every classical coin, weighted.

    Branches that contradict a postselection are dropped; forced coins count
    with weight 1/2 so that ``weight`` is the acceptance probability.
    """
    from .compiler import Done, DrawRandom, EmitClassical, MeasurePauli

    prune = settings.PRUNE_THRESHOLD if prune is None else prune
    limit = settings.MAX_BRANCHES if max_branches is None else max_branches
    acc: dict[str, float] = defaultdict(float)
    pruned = 0.0
    created = 1
    stack = [(prog.fork(), DensePauliBackend(prog.t), 1.0)]
    while stack:
        p, backend, w = stack.pop()
        while True:
            try:
                action = p.next_action()
            except PostselectionMissError:
                action = None
            if action is None:
                break
            if isinstance(action, Done):
                acc[p.output_key()] += w
                break
            if isinstance(action, EmitClassical):
                if action.forced:
                    w *= 0.5
                continue
            if isinstance(action, DrawRandom):
                choices = [(lam, 0.5, None) for lam in (1, -1)]
            elif isinstance(action, MeasurePauli):
                targets = (1, -1) if action.postselect is None else (action.postselect,)
                choices = [(o, backend.probability(action.operator, o), action.operator) for o in targets]
            else:
                raise ContractError(f"unexpected action {action!r}")
            for value, pr, op in choices:
                if w * pr < prune:
                    if pr > 0:
                        pruned += w * pr
                    continue
                created += 1
                if created > limit:
                    raise BudgetExceededError("hybrid branches exceed the budget", limit=limit, requested=created)
                child = p.fork()
                child.submit(value)
                child_backend = backend.copy()
                if op is not None:
                    child_backend.project(op, value)
                stack.append((child, child_backend, w * pr))
            break
    weight = float(sum(acc.values()))
    if weight <= 0.0:
        raise ProbabilityZeroError("every branch of the compiled program is rejected")
    return Distribution(prog.output_records, {k: v / weight for k, v in acc.items()}, weight=weight,
                        pruned_mass=pruned)


def exact_distribution_static(
    c: Circuit,
    *,
    max_branches: Optional[int] = None,
    max_lines: Optional[int] = None,
) -> Distribution:
    """
    Exact law of the non-adaptive compile-and-emit route: enumerates every
    assignment of the classical coins, emits the unitary CM circuit for each,
    and mixes the reconstructed conditional laws by their acceptance.
    """
    from .compiler import compile_nonadaptive
    from .emit import emit_cm

    limit = settings.MAX_BRANCHES if max_branches is None else max_branches
    first = compile_nonadaptive(c, rng=np.random.default_rng(0), strict=False)
    free = first.free_lambda_count
    if 2 ** free > limit:
        raise BudgetExceededError("coin assignments exceed the budget", limit=limit, requested=2 ** free)
    acc: dict[str, float] = defaultdict(float)
    for bits in itertools.product((1, -1), repeat=free):
        static = compile_nonadaptive(c, lambdas=list(bits), strict=False)
        if static.rejected is not None:
            continue
        cm = emit_cm(static)
        try:
            d = exact_distribution(cm, max_lines=max_lines)
        except ProbabilityZeroError:
            continue
        scale = d.weight * 0.5 ** free * 0.5 ** static.forced_count
        for key, pr in d.items():
            acc[static.output_key_from_cm(key)] += scale * pr
    weight = float(sum(acc.values()))
    if weight <= 0.0:
        raise ProbabilityZeroError("postselection rejects every coin assignment")
    return Distribution(first.output_records, {k: v / weight for k, v in acc.items()}, weight=weight)


# --- metrics and unitary checks ----------------------------------------------------

def distance(p: Distribution, q: Distribution, metric: Metric | str = Metric.ADDITIVE) -> DistanceReport:
    """
    Additive distance sum |p - q| (with TVD half of it) and the multiplicative
    error max |p - q| / p, which is infinite when q charges an outcome p does not.
    """
    metric = Metric(metric)
    keys = set(p.probs) | set(q.probs)
    additive = float(sum(abs(p[k] - q[k]) for k in keys))
    infinite = False
    mult = 0.0
    for k in keys:
        if p[k] > 0:
            mult = max(mult, abs(p[k] - q[k]) / p[k])
        elif q[k] > 0:
            infinite = True
    if infinite:
        mult = math.inf
    value = additive if metric is Metric.ADDITIVE else mult
    return DistanceReport(metric=metric.value, value=value, additive=additive, tvd=additive / 2,
                          infinite=infinite and metric is Metric.MULTIPLICATIVE)


def unitary_of_gates(gates: Sequence, num_lines: int, max_lines: Optional[int] = None) -> np.ndarray:
    """Dense ``2^n x 2^n`` matrix of an uncontrolled gate list (first gate applied first)."""
    _check_lines(num_lines, max_lines)
    dim = 2 ** num_lines
    tensor = np.eye(dim, dtype=complex).reshape((2,) * num_lines + (dim,))
    for g in gates:
        if getattr(g, "control", None) is not None:
            raise ContractError("controlled gates have no fixed unitary")
        tensor = apply_gate(tensor, g)
    return tensor.reshape(dim, dim)


def unitary_matrix(c: Circuit, max_lines: Optional[int] = None) -> np.ndarray:
    if classify(c).shape is not CircuitShape.UNITARY:
        raise ContractError("circuit is not unitary (intermediate measurements or parity controls)")
    return unitary_of_gates(c.gates, c.num_lines, max_lines)


def phase_residual(u1: np.ndarray, u2: np.ndarray) -> tuple[float, float]:
    """
    Best global phase and the Frobenius residual ``||U1 - e^{i phi} U2||``,
    with ``phi = arg tr(U2^dagger U1)``.
    """
    if u1.shape != u2.shape:
        raise DimensionError("unitaries differ in size", expected=u1.shape[0], actual=u2.shape[0])
    overlap = np.trace(u2.conj().T @ u1)
    phi = float(np.angle(overlap)) if abs(overlap) > 0 else 0.0
    return phi, float(np.linalg.norm(u1 - np.exp(1j * phi) * u2))


def unitary_equal_up_to_phase(c1, c2, tol: Optional[float] = None) -> bool:
    """
    True iff U1 = e^{i phi} U2 for some phase, within ``tol`` in Frobenius norm.

    Accepts circuits or ready matrices.

    Raises:
        ContractError: either circuit is not unitary.
    """
    tol = settings.PHASE_TOLERANCE if tol is None else tol
    u1 = c1 if isinstance(c1, np.ndarray) else unitary_matrix(c1)
    u2 = c2 if isinstance(c2, np.ndarray) else unitary_matrix(c2)
    if u1.shape != u2.shape:
        return False
    return phase_residual(u1, u2)[1] <= tol
