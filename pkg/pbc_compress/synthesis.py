# /pbc-compress/pbc_compress/synthesis.py
"""
Clifford synthesis for a set of commuting Pauli operators.

``synthesize`` completes the set to a full stabilizer/destabilizer tableau and
reduces that tableau to the identity column by column, recording every gate it
applies.  The recorded list U then satisfies ``U P_k U† = Z_k`` for each input
operator, equivalently ``U† Z_k U = P_k``.  Every call re-checks this by
conjugating through the result.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .config import settings
from .exceptions import ContractError
from .flags import Direction
from .logging import setup_logger
from .pauli import PauliOperator
from .tableau import CliffordGate, StabilizerTableau, conjugate_pauli, extend_to_full_set
from .utils import log_structured

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)


class _Sweep:
    """Applies gates to a tableau and keeps the list."""

    def __init__(self, tab: StabilizerTableau):
        self.tab = tab
        self.gates: list[CliffordGate] = []

    def emit(self, name: str, *targets: int) -> None:
        gate = CliffordGate(name, tuple(targets))
        self.tab.apply(gate)
        self.gates.append(gate)

    def clear_column(self, c: int) -> None:
        tab, n = self.tab, self.tab.n
        d, s = c, n + c
        # destabilizer c -> +-X_c; rows of finished columns are identity on qubits >= c
        for q in range(c, n):
            if tab.z[d, q]:
                self.emit("S" if tab.x[d, q] else "H", q)
        if not tab.x[d, c]:
            q = next(q for q in range(c + 1, n) if tab.x[d, q])
            self.emit("CX", q, c)
        for q in range(c + 1, n):
            if tab.x[d, q]:
                self.emit("CX", c, q)
        # stabilizer c -> +-Z_c, leaving X_c in place
        if tab.x[s, c]:
            self.emit("H", c)
            self.emit("S", c)
            self.emit("H", c)
        for q in range(c + 1, n):
            if tab.x[s, q]:
                if tab.z[s, q]:
                    self.emit("S", q)
                self.emit("H", q)
        for q in range(c + 1, n):
            if tab.z[s, q]:
                self.emit("CX", q, c)
        if tab.r[d]:
            self.emit("S", c)
            self.emit("S", c)
        if tab.r[s]:
            for name in ("H", "S", "S", "H"):
                self.emit(name, c)


def gate_bound(n: int) -> int:
    return settings.SYNTH_GATE_CONSTANT * n * n


def synthesize(paulis: Sequence[PauliOperator], n: Optional[int] = None) -> list[CliffordGate]:
    """
    Basic-gate list U with ``U† Z_k U == paulis[k]`` (signs included).

    Args:
        paulis: m independent, pairwise commuting operators on n qubits.
        n: Qubit count; taken from the operators when omitted.

    Raises:
        ContractError: the operators commute badly, are dependent, or the
            result breaks the conjugation contract or the gate bound.
    """
    paulis = list(paulis)
    if n is None:
        n = paulis[0].n if paulis else 0
    if n == 0:
        if paulis:
            raise ContractError("scalar operators cannot be synthesized", indices=tuple(range(len(paulis))))
        return []
    stabs, destabs = extend_to_full_set(paulis, n)
    sweep = _Sweep(StabilizerTableau.from_rows(stabs, destabs))
    for c in range(n):
        sweep.clear_column(c)

    gates = sweep.gates
    for k, P in enumerate(paulis):
        got = conjugate_pauli(gates, PauliOperator.single(n, k, "Z"), Direction.REVERSE)
        if got != P:
            raise ContractError(f"synthesized frame maps Z_{k} to {got}, expected {P}", indices=(k,))
    if len(gates) > gate_bound(n):
        raise ContractError(f"{len(gates)} gates exceed the bound {gate_bound(n)} for n={n}")
    log_structured(log, "debug", "synthesized clifford", n=n, m=len(paulis), gate_count=len(gates))
    return gates
