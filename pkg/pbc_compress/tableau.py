# /pbc-compress/pbc_compress/tableau.py
"""
Stabilizer/destabilizer tableau and Clifford conjugation of Pauli operators.

Rows are stored CHP-style as uint8 arrays: ``x[2n, n]``, ``z[2n, n]`` and a
sign bit ``r[2n]`` (1 means -1).  Rows ``0..n-1`` are destabilizers and rows
``n..2n-1`` stabilizers.  Only H, S and CX have update rules; every other
Clifford gate is expanded into a word over those three once, when it is first
seen.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .constants import CLIFFORD_WORDS, NON_CLIFFORD_GATES
from .exceptions import ContractError, DimensionError
from .flags import Direction
from .pauli import DependenceTracker, PauliOperator, commutes


class CliffordGate(NamedTuple):
    """A gate from the basic set {H, S, CX} (or a derived Clifford name before expansion)."""
    name: str
    targets: tuple[int, ...]


def expand_to_basic(gate) -> list[CliffordGate]:
    """
    Expands any Clifford gate into a word over {H, S, CX}.

    Accepts anything with ``name`` and ``targets`` attributes, so circuit IR
    gates can be passed directly.
    """
    name = gate.name
    if name in NON_CLIFFORD_GATES:
        raise ContractError(f"gate {name} on {tuple(gate.targets)} is not Clifford")
    try:
        word = CLIFFORD_WORDS[name]
    except KeyError:
        raise ContractError(f"unknown gate {name!r}") from None
    targets = tuple(gate.targets)
    return [CliffordGate(g, tuple(targets[s] for s in slots)) for g, slots in word]


def expand_all(gates: Iterable) -> list[CliffordGate]:
    out: list[CliffordGate] = []
    for g in gates:
        out.extend(expand_to_basic(g))
    return out


def invert_gates(gates: Sequence) -> list[CliffordGate]:
    """Basic-gate word for the inverse of a Clifford gate list."""
    out: list[CliffordGate] = []
    for g in reversed(expand_all(gates)):
        if g.name == "S":
            out.extend([g, g, g])
        else:
            out.append(g)
    return out


# --- row updates (conjugation P -> g P g^dagger) ---------------------------

def _rows_h(x: np.ndarray, z: np.ndarray, r: np.ndarray, a: int) -> None:
    r ^= x[:, a] & z[:, a]
    tmp = x[:, a].copy()
    x[:, a] = z[:, a]
    z[:, a] = tmp


def _rows_s(x: np.ndarray, z: np.ndarray, r: np.ndarray, a: int) -> None:
    r ^= x[:, a] & z[:, a]
    z[:, a] ^= x[:, a]


def _rows_cx(x: np.ndarray, z: np.ndarray, r: np.ndarray, a: int, b: int) -> None:
    r ^= x[:, a] & z[:, b] & (x[:, b] ^ z[:, a] ^ 1)
    x[:, b] ^= x[:, a]
    z[:, a] ^= z[:, b]


def _apply_basic_rows(x, z, r, gate: CliffordGate, n: int) -> None:
    for t in gate.targets:
        if not 0 <= t < n:
            raise DimensionError(f"gate {gate.name} target {t} outside register", expected=n, actual=t + 1)
    if gate.name == "H":
        _rows_h(x, z, r, gate.targets[0])
    elif gate.name == "S":
        _rows_s(x, z, r, gate.targets[0])
    elif gate.name == "CX":
        a, b = gate.targets
        if a == b:
            raise ContractError(f"CX control and target coincide on line {a}")
        _rows_cx(x, z, r, a, b)
    else:
        raise ContractError(f"{gate.name} is not a basic tableau gate")


class StabilizerTableau:
    """
    Stabilizer and destabilizer generators of an n-qubit Clifford frame.

    Attributes:
        n (int): Qubit count.
        x, z (np.ndarray): ``2n × n`` bit matrices; destabilizers first.
        r (np.ndarray): Sign bits, one per row.
    """

    def __init__(self, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.x = np.array(x, dtype=np.uint8)
        self.z = np.array(z, dtype=np.uint8)
        self.r = np.array(r, dtype=np.uint8)
        self.n = self.x.shape[1]

    @classmethod
    def identity(cls, n: int) -> "StabilizerTableau":
        eye = np.eye(n, dtype=np.uint8)
        zero = np.zeros((n, n), dtype=np.uint8)
        return cls(np.vstack([eye, zero]), np.vstack([zero, eye]), np.zeros(2 * n, dtype=np.uint8))

    @classmethod
    def from_rows(cls, stabs: Sequence[PauliOperator], destabs: Sequence[PauliOperator]) -> "StabilizerTableau":
        rows = list(destabs) + list(stabs)
        n = len(stabs)
        if len(destabs) != n or any(p.n != n for p in rows):
            raise DimensionError("tableau needs n stabilizers and n destabilizers on n qubits", expected=n)
        x = np.array([p.x_bits for p in rows], dtype=np.uint8).reshape(2 * n, n)
        z = np.array([p.z_bits for p in rows], dtype=np.uint8).reshape(2 * n, n)
        r = np.array([0 if p.sign > 0 else 1 for p in rows], dtype=np.uint8)
        tab = cls(x, z, r)
        tab.check_invariants()
        return tab

    def copy(self) -> "StabilizerTableau":
        return StabilizerTableau(self.x, self.z, self.r)

    def _row(self, i: int) -> PauliOperator:
        return PauliOperator(self.x[i], self.z[i], -1 if self.r[i] else 1)

    @property
    def destab_rows(self) -> list[PauliOperator]:
        return [self._row(i) for i in range(self.n)]

    @property
    def stab_rows(self) -> list[PauliOperator]:
        return [self._row(self.n + i) for i in range(self.n)]

    def apply(self, gate) -> None:
        """Conjugates every row by ``gate`` in place (derived gates are expanded)."""
        for g in expand_to_basic(gate):
            _apply_basic_rows(self.x, self.z, self.r, g, self.n)

    def check_invariants(self) -> None:
        """Raises ContractError unless the commutation pattern of a tableau holds."""
        check_tableau_pattern(self.stab_rows, self.destab_rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StabilizerTableau):
            return NotImplemented
        return (np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)
                and np.array_equal(self.r, other.r))


def apply_gate(tab: StabilizerTableau, gate) -> StabilizerTableau:
    """Returns a new tableau with every row conjugated by ``gate``."""
    out = tab.copy()
    out.apply(gate)
    return out


def conjugate_pauli(gates: Sequence, P: PauliOperator, direction: Direction | str = Direction.FORWARD) -> PauliOperator:
    """
    Conjugates P through a Clifford gate list whose composite is G (first gate applied first).

    ``forward`` returns ``G P G†``; ``reverse`` returns ``G† P G``.
    """
    direction = Direction(direction)
    x = P.x_bits.reshape(1, -1).copy()
    z = P.z_bits.reshape(1, -1).copy()
    r = np.array([0 if P.sign > 0 else 1], dtype=np.uint8)
    word = expand_all(gates)
    if direction is Direction.REVERSE:
        word = invert_gates(word)
    for g in word:
        _apply_basic_rows(x, z, r, g, P.n)
    return PauliOperator(x[0], z[0], -1 if r[0] else 1)


def check_tableau_pattern(stabs: Sequence[PauliOperator], destabs: Sequence[PauliOperator]) -> None:
    n = len(stabs)
    for i in range(n):
        for j in range(i):
            if not commutes(stabs[i], stabs[j]):
                raise ContractError("stabilizer rows anticommute", indices=(j, i))
            if not commutes(destabs[i], destabs[j]):
                raise ContractError("destabilizer rows anticommute", indices=(j, i))
        for j in range(n):
            if commutes(destabs[i], stabs[j]) == (i == j):
                raise ContractError("destabilizer/stabilizer pairing broken", indices=(i, j))


# --- symplectic Gram-Schmidt ---------------------------------------------

def _omega(u: int, v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (bin((u & mask) & (v >> n)).count("1") + bin((u >> n) & (v & mask)).count("1")) & 1


def _swap_halves(v: int, n: int) -> int:
    mask = (1 << n) - 1
    return ((v & mask) << n) | (v >> n)


def _dual_vectors(gens: list[int], n: int) -> list[int]:
    """Vectors d_k with ω(d_k, g_j) = δ_kj, found by GF(2) elimination (free variables 0)."""
    m = len(gens)
    rows = [[_swap_halves(g, n), 1 << j] for j, g in enumerate(gens)]
    pivots: list[int] = []
    rank = 0
    for col in range(2 * n):
        sel = next((i for i in range(rank, m) if (rows[i][0] >> col) & 1), None)
        if sel is None:
            continue
        rows[rank], rows[sel] = rows[sel], rows[rank]
        for i in range(m):
            if i != rank and (rows[i][0] >> col) & 1:
                rows[i][0] ^= rows[rank][0]
                rows[i][1] ^= rows[rank][1]
        pivots.append(col)
        rank += 1
        if rank == m:
            break
    duals = []
    for k in range(m):
        d = 0
        for i, col in enumerate(pivots):
            if (rows[i][1] >> k) & 1:
                d |= 1 << col
        duals.append(d)
    return duals


def extend_to_full_set(
    gens: Sequence[PauliOperator], n: int | None = None
) -> tuple[list[PauliOperator], list[PauliOperator]]:
    """
    Completes m independent commuting Paulis to a full stabilizer set plus destabilizers.

    The first m returned stabilizers are ``gens`` unchanged (signs included);
    every added operator carries sign +1.

    Raises:
        ContractError: gens do not commute, are dependent, or m > n.
    """
    gens = list(gens)
    if n is None:
        if not gens:
            raise DimensionError("qubit count needed for an empty generator set")
        n = gens[0].n
    if len(gens) > n:
        raise ContractError(f"{len(gens)} generators cannot be independent on {n} qubits")
    tracker = DependenceTracker(n)
    for k, g in enumerate(gens):
        if g.n != n:
            raise DimensionError("generator on wrong register", expected=n, actual=g.n)
        for j in range(k):
            if not commutes(gens[j], g):
                raise ContractError("generators do not commute", indices=(j, k))
        try:
            tracker.add(g)
        except ContractError as e:
            raise ContractError("generators are not independent", indices=e.indices + (k,)) from e

    g_vecs = [g.vector() for g in gens]
    d_vecs = _dual_vectors(g_vecs, n)
    for l in range(len(d_vecs)):
        for k in range(l):
            if _omega(d_vecs[k], d_vecs[l], n):
                d_vecs[l] ^= g_vecs[k]

    pairs = list(zip(g_vecs, d_vecs))

    def project(v: int) -> int:
        for s, d in pairs:
            if _omega(v, d, n):
                v ^= s
            if _omega(v, s, n):
                v ^= d
        return v

    units = [1 << i for i in range(2 * n)]
    new_pairs: list[tuple[int, int]] = []
    # Z unit vectors first so a Z-basis completion comes out when possible
    for cand in units[n:] + units[:n]:
        if len(pairs) == n:
            break
        v = project(cand)
        if v == 0:
            continue
        partner = next((w for w in (project(u) for u in units) if _omega(v, w, n)), None)
        if partner is None:
            continue
        pairs.append((v, partner))
        new_pairs.append((v, partner))

    stabs = gens + [PauliOperator.from_vector(s, n) for s, _ in new_pairs]
    destabs = [PauliOperator.from_vector(d, n) for d in d_vecs] + [PauliOperator.from_vector(d, n) for _, d in new_pairs]
    check_tableau_pattern(stabs, destabs)
    return stabs, destabs
