# /pbc-compress/pbc_compress/pauli.py
"""
Signed Pauli-operator algebra.

A :class:`PauliOperator` stores an n-qubit Hermitian Pauli as a pair of bit
vectors plus a +1/-1 sign.  Qubit 0 is the leftmost character of the text form
and ``(x, z) = (1, 1)`` is Y.  The ±i phases that appear when two operators are
multiplied are never stored; :func:`multiply` returns them separately.

Besides multiplication and commutation the module provides the two operator
rewrites the compiler is built on: conjugation by ``V = (λP·P + λQ·Q)/√2`` and
restriction of an operator whose first factors are all Z or I.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .constants import PAULI_LETTERS
from .exceptions import ContractError, DimensionError
from .flags import RecordKind

# Powers of i, indexed by exponent mod 4
_I_POWERS: tuple[complex, ...] = (1 + 0j, 1j, -1 + 0j, -1j)


def _as_bits(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.uint8).reshape(-1) & 1
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PauliOperator:
    """
    Signed n-qubit Pauli operator ``sign · P_0 ⊗ ... ⊗ P_{n-1}``.

    Attributes:
        x_bits (np.ndarray): Length-n X components (read-only uint8).
        z_bits (np.ndarray): Length-n Z components (read-only uint8).
        sign (int): +1 or -1.
    """
    x_bits: np.ndarray
    z_bits: np.ndarray
    sign: int = 1

    def __post_init__(self):
        x = _as_bits(self.x_bits)
        z = _as_bits(self.z_bits)
        if x.shape != z.shape:
            raise DimensionError("x_bits and z_bits differ in length", expected=x.size, actual=z.size)
        if self.sign not in (1, -1):
            raise ValueError(f"Pauli sign must be +1 or -1, got {self.sign!r}")
        object.__setattr__(self, "x_bits", x)
        object.__setattr__(self, "z_bits", z)
        object.__setattr__(self, "sign", int(self.sign))

    # --- construction -------------------------------------------------

    @classmethod
    def identity(cls, n: int, sign: int = 1) -> "PauliOperator":
        return cls(np.zeros(n, dtype=np.uint8), np.zeros(n, dtype=np.uint8), sign)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str, sign: int = 1) -> "PauliOperator":
        """The operator carrying ``letter`` on ``qubit`` and identity elsewhere."""
        if not 0 <= qubit < n:
            raise DimensionError(f"qubit {qubit} outside 0..{n - 1}", expected=n, actual=qubit + 1)
        code = PAULI_LETTERS.index(letter.upper())
        x = np.zeros(n, dtype=np.uint8)
        z = np.zeros(n, dtype=np.uint8)
        x[qubit] = code & 1
        z[qubit] = code >> 1
        return cls(x, z, sign)

    @classmethod
    def from_string(cls, text: str) -> "PauliOperator":
        """Parses ``[+|-]`` followed by one letter from IXYZ per qubit, e.g. ``-ZIXY``."""
        body = text.strip()
        sign = 1
        if body[:1] in ("+", "-"):
            sign = -1 if body[0] == "-" else 1
            body = body[1:]
        x = np.zeros(len(body), dtype=np.uint8)
        z = np.zeros(len(body), dtype=np.uint8)
        for i, ch in enumerate(body.upper()):
            if ch not in PAULI_LETTERS:
                raise ValueError(f"Invalid Pauli letter {ch!r} in {text!r}")
            code = PAULI_LETTERS.index(ch)
            x[i] = code & 1
            z[i] = code >> 1
        return cls(x, z, sign)

    @classmethod
    def from_vector(cls, vec: int, n: int, sign: int = 1) -> "PauliOperator":
        """Inverse of :meth:`vector`."""
        x = np.array([(vec >> i) & 1 for i in range(n)], dtype=np.uint8)
        z = np.array([(vec >> (n + i)) & 1 for i in range(n)], dtype=np.uint8)
        return cls(x, z, sign)

    # --- views --------------------------------------------------------

    @property
    def n(self) -> int:
        return int(self.x_bits.size)

    def letters(self) -> str:
        return "".join(PAULI_LETTERS[int(x) + 2 * int(z)] for x, z in zip(self.x_bits, self.z_bits))

    def __str__(self) -> str:
        return ("-" if self.sign < 0 else "+") + self.letters()

    def __repr__(self) -> str:
        return f"PauliOperator('{self}')"

    def vector(self) -> int:
        """Symplectic vector packed into an int: x bits at 0..n-1, z bits at n..2n-1."""
        vec = 0
        for i in range(self.n):
            if self.x_bits[i]:
                vec |= 1 << i
            if self.z_bits[i]:
                vec |= 1 << (self.n + i)
        return vec

    def is_identity(self) -> bool:
        return not (self.x_bits.any() or self.z_bits.any())

    def support(self) -> tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.x_bits | self.z_bits))

    def letter(self, qubit: int) -> str:
        return PAULI_LETTERS[int(self.x_bits[qubit]) + 2 * int(self.z_bits[qubit])]

    # --- value semantics ---------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.sign == other.sign
            and np.array_equal(self.x_bits, other.x_bits)
            and np.array_equal(self.z_bits, other.z_bits)
        )

    def __hash__(self) -> int:
        return hash((self.sign, self.x_bits.tobytes(), self.z_bits.tobytes()))

    def __neg__(self) -> "PauliOperator":
        return PauliOperator(self.x_bits, self.z_bits, -self.sign)

    def with_sign(self, sign: int) -> "PauliOperator":
        return PauliOperator(self.x_bits, self.z_bits, sign)

    def unsigned(self) -> "PauliOperator":
        return self.with_sign(1)

    def embed(self, n_total: int, lines: Sequence[int]) -> "PauliOperator":
        """Places this operator on ``lines`` of an ``n_total``-qubit register."""
        if len(lines) != self.n:
            raise DimensionError("embedding needs one line per factor", expected=self.n, actual=len(lines))
        x = np.zeros(n_total, dtype=np.uint8)
        z = np.zeros(n_total, dtype=np.uint8)
        x[list(lines)] = self.x_bits
        z[list(lines)] = self.z_bits
        return PauliOperator(x, z, self.sign)

    def permuted(self, order: Sequence[int]) -> "PauliOperator":
        """New operator whose factor k is this operator's factor ``order[k]``."""
        idx = list(order)
        return PauliOperator(self.x_bits[idx], self.z_bits[idx], self.sign)


@dataclass(frozen=True)
class RecordedMeasurement:
    """
    One entry of the compiler's measurement record.

    Attributes:
        operator (PauliOperator): The measured operator, in the frame the compiler works in.
        outcome (int | None): +1 or -1; None while a static compile keeps it symbolic.
        kind (RecordKind): How the outcome was obtained.
        record_id (str | None): Circuit record this entry answers; None for dummies.
    """
    operator: PauliOperator
    outcome: Optional[int]
    kind: RecordKind
    record_id: Optional[str] = None


def _check_dims(P: PauliOperator, Q: PauliOperator) -> None:
    if P.n != Q.n:
        raise DimensionError("Pauli operators act on different registers", expected=P.n, actual=Q.n)


def _phase_exponent(P: PauliOperator, Q: PauliOperator) -> int:
    """Exponent k with P·Q = i^k · (bare product), bare product carrying sign +1."""
    x1 = P.x_bits.astype(np.int64)
    z1 = P.z_bits.astype(np.int64)
    x2 = Q.x_bits.astype(np.int64)
    z2 = Q.z_bits.astype(np.int64)
    g = np.where(
        (x1 == 1) & (z1 == 1), z2 - x2,
        np.where(x1 == 1, z2 * (2 * x2 - 1), np.where(z1 == 1, x2 * (1 - 2 * z2), 0)),
    )
    k = int(g.sum())
    if P.sign * Q.sign < 0:
        k += 2
    return k % 4


def multiply(P: PauliOperator, Q: PauliOperator) -> tuple[complex, PauliOperator]:
    """
    Multiplies two signed Paulis.

    Returns:
        ``(phase, product)`` with ``P·Q == phase · product``; phase is one of
        ±1, ±i and ``product`` carries sign +1.
    """
    _check_dims(P, Q)
    k = _phase_exponent(P, Q)
    product = PauliOperator(P.x_bits ^ Q.x_bits, P.z_bits ^ Q.z_bits, 1)
    return _I_POWERS[k], product


def multiply_hermitian(P: PauliOperator, Q: PauliOperator) -> PauliOperator:
    """Product of two commuting Paulis, which is again a signed Hermitian Pauli."""
    _check_dims(P, Q)
    k = _phase_exponent(P, Q)
    if k % 2:
        raise ContractError(f"product of anticommuting operators {P} and {Q} is not Hermitian")
    return PauliOperator(P.x_bits ^ Q.x_bits, P.z_bits ^ Q.z_bits, 1 if k == 0 else -1)


def commutes(P: PauliOperator, Q: PauliOperator) -> bool:
    """True iff the symplectic product of P and Q vanishes."""
    _check_dims(P, Q)
    return not (int(np.sum(P.x_bits & Q.z_bits)) + int(np.sum(P.z_bits & Q.x_bits))) % 2


def _symplectic(u: int, v: int, n: int) -> int:
    mask = (1 << n) - 1
    return (bin((u & mask) & (v >> n)).count("1") + bin((u >> n) & (v & mask)).count("1")) & 1


class DependenceTracker:
    """
    Incremental GF(2) elimination over symplectic row vectors.

    Generators are added one at a time; each query reduces against the stored
    echelon rows in insertion order, so a query costs O(n·K).
    """

    def __init__(self, n: int):
        self.n = n
        self.generators: list[PauliOperator] = []
        # (pivot bit, reduced row, combination mask over generator indices)
        self._rows: list[tuple[int, int, int]] = []

    def __len__(self) -> int:
        return len(self.generators)

    def _reduce(self, vec: int) -> tuple[int, int]:
        combo = 0
        for pivot, row, row_combo in self._rows:
            if (vec >> pivot) & 1:
                vec ^= row
                combo ^= row_combo
        return vec, combo

    def add(self, P: PauliOperator) -> int:
        """Adds an independent generator and returns its index."""
        if P.n != self.n:
            raise DimensionError("generator on wrong register", expected=self.n, actual=P.n)
        residual, combo = self._reduce(P.vector())
        if residual == 0:
            raise ContractError(f"{P} is dependent on the tracked generators",
                                indices=self._indices(combo))
        index = len(self.generators)
        pivot = (residual & -residual).bit_length() - 1
        self._rows.append((pivot, residual, combo ^ (1 << index)))
        self.generators.append(P)
        return index

    def is_independent(self, P: PauliOperator) -> bool:
        return self._reduce(P.vector())[0] != 0

    def anticommuting(self, P: PauliOperator) -> list[int]:
        """Indices of tracked generators that anticommute with P, in insertion order."""
        vec = P.vector()
        return [i for i, g in enumerate(self.generators) if _symplectic(vec, g.vector(), self.n)]

    @staticmethod
    def _indices(combo: int) -> tuple[int, ...]:
        out = []
        i = 0
        while combo:
            if combo & 1:
                out.append(i)
            combo >>= 1
            i += 1
        return tuple(out)

    def decompose(self, P: PauliOperator) -> Optional[tuple[int, tuple[int, ...]]]:
        """
        Writes P as ``sign · ∏ generators[indices]`` if possible.

        Returns:
            ``(sign, indices)`` or None when P is independent of the tracked group.
        """
        if P.n != self.n:
            raise DimensionError("query on wrong register", expected=self.n, actual=P.n)
        residual, combo = self._reduce(P.vector())
        if residual != 0:
            return None
        indices = self._indices(combo)
        acc = PauliOperator.identity(self.n)
        for i in indices:
            acc = multiply_hermitian(acc, self.generators[i])
        # acc has the same bits as P, so P = (P.sign * acc.sign) * acc
        return P.sign * acc.sign, indices


def decompose_dependence(
    P: PauliOperator, history: Sequence[RecordedMeasurement]
) -> Optional[tuple[int, tuple[int, ...]]]:
    """
    Expresses P as ``±`` a product of history operators.

    History operators must pairwise commute and commute with P. Only an
    independent subset of the history is used as a basis; the returned indices
    refer to positions in ``history``.

    Returns:
        ``(sign, indices)`` with ``P == sign · ∏ history[i].operator``, or None
        when P is independent of the history group. The implied outcome is
        ``sign · ∏ history[i].outcome``.
    """
    ops = [h.operator for h in history]
    for i, op in enumerate(ops):
        _check_dims(P, op)
        if not commutes(P, op):
            raise ContractError(f"{P} anticommutes with history entry {i}", indices=(i,))
        for j in range(i):
            if not commutes(ops[j], op):
                raise ContractError("history operators do not pairwise commute", indices=(j, i))
    tracker = DependenceTracker(P.n)
    basis: list[int] = []
    for i, op in enumerate(ops):
        if tracker.is_independent(op):
            tracker.add(op)
            basis.append(i)
    found = tracker.decompose(P)
    if found is None:
        return None
    sign, local = found
    return sign, tuple(basis[k] for k in local)


def implied_outcome(sign: int, indices: Iterable[int], history: Sequence[RecordedMeasurement]) -> int:
    out = sign
    for i in indices:
        out *= history[i].outcome
    return out


def conjugate_by_v(
    R: PauliOperator, P: PauliOperator, lam_p: int, Q: PauliOperator, lam_q: int
) -> PauliOperator:
    """
    Returns ``V R V†`` for ``V = (λP·P + λQ·Q)/√2`` with P and Q anticommuting.

    V is Hermitian and unitary, and the action splits on how R meets P and Q:

    * commutes with both: R
    * anticommutes with both: -R
    * commutes with P only: -λP·λQ · PQR
    * commutes with Q only: +λP·λQ · PQR
    """
    _check_dims(R, P)
    _check_dims(R, Q)
    if commutes(P, Q):
        raise ContractError(f"V needs anticommuting operators, got {P} and {Q}")
    with_p = commutes(R, P)
    with_q = commutes(R, Q)
    if with_p and with_q:
        return R
    if not with_p and not with_q:
        return -R
    ph1, pq = multiply(P, Q)
    ph2, pqr = multiply(pq, R)
    coeff = (-1 if with_p else 1) * lam_p * lam_q * ph1 * ph2
    if abs(coeff.imag) > 1e-9:
        raise ContractError(f"non-Hermitian result conjugating {R} by V({P}, {Q})")
    return pqr.with_sign(1 if coeff.real > 0 else -1)


def restrict(P: PauliOperator, prefix_len: int) -> PauliOperator:
    """
    Drops the first ``prefix_len`` factors of P, which must each be Z or I.
    The sign is kept; consuming every factor leaves the scalar ±1 (n = 0).
    """
    if not 0 <= prefix_len <= P.n:
        raise DimensionError("prefix longer than operator", expected=P.n, actual=prefix_len)
    bad = tuple(int(i) for i in np.flatnonzero(P.x_bits[:prefix_len]))
    if bad:
        raise ContractError(f"{P} has X/Y components on the eliminated prefix", indices=bad)
    return PauliOperator(P.x_bits[prefix_len:], P.z_bits[prefix_len:], P.sign)
