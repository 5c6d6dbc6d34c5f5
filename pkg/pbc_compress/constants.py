# /pbc-compress/pbc_compress/constants.py
# Centralized, immutable constants used across the compiler, oracle and class generators.
# These are NOT configurable at runtime; budgets and tolerances live in config.py.

import math

# -------------------
# 🔣 Pauli / Outcome Conventions
# -------------------

PAULI_LETTERS: str = "IXZY"  # Indexed by x + 2*z, so (x, z) = (1, 1) is Y
OUTCOME_PLUS: int = 1
OUTCOME_MINUS: int = -1
BIT_FOR_OUTCOME: dict[int, int] = {OUTCOME_PLUS: 0, OUTCOME_MINUS: 1}  # +1 -> 0, -1 -> 1
OUTCOME_FOR_BIT: dict[int, int] = {0: OUTCOME_PLUS, 1: OUTCOME_MINUS}

# -------------------
# 🧮 Gate Tables
# -------------------

BASIC_CLIFFORD_GATES: frozenset[str] = frozenset({"H", "S", "CX"})
SINGLE_QUBIT_GATES: frozenset[str] = frozenset(
    {"H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg", "SqrtX", "SqrtXdg", "SqrtY", "SqrtYdg"}
)
TWO_QUBIT_GATES: frozenset[str] = frozenset({"CX", "CZ", "CS", "CSdg"})
NON_CLIFFORD_GATES: frozenset[str] = frozenset({"T", "Tdg", "CS", "CSdg"})
T_TYPE_GATES: frozenset[str] = frozenset({"T", "Tdg"})
T_COUNT_PER_GATE: dict[str, int] = {"T": 1, "Tdg": 1, "CS": 3, "CSdg": 3}

# Conjugation words over {H, S, CX}; global phases are irrelevant for Pauli conjugation.
# Two-qubit entries use slot indices 0 (first target) and 1 (second target).
CLIFFORD_WORDS: dict[str, tuple[tuple[str, tuple[int, ...]], ...]] = {
    "H": (("H", (0,)),),
    "S": (("S", (0,)),),
    "Sdg": (("S", (0,)), ("S", (0,)), ("S", (0,))),
    "Z": (("S", (0,)), ("S", (0,))),
    "X": (("H", (0,)), ("S", (0,)), ("S", (0,)), ("H", (0,))),
    "Y": (("S", (0,)), ("S", (0,)), ("H", (0,)), ("S", (0,)), ("S", (0,)), ("H", (0,))),
    "SqrtX": (("H", (0,)), ("S", (0,)), ("H", (0,))),
    "SqrtXdg": (("H", (0,)), ("S", (0,)), ("S", (0,)), ("S", (0,)), ("H", (0,))),
    "SqrtY": (("S", (0,)), ("S", (0,)), ("H", (0,))),
    "SqrtYdg": (("H", (0,)), ("S", (0,)), ("S", (0,))),
    "CX": (("CX", (0, 1)),),
    "CZ": (("H", (1,)), ("CX", (0, 1)), ("H", (1,))),
}

# IR-level lowerings (exact up to global phase, checked against dense matrices in tests)
SQRT_WORDS: dict[str, tuple[str, ...]] = {
    "SqrtX": ("H", "S", "H"),
    "SqrtXdg": ("H", "Sdg", "H"),
    "SqrtY": ("Z", "H"),
    "SqrtYdg": ("H", "Z"),
}

# Controlled-S as a phase polynomial: T a, T b, T^dagger on a xor b.
CS_WORD: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("T", (0,)), ("T", (1,)), ("CX", (0, 1)), ("Tdg", (1,)), ("CX", (0, 1)),
)
CSDG_WORD: tuple[tuple[str, tuple[int, ...]], ...] = (
    ("Tdg", (0,)), ("Tdg", (1,)), ("CX", (0, 1)), ("T", (1,)), ("CX", (0, 1)),
)
CS_MIDDLE_GATE_INDEX: int = 3  # Position of the parity T/T^dagger inside CS_WORD

# T^v for v in 0..7; every odd power carries exactly one T (never T^dagger)
T_POWER_WORDS: dict[int, tuple[str, ...]] = {
    0: (),
    1: ("T",),
    2: ("S",),
    3: ("S", "T"),
    4: ("Z",),
    5: ("Z", "T"),
    6: ("Z", "S"),
    7: ("Z", "S", "T"),
}
# Phase-polynomial weight of each diagonal gate, in units of pi/4
DIAGONAL_WEIGHTS: dict[str, int] = {"T": 1, "Tdg": 7, "S": 2, "Sdg": 6, "Z": 4}

# -------------------
# 🧲 Magic State
# -------------------

MAGIC_PHASE: complex = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))  # e^{i pi/4}
MAGIC_A_AMPLITUDES: tuple[complex, complex] = (1 / math.sqrt(2), MAGIC_PHASE / math.sqrt(2))

# -------------------
# 📜 Circuit Text Grammar
# -------------------

KW_QUBITS: str = "qubits"
KW_INPUT: str = "input"
KW_INPUT_STAB: str = "input-stab"
KW_GATE: str = "gate"
KW_MEASURE: str = "measure"
KW_OUTPUT: str = "output"
KW_OUTPUT_BITS: str = "output-bits"
COMMENT_CHAR: str = "#"
OUTPUT_RECORD_PREFIX: str = "o"  # Records created for quantum output lines
GADGET_RECORD_PREFIX: str = "g"  # Records created by T/T^dagger gadgets
ZERO_RECORD_PREFIX: str = "z"  # Records created by |A> -> |0> conversion gadgets
DEFER_RECORD_PREFIX: str = "d"  # Ancilla records created by measurement deferral
CLASS_RECORD_PREFIX: str = "x"  # Final measurement records of class instances
QUANTUM_RECORD_PREFIX: str = "p"  # Z measurements of emitted CM circuits, one per quantum Pauli

# -------------------
# 🧾 Compiled-Program Dump
# -------------------

PBC_HEADER: str = "pbc"
ADAPTIVE_HEADER: str = "adaptive"
DRIVER_LINE: int = 0  # Line measured by every block of the adaptive driver
PIPELINE_RETRIES: int = 64  # Coin redraws before a postselected static compile gives up
DIST_SIGNIFICANT_DIGITS: int = 15

# -------------------
# 📊 Statistics
# -------------------

IQP_ALPHA_REFERENCE: float = 0.5  # Reference anticoncentration constants quoted for IQP
IQP_BETA_REFERENCE: float = 1 / 12
DEFAULT_CONFIDENCE: float = 0.95

# -------------------
# 📁 Logging / File Output
# -------------------

FALLBACK_LOG_PATH_DEFAULT: str = "./logs/pbc_compress.log"  # Default path for file logging
ALLOWED_LOG_ROTATION_BYTES: int = 2_000_000  # Max file size before rotation
ALLOWED_LOG_BACKUPS: int = 3  # Number of rotated log files to keep

# -------------------
# 🚪 CLI Exit Codes
# -------------------

EXIT_OK: int = 0
EXIT_TOLERANCE: int = 1
EXIT_PARSE: int = 2
EXIT_CONTRACT: int = 3
EXIT_PROBABILITY_ZERO: int = 4
EXIT_BUDGET: int = 5
