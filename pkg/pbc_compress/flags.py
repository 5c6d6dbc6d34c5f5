# pbc-compress/pbc_compress/flags.py
# Shared enumerations used across the compiler, oracle, class generators and CLI.
# Using Enums keeps the text formats and reports free of typo-prone string literals.

from enum import Enum


class InputKind(str, Enum):
    """Per-line input declaration of a circuit."""
    ZERO = "Z0"    # |0>
    MAGIC = "A"    # |A> = (|0> + e^{i pi/4}|1>)/sqrt(2)


class RecordKind(str, Enum):
    """
    How the compiler resolved a measurement record.
    Dummy entries are the stabilizer-block generators, always with outcome +1.
    """
    DUMMY = "dummy"
    CLASSICAL = "classical-dependent"
    RANDOM = "random-lambda"
    QUANTUM = "quantum"


class CircuitShape(str, Enum):
    """Adaptivity class of a circuit, as reported by classify()."""
    UNITARY = "unitary"            # measurements only at the end
    NON_ADAPTIVE = "non-adaptive"  # intermediate measurements, no parity controls
    ADAPTIVE = "adaptive"          # at least one parity-controlled gate


class GateContent(str, Enum):
    CLIFFORD_ONLY = "clifford-only"
    HAS_T = "has-T"


class Direction(str, Enum):
    """Conjugation direction for conjugate_pauli."""
    FORWARD = "forward"  # G P G^dagger
    REVERSE = "reverse"  # G^dagger P G


class CompileMode(str, Enum):
    PLAIN = "plain"
    POSTSELECTED = "postselected"


class PipelinePath(str, Enum):
    """The two ways of finishing a postselected compression."""
    EXTENDED_GK = "a"     # non-adaptive + postselected PBC, then a single Clifford
    MAGIC_PREFIX = "b"    # convert |A> lines to |0> with postselected gadgets


class EmitTarget(str, Enum):
    CM = "cm"
    PBC = "pbc"


class Metric(str, Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"


class ClassId(str, Enum):
    """Circuit families understood by the generators."""
    IQP_ISING = "iqp-ising"
    SPARSE_IQP = "sparse-iqp"
    RCS = "rcs"
    CONJUGATED_CLIFFORD = "conjugated-clifford"
    HADAMARD = "hadamard"  # calibration family: uniform output distribution

# --- How to use these flags ---
#
#   from pbc_compress.flags import InputKind, RecordKind
#   if circuit.inputs[line] is InputKind.MAGIC:
#       ...
#   report.mode = CompileMode.POSTSELECTED.value  # .value gives the string "postselected"
