# /pbc-compress/pbc_compress/__init__.py
# Make key components easily importable from the package root

# Version
from .version import __version__

# Configuration
from .config import settings

# Logging
from .logging import setup_logger, LogEntry, LOG_FORMAT

# Exceptions
from .exceptions import (
    PBCError,
    DimensionError,
    ContractError,
    CircuitParseError,
    ProbabilityZeroError,
    PostselectionMissError,
    BudgetExceededError,
    ConfigurationError,
)

# Flags / Enums
from .flags import InputKind, RecordKind, CircuitShape, GateContent, Direction, CompileMode, PipelinePath, ClassId

# Pauli algebra and tableaux
from .pauli import PauliOperator, RecordedMeasurement, commutes, multiply, decompose_dependence, conjugate_by_v, restrict
from .tableau import CliffordGate, StabilizerTableau, apply_gate, conjugate_pauli, extend_to_full_set

# Circuits
from .circuit import Circuit, Gate, Measure, ParityControl, classify
from .circuit_format import parse, serialize, load, dump
from .gadgets import gadgetize, gadgetize_postselected, strip_corrections, expand_cs, a_to_zero_prefix

# Compiler, synthesis and emission
from .compiler import CompiledProgram, StaticProgram, compile, compile_postselected, compile_nonadaptive, run_with
from .synthesis import synthesize
from .emit import emit_cm, emit_adaptive, compress_pipeline

# Dense oracle
from .oracle import (
    Distribution,
    exact_distribution,
    exact_distribution_hybrid,
    exact_distribution_static,
    distance,
    unitary_equal_up_to_phase,
)

# Circuit classes
from .classes import (
    ClassInstance,
    gen_iqp_ising,
    gen_sparse_iqp,
    gen_rcs,
    gen_conjugated_clifford,
    gen_hadamard,
    expand_ct,
    closure_check,
    eq5_check,
    theta_sampling_check,
    anticoncentration_estimate,
)

# Models
from .models import (
    CompileReport,
    VerifyReport,
    DistanceReport,
    AnticoncentrationReport,
    Eq5Report,
    ThetaSamplingReport,
    InstanceManifest,
)

# Utilities
from .utils import log_structured, make_rng

__all__ = [
    # Version
    "__version__",
    # Config
    "settings",
    # Logging
    "setup_logger",
    "LogEntry",
    "LOG_FORMAT",
    # Exceptions
    "PBCError",
    "DimensionError",
    "ContractError",
    "CircuitParseError",
    "ProbabilityZeroError",
    "PostselectionMissError",
    "BudgetExceededError",
    "ConfigurationError",
    # Flags / Enums
    "InputKind",
    "RecordKind",
    "CircuitShape",
    "GateContent",
    "Direction",
    "CompileMode",
    "PipelinePath",
    "ClassId",
    # Pauli / tableau
    "PauliOperator",
    "RecordedMeasurement",
    "commutes",
    "multiply",
    "decompose_dependence",
    "conjugate_by_v",
    "restrict",
    "CliffordGate",
    "StabilizerTableau",
    "apply_gate",
    "conjugate_pauli",
    "extend_to_full_set",
    # Circuits
    "Circuit",
    "Gate",
    "Measure",
    "ParityControl",
    "classify",
    "parse",
    "serialize",
    "load",
    "dump",
    "gadgetize",
    "gadgetize_postselected",
    "strip_corrections",
    "expand_cs",
    "a_to_zero_prefix",
    # Compiler
    "CompiledProgram",
    "StaticProgram",
    "compile",
    "compile_postselected",
    "compile_nonadaptive",
    "run_with",
    "synthesize",
    "emit_cm",
    "emit_adaptive",
    "compress_pipeline",
    # Oracle
    "Distribution",
    "exact_distribution",
    "exact_distribution_hybrid",
    "exact_distribution_static",
    "distance",
    "unitary_equal_up_to_phase",
    # Classes
    "ClassInstance",
    "gen_iqp_ising",
    "gen_sparse_iqp",
    "gen_rcs",
    "gen_conjugated_clifford",
    "gen_hadamard",
    "expand_ct",
    "closure_check",
    "eq5_check",
    "theta_sampling_check",
    "anticoncentration_estimate",
    # Models
    "CompileReport",
    "VerifyReport",
    "DistanceReport",
    "AnticoncentrationReport",
    "Eq5Report",
    "ThetaSamplingReport",
    "InstanceManifest",
    # Utilities
    "log_structured",
    "make_rng",
]
