# /pbc-compress/pbc_compress/models.py
# Pydantic report models and the class-instance manifest.
# Every model renders a deterministic key=value text through to_kv_lines().

from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from .utils import format_probability


def _kv_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_probability(value)
    if isinstance(value, (list, tuple)):
        return ",".join(_kv_value(v) for v in value)
    if hasattr(value, "value"):  # Enums
        return str(value.value)
    return str(value)


class KVReport(BaseModel):
    """Base for line-oriented reports: one ``key=value`` per field, in declaration order."""
    model_config = ConfigDict(populate_by_name=True, use_enum_values=True)

    def to_kv_lines(self) -> str:
        lines = []
        for name in type(self).model_fields:
            value = getattr(self, name)
            if isinstance(value, BaseModel):
                continue
            lines.append(f"{name}={_kv_value(value)}")
        return "\n".join(lines) + "\n"


# --- Compile / verify reports ---

class CompileReport(KVReport):
    """Summary of one compression run."""
    mode: str = Field(..., description="plain or postselected.")
    path: Optional[str] = Field(None, description="Postselected pipeline path (a or b).")
    original_lines: int = Field(..., description="Line count of the input circuit.")
    n: int = Field(0, description="Stabilizer (|0>) lines eliminated by the compiler.")
    t: int = Field(0, description="Compressed register size, the number of |A> lines.")
    s: int = Field(0, description="Quantum Pauli measurements in the compiled program.")
    lambda_count: int = Field(0, description="Classical coin flips drawn for anticommuting measurements.")
    forced_count: int = Field(0, description="Anticommuting postselected measurements with forced coins.")
    classical_count: int = Field(0, description="Records computed from earlier outcomes.")
    gadget_count: int = Field(0, description="T-type gadgets introduced.")
    input_gate_count: int = Field(0, description="Gates in the input circuit.")
    emitted_gate_count: int = Field(0, description="Gates in the emitted circuit or driver blocks.")
    emitted_lines: int = Field(0, description="Line count of the emitted circuit.")
    seed: Optional[int] = Field(None, description="Seed used for every random choice.")
    emit: str = Field("cm", description="Emission target.")


class VerifyReport(KVReport):
    against: str = Field(..., description="compiled, self or a file path.")
    additive: float = Field(..., description="Sum of absolute probability differences.")
    tvd: float = Field(..., description="Total variation distance, half the additive distance.")
    tolerance: float = Field(..., description="Pass threshold on the additive distance.")
    passed: bool = Field(..., description="additive <= tolerance.")
    acceptance: Optional[float] = Field(None, description="Postselection acceptance of the reference.")
    pruned_mass: float = Field(0.0, description="Probability mass dropped below the pruning threshold.")


class DistanceReport(KVReport):
    """Distance between two exact distributions."""
    metric: str = Field(..., description="additive or multiplicative.")
    value: float = Field(..., description="The requested metric; inf when multiplicative fails.")
    additive: float = Field(..., description="Sum over outcomes of |p - q|.")
    tvd: float = Field(..., description="Half the additive distance.")
    infinite: bool = Field(False, description="q is positive where p vanishes.")


# --- Class statistics reports ---

class AnticoncentrationReport(KVReport):
    class_id: str
    n: int
    alpha: float
    trials: int
    successes: int
    fraction: float
    ci_low: float
    ci_high: float
    confidence: float
    beta_reference: float = Field(..., description="Reference measure quoted for IQP; informational.")


class Eq5Report(KVReport):
    """Exact check that fixing the gadget bits of the correction-free circuit reproduces each tau-variant."""
    instances: int
    checks: int
    max_abs_error: float
    tau_marginal_error: float = Field(..., description="Largest deviation of a gadget-bit marginal from 2^-t.")
    passed: bool


class ThetaSamplingReport(KVReport):
    class_id: str
    n: int
    mode: str = Field(..., description="exhaustive or sampled.")
    distance: float = Field(..., description="TVD between the law of the recovered parameters and the prior.")
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    swap_count_preserved: bool = Field(True, description="Two-qubit gate count unchanged by every swap.")


class ClosureReport(KVReport):
    instances: int
    checks: int
    recovered: int
    passed: bool


# --- Class parameters and the instance manifest ---

class IQPTheta(BaseModel):
    """Line powers v_i in 0..7 and pair powers w_ij in 0..3 (pairs i<j, row-major)."""
    v: List[int]
    w: List[int]


class RCSTheta(BaseModel):
    """Per layer, per pair: (gate name, slot) where slot 0/1 places a 1-qubit gate; CZ uses slot -1."""
    layers: List[List[Tuple[str, int]]]


class ConjugatedTheta(BaseModel):
    v_word: List[str]
    clifford: List[Tuple[str, Tuple[int, ...]]]


class InstanceManifest(KVReport):
    """One line group per generated instance; ``theta`` is written as compact JSON."""
    class_id: str
    n: int
    seed: int
    index: int = 0
    t_count: int
    file: Optional[str] = None
    theta: str = Field(..., description="JSON encoding of the class parameters.")
