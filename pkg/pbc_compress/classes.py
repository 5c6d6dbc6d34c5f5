# /pbc-compress/pbc_compress/classes.py
"""
Parameterized circuit families and the checks run on them.

Every instance is rebuilt from its parameters alone (``build_circuit``); the
seed only decides which parameters were drawn.  Circuits are returned in
lowered Clifford+T form, so the i-th T/T^dagger gate in program order is
also the i-th gadget after ``gadgetize``.  ``expand_ct`` swaps a chosen
subset of those gates, ``closure_check`` finds IQP parameters that realize the
swapped circuit, and the two sampling relations between swapped circuits and
gadget outcomes are checked exactly on small instances.
"""

from __future__ import annotations

import itertools
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel
from scipy import stats

from .circuit import Circuit, Gate, Measure, lower_gates
from .config import settings
from .constants import (
    CLASS_RECORD_PREFIX,
    DEFAULT_CONFIDENCE,
    DIAGONAL_WEIGHTS,
    IQP_BETA_REFERENCE,
    SQRT_WORDS,
    T_POWER_WORDS,
    T_TYPE_GATES,
)
from .exceptions import ConfigurationError, ContractError
from .flags import ClassId, InputKind
from .gadgets import expand_cs, gadget_records, gadgetize, strip_corrections
from .logging import setup_logger
from .models import (
    AnticoncentrationReport,
    ClosureReport,
    ConjugatedTheta,
    Eq5Report,
    InstanceManifest,
    IQPTheta,
    RCSTheta,
    ThetaSamplingReport,
)
from .oracle import exact_distribution, unitary_equal_up_to_phase
from .utils import log_structured

log = setup_logger(__name__, settings.LOG_LEVEL, settings.LOG_PATH)

RCS_GATES: tuple[str, ...] = ("CZ", "SqrtX", "SqrtXdg", "SqrtY", "SqrtYdg", "T", "Tdg")
CLIFFORD_DRAW_GATES: tuple[str, ...] = ("H", "S", "CX")
_INVERSE_NAMES = {
    "H": "H", "X": "X", "Y": "Y", "Z": "Z", "S": "Sdg", "Sdg": "S", "T": "Tdg", "Tdg": "T",
    "SqrtX": "SqrtXdg", "SqrtXdg": "SqrtX", "SqrtY": "SqrtYdg", "SqrtYdg": "SqrtY",
}

Theta = Union[IQPTheta, RCSTheta, ConjugatedTheta, None]


@dataclass(frozen=True)
class ClassInstance:
    class_id: ClassId
    n: int
    theta: Theta
    seed: Optional[int]
    circuit: Circuit

    @property
    def t_count(self) -> int:
        return sum(1 for g in self.circuit.gates if g.name in T_TYPE_GATES)

    def manifest(self, index: int = 0, file: Optional[str] = None) -> InstanceManifest:
        theta = self.theta.model_dump_json() if isinstance(self.theta, BaseModel) else "{}"
        return InstanceManifest(class_id=self.class_id.value, n=self.n, seed=self.seed if self.seed is not None else 0,
                                index=index, t_count=self.t_count, file=file, theta=theta)


def pairs(n: int) -> list[tuple[int, int]]:
    """Line pairs i < j in row-major order; the index order of ``IQPTheta.w``."""
    return list(itertools.combinations(range(n), 2))


def _measure_all(n: int) -> list[Measure]:
    return [Measure(i, f"{CLASS_RECORD_PREFIX}{i}") for i in range(n)]


# --- circuit construction from parameters ---------------------------------------

def iqp_circuit(n: int, theta: IQPTheta) -> Circuit:
    """H^n, T^{v_i} on each line, CS^{w_ij} on each pair, H^n, then Z on every line."""
    if len(theta.v) != n or len(theta.w) != len(pairs(n)):
        raise ContractError(f"IQP parameters do not fit n={n}")
    steps: list = [Gate("H", (i,)) for i in range(n)]
    for i, v in enumerate(theta.v):
        steps += [Gate(name, (i,)) for name in T_POWER_WORDS[v % 8]]
    for (i, j), w in zip(pairs(n), theta.w):
        w %= 4
        if w:
            steps.append(Gate({1: "CS", 2: "CZ", 3: "CSdg"}[w], (i, j)))
    steps += [Gate("H", (i,)) for i in range(n)]
    c = Circuit(num_lines=n, inputs=(InputKind.ZERO,) * n, steps=tuple(steps + _measure_all(n)))
    return expand_cs(c)


def rcs_circuit(n: int, theta: RCSTheta) -> Circuit:
    """Alternating brickwork of pair gates; 1-qubit choices sit in slot 0 or 1 of their pair."""
    steps: list = []
    for depth, layer in enumerate(theta.layers):
        layer_pairs = [(a, a + 1) for a in range(depth % 2, n - 1, 2)]
        if len(layer) != len(layer_pairs):
            raise ContractError(f"RCS layer {depth} has {len(layer)} choices for {len(layer_pairs)} pairs")
        for (a, b), (name, slot) in zip(layer_pairs, layer):
            if name == "CZ":
                steps.append(Gate("CZ", (a, b)))
            else:
                steps.append(Gate(name, ((a, b)[slot],)))
    c = Circuit(num_lines=n, inputs=(InputKind.ZERO,) * n, steps=tuple(steps + _measure_all(n)))
    return lower_gates(c, {name: tuple((g, (0,)) for g in word) for name, word in SQRT_WORDS.items()})


def invert_word(word: Sequence[str]) -> list[str]:
    return [_INVERSE_NAMES[g] for g in reversed(word)]


def conjugated_circuit(n: int, theta: ConjugatedTheta) -> Circuit:
    """V on every line, the Clifford U, V^dagger on every line, then Z on every line."""
    steps: list = []
    for i in range(n):
        steps += [Gate(g, (i,)) for g in theta.v_word]
    steps += [Gate(name, tuple(targets)) for name, targets in theta.clifford]
    for i in range(n):
        steps += [Gate(g, (i,)) for g in invert_word(theta.v_word)]
    c = Circuit(num_lines=n, inputs=(InputKind.ZERO,) * n, steps=tuple(steps + _measure_all(n)))
    return lower_gates(c, {name: tuple((g, (0,)) for g in word) for name, word in SQRT_WORDS.items()})


def hadamard_circuit(n: int) -> Circuit:
    steps = [Gate("H", (i,)) for i in range(n)] + _measure_all(n)
    return Circuit(num_lines=n, inputs=(InputKind.ZERO,) * n, steps=tuple(steps))


def build_circuit(class_id: ClassId | str, n: int, theta: Theta) -> Circuit:
    class_id = ClassId(class_id)
    if class_id in (ClassId.IQP_ISING, ClassId.SPARSE_IQP):
        return iqp_circuit(n, theta)
    if class_id is ClassId.RCS:
        return rcs_circuit(n, theta)
    if class_id is ClassId.CONJUGATED_CLIFFORD:
        return conjugated_circuit(n, theta)
    return hadamard_circuit(n)


def _instance(class_id: ClassId, n: int, theta: Theta, seed: Optional[int]) -> ClassInstance:
    return ClassInstance(class_id, n, theta, seed, build_circuit(class_id, n, theta))


# --- generators -----------------------------------------------------------------

def _check_n(n: int, minimum: int = 1) -> None:
    if n < minimum:
        raise ConfigurationError(f"n must be at least {minimum}, got {n}")


def gen_iqp_ising(n: int, rng: np.random.Generator, seed: Optional[int] = None) -> ClassInstance:
    _check_n(n)
    v = [int(x) for x in rng.integers(0, 8, size=n)]
    w = [int(x) for x in rng.integers(0, 4, size=len(pairs(n)))]
    return _instance(ClassId.IQP_ISING, n, IQPTheta(v=v, w=w), seed)


def gen_sparse_iqp(n: int, p: float, rng: np.random.Generator, seed: Optional[int] = None) -> ClassInstance:
    """Each CS^w is present with probability p, so ``Pr[w=0] = 1/4 + 3/4 (1-p)``."""
    _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"sparsity p must lie in [0, 1], got {p}")
    v = [int(x) for x in rng.integers(0, 8, size=n)]
    w = []
    for _ in pairs(n):
        present = rng.random() < p
        w.append(int(rng.integers(0, 4)) if present else 0)
    return _instance(ClassId.SPARSE_IQP, n, IQPTheta(v=v, w=w), seed)


def gen_rcs(n: int, depth: int, rng: np.random.Generator, seed: Optional[int] = None) -> ClassInstance:
    _check_n(n, 2)
    if depth < 1:
        raise ConfigurationError(f"depth must be at least 1, got {depth}")
    layers = []
    for d in range(depth):
        layer = []
        for _ in range(d % 2, n - 1, 2):
            name = RCS_GATES[int(rng.integers(len(RCS_GATES)))]
            slot = -1 if name == "CZ" else int(rng.integers(2))
            layer.append((name, slot))
        layers.append(layer)
    return _instance(ClassId.RCS, n, RCSTheta(layers=layers), seed)


def random_clifford_word(n: int, length: int, rng: np.random.Generator) -> list[tuple[str, tuple[int, ...]]]:
    word = []
    for _ in range(length):
        name = CLIFFORD_DRAW_GATES[int(rng.integers(len(CLIFFORD_DRAW_GATES)))]
        if name == "CX" and n < 2:
            name = "H"
        if name == "CX":
            a, b = (int(x) for x in rng.choice(n, size=2, replace=False))
            word.append((name, (a, b)))
        else:
            word.append((name, (int(rng.integers(n)),)))
    return word


def gen_conjugated_clifford(
    n: int, v_word: Sequence[str], rng: np.random.Generator, seed: Optional[int] = None
) -> ClassInstance:
    """U is a uniformly drawn word of ``CLIFFORD_LAYER_LENGTH * n`` gates over {H, S, CX}."""
    _check_n(n)
    unknown = [g for g in v_word if g not in _INVERSE_NAMES]
    if unknown:
        raise ConfigurationError(f"V must be a word of 1-qubit Clifford+T gates, got {unknown[0]!r}")
    clifford = random_clifford_word(n, settings.CLIFFORD_LAYER_LENGTH * n, rng)
    return _instance(ClassId.CONJUGATED_CLIFFORD, n, ConjugatedTheta(v_word=list(v_word), clifford=clifford), seed)


def gen_hadamard(n: int, rng: Optional[np.random.Generator] = None, seed: Optional[int] = None) -> ClassInstance:
    """Calibration family: H on every line, uniform output."""
    _check_n(n)
    return _instance(ClassId.HADAMARD, n, None, seed)


def generate(
    class_id: ClassId | str,
    n: int,
    seed: int,
    *,
    p: float = 1.0,
    depth: int = 4,
    v_word: Sequence[str] = ("T",),
) -> ClassInstance:
    """One instance drawn from ``default_rng(seed)``."""
    class_id = ClassId(class_id)
    rng = np.random.default_rng(seed)
    if class_id is ClassId.IQP_ISING:
        return gen_iqp_ising(n, rng, seed)
    if class_id is ClassId.SPARSE_IQP:
        return gen_sparse_iqp(n, p, rng, seed)
    if class_id is ClassId.RCS:
        return gen_rcs(n, depth, rng, seed)
    if class_id is ClassId.CONJUGATED_CLIFFORD:
        return gen_conjugated_clifford(n, v_word, rng, seed)
    return gen_hadamard(n, rng, seed)


def theta_from_json(class_id: ClassId | str, text: str) -> Theta:
    class_id = ClassId(class_id)
    data = json.loads(text)
    if class_id in (ClassId.IQP_ISING, ClassId.SPARSE_IQP):
        return IQPTheta(**data)
    if class_id is ClassId.RCS:
        return RCSTheta(**data)
    if class_id is ClassId.CONJUGATED_CLIFFORD:
        return ConjugatedTheta(**data)
    return None


# --- T/T^dagger reassignment ---------------------------------------------------------

def t_positions(c: Circuit) -> list[int]:
    return [i for i, s in enumerate(c.steps) if isinstance(s, Gate) and s.name in T_TYPE_GATES]


def original_tau_bits(c: Circuit) -> list[int]:
    """1 for every T^dagger, in program order."""
    return [int(c.steps[i].name == "Tdg") for i in t_positions(c)]


def expand_ct(inst: ClassInstance | Circuit, tau: Sequence[int]) -> Circuit:
    """Swaps T <-> T^dagger at the i-th T-type gate iff ``tau[i] == 1``."""
    c = inst.circuit if isinstance(inst, ClassInstance) else inst
    positions = t_positions(c)
    if len(tau) != len(positions):
        raise ContractError(f"tau has {len(tau)} bits for {len(positions)} T-type gates")
    steps = list(c.steps)
    for pos, bit in zip(positions, tau):
        if bit:
            g = steps[pos]
            steps[pos] = Gate("Tdg" if g.name == "T" else "T", g.targets, g.control)
    return c.with_steps(steps)


def phase_polynomial(c: Circuit) -> tuple[list[int], dict[tuple[int, int], int]]:
    """
    Exponent (units of pi/4, mod 8) of the diagonal section between the two H
    layers of an IQP circuit: ``sum L_i x_i + sum K_ij x_i x_j``.

    CX gates are tracked as GF(2) parities; a diagonal gate of weight d on
    the parity x_a xor x_b adds d to L_a and L_b and -2d to K_ab.
    """
    n = c.num_lines
    body = [s for s in c.steps if isinstance(s, Gate)]
    if body[:n] != [Gate("H", (i,)) for i in range(n)] or body[-n:] != [Gate("H", (i,)) for i in range(n)]:
        raise ContractError("not an H-sandwiched diagonal circuit")
    forms = [frozenset({i}) for i in range(n)]
    L = [0] * n
    K: dict[tuple[int, int], int] = {p: 0 for p in pairs(n)}
    for g in body[n:-n]:
        if g.name == "CX":
            a, b = g.targets
            forms[b] = forms[b] ^ forms[a]
        elif g.name == "CZ":
            a, b = g.targets
            if len(forms[a]) != 1 or len(forms[b]) != 1:
                raise ContractError("CZ on parity lines is outside the IQP layout")
            key = tuple(sorted((next(iter(forms[a])), next(iter(forms[b])))))
            K[key] += 4
        elif g.name in DIAGONAL_WEIGHTS:
            d = DIAGONAL_WEIGHTS[g.name]
            form = sorted(forms[g.targets[0]])
            if len(form) == 1:
                L[form[0]] += d
            elif len(form) == 2:
                L[form[0]] += d
                L[form[1]] += d
                K[tuple(form)] -= 2 * d
            else:
                raise ContractError("diagonal gate on a parity of more than two lines")
        else:
            raise ContractError(f"gate {g.name} is outside the IQP layout")
    if any(forms[i] != frozenset({i}) for i in range(n)):
        raise ContractError("parity network does not return to the identity")
    return [x % 8 for x in L], {k: v % 8 for k, v in K.items()}


def closure_check(inst: ClassInstance, tau: Sequence[int], verify: bool = True) -> IQPTheta:
    """
    IQP parameters theta' whose circuit equals ``expand_ct(inst, tau)`` up to
    global phase: v'_i = L_i and w'_ij = K_ij / 2 from the phase polynomial.

    Raises:
        ContractError: not an IQP instance, or the recovered circuit differs.
    """
    if inst.class_id not in (ClassId.IQP_ISING, ClassId.SPARSE_IQP):
        raise ContractError("closure is defined for IQP instances")
    swapped = expand_ct(inst, tau)
    L, K = phase_polynomial(swapped)
    if any(k % 2 for k in K.values()):
        raise ContractError("odd quadratic phase cannot come from a CS power")
    recovered = IQPTheta(v=L, w=[(K[p] // 2) % 4 for p in pairs(inst.n)])
    if verify:
        target = _unitary_part(swapped)
        candidate = _unitary_part(iqp_circuit(inst.n, recovered))
        if not unitary_equal_up_to_phase(candidate, target):
            raise ContractError(f"recovered parameters {recovered} do not reproduce the swapped circuit")
    return recovered


def _unitary_part(c: Circuit) -> Circuit:
    return c.with_steps([s for s in c.steps if isinstance(s, Gate)])


def closure_sweep(instances: Sequence[ClassInstance]) -> ClosureReport:
    """Every tau of every instance; each must recover parameters with unitary equality."""
    checks = recovered = 0
    for inst in instances:
        for tau in itertools.product((0, 1), repeat=inst.t_count):
            checks += 1
            try:
                closure_check(inst, tau)
                recovered += 1
            except ContractError as e:
                log_structured(log, "warning", "closure failed", seed=inst.seed, tau=list(tau), error=str(e))
    log_structured(log, "info", "closure sweep", instances=len(instances), checks=checks, recovered=recovered)
    return ClosureReport(instances=len(instances), checks=checks, recovered=recovered, passed=recovered == checks)


# --- consistency of the swapped family with gadget outcomes ---------------------------

def eq5_check(instances: Sequence[ClassInstance], tol: float = 1e-10) -> Eq5Report:
    """
    For each instance, the correction-free gadget circuit U measures (x, b)
    and ``p_tau(x) = u(x, b) * 2^t`` must hold for ``tau = b xor orig``,
    where orig marks the T^dagger gates. Each gadget bit is also uniform.
    """
    checks = 0
    max_err = 0.0
    marginal_err = 0.0
    for inst in instances:
        stripped = strip_corrections(gadgetize(inst.circuit))
        t = len(gadget_records(stripped))
        u = exact_distribution(stripped)
        orig = original_tau_bits(inst.circuit)
        n_out = len(u.records) - t
        for b in itertools.product((0, 1), repeat=t):
            tau = [bi ^ oi for bi, oi in zip(b, orig)]
            p = exact_distribution(expand_ct(inst, tau))
            b_key = "".join(map(str, b))
            for x_bits in itertools.product("01", repeat=n_out):
                x = "".join(x_bits)
                checks += 1
                max_err = max(max_err, abs(p[x] - u[x + b_key] * 2 ** t))
        gadget_ids = list(u.records[n_out:])
        for rid in gadget_ids:
            marginal = u.marginal([rid])
            marginal_err = max(marginal_err, abs(marginal["0"] - 0.5), abs(marginal["1"] - 0.5))
    return Eq5Report(instances=len(instances), checks=checks, max_abs_error=max_err,
                     tau_marginal_error=marginal_err, passed=max_err <= tol and marginal_err <= tol)


def _iqp_prior(theta: IQPTheta, p: Fraction) -> Fraction:
    zero = Fraction(1, 4) + Fraction(3, 4) * (1 - p)
    nonzero = p / 4
    prob = Fraction(1, 8) ** len(theta.v)
    for w in theta.w:
        prob *= zero if w == 0 else nonzero
    return prob


def _iqp_theta_space(n: int, p: Fraction):
    ws = [0] if p == 0 else range(4)
    for v in itertools.product(range(8), repeat=n):
        for w in itertools.product(ws, repeat=len(pairs(n))):
            yield IQPTheta(v=list(v), w=list(w))


def _theta_key(theta: IQPTheta) -> tuple:
    return tuple(theta.v) + tuple(theta.w)


def _two_qubit_count(theta: IQPTheta) -> int:
    return sum(1 for w in theta.w if w % 4)


def theta_sampling_check(
    class_id: ClassId | str,
    n: int,
    samples: Optional[int] = None,
    *,
    p: float = 1.0,
    rng: Optional[np.random.Generator] = None,
    confidence: float = DEFAULT_CONFIDENCE,
) -> ThetaSamplingReport:
    """
    Law of the recovered parameters theta'(theta, tau) with theta drawn from
    the class prior and tau uniform, compared with the prior itself.

    With ``samples=None`` every (theta, tau) is enumerated in exact rational
    arithmetic and the distance is the exact TVD. Otherwise the distance is
    the largest per-coordinate marginal TVD of ``samples`` draws, with a
    binomial interval for the cell that deviates most.
    """
    class_id = ClassId(class_id)
    if class_id not in (ClassId.IQP_ISING, ClassId.SPARSE_IQP):
        raise ConfigurationError("theta sampling is checked for the IQP families")
    p_frac = Fraction(1) if class_id is ClassId.IQP_ISING else Fraction(str(p))
    preserved = True

    if samples is None:
        law: dict[tuple, Fraction] = {}
        prior: dict[tuple, Fraction] = {}
        for theta in _iqp_theta_space(n, p_frac):
            weight = _iqp_prior(theta, p_frac)
            if weight == 0:
                continue
            prior[_theta_key(theta)] = weight
            inst = _instance(class_id, n, theta, None)
            t = inst.t_count
            for tau in itertools.product((0, 1), repeat=t):
                recovered = closure_check(inst, tau, verify=False)
                preserved &= _two_qubit_count(recovered) == _two_qubit_count(theta)
                key = _theta_key(recovered)
                law[key] = law.get(key, Fraction(0)) + weight / 2 ** t
        keys = set(law) | set(prior)
        tvd = sum(abs(law.get(k, Fraction(0)) - prior.get(k, Fraction(0))) for k in keys) / 2
        return ThetaSamplingReport(class_id=class_id.value, n=n, mode="exhaustive", distance=float(tvd),
                                   swap_count_preserved=preserved)

    if samples < 1:
        raise ConfigurationError("at least one sample is needed")
    rng = rng if rng is not None else np.random.default_rng()
    coords = n + len(pairs(n))
    counts = [Counter() for _ in range(coords)]
    for _ in range(samples):
        inst = gen_iqp_ising(n, rng) if class_id is ClassId.IQP_ISING else gen_sparse_iqp(n, p, rng)
        tau = [int(b) for b in rng.integers(0, 2, size=inst.t_count)]
        recovered = closure_check(inst, tau, verify=False)
        preserved &= _two_qubit_count(recovered) == _two_qubit_count(inst.theta)
        for k, value in enumerate(_theta_key(recovered)):
            counts[k][value] += 1
    worst = (0.0, 0, 0.0)  # (tvd, successes, prior probability)
    for k in range(coords):
        if k < n:
            prior_k = {v: 1 / 8 for v in range(8)}
        else:
            zero = 0.25 + 0.75 * (1 - float(p_frac))
            prior_k = {0: zero, 1: float(p_frac) / 4, 2: float(p_frac) / 4, 3: float(p_frac) / 4}
        tvd = 0.5 * sum(abs(counts[k][v] / samples - q) for v, q in prior_k.items())
        if tvd >= worst[0]:
            cell = max(prior_k, key=lambda v: abs(counts[k][v] / samples - prior_k[v]))
            worst = (tvd, counts[k][cell], prior_k[cell])
    ci = stats.binomtest(worst[1], samples, worst[2]).proportion_ci(confidence_level=confidence)
    return ThetaSamplingReport(class_id=class_id.value, n=n, mode="sampled", distance=worst[0],
                               ci_low=float(ci.low), ci_high=float(ci.high), swap_count_preserved=preserved)


# --- anticoncentration -----------------------------------------------------------

def anticoncentration_estimate(
    class_id: ClassId | str,
    n: int,
    num_samples: int,
    alpha: float,
    rng: np.random.Generator,
    *,
    p: float = 1.0,
    depth: int = 4,
    v_word: Sequence[str] = ("T",),
    confidence: float = DEFAULT_CONFIDENCE,
) -> AnticoncentrationReport:
    """
    Fraction of (theta, x) pairs, theta from the class prior and x uniform,
    with ``p_theta(x) >= alpha / 2^n``, and a binomial confidence interval.
    """
    class_id = ClassId(class_id)
    if num_samples < 1:
        raise ConfigurationError("at least one sample is needed")
    threshold = alpha / 2 ** n
    successes = 0
    for _ in range(num_samples):
        seed = int(rng.integers(2 ** 63))
        inst = generate(class_id, n, seed, p=p, depth=depth, v_word=v_word)
        dist = exact_distribution(inst.circuit)
        x = "".join(str(int(b)) for b in rng.integers(0, 2, size=n))
        successes += dist[x] >= threshold * (1 - 1e-12)
    ci = stats.binomtest(successes, num_samples).proportion_ci(confidence_level=confidence)
    report = AnticoncentrationReport(
        class_id=class_id.value, n=n, alpha=alpha, trials=num_samples, successes=successes,
        fraction=successes / num_samples, ci_low=float(ci.low), ci_high=float(ci.high),
        confidence=confidence, beta_reference=IQP_BETA_REFERENCE,
    )
    log_structured(log, "info", "anticoncentration estimate", **report.model_dump())
    return report
