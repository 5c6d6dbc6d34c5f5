import itertools
from collections import Counter

import numpy as np
import pytest
from scipy import stats

from pbc_compress.classes import (
    ClassInstance,
    anticoncentration_estimate,
    closure_check,
    closure_sweep,
    conjugated_circuit,
    eq5_check,
    expand_ct,
    gen_conjugated_clifford,
    gen_hadamard,
    gen_iqp_ising,
    gen_rcs,
    gen_sparse_iqp,
    generate,
    iqp_circuit,
    original_tau_bits,
    pairs,
    phase_polynomial,
    theta_from_json,
    theta_sampling_check,
)
from pbc_compress.circuit import Gate
from pbc_compress.exceptions import ConfigurationError, ContractError
from pbc_compress.flags import ClassId
from pbc_compress.models import ConjugatedTheta, IQPTheta
from pbc_compress.oracle import exact_distribution, unitary_equal_up_to_phase

ALLOWED_LOWERED = {"H", "S", "Sdg", "X", "Y", "Z", "T", "Tdg", "CX", "CZ"}


def iqp_matrix(theta: IQPTheta, n: int) -> np.ndarray:
    """H^n diag(exp(i pi/4 (sum v_i x_i + 2 sum w_ij x_i x_j))) H^n, qubit 0 most significant."""
    phases = []
    for x in itertools.product((0, 1), repeat=n):
        e = sum(v * xi for v, xi in zip(theta.v, x))
        e += sum(2 * w * x[i] * x[j] for (i, j), w in zip(pairs(n), theta.w))
        phases.append(np.exp(1j * np.pi / 4 * e))
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    hn = h
    for _ in range(n - 1):
        hn = np.kron(hn, h)
    return hn @ np.diag(phases) @ hn


def gates_only(c):
    return c.with_steps([s for s in c.steps if isinstance(s, Gate)])


class TestIQP:
    """IQP construction from (v, w)."""

    def test_all_zero_parameters_give_point_mass(self):
        c = iqp_circuit(3, IQPTheta(v=[0, 0, 0], w=[0, 0, 0]))
        assert dict(exact_distribution(c).items()) == pytest.approx({"000": 1.0})

    def test_matches_phase_formula(self):
        rng = np.random.default_rng(6)
        for _ in range(10):
            inst = gen_iqp_ising(3, rng)
            assert unitary_equal_up_to_phase(gates_only(inst.circuit), iqp_matrix(inst.theta, 3))

    def test_t_count(self):
        c = iqp_circuit(2, IQPTheta(v=[1, 3], w=[1]))
        assert sum(1 for g in c.gates if g.name in ("T", "Tdg")) == 5

    def test_odd_powers_use_t_only(self):
        c = iqp_circuit(1, IQPTheta(v=[7], w=[]))
        assert [g.name for g in c.gates] == ["H", "Z", "S", "T", "H"]

    def test_bad_parameter_shape(self):
        with pytest.raises(ContractError):
            iqp_circuit(2, IQPTheta(v=[0], w=[0]))

    def test_sparse_pair_law(self):
        p = 0.3
        rng = np.random.default_rng(13)
        counts = Counter()
        for _ in range(600):
            counts.update(gen_sparse_iqp(4, p, rng).theta.w)
        observed = [counts[w] for w in range(4)]
        total = sum(observed)
        zero = 0.25 + 0.75 * (1 - p)
        expected = [total * zero] + [total * p / 4] * 3
        assert stats.chisquare(observed, expected).pvalue > 1e-3

    def test_sparsity_out_of_range(self):
        with pytest.raises(ConfigurationError):
            gen_sparse_iqp(2, 1.5, np.random.default_rng(0))


class TestOtherFamilies:
    def test_rcs_is_lowered_clifford_t(self):
        inst = gen_rcs(4, 5, np.random.default_rng(2))
        assert {g.name for g in inst.circuit.gates} <= ALLOWED_LOWERED
        expected_t = sum(1 for layer in inst.theta.layers for name, _ in layer if name in ("T", "Tdg"))
        assert inst.t_count == expected_t
        assert exact_distribution(inst.circuit).total() == pytest.approx(1.0)

    def test_rcs_needs_two_lines(self):
        with pytest.raises(ConfigurationError):
            gen_rcs(1, 3, np.random.default_rng(0))

    def test_conjugated_identity_core(self):
        c = conjugated_circuit(2, ConjugatedTheta(v_word=["T", "H"], clifford=[]))
        assert dict(exact_distribution(c).items()) == pytest.approx({"00": 1.0})

    def test_conjugated_t_count(self):
        inst = gen_conjugated_clifford(3, ["T"], np.random.default_rng(4))
        assert inst.t_count == 6
        assert len(inst.theta.clifford) == 4 * 3

    def test_conjugated_rejects_unknown_gate(self):
        with pytest.raises(ConfigurationError):
            gen_conjugated_clifford(2, ["Q"], np.random.default_rng(0))

    def test_hadamard_is_uniform(self):
        d = exact_distribution(gen_hadamard(3).circuit)
        assert len(d) == 8
        np.testing.assert_allclose(list(d.probs.values()), [1 / 8] * 8, atol=1e-12)

    def test_generate_is_seed_deterministic(self):
        for class_id in ClassId:
            a = generate(class_id, 3, 99)
            b = generate(class_id, 3, 99)
            assert a.theta == b.theta
            assert a.circuit == b.circuit

    def test_manifest_round_trip(self):
        inst = generate("sparse-iqp", 3, 5, p=0.5)
        m = inst.manifest(index=2, file="sparse-iqp_n3_0002.circ")
        assert m.t_count == inst.t_count
        assert "index=2" in m.to_kv_lines()
        assert theta_from_json("sparse-iqp", m.theta) == inst.theta


class TestTSwaps:
    """Swapping T and T-dagger keeps IQP circuits inside the family."""

    def test_middle_swap_shifts_pair_power(self):
        inst = ClassInstance(ClassId.IQP_ISING, 2, IQPTheta(v=[0, 0], w=[1]), None,
                             iqp_circuit(2, IQPTheta(v=[0, 0], w=[1])))
        assert original_tau_bits(inst.circuit) == [0, 0, 1]
        assert closure_check(inst, [0, 0, 1]) == IQPTheta(v=[2, 2], w=[3])
        assert closure_check(inst, [0, 0, 0]) == IQPTheta(v=[0, 0], w=[1])

    def test_swapping_a_line_t(self):
        theta = IQPTheta(v=[1], w=[])
        inst = ClassInstance(ClassId.IQP_ISING, 1, theta, None, iqp_circuit(1, theta))
        assert closure_check(inst, [1]) == IQPTheta(v=[7], w=[])

    def test_closure_on_small_instances(self):
        rng = np.random.default_rng(20)
        instances = [gen_iqp_ising(2, rng) for _ in range(20)]
        report = closure_sweep(instances)
        assert report.passed
        assert report.checks == sum(2 ** inst.t_count for inst in instances)

    def test_closure_three_lines(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            inst = gen_sparse_iqp(3, 0.7, rng)
            tau = [int(b) for b in rng.integers(0, 2, size=inst.t_count)]
            recovered = closure_check(inst, tau)
            assert len(recovered.v) == 3 and len(recovered.w) == 3

    def test_expand_ct_checks_length(self):
        inst = generate("iqp-ising", 2, 3)
        with pytest.raises(ContractError):
            expand_ct(inst, [0] * (inst.t_count + 1))

    def test_closure_needs_iqp(self):
        inst = generate("rcs", 3, 1)
        with pytest.raises(ContractError):
            closure_check(inst, [0] * inst.t_count)

    def test_phase_polynomial_rejects_other_layouts(self):
        with pytest.raises(ContractError):
            phase_polynomial(gen_hadamard(2).circuit.with_steps(()))

    def test_gadget_bits_reproduce_swapped_circuits(self):
        rng = np.random.default_rng(30)
        instances = [gen_iqp_ising(2, rng) for _ in range(4)]
        report = eq5_check(instances)
        assert report.passed
        assert report.max_abs_error <= 1e-10
        assert report.tau_marginal_error <= 1e-10

    @pytest.mark.parametrize("class_id, p", [("iqp-ising", 1.0), ("sparse-iqp", 0.5)])
    def test_recovered_parameters_follow_the_prior_exactly(self, class_id, p):
        report = theta_sampling_check(class_id, 2, p=p)
        assert report.mode == "exhaustive"
        assert report.distance == 0.0
        assert report.swap_count_preserved

    def test_sampled_theta_law(self):
        report = theta_sampling_check("iqp-ising", 3, 1000, rng=np.random.default_rng(8))
        assert report.mode == "sampled"
        assert report.distance < 0.1
        assert report.ci_low <= report.ci_high

    def test_theta_sampling_needs_iqp(self):
        with pytest.raises(ConfigurationError):
            theta_sampling_check("rcs", 2)


class TestAnticoncentration:
    def test_hadamard_always_succeeds(self):
        report = anticoncentration_estimate("hadamard", 3, 50, 1.0, np.random.default_rng(0))
        assert report.successes == report.trials == 50
        assert report.fraction == 1.0
        assert report.ci_high == pytest.approx(1.0)

    def test_iqp_interval_brackets_fraction(self):
        report = anticoncentration_estimate("iqp-ising", 2, 60, 0.5, np.random.default_rng(1))
        assert 0.0 <= report.ci_low <= report.fraction <= report.ci_high <= 1.0
        assert report.beta_reference == pytest.approx(1 / 12)

    def test_needs_samples(self):
        with pytest.raises(ConfigurationError):
            anticoncentration_estimate("iqp-ising", 2, 0, 0.5, np.random.default_rng(1))
