import numpy as np
import pytest

from pbc_compress.circuit_format import parse
from pbc_compress.compiler import (
    DrawRandom,
    MeasurePauli,
    StaticProgram,
    compile,
    compile_nonadaptive,
    compile_postselected,
    run_with,
)
from pbc_compress.exceptions import CircuitParseError, ContractError, PostselectionMissError, ProbabilityZeroError
from pbc_compress.gadgets import gadgetize
from pbc_compress.oracle import (
    DensePauliBackend,
    distance,
    exact_distribution,
    exact_distribution_hybrid,
    exact_distribution_static,
)
from pbc_compress.pauli import DependenceTracker, commutes

from .random_circuits import random_circuit

TOL = 1e-9

# the coin on line 0 has no bearing on line 1
COIN_THEN_CERTAIN_FAILURE = "qubits 2\ngate H 0\nmeasure 0 -> a\nmeasure 1 -> b post -1\n"

PROBABILITY_ZERO_CASES = [
    "qubits 1\nmeasure 0 -> a post -1\n",
    "qubits 1\ngate X 0\nmeasure 0 -> a post +1\n",
    "qubits 1\ngate H 0\ngate H 0\nmeasure 0 -> a post -1\n",
    "qubits 1\ngate H 0\nmeasure 0 -> a post +1\nmeasure 0 -> b post -1\n",
    "qubits 2\ngate H 0\ngate CX 0 1\nmeasure 0 -> a post +1\nmeasure 1 -> b post -1\n",
    "qubits 2\ngate X 1\ngate CX 1 0\nmeasure 0 -> a post +1\n",
    "qubits 1\ngate Y 0\nmeasure 0 -> a post +1\n",
    "qubits 2\ngate H 1\ngate CZ 0 1\ngate H 1\nmeasure 1 -> a post -1\n",
    "qubits 1\ngate S 0\nmeasure 0 -> a post -1\n",
    'qubits 2\ninput-stab "ZZ" "XX"\nmeasure 0 -> a post +1\nmeasure 1 -> b post -1\n',
    COIN_THEN_CERTAIN_FAILURE,
]


def assert_measurements_valid(ops, t):
    """Pairwise commuting, independent, and no more than t of them."""
    assert len(ops) <= t
    tracker = DependenceTracker(t)
    for i, P in enumerate(ops):
        assert P.n == t
        assert all(commutes(P, Q) for Q in ops[:i])
        tracker.add(P)


class TestInteractiveCompile:
    """Hybrid enumeration of the compiled program against the dense law of the circuit."""

    def test_random_adaptive_clifford_circuits(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            c = random_circuit(rng, zero_lines=3, magic_lines=2, gates=14, measurements=4,
                               adaptive=True, quantum_outputs=bool(rng.integers(2)))
            d = exact_distribution_hybrid(compile(c))
            assert distance(exact_distribution(c), d).additive <= TOL

    @pytest.mark.slow
    def test_random_adaptive_clifford_circuits_many(self):
        rng = np.random.default_rng(200)
        for _ in range(200):
            zero, magic = int(rng.integers(1, 5)), int(rng.integers(0, 4))
            c = random_circuit(rng, zero_lines=zero, magic_lines=magic, gates=20, measurements=5,
                               adaptive=True, quantum_outputs=bool(rng.integers(2)))
            d = exact_distribution_hybrid(compile(c))
            assert distance(exact_distribution(c), d).additive <= TOL

    def test_gadgetized_t_circuits(self):
        rng = np.random.default_rng(17)
        for _ in range(15):
            c = random_circuit(rng, zero_lines=2, magic_lines=0, gates=10, measurements=2, t_gates=3)
            d = exact_distribution_hybrid(compile(gadgetize(c)))
            assert distance(exact_distribution(c), d).additive <= TOL

    def test_quantum_measurements_commute_and_are_independent(self):
        rng = np.random.default_rng(5)
        for _ in range(30):
            c = random_circuit(rng, zero_lines=2, magic_lines=3, gates=16, measurements=5, adaptive=True)
            prog = compile(c)
            sample = run_with(prog, DensePauliBackend(prog.t), rng)
            assert set(sample) == set(prog.output_records)
            assert_measurements_valid(prog.quantum_ops, prog.t)

    def test_clifford_only_input_needs_no_register(self):
        c = parse("qubits 3\ngate H 0\ngate CX 0 1\ngate CX 1 2\nmeasure 0 -> a\nmeasure 2 -> b\n")
        prog = compile(c)
        assert prog.t == 0 and prog.n == 3
        assert dict(exact_distribution_hybrid(prog).items()) == pytest.approx({"00": 0.5, "11": 0.5})
        assert prog.quantum_count == 0

    def test_anticommuting_measurement_draws_a_coin(self):
        prog = compile(parse("qubits 1\ngate H 0\nmeasure 0 -> a\n"))
        assert isinstance(prog.next_action(), DrawRandom)
        assert prog.next_action() == DrawRandom("a")
        prog.submit(-1)
        assert prog.next_action().sample == {"a": -1}

    def test_magic_measurement_reaches_the_register(self):
        prog = compile(parse("qubits 1\ninput A\ngate H 0\nmeasure 0 -> a\n"))
        action = prog.next_action()
        assert isinstance(action, MeasurePauli)
        assert str(action.operator) == "+X"

    def test_submit_without_action(self):
        with pytest.raises(ContractError):
            compile(parse("qubits 1\n")).submit(1)

    def test_non_clifford_rejected(self):
        with pytest.raises(ContractError) as err:
            compile(parse("qubits 1\ngate H 0\ngate T 0\n"))
        assert err.value.indices == (1,)

    def test_postselection_needs_postselected_mode(self):
        with pytest.raises(ContractError):
            compile(parse("qubits 1\nmeasure 0 -> a post +1\n"))


class TestPostselectedCompile:
    """Postselected programs: conditional laws, certain failures and per-run misses."""

    def test_random_postselected_circuits(self):
        rng = np.random.default_rng(31)
        checked = 0
        for _ in range(40):
            c = random_circuit(rng, zero_lines=2, magic_lines=2, gates=12, measurements=4,
                               adaptive=True, postselect_rate=0.4)
            try:
                ref = exact_distribution(c)
            except ProbabilityZeroError:
                with pytest.raises(ProbabilityZeroError):
                    exact_distribution_hybrid(compile_postselected(c))
                continue
            d = exact_distribution_hybrid(compile_postselected(c))
            assert distance(ref, d).additive <= TOL
            assert d.weight == pytest.approx(ref.weight, abs=TOL)
            checked += 1
        assert checked >= 5

    @pytest.mark.parametrize("text", PROBABILITY_ZERO_CASES)
    def test_certain_failure(self, text):
        c = parse(text)
        with pytest.raises(ProbabilityZeroError):
            exact_distribution(c)
        prog = compile_postselected(c)
        with pytest.raises(ProbabilityZeroError):
            run_with(prog, DensePauliBackend(prog.t), np.random.default_rng(0))

    def test_certain_failure_names_the_record(self):
        prog = compile_postselected(parse(PROBABILITY_ZERO_CASES[4]))
        with pytest.raises(ProbabilityZeroError) as err:
            run_with(prog, DensePauliBackend(prog.t), np.random.default_rng(0))
        assert err.value.record_id == "b"

    def test_coin_dependent_failure_is_a_miss(self):
        c = parse("qubits 1\ngate H 0\nmeasure 0 -> a\nmeasure 0 -> b post -1\n")
        d = exact_distribution_hybrid(compile_postselected(c))
        assert dict(d.items()) == pytest.approx({"1": 1.0})
        assert d.weight == pytest.approx(0.5)
        prog = compile_postselected(c)
        assert isinstance(prog.next_action(), DrawRandom)
        prog.submit(1)
        with pytest.raises(PostselectionMissError) as err:
            prog.next_action()
        assert (err.value.record_id, err.value.expected, err.value.observed) == ("b", -1, 1)

    @pytest.mark.parametrize("coin", [1, -1])
    def test_unrelated_coin_keeps_failure_certain(self, coin):
        prog = compile_postselected(parse(COIN_THEN_CERTAIN_FAILURE))
        assert prog.next_action() == DrawRandom("a")
        prog.submit(coin)
        with pytest.raises(ProbabilityZeroError) as err:
            prog.next_action()
        assert err.value.record_id == "b"

    def test_failure_tied_to_its_own_coin_halves_the_weight(self):
        c = parse("qubits 2\ngate H 0\nmeasure 0 -> a\ngate H 1\nmeasure 1 -> b\nmeasure 1 -> d post -1\n"
                  "measure 0 -> e\n")
        d = exact_distribution_hybrid(compile_postselected(c))
        assert d.weight == pytest.approx(0.5)
        assert all(key[1] == "1" for key in d.probs)


class TestStaticCompile:
    """Non-adaptive circuits compile to a fixed measurement list."""

    def test_random_non_adaptive_circuits(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            c = random_circuit(rng, zero_lines=2, magic_lines=2, gates=12, measurements=3,
                               quantum_outputs=bool(rng.integers(2)))
            static = compile_nonadaptive(c, rng=rng)
            assert_measurements_valid(static.operators, static.t)
            assert distance(exact_distribution(c), exact_distribution_static(c)).additive <= TOL

    def test_dump_parse(self):
        c = parse("qubits 3\ninput Z0 A A\ngate H 0\ngate CX 0 1\nmeasure 0 -> a\ngate H 2\nmeasure 2 -> b\n"
                  "measure 1 -> c post -1\n")
        static = compile_nonadaptive(c, lambdas=[-1])
        text = static.dump()
        assert text.startswith(f"pbc t=2 s={static.s}\n")
        assert StaticProgram.parse(text).dump() == text

    def test_parse_errors(self):
        with pytest.raises(CircuitParseError) as err:
            StaticProgram.parse("pbc t=1 s=2\nn 0\n+X\noutput\n")
        assert "2 measurements" in str(err.value)

    def test_reconstruct_checks_postselection(self):
        static = compile_nonadaptive(parse("qubits 1\ninput A\nmeasure 0 -> a post +1\n"))
        assert static.postselect == [1]
        with pytest.raises(PostselectionMissError):
            static.reconstruct([-1])

    def test_supplied_coins_must_be_used(self):
        with pytest.raises(ContractError):
            compile_nonadaptive(parse("qubits 1\nmeasure 0 -> a\n"), lambdas=[1])

    @pytest.mark.parametrize("strict", [True, False])
    def test_certain_failure_is_not_a_coin_rejection(self, strict):
        c = parse(COIN_THEN_CERTAIN_FAILURE)
        with pytest.raises(ProbabilityZeroError):
            compile_nonadaptive(c, lambdas=[1], strict=strict)
        with pytest.raises(ProbabilityZeroError):
            exact_distribution_static(c)

    def test_adaptive_rejected(self):
        with pytest.raises(ContractError):
            compile_nonadaptive(parse("qubits 1\ngate H 0\nmeasure 0 -> a\ngate X 0 if a\n"))

    def test_run_with_static_program(self):
        c = parse("qubits 2\ninput A A\ngate CX 0 1\nmeasure 1 -> a\nmeasure 0 -> b\n")
        static = compile_nonadaptive(c)
        rng = np.random.default_rng(3)
        samples = [run_with(static, DensePauliBackend(static.t), rng) for _ in range(50)]
        assert all(set(s) == {"a", "b"} for s in samples)
