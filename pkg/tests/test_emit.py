import numpy as np
import pytest

from pbc_compress.circuit_format import parse
from pbc_compress.compiler import compile, compile_nonadaptive
from pbc_compress.emit import AdaptiveDriver, compress_pipeline, driver_distribution, emit_adaptive, emit_cm
from pbc_compress.exceptions import ContractError, ProbabilityZeroError
from pbc_compress.flags import Direction, InputKind
from pbc_compress.gadgets import gadgetize, gadgetize_postselected
from pbc_compress.oracle import distance, exact_distribution, exact_distribution_static
from pbc_compress.pauli import PauliOperator
from pbc_compress.tableau import conjugate_pauli

from .random_circuits import random_circuit

TOL = 1e-9

POSTSELECTED_T = (
    "qubits 2\ngate H 0\ngate T 0\ngate CX 0 1\ngate H 0\nmeasure 0 -> a\nmeasure 1 -> b post +1\n"
)
CERTAIN_FAILURE_AFTER_COIN = "qubits 2\ngate H 0\nmeasure 0 -> a\nmeasure 1 -> b post -1\n"


class TestEmitCM:
    """Static programs as one Clifford plus Z measurements."""

    def test_single_x_measurement(self):
        static = compile_nonadaptive(parse("qubits 1\ninput A\ngate H 0\nmeasure 0 -> a\n"))
        cm = emit_cm(static)
        assert cm.inputs == (InputKind.MAGIC,)
        assert cm.output_bits == ("p0",)
        d = exact_distribution(cm)
        np.testing.assert_allclose([d["0"], d["1"]], [0.8535533905932737, 0.1464466094067262], atol=1e-12)

    def test_empty_measurement_list(self):
        static = compile_nonadaptive(parse("qubits 1\nmeasure 0 -> a\n"))
        cm = emit_cm(static)
        assert cm.num_lines == 0 and not cm.steps
        assert static.output_key_from_cm("") == "0"

    def test_postselection_is_kept(self):
        static = compile_nonadaptive(parse("qubits 2\ninput A A\nmeasure 0 -> a post -1\nmeasure 1 -> b\n"))
        cm = emit_cm(static)
        assert [m.postselect for m in cm.measurements] == [-1, None]
        assert cm.output_bits == ("p1",)

    def test_interactive_program_rejected(self):
        with pytest.raises(ContractError):
            emit_cm(compile(parse("qubits 1\n")))

    def test_random_static_round_trip_through_cm(self):
        rng = np.random.default_rng(4)
        for _ in range(15):
            c = random_circuit(rng, zero_lines=2, magic_lines=3, gates=14, measurements=3)
            static = compile_nonadaptive(c, rng=rng)
            cm = emit_cm(static)
            assert cm.num_lines == static.t
            assert len(cm.measurements) == static.s


class TestAdaptiveDriver:
    """Clifford blocks plus Z measurements on one line."""

    def test_blocks_compose_to_each_operator(self):
        prog = compile(parse("qubits 2\ninput A A\nmeasure 0 -> a\n"))
        driver = AdaptiveDriver(prog)
        ops = [PauliOperator.from_string(s) for s in ("XI", "-ZY", "YY")]
        total = []
        for P in ops:
            total += driver.block_for(P)
            assert conjugate_pauli(total, PauliOperator.single(2, 0, "Z"), Direction.REVERSE) == P
        assert driver.blocks_emitted == 3

    def test_driver_law_matches_circuit(self):
        rng = np.random.default_rng(9)
        for _ in range(15):
            c = random_circuit(rng, zero_lines=2, magic_lines=1, gates=10, measurements=3, t_gates=2,
                               adaptive=True)
            d = driver_distribution(compile(gadgetize(c)))
            assert distance(exact_distribution(c), d).additive <= TOL

    def test_run_and_transcript(self):
        c = parse("qubits 1\ngate H 0\ngate T 0\ngate H 0\nmeasure 0 -> a\n")
        driver = emit_adaptive(compile(gadgetize(c)))
        sample = driver.run(np.random.default_rng(1))
        assert set(sample) == {"a"}
        text = driver.dump(seed=1)
        lines = text.splitlines()
        assert lines[0] == "adaptive t=1 seed=1"
        assert lines[-2] == "output a"
        assert lines[-1] == f"sample {0 if sample['a'] == 1 else 1}"
        assert any(line.startswith("measure 0 -> ") for line in lines)

    def test_needs_interactive_program(self):
        with pytest.raises(ContractError):
            emit_adaptive(compile_nonadaptive(parse("qubits 1\nmeasure 0 -> a\n")))


class TestPipeline:
    """Gadgetize, compile and emit in one call."""

    def test_non_adaptive_clifford_takes_static_route(self):
        c = parse("qubits 3\ninput Z0 A A\ngate H 0\ngate CX 0 1\ngate CZ 1 2\nmeasure 1 -> a\nmeasure 2 -> b\n")
        result = compress_pipeline(c, "plain", seed=5)
        assert result.static is not None and result.driver is None
        report = result.report
        assert (report.t, report.n, report.gadget_count) == (2, 1, 0)
        assert report.s <= report.t
        assert report.emitted_lines == report.t
        assert report.seed == 5

    def test_t_circuit_takes_adaptive_route(self):
        c = parse("qubits 1\ngate H 0\ngate T 0\ngate H 0\nmeasure 0 -> a\n")
        result = compress_pipeline(c, "plain", seed=2)
        assert result.driver is not None
        assert set(result.sample) == {"a"}
        assert result.report.gadget_count == 1

    def test_same_seed_same_sample(self):
        c = parse("qubits 2\ngate H 0\ngate T 0\ngate CX 0 1\ngate H 1\nmeasure 0 -> a\nmeasure 1 -> b\n")
        first = compress_pipeline(c, "plain", seed=11)
        second = compress_pipeline(c, "plain", seed=11)
        assert first.sample == second.sample
        assert first.driver.dump(11) == second.driver.dump(11)

    def test_path_a(self):
        c = parse(POSTSELECTED_T)
        result = compress_pipeline(c, "postselected", "a", seed=0)
        assert result.report.path == "a"
        assert result.static is not None
        law = exact_distribution_static(gadgetize_postselected(c))
        assert distance(exact_distribution(c), law).additive <= TOL

    def test_path_b(self):
        c = parse(POSTSELECTED_T)
        result = compress_pipeline(c, "postselected", "b", seed=0)
        out = result.circuit
        assert set(out.inputs) == {InputKind.MAGIC}
        # n + t lines of the gadgetized circuit plus one conversion ancilla per |0> line
        assert out.num_lines == (2 + 1) + 2
        assert distance(exact_distribution(c), exact_distribution(out)).additive <= TOL

    def test_path_b_rejects_adaptive(self):
        c = parse("qubits 1\ngate H 0\nmeasure 0 -> a\ngate X 0 if a\nmeasure 0 -> b post +1\n")
        with pytest.raises(ContractError):
            compress_pipeline(c, "postselected", "b", seed=0)

    def test_plain_rejects_path_and_postselection(self):
        with pytest.raises(ContractError):
            compress_pipeline(parse("qubits 1\nmeasure 0 -> a\n"), "plain", "a")
        with pytest.raises(ContractError):
            compress_pipeline(parse("qubits 1\nmeasure 0 -> a post +1\n"), "plain")

    def test_certain_failure_is_not_retried(self, monkeypatch):
        calls = []

        def counting(*args, **kwargs):
            calls.append(1)
            return compile_nonadaptive(*args, **kwargs)

        monkeypatch.setattr("pbc_compress.emit.compile_nonadaptive", counting)
        with pytest.raises(ProbabilityZeroError) as err:
            compress_pipeline(parse(CERTAIN_FAILURE_AFTER_COIN), "postselected", "a", seed=0)
        assert err.value.record_id == "b"
        assert len(calls) == 1

    def test_certain_failure_survives_path_b(self):
        result = compress_pipeline(parse(CERTAIN_FAILURE_AFTER_COIN), "postselected", "b", seed=0)
        with pytest.raises(ProbabilityZeroError):
            exact_distribution(result.circuit)
