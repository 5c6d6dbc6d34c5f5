import numpy as np
import pytest

from pbc_compress.circuit import (
    Circuit,
    Gate,
    Measure,
    ParityControl,
    classify,
    defer_measurements,
    fresh_record_id,
    gate_count,
    lower_gates,
    materialize_outputs,
    normalize_measurements_to_end,
)
from pbc_compress.circuit_format import load, parse, serialize, dump
from pbc_compress.exceptions import CircuitParseError, ContractError
from pbc_compress.flags import CircuitShape, GateContent, InputKind
from pbc_compress.gadgets import gadgetize, strip_corrections
from pbc_compress.oracle import distance, exact_distribution

from .random_circuits import random_circuit

GHZ_TEXT = """
# three-line GHZ
qubits 3
input Z0 Z0 Z0
gate H 0
gate CX 0 1
gate CX 1 2
output 0 1 2
"""

ADAPTIVE_TEXT = """
qubits 2
input Z0 A
gate H 0
measure 0 -> m0
gate S 1 if m0
gate X 1 if m0^1
measure 1 -> m1 post -1
measure 0 -> m2
output-bits m2 m0
"""


class TestParse:
    """Text format: statements, defaults and error reporting."""

    def test_ghz_parses(self):
        c = parse(GHZ_TEXT)
        assert c.num_lines == 3
        assert c.inputs == (InputKind.ZERO,) * 3
        assert c.output_lines == (0, 1, 2)
        assert gate_count(c) == 3

    def test_controls_and_postselection(self):
        c = parse(ADAPTIVE_TEXT)
        gates = c.gates
        assert gates[1].control == ParityControl(("m0",))
        assert gates[2].control == ParityControl(("m0",), invert=True)
        assert c.postselected_records() == {"m1": -1}
        assert c.output_bits == ("m2", "m0")

    @pytest.mark.parametrize(
        "a, b, invert, fires",
        [(1, 1, False, False), (-1, 1, False, True), (-1, -1, False, False), (-1, 1, True, False), (1, 1, True, True)],
    )
    def test_control_fires_on_odd_parity(self, a, b, invert, fires):
        assert ParityControl(("a", "b"), invert=invert).fires({"a": a, "b": b}) is fires

    def test_inputs_default_to_zero(self):
        c = parse("qubits 2\ngate H 0\n")
        assert c.zero_lines == [0, 1]

    def test_stabilizer_block(self):
        c = parse('qubits 3\ninput Z0 Z0 A\ninput-stab "XX" "ZZ"\n')
        assert [str(g) for g in c.stab_block] == ["+XX", "+ZZ"]
        assert c.magic_lines == [2]

    @pytest.mark.parametrize(
        "text, line_no",
        [
            ("qubits 1\ngate Q 0\n", 2),
            ("qubits 1\ngate H 3\n", 2),
            ("qubits 1\nmeasure 0 -> a\nmeasure 0 -> a\n", 3),
            ("qubits 2\ngate X 1 if zz\n", 2),
            ("qubits 1\nmeasure 0 -> a post 2\n", 2),
            ("qubits 1\nmeasure 0 -> a post +1\noutput-bits a\n", 3),
            ("qubits 2\ngate CX 1 1\n", 2),
        ],
    )
    def test_errors_carry_line_numbers(self, text, line_no):
        with pytest.raises(CircuitParseError) as err:
            parse(text)
        assert err.value.line_no == line_no

    def test_missing_qubits(self):
        with pytest.raises(CircuitParseError):
            parse("gate H 0\n")

    def test_stab_block_on_magic_line_rejected(self):
        with pytest.raises(CircuitParseError):
            parse('qubits 1\ninput A\ninput-stab "Z"\n')


class TestSerialize:
    """Canonical text form."""

    def test_canonical_form_is_stable(self):
        text = serialize(parse(ADAPTIVE_TEXT))
        assert serialize(parse(text)) == text
        assert "gate X 1 if m0^1" in text
        assert "measure 1 -> m1 post -1" in text

    def test_file_round_trip(self, tmp_path):
        c = parse(GHZ_TEXT)
        dump(c, tmp_path / "ghz.circ")
        assert load(tmp_path / "ghz.circ") == c


class TestClassify:
    """Adaptivity and gate-content classes."""

    def test_clifford_unitary(self):
        assert classify(parse(GHZ_TEXT)) == (CircuitShape.UNITARY, GateContent.CLIFFORD_ONLY, 0)

    def test_adaptive(self):
        assert classify(parse(ADAPTIVE_TEXT)).shape is CircuitShape.ADAPTIVE

    def test_non_adaptive_with_t(self):
        c = parse("qubits 1\ngate H 0\nmeasure 0 -> a\ngate T 0\nmeasure 0 -> b\n")
        assert classify(c) == (CircuitShape.NON_ADAPTIVE, GateContent.HAS_T, 1)

    def test_cs_counts_three(self):
        c = parse("qubits 2\ngate CS 0 1\ngate T 1\n")
        assert c.t_count == 4

    def test_gadget_output_is_adaptive_clifford(self):
        g = gadgetize(parse("qubits 1\ngate H 0\ngate T 0\ngate H 0\nmeasure 0 -> a\n"))
        assert classify(g)[:2] == (CircuitShape.ADAPTIVE, GateContent.CLIFFORD_ONLY)

    def test_stripped_gadget_circuit_is_unitary(self):
        g = strip_corrections(gadgetize(parse("qubits 1\ngate H 0\ngate T 0\ngate H 0\nmeasure 0 -> a\n")))
        assert classify(g)[:2] == (CircuitShape.UNITARY, GateContent.CLIFFORD_ONLY)


class TestRewrites:
    """Output materialization, end-normalization and deferral preserve the exact law."""

    def test_materialize_outputs(self):
        c = materialize_outputs(parse(GHZ_TEXT))
        assert c.output_bits == ("o0", "o1", "o2")
        assert not c.output_lines
        assert [m.line for m in c.measurements] == [0, 1, 2]

    def test_ghz_distribution(self):
        d = exact_distribution(parse(GHZ_TEXT))
        assert set(d) == {"000", "111"}
        np.testing.assert_allclose([d["000"], d["111"]], [0.5, 0.5], atol=1e-12)

    def test_output_records_default(self):
        c = parse(ADAPTIVE_TEXT.replace("output-bits m2 m0\n", ""))
        assert c.output_records() == ["m0", "m2"]

    def test_normalize_moves_only_free_measurements(self):
        c = parse("qubits 2\ngate H 0\nmeasure 0 -> a\ngate H 1\nmeasure 1 -> b\ngate X 1\n")
        out = normalize_measurements_to_end(c)
        assert [type(s).__name__ for s in out.steps] == ["Gate", "Gate", "Measure", "Gate", "Measure"]
        assert out.steps[-1] == Measure(0, "a")

    def test_defer_measurements(self):
        c = parse("qubits 1\ngate H 0\nmeasure 0 -> a\ngate H 0\nmeasure 0 -> b\n")
        d = defer_measurements(c)
        assert d.num_lines == 2
        assert classify(d).shape is CircuitShape.UNITARY
        assert distance(exact_distribution(c), exact_distribution(d)).additive <= 1e-12

    def test_defer_rejects_adaptive(self):
        with pytest.raises(ContractError):
            defer_measurements(parse(ADAPTIVE_TEXT))

    def test_random_rewrites_preserve_law(self):
        rng = np.random.default_rng(99)
        for _ in range(30):
            c = random_circuit(rng, zero_lines=2, magic_lines=2, gates=10, measurements=3)
            ref = exact_distribution(c)
            assert distance(ref, exact_distribution(normalize_measurements_to_end(c))).additive <= 1e-12
            assert distance(ref, exact_distribution(defer_measurements(c))).additive <= 1e-12

    def test_lower_gates_copies_controls(self):
        c = parse(ADAPTIVE_TEXT)
        low = lower_gates(c, {"S": (("Z", (0,)), ("S", (0,)))})
        assert [g.name for g in low.gates] == ["H", "Z", "S", "X"]
        assert low.gates[1].control == ParityControl(("m0",))


class TestValidation:
    def test_fresh_record_id_skips_taken(self):
        taken = {"g0", "g1"}
        assert fresh_record_id(taken, "g") == "g2"
        assert "g2" in taken

    def test_output_overlapping_postselection_rejected(self):
        with pytest.raises(ContractError):
            Circuit(num_lines=1, inputs=(InputKind.ZERO,), steps=(Measure(0, "a", 1),), output_lines=(0,))

    def test_control_on_later_record_rejected(self):
        with pytest.raises(ContractError) as err:
            Circuit(num_lines=1, inputs=(InputKind.ZERO,),
                    steps=(Gate("X", (0,), ParityControl(("a",))), Measure(0, "a")))
        assert err.value.indices == (0,)
