import json
import logging

import pytest

from pbc_compress import cli
from pbc_compress.cli import main
from pbc_compress.circuit_format import parse
from pbc_compress.constants import (
    EXIT_BUDGET,
    EXIT_OK,
    EXIT_PARSE,
    EXIT_PROBABILITY_ZERO,
    EXIT_TOLERANCE,
)

T_CIRCUIT = "qubits 2\ngate H 0\ngate T 0\ngate CX 0 1\ngate H 0\nmeasure 0 -> a\nmeasure 1 -> b\n"
CLIFFORD_CIRCUIT = "qubits 3\ninput Z0 A A\ngate H 0\ngate CX 0 1\ngate CZ 1 2\nmeasure 1 -> a\nmeasure 2 -> b\n"
POSTSELECTED = "qubits 2\ngate H 0\ngate T 0\ngate CX 0 1\ngate H 0\nmeasure 0 -> a\nmeasure 1 -> b post +1\n"
CERTAIN_FAILURE_AFTER_COIN = "qubits 2\ngate H 0\nmeasure 0 -> a\nmeasure 1 -> b post -1\n"
# one line for the reference, two |A> gadget lines once compiled
TWO_T_ONE_LINE = "qubits 1\ngate H 0\ngate T 0\ngate T 0\ngate H 0\nmeasure 0 -> a\n"


def kv(path):
    return dict(line.split("=", 1) for line in path.read_text().splitlines() if "=" in line)


@pytest.fixture
def write(tmp_path):
    def _write(name, text):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return _write


class TestCompile:
    def test_t_circuit_emits_driver_transcript(self, write, tmp_path):
        src = write("t.circ", T_CIRCUIT)
        out, rep = tmp_path / "t.out", tmp_path / "t.report"
        assert main(["compile", "--in", src, "--seed", "3", "--out", str(out), "--report", str(rep)]) == EXIT_OK
        assert out.read_text().startswith("adaptive t=1 seed=3")
        report = kv(rep)
        assert report["mode"] == "plain"
        assert report["seed"] == "3"
        assert report["gadget_count"] == "1"

    def test_static_route_emits_cm_circuit(self, write, tmp_path):
        out = tmp_path / "cm.circ"
        assert main(["compile", "--in", write("c.circ", CLIFFORD_CIRCUIT), "--seed", "1", "--out", str(out)]) == EXIT_OK
        cm = parse(out.read_text())
        assert cm.num_lines == 2

    def test_pbc_emission(self, write, tmp_path):
        out = tmp_path / "prog.pbc"
        args = ["compile", "--in", write("c.circ", CLIFFORD_CIRCUIT), "--seed", "1", "--emit", "pbc", "--out", str(out)]
        assert main(args) == EXIT_OK
        assert out.read_text().startswith("pbc t=2")

    def test_postselected_default_mode(self, write, tmp_path):
        rep = tmp_path / "p.report"
        assert main(["compile", "--in", write("p.circ", POSTSELECTED), "--seed", "0", "--report", str(rep)]) == EXIT_OK
        assert kv(rep)["mode"] == "postselected"
        assert kv(rep)["path"] == "a"

    def test_unseeded_run_prints_seed(self, write, tmp_path, capsys):
        main(["compile", "--in", write("t.circ", T_CIRCUIT), "--out", str(tmp_path / "o")])
        assert "seed=" in capsys.readouterr().err

    def test_parse_error(self, write):
        assert main(["compile", "--in", write("bad.circ", "qubits 1\ngate Q 0\n")]) == EXIT_PARSE

    def test_missing_file(self, tmp_path):
        assert main(["compile", "--in", str(tmp_path / "nope.circ")]) == EXIT_PARSE

    def test_certain_failure_after_coin(self, write, capsys):
        code = main(["compile", "--in", write("z.circ", CERTAIN_FAILURE_AFTER_COIN), "--seed", "0"])
        assert code == EXIT_PROBABILITY_ZERO
        assert "record b" in capsys.readouterr().err

    def test_log_entries_share_a_run_id(self, write, tmp_path, monkeypatch, caplog):
        monkeypatch.setattr(cli.log, "propagate", True)
        with caplog.at_level(logging.INFO, logger=cli.log.name):
            main(["compile", "--in", write("t.circ", T_CIRCUIT), "--seed", "1", "--out", str(tmp_path / "o")])
        entries = [json.loads(r.getMessage()) for r in caplog.records if r.name == cli.log.name]
        assert [e["message"] for e in entries] == ["command started", "command finished"]
        assert entries[0]["run_id"] == entries[1]["run_id"]


class TestVerify:
    @pytest.mark.parametrize("text", [T_CIRCUIT, CLIFFORD_CIRCUIT, POSTSELECTED])
    def test_compiled_matches(self, write, tmp_path, text):
        rep = tmp_path / "v.report"
        assert main(["verify", "--in", write("x.circ", text), "--report", str(rep)]) == EXIT_OK
        assert kv(rep)["passed"] == "true"

    def test_path_b(self, write, tmp_path):
        rep = tmp_path / "v.report"
        args = ["verify", "--in", write("p.circ", POSTSELECTED), "--path", "b", "--report", str(rep)]
        assert main(args) == EXIT_OK
        assert kv(rep)["acceptance"] != "none"

    def test_against_self(self, write, tmp_path):
        assert main(["verify", "--in", write("t.circ", T_CIRCUIT), "--against", "self"]) == EXIT_OK

    def test_against_other_file_fails(self, write, tmp_path):
        rep = tmp_path / "v.report"
        other = write("o.circ", "qubits 2\nmeasure 0 -> a\nmeasure 1 -> b\n")
        args = ["verify", "--in", write("t.circ", T_CIRCUIT), "--against", other, "--report", str(rep)]
        assert main(args) == EXIT_TOLERANCE
        assert kv(rep)["passed"] == "false"

    def test_probability_zero(self, write):
        assert main(["verify", "--in", write("z.circ", "qubits 1\nmeasure 0 -> a post -1\n")]) == EXIT_PROBABILITY_ZERO

    def test_budget(self, write):
        assert main(["verify", "--in", write("t.circ", T_CIRCUIT), "--budget", "1"]) == EXIT_BUDGET

    def test_budget_covers_compiled_side(self, write):
        src = write("tt.circ", TWO_T_ONE_LINE)
        assert main(["verify", "--in", src, "--budget", "1"]) == EXIT_BUDGET
        assert main(["verify", "--in", src, "--budget", "2"]) == EXIT_OK

    @pytest.mark.parametrize("path", ["a", "b"])
    def test_certain_failure_after_coin(self, write, path):
        args = ["verify", "--in", write("z.circ", CERTAIN_FAILURE_AFTER_COIN), "--path", path]
        assert main(args) == EXIT_PROBABILITY_ZERO


class TestGenAndStats:
    def test_gen_writes_instances_and_manifest(self, tmp_path, capsys):
        outdir = tmp_path / "gen"
        args = ["gen", "--class", "iqp-ising", "--n", "2", "--count", "3", "--seed", "1", "--outdir", str(outdir)]
        assert main(args) == EXIT_OK
        names = sorted(p.name for p in outdir.glob("*.circ"))
        assert names == [f"iqp-ising_n2_000{i}.circ" for i in range(3)]
        assert (outdir / "manifest.txt").read_text().count("class_id=iqp-ising") == 3
        assert "instances=3" in capsys.readouterr().out

    def test_gen_is_reproducible(self, tmp_path):
        for name in ("a", "b"):
            main(["gen", "--class", "conjugated", "--n", "2", "--seed", "4", "--outdir", str(tmp_path / name)])
        first = (tmp_path / "a" / "conjugated-clifford_n2_0000.circ").read_text()
        assert first == (tmp_path / "b" / "conjugated-clifford_n2_0000.circ").read_text()

    def test_unknown_class(self, tmp_path):
        assert main(["gen", "--class", "boson", "--n", "2", "--outdir", str(tmp_path)]) == EXIT_PARSE

    def test_stats_hadamard(self, tmp_path):
        rep = tmp_path / "s.report"
        args = ["stats", "--class", "hadamard", "--n", "2", "--samples", "20", "--alpha", "1.0", "--seed", "0",
                "--report", str(rep)]
        assert main(args) == EXIT_OK
        assert kv(rep)["successes"] == "20"

    def test_stats_checks(self, tmp_path):
        rep = tmp_path / "s.report"
        args = ["stats", "--class", "iqp-ising", "--n", "2", "--samples", "10", "--instances", "2", "--checks",
                "--seed", "0", "--report", str(rep)]
        assert main(args) == EXIT_OK
        text = rep.read_text()
        assert "recovered=" in text
        assert "mode=exhaustive" in text
        assert text.count("passed=true") == 2

    def test_checks_need_iqp(self, tmp_path):
        args = ["stats", "--class", "rcs", "--n", "2", "--samples", "5", "--checks", "--seed", "0"]
        assert main(args) == EXIT_PARSE
