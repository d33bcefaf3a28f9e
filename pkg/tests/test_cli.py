import json
import random

import pytest
from hypothesis import given, strategies as st

from cliffmeas import cli
from cliffmeas.cli import CircuitParseError, main, parse_circuit, serialize_circuit
from cliffmeas.symplectic import CNOT, H, CliffordGate, random_clifford_circuit


def test_parse_simple():
    assert parse_circuit("qubits 2\nH 1\nCNOT 1 2") == (2, [H(0), CNOT(0, 1)])


def test_parse_comments_and_whitespace():
    text = "  qubits 3 \n# two cnots\n\nCNOT 1 2   # first\n\tcnot 2 3\n"
    assert parse_circuit(text) == (3, [CNOT(0, 1), CNOT(1, 2)])


@pytest.mark.parametrize(
    "text, line",
    [
        ("qubits 2\nCNOT 1 1", 2),
        ("qubits 2\nH 3", 2),
        ("qubits 2\nH 0", 2),
        ("qubits 2\n# ok\nT 1", 3),
        ("qubits 2\nCNOT 1", 2),
        ("qubits 2\nH one", 2),
        ("H 1\nqubits 2", 1),
        ("qubits zero", 1),
        ("# nothing here\n", 0),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(CircuitParseError) as info:
        parse_circuit(text)
    assert info.value.line == line


@given(st.integers(1, 6), st.integers(0, 40), st.integers(0, 10_000))
def test_serialize_round_trip(n, length, seed):
    rng = random.Random(seed)
    gates = random_clifford_circuit(n, length, rng)
    gates += [CliffordGate(rng.choice("XZ"), (rng.randrange(n),)) for _ in range(2)]
    assert parse_circuit(serialize_circuit(n, gates)) == (n, gates)


@pytest.fixture
def circ(tmp_path):
    p = tmp_path / "circ.txt"
    p.write_text("qubits 3\n# two cnots\nCNOT 1 2\nCNOT 2 3\nH 1\nP 3\n")
    return p


def test_compile_then_stats_and_simulate(circ, tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["compile", "-i", str(circ), "-o", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["schema_version"] == "1.0"
    assert len(obj["rounds"]) == 22
    assert main(["stats", "-i", str(out)]) == 0
    text = capsys.readouterr().out
    assert "rounds: 22" in text
    assert "4n x5" in text and "2n x8" in text
    for state in ("all_zero", "all_plus"):
        assert main(["simulate", "-i", str(out), "--state", state, "--seed", "4"]) == 0
        res = json.loads(capsys.readouterr().out)
        assert res["match"] and res["state"] == res["expected"]


def test_compile_to_stdout_with_prune(circ, capsys):
    assert main(["compile", "-i", str(circ), "--prune"]) == 0
    obj = json.loads(capsys.readouterr().out)
    assert obj["strict"] is False
    assert all(r["operators"] for r in obj["rounds"])


def test_verify_reports(circ, capsys):
    assert main(["verify", "-i", str(circ), "--trials", "3", "--seed", "7"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 3
    assert all(json.loads(l)["verdict"] == "pass" for l in lines)
    assert main(["verify", "-i", str(circ), "--trials", "3", "--seed", "7"]) == 0
    assert capsys.readouterr().out.strip().splitlines() == lines


def test_verify_failure_exit_code(circ, monkeypatch, capsys):
    real = cli.end_to_end_check

    def broken(*a, **k):
        reports = real(*a, **k)
        reports[0].verdict = "fail"
        return reports

    monkeypatch.setattr(cli, "end_to_end_check", broken)
    assert main(["verify", "-i", str(circ), "--trials", "2"]) == 1


def test_input_errors_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("qubits 2\nCNOT 1 1\n")
    assert main(["compile", "-i", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["stats", "-i", str(tmp_path / "missing.json")]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text("{not json")
    assert main(["simulate", "-i", str(junk)]) == 2
    old = tmp_path / "old.json"
    old.write_text(json.dumps({"schema_version": "0.1"}))
    assert main(["stats", "-i", str(old)]) == 2


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0
    assert "1.0" in capsys.readouterr().out
