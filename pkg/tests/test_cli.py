import io
import json
import sys

import pytest

from ecntl.automaton import POP, PUSH, Ecna, Transition, dumps
from ecntl.cli import main
from ecntl.minsky import M1, M3, dump_machine


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path):
    word = [{"props": ["call", "p"], "t": "0"}, {"props": ["ret"], "t": "1"}]
    (tmp_path / "w.json").write_text(json.dumps(word))
    (tmp_path / "f.ecntl").write_text("call & Na[1,1] ret\n")
    (tmp_path / "no.ecntl").write_text("p & !p")
    (tmp_path / "m1.json").write_text(dump_machine(M1))
    (tmp_path / "m3.json").write_text(dump_machine(M3))
    pair = Ecna(["a", "b", "c"], ["a"], ["c"], [
        Transition(PUSH, "a", frozenset({"call"}), (), "b", "g"),
        Transition(POP, "b", frozenset({"ret"}), (), "c", "g"),
    ], ["g"])
    (tmp_path / "pair.json").write_text(dumps(pair))
    return tmp_path


def test_eval(files, capsys):
    code, out, _ = run(["eval", "-f", str(files / "f.ecntl"), "-w", str(files / "w.json")], capsys)
    assert code == 0 and json.loads(out) == {"models": True}
    code, out, _ = run(["eval", "-e", "ret", "-w", str(files / "w.json"), "--position", "1"], capsys)
    assert code == 0 and json.loads(out)["holds"]
    code, _, _ = run(["eval", "-e", "Na[0,0] ret", "-w", str(files / "w.json")], capsys)
    assert code == 1


def test_sat(files, capsys):
    code, out, _ = run(["sat", "-f", str(files / "no.ecntl"), "--max-len", "6"], capsys)
    assert code == 1 and json.loads(out)["sat"] is False
    code, out, _ = run(["sat", "-f", str(files / "f.ecntl"), "--max-len", "2"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["witness"] == [{"props": ["call"], "t": "0"}, {"props": ["ret"], "t": "1"}]
    code, out, _ = run(["sat", "-e", "p Ug[0,2] q", "--max-len", "3"], capsys)
    assert code == 0 and json.loads(out)["engine"] == "tableau"


def test_budget_exit_code(capsys):
    code, _, err = run(["sat", "-e", "(p Ug (q & Xg (call & Na[1,1] ret))) & (true Ug r)", "--max-len", "6",
                        "--budget", "5"], capsys)
    assert code == 3 and "budget" in err


def test_usage_errors(files, capsys):
    code, _, err = run(["sat", "-e", "Nc[0,1] p"], capsys)
    assert code == 2 and "ParseError" in err
    code, _, _ = run(["sat"], capsys)
    assert code == 2
    code, _, _ = run(["frobnicate"], capsys)
    assert code == 2
    code, _, _ = run(["eval", "-e", "p", "-w", str(files / "missing.json")], capsys)
    assert code == 2


def test_minsky_pipeline(files, capsys, monkeypatch):
    code, out, _ = run(["minsky-encode", str(files / "m1.json")], capsys)
    assert code == 0
    code, out, _ = run(["sat", "--stdin", "--max-len", "6"], capsys, stdin=out, monkeypatch=monkeypatch)
    doc = json.loads(out)
    assert code == 0 and doc["engine"] == "smt" and len(doc["witness"]) == 6


def test_minsky_witness(files, capsys):
    code, out, _ = run(["minsky-witness", str(files / "m1.json")], capsys)
    assert code == 0 and json.loads(out)["computation"] == [["init", 0, 0], ["halt", 1, 0]]
    code, out, _ = run(["minsky-witness", str(files / "m3.json"), "--fuel", "5"], capsys)
    assert code == 1 and json.loads(out)["halts"] is False


def test_mc(files, capsys):
    code, out, _ = run(["mc", "-a", str(files / "pair.json"), "-e", "call", "--max-len", "3"], capsys)
    assert code == 0
    code, out, _ = run(["mc", "-a", str(files / "pair.json"), "-e", "call -> Na[0,1] ret", "--max-len", "3"], capsys)
    doc = json.loads(out)
    assert code == 1 and len(doc["counterexample"]) == 2 and len(doc["run"]) == 3


def test_tableau_and_translate(capsys):
    code, out, _ = run(["tableau", "-e", "p Ug q"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["states"] > 0 and doc["closure"] >= 2 * doc["size"]
    code, out, _ = run(["translate", "-e", "p Ug[0,3] q"], capsys)
    assert code == 0 and json.loads(out)["logic"] == "ecntl"
    code, out, _ = run(["translate", "-e", "Ng[2,5] p"], capsys)
    assert code == 0 and json.loads(out)["logic"] == "nmitl"


def test_validate(files, capsys):
    assert run(["validate", "word", str(files / "w.json")], capsys)[0] == 0
    assert run(["validate", "machine", str(files / "m1.json")], capsys)[0] == 0
    assert run(["validate", "automaton", str(files / "pair.json")], capsys)[0] == 0
    code, out, _ = run(["validate", "formula", str(files / "w.json")], capsys)
    assert code == 1 and json.loads(out)["valid"] is False


def test_pretty(files, capsys):
    code, out, _ = run(["--pretty", "sat", "-f", str(files / "f.ecntl"), "--max-len", "2"], capsys)
    assert code == 0 and "witness: {call}@0 {ret}@1" in out
