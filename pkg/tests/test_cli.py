import json

import pytest

from cpc.cli import main, parse_pool
from conftest import APP_COMM, CORPUS, RREV


@pytest.fixture
def bad_proof(tmp_path):
    p = tmp_path / "app-comm.proof"
    p.write_text(APP_COMM)
    return p


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_check_accepts_rrev(capsys):
    code, out = run(capsys, "check", RREV)
    assert code == 0
    assert "1 proof, 1 accepted, sound" in out.out


def test_check_rejects_with_exit_one(capsys, bad_proof):
    code, out = run(capsys, "check", bad_proof)
    assert code == 1
    assert "error[E-STEP-FAIL]" in out.out and "x = (0), y = (1)" in out.out


def test_nontrivial_completion_exits_one(capsys):
    code, out = run(capsys, "check", CORPUS / "nontrivial" / "in-consp.proof")
    assert code == 1 and "NOT sound" in out.out


def test_json_matches_text(capsys, bad_proof):
    _, text = run(capsys, "check", bad_proof)
    code, js = run(capsys, "check", "--json", bad_proof)
    assert code == 1
    rows = [json.loads(line) for line in js.out.splitlines()]
    diags = [r for r in rows if r["type"] == "diagnostic"]
    (summary,) = [r for r in rows if r["type"] == "summary"]
    assert len(diags) == sum("error[" in line for line in text.out.splitlines())
    assert diags[0]["code"] == "E-STEP-FAIL"
    assert diags[0]["counterexample"] == {"x": "(0)", "y": "(1)"}
    assert summary["proofs"] == 1 and summary["accepted"] == 0


def test_multiple_files_add_a_total(capsys, bad_proof):
    code, out = run(capsys, "check", "--json", RREV, bad_proof)
    assert code == 1
    total = json.loads(out.out.splitlines()[-1])
    assert total == {"type": "summary", "file": None, "proofs": 2, "accepted": 1,
                     "warnings": 0, "sound": True}


def test_emit_and_replay(capsys, tmp_path):
    dump = tmp_path / "rrev.instr"
    assert run(capsys, "check", "--emit-instructions", dump, RREV)[0] == 0
    code, out = run(capsys, "replay", dump)
    assert code == 0 and "4/4 theorems accepted" in out.out
    code, out = run(capsys, "replay", "--json", dump)
    rows = [json.loads(line) for line in out.out.splitlines()]
    assert [r["local"] for r in rows if r["type"] == "theorem"] == [True, True, True, False]
    assert rows[-1] == {"type": "summary", "theorems": 4, "accepted": 4, "ok": True}


def test_emit_directory_for_several_files(capsys, tmp_path, bad_proof):
    out_dir = tmp_path / "dumps"
    run(capsys, "check", "--emit-instructions", out_dir, RREV, bad_proof)
    assert sorted(p.name for p in out_dir.iterdir()) == ["app-comm.instr", "rrev.instr"]


def test_replay_rejects_tampered_dump(capsys, tmp_path):
    dump = tmp_path / "rrev.instr"
    run(capsys, "check", "--emit-instructions", dump, RREV)
    dump.write_text(dump.read_text().replace("(revt-definition revt-exec)", "()"))
    code, out = run(capsys, "replay", dump)
    assert code == 1 and "REJECTED" in out.out


@pytest.mark.parametrize("argv", [
    ["check"],
    ["check", "no/such/file.proof"],
    ["check", "--pool", "3..1", str(RREV)],
    ["check", "--test-bound", "0", str(RREV)],
    ["replay", "no/such.instr"],
    ["corpus", "no/such/dir"],
    ["frobnicate"],
])
def test_usage_errors_exit_two(capsys, argv):
    assert main(argv) == 2


def test_malformed_dump_exits_two(capsys, tmp_path):
    p = tmp_path / "x.instr"
    p.write_text("(theorem")
    assert main(["replay", str(p)]) == 2


def test_parse_pool():
    assert parse_pool("-2..3") == (-2, 3)
    assert parse_pool("0..0") == (0, 0)
