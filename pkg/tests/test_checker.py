import pytest

from cpc.checker import RunConfig, check_file, check_text, counterexample_search
from cpc.sexpr import read_term
from cpc.translator import Theorem, dump_text, load_dump, replay_dump
from conftest import APP_COMM, CORPUS, RREV


@pytest.fixture(scope="module")
def rrev_report():
    return check_file(RREV)


def test_rrev_is_accepted(rrev_report):
    rep = rrev_report
    assert rep.ok and rep.sound
    assert rep.summary() == {"file": str(RREV), "proofs": 1, "accepted": 1, "warnings": 0, "sound": True}
    (out,) = rep.outcomes
    assert out.name == "revt-rrev-help" and out.accepted and not out.nontrivial


def test_false_step_reports_counterexample():
    rep = check_text(APP_COMM)
    assert not rep.ok
    (d,) = rep.diagnostics
    assert d.code == "E-STEP-FAIL"
    assert d.counterexample == {"x": "(0)", "y": "(1)"}
    assert "counterexample: x = (0), y = (1)" in d.format()


def test_missing_context_and_goal_are_reported():
    no_goal = APP_COMM.replace("Goal: (equal (aapp x y) (aapp y x))\n", "")
    assert [d.code for d in check_text(no_goal).diagnostics] == ["E-GOAL"]
    no_ctx = APP_COMM.replace("Context:\nC1. (tlp x)\nC2. (tlp y)\n", "")
    assert "E-CONTEXT" in [d.code for d in check_text(no_ctx).diagnostics]


def test_counterexample_search(shared_world):
    w = shared_world
    stmt = read_term("(equal (aapp x y) (aapp y x))")
    assert counterexample_search(stmt, w, types={"x": "tl", "y": "tl"}) == {"x": "(0)", "y": "(1)"}
    assert counterexample_search(read_term("(implies (tlp x) (equal (aapp x nil) x))"), w) is None


def test_nontrivial_completion_is_flagged():
    rep = check_file(CORPUS / "nontrivial" / "in-consp.proof")
    assert rep.accepted == rep.proofs == 1
    assert not rep.sound
    assert [d.code for d in rep.diagnostics] == ["W-NONTRIVIAL-CC"]


def test_dump_round_trip_and_independent_replay(rrev_report):
    text = dump_text(rrev_report.dump)
    items = load_dump(text)
    assert dump_text(items) == text
    theorems = [x for x in items if isinstance(x, Theorem)]
    assert [t.local for t in theorems] == [True, True, True, False]
    _, results = replay_dump(items)
    assert all(r.accepted for _, r, _ in results)
    original = [t.final_digest() for _, t in rrev_report.traces()]
    assert [r.trace.final_digest() for _, r, _ in results] == original


def test_tampered_dump_is_rejected(rrev_report):
    original = dump_text(rrev_report.dump)
    text = original.replace("(revt-definition revt-exec)", "()")
    assert text != original
    _, results = replay_dump(load_dump(text))
    assert not all(r is not None and r.accepted for _, r, _ in results)


def test_fail_fast_and_bound_config():
    cfg = RunConfig(bound=1, pool=(0, 1), fail_fast=True)
    rep = check_text(APP_COMM, config=cfg)
    assert rep.diagnostics[0].counterexample == {"x": "(0)", "y": "(1)"}
