import pytest

from cpc.evaluator import FuelExhausted, GuardViolation, eval_ground
from cpc.sexpr import NIL, T, read_term
from cpc.world import THEORY_NAMES, EventError


@pytest.mark.parametrize("form, fragment", [
    ("(definec aapp (a :tl) :tl a)", "already defined"),
    ("(definec h (x :nat) :nat (h x))", "termination"),
    ("(definec k (x :nat) :nat (zz x))", "unknown function"),
    ("(definec k (x :nat) :tl x)", "function contract"),
    ("(property bad (x :tl) (equal (aapp x nil) nil))", "cannot prove"),
])
def test_rejected_events(world, form, fragment):
    with pytest.raises(EventError, match=fragment):
        world.admit(read_term(form))


def test_rejected_event_leaves_world_unchanged(world):
    before = world.rule_table_digest()
    with pytest.raises(EventError):
        world.admit(read_term("(property bad (x :tl) (equal (aapp x nil) nil))"))
    assert world.rule_table_digest() == before


def test_snapshot_and_rollback(world):
    token = world.snapshot()
    world.admit(read_term("(definec dbl (x :nat) :nat (* 2 x))"))
    assert world.is_defined("dbl")
    world.rollback(token)
    assert not world.is_defined("dbl")


def test_definitions_install_rules(world):
    names = [r[0] for r in world.rule_table_digest()]
    for suffix in ("definition", "contract", "contract-tp", "exec"):
        assert f"aapp-{suffix}" in names
    assert "assoc-append" in names
    assert world.contract_of("aapp") == [read_term("(tlp a)"), read_term("(tlp b)")]


def test_named_theories(world):
    assert {"min-theory", "contract-theory", "arith-theory"} <= set(THEORY_NAMES)
    contract = world.theory("contract-theory")
    assert "aapp-contract" in contract and "aapp-definition" not in contract


def test_evaluation_of_definitions(world):
    assert eval_ground(read_term("(rrev '(1 2 3))"), world) == (3, 2, 1)
    assert eval_ground(read_term("(revt '(1 2) nil)"), world) == (2, 1)
    assert eval_ground(read_term("(aapp nil nil)"), world) == NIL
    assert eval_ground(read_term("(equal (rrev '(1 2)) (revt '(1 2) nil))"), world) == T


def test_guard_violation_and_fuel(world):
    with pytest.raises(GuardViolation):
        eval_ground(read_term("(aapp 5 nil)"), world)
    with pytest.raises(FuelExhausted):
        eval_ground(read_term("(rrev '(1 2 3))"), world, fuel=3)
