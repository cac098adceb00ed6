from fractions import Fraction

import pytest

from cpc.kernel.clausify import clausify, subsumes
from cpc.kernel.congruence import clause_valid_by_congruence
from cpc.kernel.linear import Constraint, infeasible
from cpc.kernel.machine import OPCODES, replay
from cpc.kernel.prover import limited_prove
from cpc.kernel.rewrite import Exhausted, rewrite_term
from cpc.kernel.typeset import TypeEnv, recognizer_info, type_set, value_bits
from cpc.sexpr import NIL, Sym, read_term
from cpc.world import World

r = read_term


def thy(w, name, *extra):
    return w.theory(name) | set(extra)


@pytest.mark.parametrize("hyps, concl, theory, expected", [
    ([], "(equal x x)", "min-theory", True),
    (["(equal a b)"], "(equal (f a) (f b))", "min-theory", True),
    (["(< a b)", "(< b c)"], "(< a c)", "min-theory", True),
    (["(integerp x)", "(< 0 x)"], "(<= 1 x)", "arith-theory", True),
    (["(integerp x)", "(< 0 x)"], "(<= 1 x)", "min-theory", False),
    ([], "(equal (+ x y) (+ y x))", "arith-theory", True),
    ([], "(equal (+ x y) (+ y x))", "min-theory", False),
    (["(tlp x)"], "(tlp (rrev x))", "contract-theory", True),
    ([], "(tlp (rrev x))", "contract-theory", False),
    (["(tlp x)", "(consp x)"], "(tlp (cdr x))", "contract-theory", True),
    ([], "(implies (and p q) p)", "min-theory", True),
    ([], "(implies (or p q) p)", "min-theory", False),
])
def test_limited_prove(shared_world, hyps, concl, theory, expected):
    got = limited_prove([r(h) for h in hyps], r(concl), shared_world, shared_world.theory(theory))
    assert got is expected


def test_definition_rule_needs_enabling(shared_world):
    w = shared_world
    goal = r("(equal (aapp nil x) x)")
    assert not limited_prove([r("(tlp x)")], goal, w, w.theory("contract-theory"))
    assert limited_prove([r("(tlp x)")], goal, w, thy(w, "contract-theory", "aapp-definition"))


def test_rewriting_is_guard_gated(shared_world):
    w = shared_world
    t = thy(w, "contract-theory", "aapp-definition")
    assert rewrite_term(r("(aapp 5 nil)"), w, t) == r("(aapp 5 nil)")
    assert rewrite_term(r("(car (cons a b))"), w, thy(w, "min-theory", "car-cons")) == Sym("a")


def test_looping_rules_exhaust_fuel():
    w = World()
    w.admit(r("(definec f (x :all) :all x)"))
    w.admit(r("(definec g (x :all) :all x)"))
    w.install_theorem(Sym("f-to-g"), r("(equal (f x) (g x))"))
    w.install_theorem(Sym("g-to-f"), r("(equal (g x) (f x))"))
    t = thy(w, "min-theory", "f-to-g", "g-to-f")
    with pytest.raises(Exhausted):
        rewrite_term(r("(f a)"), w, t, fuel=500)
    assert limited_prove([], r("(equal (f a) a)"), w, t, 500) is False


def test_clausify():
    assert clausify(r("(implies (and a b) (or c d))")) == [
        ((Sym("a"), False), (Sym("b"), False), (Sym("c"), True), (Sym("d"), True))]
    assert clausify(r("(if a b c)")) == [((Sym("a"), False), (Sym("b"), True)),
                                         ((Sym("a"), True), (Sym("c"), True))]
    small, big = ((Sym("a"), True),), ((Sym("a"), True), (Sym("b"), False))
    assert subsumes(small, big) and not subsumes(big, small)


def test_congruence_closure():
    assert clause_valid_by_congruence(((r("(equal a b)"), False), (r("(equal (f a) (f b))"), True)))
    assert not clause_valid_by_congruence(((r("(equal (f a) (f b))"), True),))


def test_fourier_motzkin():
    a = (("a",), Fraction(1))
    neg_a = (("a",), Fraction(-1))
    assert infeasible([Constraint((a,), Fraction(0), "<"), Constraint((neg_a,), Fraction(0), "<")])
    assert not infeasible([Constraint((a,), Fraction(0), "<")])
    # a <= 0 and -a <= 0 pin a to 0, which is feasible
    assert not infeasible([Constraint((a,), Fraction(0), "<="), Constraint((neg_a,), Fraction(0), "<=")])


def test_type_sets(shared_world):
    w = shared_world
    ct = w.theory("contract-theory")
    tlp_mask, _ = recognizer_info("tlp", w)
    consp_mask, _ = recognizer_info("consp", w)
    assert type_set(r("3"), TypeEnv(), w, ct) == value_bits(3)
    assert type_set(r("(cons a b)"), TypeEnv(), w, ct) & ~consp_mask == 0
    assert type_set(r("nil"), TypeEnv(), w, ct) == value_bits(NIL)
    typed = TypeEnv({Sym("x"): tlp_mask})
    assert type_set(r("(rrev x)"), typed, w, ct) & ~tlp_mask == 0
    assert type_set(r("(rrev x)"), TypeEnv(), w, ct) & ~tlp_mask != 0


P = lambda *xs: [r(x) for x in xs]  # noqa: E731


def test_replay_accepts_and_rejects(shared_world):
    w = shared_world
    ok = replay(r("(implies (tlp x) (equal (aapp nil x) x))"),
                P("(pro-or-skip)", "(in-theory (union contract-theory '(aapp-definition)))",
                  "(finish (bash))"), w)
    assert ok.accepted and ok.error is None
    bad = replay(r("(implies (tlp x) (equal (aapp x nil) x))"), P("(pro-or-skip)", "(finish (bash))"), w)
    assert not bad.accepted and "could not prove" in bad.error
    assert bad.failed_path is not None


@pytest.mark.parametrize("program, fragment", [
    (["(frobnicate)"], "unknown instruction"),
    (["(finish (bash))", "(bash)"], "no goals remain"),
])
def test_replay_errors(shared_world, program, fragment):
    res = replay(r("(equal x x)"), P(*program), shared_world)
    assert not res.accepted and fragment in res.error


def test_trace_digest_is_deterministic(shared_world):
    prog = P("(pro-or-skip)", "(in-theory (union contract-theory '(aapp-definition)))", "(finish (bash))")
    stmt = r("(implies (tlp x) (equal (aapp nil x) x))")
    d1 = replay(stmt, prog, shared_world).trace.final_digest()
    d2 = replay(stmt, prog, shared_world).trace.final_digest()
    assert d1 == d2 and len(d1) == 16


def test_opcode_set():
    assert {"claim", "cg", "bash", "finish", "induct", "by", "in-theory"} <= set(OPCODES)
