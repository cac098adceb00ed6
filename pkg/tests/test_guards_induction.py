import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cpc.guards import (
    CompletionError,
    ExportError,
    check_contract_completion,
    check_exportation,
    first_unproved,
    guard_obligations,
    obligations_trivial,
    prop_equivalent,
    prop_eval,
)
from cpc.induction import InductionError, induction_scheme, match_cases
from cpc.sexpr import Sym, read_term
from conftest import IN_DEF, rrev_world

r = read_term


@pytest.fixture(scope="module")
def w():
    w = rrev_world()
    w.admit(r(IN_DEF))
    return w


def test_guard_obligations_follow_contracts(w):
    obs = guard_obligations(r("(aapp (rrev x) y)"), w)
    assert [o.obligation for o in obs] == [r("(tlp (rrev x))"), r("(tlp y)"), r("(tlp x)")]
    assert all(o.governors == () for o in obs)
    assert not obligations_trivial(obs, w)


def test_governing_hypotheses_are_recorded(w):
    obs = guard_obligations(r("(implies (tlp x) (aapp x y))"), w)
    assert obs[0].governors == (r("(tlp x)"),)
    assert first_unproved(obs, w).obligation == r("(tlp y)")
    assert obligations_trivial(guard_obligations(r("(implies (tlp x) (aapp x x))"), w), w)


def test_propositional_equivalence():
    assert prop_equivalent(r("(implies a (implies b c))"), r("(implies (and a b) c)")) == (True, None)
    same, cex = prop_equivalent(r("(implies a b)"), r("(implies b a)"))
    assert not same
    assert prop_eval(r("(implies a b)"), cex) != prop_eval(r("(implies b a)"), cex)


_ATOMS = [Sym("a"), Sym("b"), Sym("c")]
formulas = st.recursive(
    st.sampled_from(_ATOMS),
    lambda k: st.one_of(
        st.tuples(st.just(Sym("not")), k),
        st.tuples(st.sampled_from([Sym("and"), Sym("or"), Sym("implies"), Sym("iff")]), k, k),
    ),
    max_leaves=6,
)


@settings(max_examples=200, deadline=None)
@given(formulas, formulas)
def test_prop_equivalent_matches_truth_tables(f, g):
    envs = [dict(zip(_ATOMS, bits)) for bits in
            [(x, y, z) for x in (False, True) for y in (False, True) for z in (False, True)]]
    expected = all(prop_eval(f, e) == prop_eval(g, e) for e in envs)
    assert prop_equivalent(f, g)[0] == expected


def test_exportation_check():
    check_exportation(r("(implies a (implies b c))"), r("(implies (and a b) c)"))
    with pytest.raises(ExportError, match="falsified"):
        check_exportation(r("(implies a (implies b c))"), r("(implies (and a c) b)"))


def test_contract_completion_classification(w):
    stmt = r("(implies (tlp x) (equal (aapp x nil) x))")
    assert check_contract_completion(stmt, stmt, w) == "trivial"
    src = r("(implies (in e l) (consp l))")
    assert check_contract_completion(src, r("(implies (and (tlp l) (in e l)) (consp l))"), w) == "non-trivial"
    with pytest.raises(CompletionError, match="comes before"):
        check_contract_completion(src, r("(implies (and (in e l) (tlp l)) (consp l))"), w)


def test_induction_scheme_for_rrev(w):
    stmt = r("(implies (tlp x) (equal (rrev (rrev x)) x))")
    obs = induction_scheme(stmt, r("(rrev x)"), w)
    assert [o.name for o in obs] == ["contract-case", "base-case-1", "induct-case-1"]
    assert obs[0].hyps == (r("(not (tlp x))"),)
    ih = r("(implies (tlp (cdr x)) (equal (rrev (rrev (cdr x))) (cdr x)))")
    assert ih in obs[2].hyps
    assert match_cases(obs, [o.statement for o in reversed(obs)]) == {0: 2, 1: 1, 2: 0}


@pytest.mark.parametrize("term, fragment", [
    ("(tlp x)", "not a defined function"),
    ("(rrev (cdr x))", "distinct variables"),
])
def test_bad_induction_terms(w, term, fragment):
    with pytest.raises(InductionError, match=fragment):
        induction_scheme(r("(equal (rrev (rrev x)) x)"), r(term), w)
