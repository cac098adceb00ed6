import pytest
from hypothesis import given, settings

from cpc.hints import HintError, auto_type_hypotheses, check_substitution, expand_hint
from cpc.proofdoc import Hint, InductiveBody, ProofNode, parse_document, print_document
from cpc.sexpr import Sym, read_term
from conftest import RREV
from strategies import documents

r = read_term


def test_parse_rrev_document():
    doc, diags = parse_document(RREV.read_text())
    assert diags == []
    proofs = [e for e in doc.elements if isinstance(e, ProofNode)]
    assert len(doc.elements) - len(proofs) == 4
    (p,) = proofs
    assert p.name == "revt-rrev-help"
    assert isinstance(p.body, InductiveBody)
    assert len(p.body.cases) == 3


def test_printed_document_reparses_identically():
    doc, _ = parse_document(RREV.read_text())
    printed = print_document(doc)
    doc2, diags = parse_document(printed)
    assert diags == [] and doc2.elements == doc.elements


@settings(max_examples=40, deadline=None)
@given(documents())
def test_generated_documents_round_trip(text):
    doc, diags = parse_document(text)
    assert diags == []
    assert print_document(parse_document(print_document(doc))[0]) == print_document(doc)


@pytest.mark.parametrize("body, code", [
    ("a\n== { Bogus }\na\nQED\n", "E-HINT"),
    ("a\n=== { }\na\nQED\n", "E-RELATION"),
    ("a\n", "E-QED"),
])
def test_syntax_diagnostics(body, code):
    _, diags = parse_document("Lemma x:\n(equal a a)\nProof:\n" + body)
    assert [d.code for d in diags] == [code]
    assert diags[0].span.start_line >= 4


def test_hint_aliases():
    doc, diags = parse_document(
        "Lemma x:\n(equal a a)\nProof:\na\n== { arith, car-cdr axioms, eval }\na\nQED\n")
    assert diags == []
    hints = doc.elements[0].body.steps[0].hints
    assert [h.kind for h in hints] == ["arithmetic", "car-cdr-axioms", "evaluation"]


def test_car_cdr_axioms_alias_cons_axioms(shared_world):
    a = expand_hint(Hint("car-cdr-axioms"), {}, shared_world)
    b = expand_hint(Hint("cons-axioms"), {}, shared_world)
    assert a.rules == b.rules


ITEMS = {"C1": r("(tlp x)"), "C2": r("(tlp y)")}


def test_expand_hints(shared_world):
    w = shared_world
    assert expand_hint(Hint("ref", label="C1"), ITEMS, w).hyps == [("C1", r("(tlp x)"))]
    assert expand_hint(Hint("def", name=Sym("aapp")), ITEMS, w).rules == {"aapp-definition", "aapp-exec"}
    lemma = expand_hint(Hint("lemma", name=Sym("assoc-append"), lemma_kind="lemma",
                             subst=r("((z acc))")), ITEMS, w)
    assert lemma.instances == [(Sym("assoc-append"), r("((z acc))"))]
    assert {"car-cons", "cdr-cons"} <= expand_hint(Hint("cons-axioms"), ITEMS, w).rules
    assert "commutativity-of-+" in expand_hint(Hint("arithmetic"), ITEMS, w).rules


@pytest.mark.parametrize("hint, fragment", [
    (Hint("ref", label="C9"), "available context item"),
    (Hint("def", name=Sym("zz")), "no definition"),
    (Hint("lemma", name=Sym("nope"), lemma_kind="lemma"), "unknown lemma"),
])
def test_bad_hints(shared_world, hint, fragment):
    with pytest.raises(HintError, match=fragment):
        expand_hint(hint, ITEMS, shared_world)


def test_type_hypotheses_are_found(shared_world):
    assert auto_type_hypotheses({**ITEMS, "C3": r("(consp x)")}, shared_world) == ["C1", "C2"]


@pytest.mark.parametrize("subst, fragment", [
    ("((q 1))", "not a variable"),
    ("((x 1) (x 2))", "twice"),
    ("((x 1 2))", "bad substitution entry"),
])
def test_bad_substitutions(subst, fragment):
    with pytest.raises(ValueError, match=fragment):
        check_substitution(r("(equal x y)"), r(subst), Sym("l"))
