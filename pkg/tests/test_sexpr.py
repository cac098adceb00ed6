from fractions import Fraction

import pytest
from hypothesis import given, settings

from cpc.sexpr import NIL, Char, ReadError, Str, Sym, print_term, read_all, read_term
from cpc.terms import (
    apply_subst,
    free_vars,
    is_const,
    make_const,
    normalize,
    value_size,
    value_to_list,
    vcons,
)
from strategies import sexprs


@pytest.mark.parametrize("text, value", [
    ("NIL", NIL),
    ("()", NIL),
    ("(A b)", (Sym("a"), Sym("b"))),
    ("3/4", Fraction(3, 4)),
    ("6/3", 2),
    ("-0", 0),
    ("#\\a", Char("a")),
    ("#\\Space", Char(" ")),
    ('"x y"', Str("x y")),
    ("'(1 2)", (Sym("quote"), (1, 2))),
])
def test_read_atoms_and_lists(text, value):
    assert read_term(text) == value


def test_symbols_are_lower_cased():
    assert read_term("FooBar") == "foobar"
    assert print_term(read_term("(EQUAL X Y)")) == "(equal x y)"


@pytest.mark.parametrize("text, fragment", [
    ("(a", "unterminated list"),
    (")", "unexpected ')'"),
    ('"abc', "unterminated string"),
    ("(a . b)", "dotted pairs"),
])
def test_read_errors_carry_spans(text, fragment):
    with pytest.raises(ReadError) as e:
        read_term(text)
    assert fragment in str(e.value)
    assert str(e.value).startswith("<input>:1:")


def test_read_all_spans_skip_comments():
    forms = read_all("(a b)\n; note\n(c\n d)")
    assert [print_term(f.datum) for f in forms] == ["(a b)", "(c d)"]
    sp = forms[1].span
    assert (sp.start_line, sp.end_line) == (3, 4)


def test_canonical_printing():
    assert print_term(read_term("(f   1/2\n  T  nil)")) == "(f 1/2 t nil)"
    assert print_term(read_term("'x")) == "'x"


@settings(max_examples=300, deadline=None)
@given(sexprs())
def test_print_read_round_trip(d):
    assert read_term(print_term(d)) == d


def test_normalize_expands_macros():
    assert normalize(read_term("(list 1 2)")) == read_term("(cons 1 (cons 2 nil))")
    assert normalize(read_term("(+ 1 2 3)")) == read_term("(+ 1 (+ 2 3))")
    assert normalize(read_term("'(1 2)")) == read_term("'(1 2)")


def test_values_and_constants():
    v = vcons(1, vcons(2, NIL))
    assert value_to_list(v) == [1, 2]
    assert value_size(v) == 2
    assert value_size(NIL) == 0
    assert make_const(3) == 3
    assert make_const(Sym("a")) == read_term("'a")
    assert is_const(make_const(v))


def test_substitution_and_free_vars():
    t = read_term("(f x (g y x) 'z)")
    assert free_vars(t) == [Sym("x"), Sym("y")]
    assert apply_subst(t, {Sym("x"): 1}) == read_term("(f 1 (g y 1) 'z)")
