import pytest

from cpc.evaluator import eval_ground
from cpc.sexpr import NIL, T, Sym, print_term, read_term
from cpc.terms import make_const, value_size
from cpc.typesys import (
    Base,
    ConsOf,
    Enum,
    ListOf,
    TypeError_,
    enumerate_type,
    parse_type,
    recognize,
)
from cpc.world import World


@pytest.fixture(scope="module")
def w():
    w = World()
    w.admit(read_term("(defdata lon (listof nat))"))
    return w


def ty(text, w):
    return parse_type(read_term(text), w.types)


def test_parse_type_forms(w):
    assert ty("nat", w) == Base("nat")
    assert ty("(listof int)", w) == ListOf(Base("int"))
    assert ty("(enum a b)", w) == Enum((Sym("a"), Sym("b")))
    assert ty("(cons nat tl)", w) == ConsOf(Base("nat"), Base("tl"))


@pytest.mark.parametrize("text", ["foo", "pos", "(listof)", "(cons nat)"])
def test_unknown_or_malformed_types(text, w):
    with pytest.raises(TypeError_):
        ty(text, w)


def test_enumerate_tl_bound_two_over_zero_one(w):
    vals = enumerate_type(ty("tl", w), 2, [0, 1], w.types)
    assert [print_term(v) for v in vals] == ["nil", "(0)", "(1)", "(0 0)", "(0 1)", "(1 0)", "(1 1)"]


@pytest.mark.parametrize("text", ["nat", "int", "bool", "tl", "(listof nat)", "lon",
                                  "(oneof nat nil)", "(cons nat lon)", "(enum a 3)"])
def test_enumeration_is_sound_and_size_bounded(text, w):
    t = ty(text, w)
    vals = enumerate_type(t, 3, range(-2, 4), w.types)
    assert vals and len(set(vals)) == len(vals)
    for v in vals:
        assert recognize(v, t, w.types)
        assert value_size(v) <= 3


def test_enumeration_counts_grow_by_pool_size(w):
    pool = range(-2, 4)
    counts = [len(enumerate_type(ty("tl", w), b, pool, w.types)) for b in range(4)]
    assert counts == [1, 7, 43, 259]


def test_recognize_examples(w):
    assert recognize(3, ty("nat", w), w.types)
    assert not recognize(-1, ty("nat", w), w.types)
    assert recognize(-1, ty("int", w), w.types)
    assert recognize(NIL, ty("bool", w), w.types) and recognize(T, ty("bool", w), w.types)
    assert recognize(read_term("(1 2)"), ty("lon", w), w.types)
    assert not recognize(read_term("(1 -2)"), ty("lon", w), w.types)


def test_generated_predicate_agrees_with_recognize(w):
    lon = ty("lon", w)
    for v in enumerate_type(ty("(listof int)", w), 3, range(-2, 3), w.types):
        got = eval_ground((Sym("lonp"), make_const(v)), w)
        assert (got == T) == recognize(v, lon, w.types)
