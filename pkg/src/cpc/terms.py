"""Term utilities shared by every layer: constants, variables, substitution,
free variables and macro normalization."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

from .sexpr import NIL, QUOTE, T, Char, Pair, Str, Sym, Term, is_number, num, print_term

IF = Sym("if")
NOT = Sym("not")
AND = Sym("and")
OR = Sym("or")
IMPLIES = Sym("implies")
IFF = Sym("iff")
EQUAL = Sym("equal")
CONS = Sym("cons")
CAR = Sym("car")
CDR = Sym("cdr")
CONSP = Sym("consp")
LT = Sym("<")
PLUS = Sym("+")
TIMES = Sym("*")
MINUS = Sym("-")

CONNECTIVES = frozenset({NOT, AND, OR, IMPLIES, IFF})

# Primitive functions of the logic: always total, always evaluable.
PRIMITIVE_ARITY: dict[str, int] = {
    "car": 1, "cdr": 1, "cons": 2, "consp": 1, "equal": 2, "not": 1,
    "<": 2, "+": 2, "*": 2, "-": 1, "/": 1, "len": 1,
    "integerp": 1, "rationalp": 1, "acl2-numberp": 1, "natp": 1, "posp": 1,
    "negp": 1, "zp": 1, "symbolp": 1, "booleanp": 1, "tlp": 1, "allp": 1,
    "listp": 1, "stringp": 1, "characterp": 1, "keywordp": 1,
}

# Surface forms that normalize away.
MACROS = frozenset({
    "first", "rest", "second", "third", "cadr", "cddr", "caar", "cdar",
    "list", "endp", "atom", ">", "<=", ">=", "=", "eq", "eql", "1+", "1-",
})
SPECIAL = frozenset({"if", "and", "or", "implies", "iff", "quote"})


def is_var(t: Term) -> bool:
    return isinstance(t, Sym) and t != T and t != NIL and not t.startswith(":")


def is_quote(t: Term) -> bool:
    return isinstance(t, tuple) and len(t) == 2 and t[0] == QUOTE


def is_const(t: Term) -> bool:
    if isinstance(t, Sym):
        return not is_var(t)
    if isinstance(t, tuple):
        return is_quote(t)
    return True


def const_value(t: Term) -> Term:
    return t[1] if is_quote(t) else t


def make_const(v: Term) -> Term:
    """The constant term denoting value ``v``."""
    if isinstance(v, Sym) and not is_var(v):
        return v
    if is_number(v) or isinstance(v, (Str, Char)):
        return num(v) if isinstance(v, Fraction) else v
    return (QUOTE, v)


def is_call(t: Term, name: str | None = None) -> bool:
    if not isinstance(t, tuple) or not t or is_quote(t):
        return False
    return name is None or t[0] == name


def fn(t: Term) -> Sym:
    return t[0]


def args(t: Term) -> tuple:
    return t[1:]


def free_vars(t: Term) -> list[Sym]:
    """Variables of ``t`` in first-occurrence order; quoted data excluded."""
    out: dict[Sym, None] = {}

    def go(x: Term) -> None:
        if is_var(x):
            out.setdefault(x, None)
        elif isinstance(x, tuple) and not is_quote(x):
            for a in x[1:]:
                go(a)

    go(t)
    return list(out)


def apply_subst(t: Term, s: Mapping[Sym, Term]) -> Term:
    """Simultaneous substitution of variables; quoted subterms untouched."""
    if not s:
        return t
    if is_var(t):
        return s.get(t, t)
    if isinstance(t, tuple) and not is_quote(t):
        return (t[0],) + tuple(apply_subst(a, s) for a in t[1:])
    return t


def occurs(sub: Term, t: Term) -> bool:
    if sub == t:
        return True
    if isinstance(t, tuple) and not is_quote(t):
        return any(occurs(sub, a) for a in t[1:])
    return False


def subterms(t: Term) -> Iterable[Term]:
    yield t
    if isinstance(t, tuple) and not is_quote(t):
        for a in t[1:]:
            yield from subterms(a)


def replace(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, tuple) and not is_quote(t):
        return (t[0],) + tuple(replace(a, old, new) for a in t[1:])
    return t


def conjuncts(t: Term) -> list[Term]:
    """Flatten a (possibly nested) ``and`` into its conjuncts."""
    if is_call(t, "and"):
        out = []
        for a in t[1:]:
            out.extend(conjuncts(a))
        return out
    if t == T:
        return []
    return [t]


def mk_and(items: list[Term]) -> Term:
    if not items:
        return T
    if len(items) == 1:
        return items[0]
    return (AND,) + tuple(items)


def mk_implies(hyps: list[Term], concl: Term) -> Term:
    if not hyps:
        return concl
    return (IMPLIES, mk_and(hyps), concl)


def mk_not(t: Term) -> Term:
    return (NOT, t)


def split_implication(t: Term) -> tuple[list[Term], Term]:
    """Hypotheses (conjunct-split) and conclusion of a single implication."""
    if is_call(t, "implies") and len(t) == 3:
        return conjuncts(t[1]), t[2]
    return [], t


def promote_all(t: Term) -> tuple[list[Term], Term]:
    """Repeatedly promote nested implications: A -> (B -> C) gives [A, B], C."""
    hyps: list[Term] = []
    while is_call(t, "implies") and len(t) == 3:
        hyps.extend(conjuncts(t[1]))
        t = t[2]
    return hyps, t


def _list_term(items: list[Term]) -> Term:
    out: Term = NIL
    for x in reversed(items):
        out = (CONS, x, out)
    return out


def _fold_nary(op: Sym, items: list[Term], unit: Term) -> Term:
    if not items:
        return unit
    if len(items) == 1:
        return (op, unit, items[0])
    out = items[-1]
    for x in reversed(items[:-1]):
        out = (op, x, out)
    return out


def _negate_number(t: Term) -> Term:
    if is_number(t):
        return num(-t)
    return (MINUS, t)


def normalize(t: Term) -> Term:
    """Expand surface macros into the kernel's core vocabulary.

    ``first``/``rest`` become ``car``/``cdr``, ``list`` becomes nested
    ``cons``, ``endp``/``atom`` become ``(not (consp x))``, ``>``, ``<=`` and
    ``>=`` become ``<`` forms, n-ary ``+``/``*`` nest to the right and binary
    ``-`` becomes ``+`` of a negation. Connectives are kept.
    """
    if isinstance(t, Sym):
        return t
    if not isinstance(t, tuple):
        return t
    if is_quote(t):
        v = t[1]
        if isinstance(v, Sym) and not is_var(v) or is_number(v) or isinstance(v, (Str, Char)):
            return make_const(v)
        return t
    head = t[0]
    a = [normalize(x) for x in t[1:]]
    if not isinstance(head, Sym):
        return (head,) + tuple(a)
    h = str(head)
    if h in ("first", "car") and len(a) == 1:
        return (CAR, a[0])
    if h in ("rest", "cdr") and len(a) == 1:
        return (CDR, a[0])
    if h in ("second", "cadr") and len(a) == 1:
        return (CAR, (CDR, a[0]))
    if h == "third" and len(a) == 1:
        return (CAR, (CDR, (CDR, a[0])))
    if h == "cddr" and len(a) == 1:
        return (CDR, (CDR, a[0]))
    if h == "caar" and len(a) == 1:
        return (CAR, (CAR, a[0]))
    if h == "cdar" and len(a) == 1:
        return (CDR, (CAR, a[0]))
    if h == "list":
        return _list_term(a)
    if h in ("endp", "atom") and len(a) == 1:
        return (NOT, (CONSP, a[0]))
    if h == ">" and len(a) == 2:
        return (LT, a[1], a[0])
    if h == "<=" and len(a) == 2:
        return (NOT, (LT, a[1], a[0]))
    if h == ">=" and len(a) == 2:
        return (NOT, (LT, a[0], a[1]))
    if h in ("=", "eq", "eql") and len(a) == 2:
        return (EQUAL, a[0], a[1])
    if h == "1+" and len(a) == 1:
        return (PLUS, 1, a[0])
    if h == "1-" and len(a) == 1:
        return (PLUS, a[0], -1)
    if h == "+" and len(a) != 2:
        return _fold_nary(PLUS, a, 0)
    if h == "*" and len(a) != 2:
        return _fold_nary(TIMES, a, 1)
    if h == "-" and len(a) == 2:
        return (PLUS, a[0], _negate_number(a[1]))
    if h == "-" and len(a) == 1 and is_number(a[0]):
        return num(-a[0])
    if h == "and":
        if not a:
            return T
        if len(a) == 1:
            return a[0]
    if h == "or":
        if not a:
            return NIL
        if len(a) == 1:
            return a[0]
    return (head,) + tuple(a)


def show(t: Term) -> str:
    return print_term(t)


def value_to_list(v: Term) -> list[Term] | None:
    """Elements of a proper list value, or None."""
    if v == NIL:
        return []
    if isinstance(v, tuple):
        return list(v)
    return None


def is_value_cons(v: Term) -> bool:
    return isinstance(v, (tuple, Pair))


def vcons(a: Term, b: Term) -> Term:
    if b == NIL:
        return (a,)
    if isinstance(b, tuple):
        return (a,) + b
    return Pair(a, b)


def vcar(v: Term) -> Term:
    if isinstance(v, tuple):
        return v[0]
    if isinstance(v, Pair):
        return v.car
    return NIL


def vcdr(v: Term) -> Term:
    if isinstance(v, tuple):
        return v[1:] if len(v) > 1 else NIL
    if isinstance(v, Pair):
        return v.cdr
    return NIL


def value_size(v: Term) -> int:
    """Structural size: the number of cons cells."""
    n = 0
    while isinstance(v, (tuple, Pair)):
        if isinstance(v, tuple):
            return n + len(v) + sum(value_size(x) for x in v)
        n += 1 + value_size(v.car)
        v = v.cdr
    return n
