"""Ground evaluation of terms.

Built-ins are total (``car``/``cdr`` of a non-cons is ``nil``, arithmetic
treats non-numbers as 0); calls of user functions check their input contracts
on the argument values and raise :class:`GuardViolation` when one fails.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from typing import TYPE_CHECKING, Mapping

from .sexpr import NIL, T, Char, Pair, Str, Sym, Term, is_number, num
from .terms import (
    apply_subst, const_value, free_vars, is_const, is_var, normalize, vcar, vcdr, vcons,
)
from .typesys import recognize

if TYPE_CHECKING:
    from .world import World

__all__ = [
    "EvalError", "GuardViolation", "FuelExhausted", "eval_ground", "eval_term",
    "apply_subst", "free_vars", "primitive_apply", "PRIMITIVES",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

DEFAULT_FUEL = 10**6


class EvalError(Exception):
    pass


class GuardViolation(EvalError):
    def __init__(self, fn: str, formal: str, value: Term):
        from .sexpr import print_term

        self.fn, self.formal, self.value = fn, formal, value
        super().__init__(f"guard violation: ({fn} ...) with {formal} = {print_term(value)}")


class FuelExhausted(EvalError):
    pass


class Fuel:
    def __init__(self, amount: int):
        self.left = amount

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise FuelExhausted("evaluation step bound exceeded")


def _bool(b: bool) -> Sym:
    return T if b else NIL


def _fix(x: Term) -> int | Fraction:
    return x if is_number(x) else 0


def _len(v: Term) -> int:
    n = 0
    while isinstance(v, (tuple, Pair)):
        if isinstance(v, tuple):
            return n + len(v)
        n += 1
        v = v.cdr
    return n


def _recip(x: Term) -> Term:
    x = _fix(x)
    return 0 if x == 0 else num(Fraction(1) / x)


PRIMITIVES = {
    "car": vcar,
    "cdr": vcdr,
    "cons": vcons,
    "consp": lambda v: _bool(isinstance(v, (tuple, Pair))),
    "equal": lambda a, b: _bool(a == b),
    "not": lambda v: _bool(v == NIL),
    "<": lambda a, b: _bool(_fix(a) < _fix(b)),
    "+": lambda a, b: num(_fix(a) + _fix(b)),
    "*": lambda a, b: num(_fix(a) * _fix(b)),
    "-": lambda a: num(-_fix(a)),
    "/": _recip,
    "len": _len,
    "integerp": lambda v: _bool(isinstance(v, int)),
    "rationalp": lambda v: _bool(is_number(v)),
    "acl2-numberp": lambda v: _bool(is_number(v)),
    "natp": lambda v: _bool(isinstance(v, int) and v >= 0),
    "posp": lambda v: _bool(isinstance(v, int) and v > 0),
    "negp": lambda v: _bool(isinstance(v, int) and v < 0),
    "zp": lambda v: _bool(not (isinstance(v, int) and v > 0)),
    "symbolp": lambda v: _bool(isinstance(v, Sym)),
    "booleanp": lambda v: _bool(v == T or v == NIL),
    "tlp": lambda v: _bool(v == NIL or isinstance(v, tuple)),
    "allp": lambda v: T,
    "listp": lambda v: _bool(v == NIL or isinstance(v, (tuple, Pair))),
    "stringp": lambda v: _bool(isinstance(v, Str)),
    "characterp": lambda v: _bool(isinstance(v, Char)),
    "keywordp": lambda v: _bool(isinstance(v, Sym) and v.startswith(":")),
}


def primitive_apply(name: str, vals: list[Term]) -> Term:
    return PRIMITIVES[name](*vals)


def eval_term(t: Term, env: Mapping[Sym, Term], world: "World", fuel: Fuel) -> Term:
    """Evaluate a normalized term under variable bindings ``env``."""
    return _compiled(t, world)(env, fuel)


# Terms are compiled to closures once; user-function bodies are cached per
# FunctionDef object, so a rolled-back and redefined function is recompiled.

_TERM_CACHE_LIMIT = 4096


def _caches(world: "World") -> tuple[dict, dict]:
    c = world.__dict__.get("_eval_caches")
    if c is None:
        c = world.__dict__["_eval_caches"] = ({}, {})
    return c


def _compiled(t: Term, world: "World"):
    terms, _ = _caches(world)
    f = terms.get(t)
    if f is None:
        if len(terms) > _TERM_CACHE_LIMIT:
            terms.clear()
        f = terms[t] = _compile(t, world)
    return f


def _function(fdef, world: "World"):
    _, fns = _caches(world)
    hit = fns.get(fdef.name)
    if hit is not None and hit[0] is fdef:
        return hit[1]
    box: list = []

    def call(vals, fuel, _box=box):
        return _box[0](vals, fuel)

    fns[fdef.name] = (fdef, call)  # installed first so recursive calls resolve
    body = _compile(fdef.body, world)
    checks = [(str(x), _recognizer(ty, world)) for x, ty in zip(fdef.formals, fdef.input_types)]
    formals = fdef.formals
    h = str(fdef.name)

    def run(vals, fuel):
        for (name, ok), v in zip(checks, vals):
            if not ok(v):
                raise GuardViolation(h, name, v)
        return body(dict(zip(formals, vals)), fuel)

    box.append(run)
    return call


def _recognizer(ty, world: "World"):
    from .typesys import BASE_PREDICATES, Base

    if isinstance(ty, Base):
        if ty.name == "all":
            return lambda v: True
        pred = PRIMITIVES.get(str(BASE_PREDICATES.get(ty.name)))
        if pred is not None:
            return lambda v: pred(v) is T
    table = world.types
    return lambda v: recognize(v, ty, table)


def _compile(t: Term, world: "World"):
    if is_var(t):
        def var(env, fuel):
            try:
                return env[t]
            except KeyError:
                raise EvalError(f"unbound variable {t}") from None
        return var
    if is_const(t):
        value = const_value(t)

        def const(env, fuel):
            return value
        return const
    head = t[0]
    h = str(head)
    args = [_compile(a, world) for a in t[1:]]
    if h == "if":
        c, a, b = args

        def if_(env, fuel):
            fuel.tick()
            return a(env, fuel) if c(env, fuel) != NIL else b(env, fuel)
        return if_
    if h == "and":
        def and_(env, fuel):
            fuel.tick()
            v: Term = T
            for f in args:
                v = f(env, fuel)
                if v == NIL:
                    return NIL
            return v
        return and_
    if h == "or":
        def or_(env, fuel):
            fuel.tick()
            for f in args:
                v = f(env, fuel)
                if v != NIL:
                    return v
            return NIL
        return or_
    if h == "implies":
        p, q = args

        def implies(env, fuel):
            fuel.tick()
            if p(env, fuel) == NIL:
                return T
            return _bool(q(env, fuel) != NIL)
        return implies
    if h == "iff":
        p, q = args

        def iff(env, fuel):
            fuel.tick()
            return _bool((p(env, fuel) != NIL) == (q(env, fuel) != NIL))
        return iff
    if h in PRIMITIVES:
        prim = PRIMITIVES[h]
        if len(args) == 1:
            (x,) = args

            def primitive1(env, fuel):
                fuel.tick()
                return prim(x(env, fuel))
            return primitive1
        if len(args) == 2:
            x, y = args

            def primitive2(env, fuel):
                fuel.tick()
                return prim(x(env, fuel), y(env, fuel))
            return primitive2

        def primitive(env, fuel):
            fuel.tick()
            return prim(*[f(env, fuel) for f in args])
        return primitive
    fdef = world.functions.get(head)
    if fdef is None:
        raise EvalError(f"unknown function {head}")
    if len(args) != len(fdef.formals):
        raise EvalError(f"wrong number of arguments to {head}")

    def user(env, fuel):
        fuel.tick()
        vals = [f(env, fuel) for f in args]
        cur = world.functions.get(head)
        if cur is None:
            raise EvalError(f"unknown function {head}")
        return _function(cur, world)(vals, fuel)
    return user


def eval_ground(t: Term, world: "World", fuel: int = DEFAULT_FUEL) -> Term:
    """Evaluate a closed term; raises on guard violations and fuel exhaustion."""
    t = normalize(t)
    fv = free_vars(t)
    if fv:
        raise EvalError(f"term is not closed: free variables {', '.join(fv)}")
    return eval_term(t, {}, world, Fuel(fuel))


def eval_with(t: Term, env: Mapping[Sym, Term], world: "World", fuel: int = DEFAULT_FUEL,
              normalized: bool = False) -> Term:
    return eval_term(t if normalized else normalize(t), env, world, Fuel(fuel))

