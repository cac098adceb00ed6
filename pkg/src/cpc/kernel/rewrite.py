"""Contextual conditional rewriting.

Rewriting is inside-out and leftmost-first. At each call node the rewriter
tries, in order: ground evaluation, facts recorded in the context, type-set
reasoning, and then the enabled rules for the head symbol in admission order.
Every step consumes fuel; running out raises :class:`Exhausted`.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

from ..evaluator import EvalError, Fuel, PRIMITIVES, eval_term, primitive_apply
from ..sexpr import NIL, T, Term
from ..terms import (
    AND, EQUAL, IF, IFF, IMPLIES, NOT, OR, apply_subst, const_value, is_call, is_const,
    is_var, make_const, occurs,
)
from .typeset import (
    TS_ALL, TS_BOOL, TS_NIL, TypeEnv, recognizer_info, singleton_value, type_set, value_bits,
)

if TYPE_CHECKING:
    from ..world import Rule, World

DEFAULT_FUEL = 10_000
MAX_NESTING = 200
MAX_RELIEF_DEPTH = 5
EVAL_FUEL = 100_000


class Exhausted(Exception):
    """The rewrite budget or nesting cap was exceeded."""


class Budget:
    def __init__(self, steps: int = DEFAULT_FUEL):
        self.left = steps
        self.nesting = 0
        self.relief = 0

    def tick(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise Exhausted("rewrite fuel exhausted")


class Context:
    """What is known while rewriting one literal: atom truths, type sets and
    variable/term bindings to constants."""

    def __init__(self, world: "World", thy: frozenset):
        self.world = world
        self.thy = thy
        self.tenv = TypeEnv()
        self.truths: dict[Term, bool] = {}
        self.consts: dict[Term, Term] = {}
        self.expanding: frozenset = frozenset()
        self.undecided = False

    def copy(self) -> "Context":
        c = Context(self.world, self.thy)
        c.tenv = self.tenv.copy()
        c.truths = dict(self.truths)
        c.consts = dict(self.consts)
        c.expanding = self.expanding
        c.undecided = self.undecided
        return c

    def ts(self, t: Term) -> int:
        return type_set(t, self.tenv, self.world, self.thy)

    def assume(self, atom: Term, value: bool) -> None:
        if is_const(atom):
            return
        if is_call(atom, "not") and len(atom) == 2:
            self.assume(atom[1], not value)
            return
        if is_call(atom, "and") and value or is_call(atom, "or") and not value:
            for a in atom[1:]:
                self.assume(a, value)
            return
        self.truths[atom] = value
        self.tenv.narrow(atom, (TS_ALL & ~TS_NIL) if value else TS_NIL)
        if not is_call(atom):
            return
        if len(atom) == 2:
            info = recognizer_info(str(atom[0]), self.world)
            if info is not None:
                mask, exact = info
                if value:
                    self.tenv.narrow(atom[1], mask)
                elif exact:
                    self.tenv.narrow(atom[1], TS_ALL & ~mask)
        if atom[0] == EQUAL and len(atom) == 3:
            a, b = atom[1], atom[2]
            if value:
                m = self.ts(a) & self.ts(b)
                self.tenv.narrow(a, m)
                self.tenv.narrow(b, m)
                if is_const(b) and not is_const(a):
                    self.consts[a] = b
                elif is_const(a) and not is_const(b):
                    self.consts[b] = a
            else:
                for x, y in ((a, b), (b, a)):
                    if is_const(y) and not is_const(x):
                        bits = value_bits(const_value(y))
                        if singleton_value(bits) == const_value(y):
                            self.tenv.narrow(x, TS_ALL & ~bits)

    def truth(self, t: Term) -> bool | None:
        """Truth of ``t`` if decided by constants, recorded facts or types."""
        if is_const(t):
            return const_value(t) != NIL
        if t in self.truths:
            return self.truths[t]
        m = self.ts(t)
        if m == TS_NIL:
            return False
        if m & TS_NIL == 0:
            return True
        return None


def match(pat: Term, term: Term, s: dict) -> bool:
    """Extend ``s`` so that pat/s == term; False (``s`` may be dirty) otherwise."""
    if is_var(pat):
        if pat in s:
            return s[pat] == term
        s[pat] = term
        return True
    if is_const(pat):
        return is_const(term) and const_value(term) == const_value(pat)
    if not is_call(term) or term[0] != pat[0] or len(term) != len(pat):
        return False
    return all(match(p, x, s) for p, x in zip(pat[1:], term[1:]))


def _has_undecided_call(t: Term, f: Term) -> bool:
    """True when some ``if`` in ``t`` has a call of ``f`` in a branch."""
    if not is_call(t):
        return False
    if t[0] == IF and len(t) == 4 and (_calls(t[2], f) or _calls(t[3], f)):
        return True
    if t[0] in ("and", "or") and any(_calls(a, f) for a in t[2:]):
        return True
    return any(_has_undecided_call(a, f) for a in t[1:])


def _calls(t: Term, f: Term) -> bool:
    if not is_call(t):
        return False
    return t[0] == f or any(_calls(a, f) for a in t[1:])


class Rewriter:
    def __init__(self, world: "World", thy: frozenset, budget: Budget):
        self.world = world
        self.thy = thy
        self.budget = budget

    def rewrite(self, t: Term, ctx: Context, iff: bool = False) -> Term:
        b = self.budget
        b.tick()
        b.nesting += 1
        try:
            if b.nesting > MAX_NESTING:
                raise Exhausted("rewrite nesting cap exceeded")
            return self._rewrite(t, ctx, iff)
        finally:
            b.nesting -= 1

    def _const_of(self, t: Term, ctx: Context, iff: bool) -> Term | None:
        if t in ctx.consts:
            return ctx.consts[t]
        m = ctx.ts(t)
        v = singleton_value(m)
        if v is not None:
            return make_const(v)
        if iff and m & TS_NIL == 0:
            return T
        if t in ctx.truths:
            if not ctx.truths[t]:
                return NIL
            if iff or m & ~TS_BOOL == 0:
                return T
        return None

    def _rewrite(self, t: Term, ctx: Context, iff: bool) -> Term:
        if is_const(t):
            return t
        if is_var(t):
            c = self._const_of(t, ctx, iff)
            return t if c is None else c
        h = t[0]
        if h == IF and len(t) == 4:
            return self._rewrite_if(t, ctx, iff)
        if h in (NOT, AND, OR, IMPLIES, IFF):
            return self._rewrite_connective(t, ctx, iff)
        new = (h,) + tuple(self.rewrite(a, ctx) for a in t[1:])
        return self._rewrite_call(new, ctx, iff)

    def _rewrite_if(self, t: Term, ctx: Context, iff: bool) -> Term:
        test = self.rewrite(t[1], ctx, True)
        tv = ctx.truth(test)
        if tv is not None:
            return self.rewrite(t[2] if tv else t[3], ctx, iff)
        c1 = ctx.copy()
        c1.assume(test, True)
        c1.undecided = True
        a = self.rewrite(t[2], c1, iff)
        c2 = ctx.copy()
        c2.assume(test, False)
        c2.undecided = True
        b = self.rewrite(t[3], c2, iff)
        if a == b:
            return a
        if a == T and b == NIL and (iff or ctx.ts(test) & ~TS_BOOL == 0):
            return test
        return (IF, test, a, b)

    def _rewrite_connective(self, t: Term, ctx: Context, iff: bool) -> Term:
        h = t[0]
        if h == NOT and len(t) == 2:
            a = self.rewrite(t[1], ctx, True)
            tv = ctx.truth(a)
            if tv is not None:
                return NIL if tv else T
            if is_call(a, "not") and ctx.ts(a[1]) & ~TS_BOOL == 0:
                return a[1]
            return (NOT, a)
        if h in (AND, OR):
            is_and = h == AND
            local = ctx.copy()
            kept: list[Term] = []
            items = t[1:]
            for i, x in enumerate(items):
                last = i == len(items) - 1
                a = self.rewrite(x, local, iff or not last)
                tv = local.truth(a)
                if tv is None:
                    kept.append(a)
                    local.assume(a, is_and)
                elif tv != is_and:
                    # decides the whole form
                    if is_and:
                        return NIL
                    a = T if iff or not is_const(a) and local.ts(a) & ~TS_BOOL == 0 else a
                    return a if not kept else (h,) + tuple(kept) + (a,)
                elif last and not iff:
                    kept.append(a)
            if not kept:
                return T if is_and else NIL
            if len(kept) == 1:
                return kept[0]
            return (h,) + tuple(kept)
        if h == IMPLIES and len(t) == 3:
            a = self.rewrite(t[1], ctx, True)
            av = ctx.truth(a)
            if av is False:
                return T
            local = ctx.copy()
            local.assume(a, True)
            b = self.rewrite(t[2], local, True)
            bv = local.truth(b)
            if bv is True:
                return T
            if av is True:
                if bv is False:
                    return NIL
                return b if iff or local.ts(b) & ~TS_BOOL == 0 else (IMPLIES, T, b)
            if bv is False:
                return (NOT, a)
            return (IMPLIES, a, b)
        if h == IFF and len(t) == 3:
            a = self.rewrite(t[1], ctx, True)
            b = self.rewrite(t[2], ctx, True)
            av, bv = ctx.truth(a), ctx.truth(b)
            if av is not None and bv is not None:
                return T if av == bv else NIL
            if a == b:
                return T
            return (IFF, a, b)
        return (h,) + tuple(self.rewrite(a, ctx) for a in t[1:])

    def _evaluate(self, t: Term) -> Term | None:
        h = t[0]
        vals = [const_value(a) for a in t[1:]]
        try:
            if str(h) in PRIMITIVES:
                return make_const(primitive_apply(str(h), vals))
            fdef = self.world.functions.get(h)
            if fdef is not None and f"{h}-exec" in self.thy:
                return make_const(eval_term(t, {}, self.world, Fuel(EVAL_FUEL)))
        except (EvalError, TypeError):
            return None
        return None

    def _rewrite_call(self, t: Term, ctx: Context, iff: bool) -> Term:
        h = t[0]
        if all(is_const(a) for a in t[1:]):
            v = self._evaluate(t)
            if v is not None:
                return v
        c = self._const_of(t, ctx, iff)
        if c is not None:
            return c
        if h == EQUAL and len(t) == 3 and t[1] == t[2]:
            return T
        for rule in self.world.rules_for(h):
            if rule.name not in self.thy:
                continue
            out = self._apply_rule(rule, t, ctx, iff)
            if out is not None:
                return out
        return t

    def _relieve(self, hyps, s: dict, ctx: Context) -> bool:
        b = self.budget
        if b.relief >= MAX_RELIEF_DEPTH:
            return False
        b.relief += 1
        try:
            for hyp in hyps:
                r = self.rewrite(apply_subst(hyp, s), ctx, True)
                if ctx.truth(r) is not True:
                    return False
            return True
        finally:
            b.relief -= 1

    def _apply_rule(self, rule: "Rule", t: Term, ctx: Context, iff: bool) -> Term | None:
        s: dict = {}
        if not match(rule.lhs, t, s):
            return None
        if not self._relieve(rule.hyps, s, ctx):
            return None
        rhs = apply_subst(rule.rhs, s)
        if rule.cls != "definition":
            return self.rewrite(rhs, ctx, iff)
        f = t[0]
        if not rule.recursive:
            return self.rewrite(rhs, ctx, iff)
        if f in ctx.expanding:
            return None
        local = ctx.copy()
        local.expanding = ctx.expanding | {f}
        local.undecided = False
        out = self.rewrite(rhs, local, iff)
        if _has_undecided_call(out, f):
            return None
        return out


def rewrite_term(t: Term, world: "World", thy: frozenset, ctx: Context | None = None,
                 fuel: int = DEFAULT_FUEL, iff: bool = False) -> Term:
    """Rewrite ``t`` once under ``thy``; raises :class:`Exhausted` on fuel exhaustion."""
    rw = Rewriter(world, thy, Budget(fuel))
    return rw.rewrite(t, ctx or Context(world, thy), iff)


__all__ = ["Budget", "Context", "Exhausted", "Rewriter", "match", "rewrite_term", "occurs"]
