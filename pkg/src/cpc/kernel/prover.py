"""The limited prover: clausify, simplify each clause, then decide.

Per clause: tautology check, substitution of trivial equivalences
``(equal v term)``, contextual rewriting of each literal with the other
literals assumed false, re-splitting of any ``if`` the rewriter introduced,
and finally congruence closure and linear arithmetic.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Iterable

from ..sexpr import NIL, Term
from ..terms import apply_subst, const_value, is_call, is_const, is_var, mk_implies, normalize, occurs
from .clausify import Clause, ClauseExplosion, clause_term, clausify, tidy
from .congruence import clause_valid_by_congruence
from .linear import refute_clause
from .rewrite import DEFAULT_FUEL, Budget, Context, Exhausted, Rewriter

if TYPE_CHECKING:
    from ..world import World

MAX_PASSES = 4
MAX_RESPLIT = 4


def arith_enabled(thy: frozenset, world: "World") -> bool:
    return any(r in thy for r in world.arith_rule_names)


def _substitute_equivalences(clause: Clause) -> Clause:
    """Use a hypothesis (equal v term), v a variable not in term, to replace v."""
    lits = list(clause)
    changed = True
    while changed:
        changed = False
        for i, (atom, pos) in enumerate(lits):
            if pos or not is_call(atom, "equal") or len(atom) != 3:
                continue
            for v, t in ((atom[1], atom[2]), (atom[2], atom[1])):
                if is_var(v) and not occurs(v, t):
                    rest = lits[:i] + lits[i + 1:]
                    lits = [(apply_subst(a, {v: t}), p) for a, p in rest]
                    changed = True
                    break
            if changed:
                break
    return tuple(lits)


def _context_for(lits: list, skip: int, world: "World", thy: frozenset) -> Context:
    ctx = Context(world, thy)
    for j, (atom, pos) in enumerate(lits):
        if j != skip:
            ctx.assume(atom, not pos)
    return ctx


def _decide(clause: Clause, world: "World", thy: frozenset) -> bool:
    if clause_valid_by_congruence(clause):
        return True
    ctx = Context(world, thy)
    for atom, pos in clause:
        ctx.assume(atom, not pos)
    return refute_clause(clause, ctx.ts, arith_enabled(thy, world))


def simplify_clause(clause: Clause, world: "World", thy: frozenset,
                    fuel: int = DEFAULT_FUEL, _depth: int = 0) -> list[Clause]:
    """Clauses whose conjunction implies ``clause``; [] means proved."""
    tc = tidy(clause)
    if tc is None:
        return []
    tc = tidy(_substitute_equivalences(tc))
    if tc is None:
        return []
    lits = list(tc)
    budget = Budget(fuel)
    rw = Rewriter(world, thy, budget)
    try:
        for _ in range(MAX_PASSES):
            changed = False
            i = 0
            while i < len(lits):
                atom, pos = lits[i]
                ctx = _context_for(lits, i, world, thy)
                new = rw.rewrite(atom, ctx, True)
                if is_const(new):
                    if (const_value(new) != NIL) == pos:
                        return []
                    lits.pop(i)
                    changed = True
                    continue
                if new != atom:
                    lits[i] = (new, pos)
                    changed = True
                i += 1
            if not changed:
                break
            t2 = tidy(lits)
            if t2 is None:
                return []
            lits = list(t2)
    except Exhausted:
        lits = list(tc)
    out_clause = tuple(lits)
    if any(_has_if(a) or _is_connective(a) for a, _ in out_clause) and _depth < MAX_RESPLIT:
        try:
            parts = clausify(clause_term(out_clause))
        except ClauseExplosion:
            parts = [out_clause]
        if parts != [out_clause]:
            result: list[Clause] = []
            for p in parts:
                result.extend(simplify_clause(p, world, thy, fuel, _depth + 1))
            return _dedupe(result)
    if _decide(out_clause, world, thy):
        return []
    return [out_clause]


def _is_connective(t: Term) -> bool:
    return is_call(t) and str(t[0]) in ("not", "and", "or", "implies", "iff", "if")


def _has_if(t: Term) -> bool:
    if not is_call(t):
        return False
    if str(t[0]) == "if":
        return True
    return any(_has_if(a) for a in t[1:])


def _dedupe(clauses: Iterable[Clause]) -> list[Clause]:
    return list(dict.fromkeys(clauses))


def prove_clauses(term: Term, world: "World", thy: frozenset,
                  fuel: int = DEFAULT_FUEL) -> list[Clause]:
    """Unproved residual clauses of ``term`` (empty list means proved)."""
    try:
        clauses = clausify(normalize(term))
    except ClauseExplosion:
        return [((normalize(term), True),)]
    out: list[Clause] = []
    for c in clauses:
        out.extend(simplify_clause(c, world, thy, fuel))
    return _dedupe(out)


def limited_prove(hyps: list[Term], concl: Term, world: "World", thy: Iterable[str],
                  fuel: int = DEFAULT_FUEL) -> bool:
    """Proved iff every clause of (hyps -> concl) discharges under ``thy``."""
    return not prove_clauses(mk_implies(list(hyps), concl), world, frozenset(thy), fuel)


__all__ = ["limited_prove", "prove_clauses", "simplify_clause", "arith_enabled"]
