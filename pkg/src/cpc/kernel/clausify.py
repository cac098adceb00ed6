"""Conversion of formulas to clauses (conjunctive normal form).

A literal is ``(atom, positive)``; a clause is a tuple of literals read as a
disjunction; a formula becomes a list of clauses read as a conjunction.
Atoms are non-connective terms. ``if`` in a boolean position is split, and
``if`` nested inside an atom is lifted out first.
"""

from __future__ import annotations

from ..sexpr import NIL, Term
from ..terms import IF, NOT, OR, AND, IMPLIES, const_value, is_call, is_const, is_quote

Literal = tuple[Term, bool]
Clause = tuple[Literal, ...]

MAX_CLAUSES = 4096


class ClauseExplosion(Exception):
    pass


def find_if(t: Term) -> Term | None:
    """The leftmost-outermost ``if`` subterm strictly inside atom ``t``."""
    if not isinstance(t, tuple) or is_quote(t):
        return None
    for a in t[1:]:
        if is_call(a, "if") and len(a) == 4:
            return a
        found = find_if(a)
        if found is not None:
            return found
    return None


def _replace_first(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, tuple) and not is_quote(t):
        return (t[0],) + tuple(_replace_first(a, old, new) for a in t[1:])
    return t


def _or(a: list[list[Literal]], b: list[list[Literal]]) -> list[list[Literal]]:
    out = [x + y for x in a for y in b]
    if len(out) > MAX_CLAUSES:
        raise ClauseExplosion("too many clauses")
    return out


def cnf(t: Term, positive: bool = True) -> list[list[Literal]]:
    """Clauses equivalent to ``t`` (or to its negation when not ``positive``)."""
    if is_const(t):
        truthy = const_value(t) != NIL
        return [] if truthy == positive else [[]]
    if is_call(t, "not") and len(t) == 2:
        return cnf(t[1], not positive)
    if is_call(t, "and") or is_call(t, "or"):
        conj = (t[0] == AND) == positive
        parts = [cnf(a, positive) for a in t[1:]]
        if conj:
            return [c for p in parts for c in p]
        out: list[list[Literal]] = [[]]
        for p in parts:
            out = _or(out, p)
        return out
    if is_call(t, "implies") and len(t) == 3:
        if positive:
            return _or(cnf(t[1], False), cnf(t[2], True))
        return cnf(t[1], True) + cnf(t[2], False)
    if is_call(t, "iff") and len(t) == 3:
        a, b = t[1], t[2]
        if positive:
            return _or(cnf(a, False), cnf(b, True)) + _or(cnf(a, True), cnf(b, False))
        return _or(cnf(a, True), cnf(b, True)) + _or(cnf(a, False), cnf(b, False))
    if is_call(t, "if") and len(t) == 4:
        c, a, b = t[1], t[2], t[3]
        return _or(cnf(c, False), cnf(a, positive)) + _or(cnf(c, True), cnf(b, positive))
    inner = find_if(t)
    if inner is not None:
        lifted = (IF, inner[1], _replace_first(t, inner, inner[2]), _replace_first(t, inner, inner[3]))
        return cnf(lifted, positive)
    return [[(t, positive)]]


def tidy(clause: list[Literal] | Clause) -> Clause | None:
    """Deduplicate; ``None`` when the clause is trivially true."""
    seen: dict[Literal, None] = {}
    for atom, pos in clause:
        if is_const(atom):
            if (const_value(atom) != NIL) == pos:
                return None
            continue
        if (atom, not pos) in seen:
            return None
        seen.setdefault((atom, pos), None)
    return tuple(seen)


def clausify(t: Term) -> list[Clause]:
    """Clauses of ``t`` with tautologies removed and duplicates dropped."""
    out: dict[Clause, None] = {}
    for c in cnf(t):
        tc = tidy(c)
        if tc is not None:
            out.setdefault(tc, None)
    return list(out)


def literal_term(lit: Literal) -> Term:
    atom, pos = lit
    return atom if pos else (NOT, atom)


def clause_term(clause: Clause) -> Term:
    """A clause as a goal: (implies (and negated-literals) (or positives))."""
    hyps = [a for a, p in clause if not p]
    concl = [a for a, p in clause if p]
    if not concl:
        c: Term = NIL
    elif len(concl) == 1:
        c = concl[0]
    else:
        c = (OR,) + tuple(concl)
    if not hyps:
        return c
    return (IMPLIES, hyps[0] if len(hyps) == 1 else (AND,) + tuple(hyps), c)


def subsumes(general: Clause, specific: Clause) -> bool:
    return set(general) <= set(specific)
