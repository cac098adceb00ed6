"""Ground congruence closure over the literals of a clause.

Negative ``equal`` literals (assumed equalities) are merged; then a clause is
valid if a positive equality joins one class, a positive atom is congruent
to an assumed-true atom, or two distinct constants end up in one class.
"""

from __future__ import annotations

from ..sexpr import NIL, Term
from ..terms import const_value, is_call, is_const


class UnionFind:
    def __init__(self):
        self.parent: dict[Term, Term] = {}

    def add(self, t: Term) -> None:
        if t not in self.parent:
            self.parent[t] = t
            if is_call(t):
                for a in t[1:]:
                    self.add(a)

    def find(self, t: Term) -> Term:
        self.add(t)
        root = t
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[t] != root:
            self.parent[t], t = root, self.parent[t]
        return root

    def union(self, a: Term, b: Term) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        # keep constants as representatives
        if is_const(ra):
            ra, rb = rb, ra
        self.parent[ra] = rb
        return True


def close(uf: UnionFind) -> None:
    calls = [t for t in uf.parent if is_call(t)]
    changed = True
    while changed:
        changed = False
        sig: dict[tuple, Term] = {}
        for t in calls:
            key = (t[0],) + tuple(uf.find(a) for a in t[1:])
            other = sig.get(key)
            if other is None:
                sig[key] = t
            elif uf.union(t, other):
                changed = True


def clause_valid_by_congruence(clause) -> bool:
    uf = UnionFind()
    assumed: list[Term] = []
    for atom, pos in clause:
        uf.add(atom)
        if not pos:
            assumed.append(atom)
            if is_call(atom, "equal") and len(atom) == 3:
                uf.union(atom[1], atom[2])
    if not any(is_call(a, "equal") for a in assumed):
        return False
    close(uf)
    consts: dict[Term, Term] = {}
    for t in list(uf.parent):
        if is_const(t):
            r = uf.find(t)
            v = const_value(t)
            if r in consts and consts[r] != v:
                return True
            consts[r] = v
    roots_true = {uf.find(a) for a in assumed}
    for a in assumed:
        if consts.get(uf.find(a), True) == NIL:
            return True
    for atom, pos in clause:
        if not pos:
            continue
        if is_call(atom, "equal") and len(atom) == 3 and uf.find(atom[1]) == uf.find(atom[2]):
            return True
        r = uf.find(atom)
        if r in roots_true:
            return True
        v = consts.get(r)
        if v is not None and v != NIL:
            return True
    return False
