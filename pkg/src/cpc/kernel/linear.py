"""Linear arithmetic over exact rationals by Fourier-Motzkin elimination.

A constraint is ``sum(c_i * x_i) + k REL 0`` with REL one of ``<``, ``<=`` or
``=``. Atoms ``x_i`` stand for the numeric fix of arbitrary terms, so
``(< a b)`` is exactly ``fix(a) < fix(b)``. Without arithmetic rules every
non-constant term is opaque (pure order reasoning); with them ``+``, unary
``-`` and multiplication by a constant are linearized and strict integer
constraints are tightened.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable

from ..sexpr import Term, is_number
from ..terms import const_value, is_call, is_const
from .typeset import (
    TS_INT, TS_NEG, TS_NUM, TS_POS, TS_POSINT, TS_NEGINT, TS_ZERO, fix_bits,
)

MAX_CONSTRAINTS = 600

LT, LE, EQ = "<", "<=", "="


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple  # sorted ((atom_key, Fraction), ...)
    const: Fraction
    rel: str

    def as_dict(self) -> dict:
        return dict(self.coeffs)


def _mk(coeffs: dict, const: Fraction, rel: str) -> Constraint:
    items = tuple(sorted(((k, v) for k, v in coeffs.items() if v != 0), key=lambda kv: kv[0]))
    return Constraint(items, Fraction(const), rel)


class Linearizer:
    def __init__(self, arith: bool, type_of: Callable[[Term], int]):
        self.arith = arith
        self.type_of = type_of
        self.atoms: dict[Term, int] = {}

    def atom(self, t: Term) -> int:
        if t not in self.atoms:
            self.atoms[t] = len(self.atoms)
        return self.atoms[t]

    def linear(self, t: Term) -> tuple[dict, Fraction]:
        if is_const(t):
            v = const_value(t)
            return {}, Fraction(v) if is_number(v) else Fraction(0)
        if self.arith and is_call(t):
            h = str(t[0])
            if h == "+" and len(t) == 3:
                a, ca = self.linear(t[1])
                b, cb = self.linear(t[2])
                out = dict(a)
                for k, v in b.items():
                    out[k] = out.get(k, 0) + v
                return out, ca + cb
            if h == "-" and len(t) == 2:
                a, ca = self.linear(t[1])
                return {k: -v for k, v in a.items()}, -ca
            if h == "*" and len(t) == 3:
                for c, x in ((t[1], t[2]), (t[2], t[1])):
                    if is_const(c):
                        v = const_value(c)
                        k = Fraction(v) if is_number(v) else Fraction(0)
                        a, ca = self.linear(x)
                        return {kk: vv * k for kk, vv in a.items()}, ca * k
        return {self.atom(t): Fraction(1)}, Fraction(0)

    def compare(self, a: Term, b: Term, rel: str) -> Constraint:
        """The constraint ``a REL b`` as ``a - b REL 0``."""
        la, ca = self.linear(a)
        lb, cb = self.linear(b)
        out = dict(la)
        for k, v in lb.items():
            out[k] = out.get(k, 0) - v
        return _mk(out, ca - cb, rel)

    def bounds(self) -> list[Constraint]:
        """Sign facts for each atom from its type set."""
        out = []
        for t, k in list(self.atoms.items()):
            m = fix_bits(self.type_of(t))
            if m & ~TS_POSINT == 0:
                out.append(_mk({k: Fraction(-1)}, Fraction(1), LE))  # 1 - x <= 0
            elif m & ~TS_POS == 0:
                out.append(_mk({k: Fraction(-1)}, Fraction(0), LT))
            elif m & ~(TS_POS | TS_ZERO) == 0:
                out.append(_mk({k: Fraction(-1)}, Fraction(0), LE))
            if m & ~TS_NEGINT == 0:
                out.append(_mk({k: Fraction(1)}, Fraction(1), LE))
            elif m & ~TS_NEG == 0:
                out.append(_mk({k: Fraction(1)}, Fraction(0), LT))
            elif m & ~(TS_NEG | TS_ZERO) == 0:
                out.append(_mk({k: Fraction(1)}, Fraction(0), LE))
        return out

    def integral(self, k: int) -> bool:
        for t, kk in self.atoms.items():
            if kk == k:
                return fix_bits(self.type_of(t)) & ~TS_INT == 0
        return False


def tighten(c: Constraint, integral: Callable[[int], bool]) -> Constraint:
    """For integer-valued sums, ``s < 0`` becomes ``s + 1 <= 0``."""
    if c.rel != LT or not c.coeffs or not all(integral(k) for k, _ in c.coeffs):
        return c
    scale = lcm(*(v.denominator for _, v in c.coeffs), c.const.denominator)
    coeffs = {k: v * scale for k, v in c.coeffs}
    const = c.const * scale
    if any(v.denominator != 1 for v in coeffs.values()) or const.denominator != 1:
        return c
    return _mk(coeffs, const + 1, LE)


def _trivially_false(c: Constraint) -> bool:
    if c.coeffs:
        return False
    k = c.const
    return (c.rel == LT and k >= 0) or (c.rel == LE and k > 0) or (c.rel == EQ and k != 0)


def infeasible(constraints: list[Constraint], integral: Callable[[int], bool] | None = None) -> bool:
    """True when the constraint set has no rational solution (sound refutation)."""
    cs = [tighten(c, integral) if integral else c for c in constraints]
    if any(_trivially_false(c) for c in cs):
        return True
    # eliminate equalities by substitution
    while True:
        eq = next((c for c in cs if c.rel == EQ and c.coeffs), None)
        if eq is None:
            break
        k, a = eq.coeffs[0]
        sol = {kk: -v / a for kk, v in eq.coeffs if kk != k}
        sconst = -eq.const / a
        nxt = []
        for c in cs:
            if c is eq:
                continue
            d = c.as_dict()
            if k not in d:
                nxt.append(c)
                continue
            f = d.pop(k)
            for kk, v in sol.items():
                d[kk] = d.get(kk, 0) + f * v
            nc = _mk(d, c.const + f * sconst, c.rel)
            if integral:
                nc = tighten(nc, integral)
            nxt.append(nc)
        cs = nxt
        if any(_trivially_false(c) for c in cs):
            return True
    cs = [c for c in cs if c.coeffs or _trivially_false(c)]
    seen = set(cs)
    while cs:
        if any(_trivially_false(c) for c in cs):
            return True
        vars_ = sorted({k for c in cs for k, _ in c.coeffs})
        if not vars_:
            return False

        def cost(k):
            pos = sum(1 for c in cs if c.as_dict().get(k, 0) > 0)
            neg = sum(1 for c in cs if c.as_dict().get(k, 0) < 0)
            return pos * neg - pos - neg

        k = min(vars_, key=cost)
        pos = [c for c in cs if c.as_dict().get(k, 0) > 0]
        neg = [c for c in cs if c.as_dict().get(k, 0) < 0]
        rest = [c for c in cs if k not in c.as_dict()]
        for p in pos:
            dp = p.as_dict()
            for n in neg:
                dn = n.as_dict()
                fp, fn = dp[k], -dn[k]
                d: dict = {}
                for kk, v in dp.items():
                    d[kk] = d.get(kk, 0) + v * fn
                for kk, v in dn.items():
                    d[kk] = d.get(kk, 0) + v * fp
                d.pop(k, None)
                rel = LT if LT in (p.rel, n.rel) else LE
                nc = _mk(d, p.const * fn + n.const * fp, rel)
                if integral:
                    nc = tighten(nc, integral)
                if nc not in seen:
                    seen.add(nc)
                    rest.append(nc)
        cs = rest
        if len(cs) > MAX_CONSTRAINTS:
            return False
    return False


def refute_clause(clause, type_of: Callable[[Term], int], arith: bool) -> bool:
    """Does linear reasoning show the disjunction ``clause`` is valid?

    The negation of the clause (every literal false) is turned into
    constraints; the clause is valid when they are infeasible. A positive
    numeric equality literal is split into the two strict orders.
    """
    lin = Linearizer(arith, type_of)
    facts: list[Constraint] = []
    goals_eq: list[tuple[Term, Term]] = []
    relevant = False
    for atom, pos in clause:
        if is_call(atom, "<") and len(atom) == 3:
            relevant = True
            a, b = atom[1], atom[2]
            # literal false: pos -> not (a < b) i.e. b <= a; neg -> a < b
            facts.append(lin.compare(b, a, LE) if pos else lin.compare(a, b, LT))
        elif is_call(atom, "equal") and len(atom) == 3:
            a, b = atom[1], atom[2]
            if pos:
                if type_of(a) & ~TS_NUM == 0 and type_of(b) & ~TS_NUM == 0:
                    goals_eq.append((a, b))
            else:
                facts.append(lin.compare(a, b, EQ))
    if not relevant and not goals_eq:
        return False
    base = facts + lin.bounds()
    integral = lin.integral if arith else None
    if infeasible(base, integral):
        return True
    for a, b in goals_eq:
        lt = lin.compare(a, b, LT)
        gt = lin.compare(b, a, LT)
        extra = lin.bounds()
        if infeasible(base + extra + [lt], integral) and infeasible(base + extra + [gt], integral):
            return True
    return False


__all__ = ["Constraint", "Linearizer", "infeasible", "refute_clause", "tighten"]
