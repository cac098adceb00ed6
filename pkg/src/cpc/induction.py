"""Induction obligations from a recursive definition, and matching of the
obligations to the cases a user wrote."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .guards import PropError, prop_equivalent
from .sexpr import NIL, Term, print_term
from .terms import (
    IF, NOT, apply_subst, is_call, is_var, mk_and, mk_implies, normalize, promote_all,
    split_implication,
)

if TYPE_CHECKING:
    from .world import World


class InductionError(Exception):
    pass


@dataclass(frozen=True)
class Obligation:
    name: str
    statement: Term
    tests: tuple = ()
    hyps: tuple = ()


@dataclass(frozen=True)
class _Branch:
    tests: tuple
    calls: tuple


def _calls_of(t: Term, f: Term) -> list[Term]:
    out: list[Term] = []

    def go(x: Term, inside_call: bool, guarded: bool) -> None:
        if not is_call(x):
            return
        if x[0] == f:
            if inside_call:
                raise InductionError("nested recursive calls are not a supported induction scheme")
            if guarded:
                raise InductionError("recursive call under a conditional inside an expression is "
                                     "not a supported induction scheme")
            if x not in out:
                out.append(x)
            for a in x[1:]:
                go(a, True, guarded)
            return
        g = guarded or str(x[0]) in ("if", "and", "or", "implies")
        for a in x[1:]:
            go(a, inside_call, g)

    go(t, False, False)
    return out


def _mentions(t: Term, f: Term) -> bool:
    if not is_call(t):
        return False
    return t[0] == f or any(_mentions(a, f) for a in t[1:])


def _branches(body: Term, f: Term, tests: tuple, out: list) -> None:
    if is_call(body, "if") and len(body) == 4:
        test = body[1]
        if _mentions(test, f):
            raise InductionError("recursive call in a test is not a supported induction scheme")
        _branches(body[2], f, tests + (test,), out)
        _branches(body[3], f, tests + ((NOT, test),), out)
        return
    if is_call(body, "and") and len(body) >= 3:
        first, rest = body[1], (body[0],) + body[2:] if len(body) > 3 else body[2]
        _branches((IF, first, rest, NIL), f, tests, out)
        return
    if is_call(body, "or") and len(body) >= 3:
        first, rest = body[1], (body[0],) + body[2:] if len(body) > 3 else body[2]
        _branches((IF, first, first, rest), f, tests, out)
        return
    out.append(_Branch(tests, tuple(_calls_of(body, f))))


def induction_scheme(stmt: Term, indterm: Term, world: "World") -> list[Obligation]:
    """Obligations for induction on ``indterm`` applied to ``stmt``."""
    stmt = normalize(stmt)
    indterm = normalize(indterm)
    if not is_call(indterm):
        raise InductionError(f"induction term {print_term(indterm)} is not a function call")
    f = indterm[0]
    fdef = world.functions.get(f)
    if fdef is None:
        raise InductionError(f"{f} is not a defined function")
    if not fdef.recursive:
        raise InductionError(f"{f} is not recursive")
    actuals = indterm[1:]
    if len(actuals) != len(fdef.formals):
        raise InductionError(f"{f} expects {len(fdef.formals)} arguments")
    if not all(is_var(a) for a in actuals) or len(set(actuals)) != len(actuals):
        raise InductionError("induction term arguments must be distinct variables")
    rename = dict(zip(fdef.formals, actuals))
    body = apply_subst(fdef.body, rename)
    contract = world.contract_of(f, actuals)
    branches: list[_Branch] = []
    _branches(body, f, (), branches)
    obs: list[Obligation] = []
    if contract:
        obs.append(Obligation("contract-case", mk_implies([(NOT, mk_and(contract))], stmt),
                              (), ((NOT, mk_and(contract)),)))
    nb = ni = 0
    for br in branches:
        ihs = []
        for call in br.calls:
            sigma = dict(zip(actuals, call[1:]))
            inst = apply_subst(stmt, sigma)
            ck = world.contract_of(f, call[1:])
            ih_hyps, _ = split_implication(inst)
            if ck and not all(c in ih_hyps for c in ck):
                inst = mk_implies(ck, inst)
            ihs.append(inst)
        hyps = tuple(contract) + br.tests + tuple(ihs)
        if ihs:
            ni += 1
            name = f"induct-case-{ni}"
        else:
            nb += 1
            name = f"base-case-{nb}"
        obs.append(Obligation(name, mk_implies(list(hyps), stmt), br.tests, hyps))
    return obs


def exported_hyps(t: Term) -> tuple[list[Term], Term]:
    """Hypotheses and conclusion after full exportation."""
    return promote_all(normalize(t))


def match_cases(obs: list[Obligation], cases: list[Term]) -> dict[int, int]:
    """Injective first-fit mapping obligation index -> case index.

    A case matches an obligation when the conjunctions of their exported
    hypotheses are propositionally equivalent.
    """
    mapping: dict[int, int] = {}
    used: set[int] = set()
    case_hyps = [mk_and(exported_hyps(c)[0]) for c in cases]
    for i, ob in enumerate(obs):
        oh = mk_and(exported_hyps(ob.statement)[0])
        for j, ch in enumerate(case_hyps):
            if j in used:
                continue
            try:
                ok, _ = prop_equivalent(oh, ch)
            except PropError as e:
                raise InductionError(str(e)) from None
            if ok:
                mapping[i] = j
                used.add(j)
                break
    missing = [obs[i] for i in range(len(obs)) if i not in mapping]
    if missing:
        unused = [j for j in range(len(cases)) if j not in used]
        raise MatchError(missing, unused)
    return mapping


class MatchError(InductionError):
    def __init__(self, missing: list[Obligation], unused: list[int]):
        first = missing[0]
        msg = (f"no case proves the {first.name} obligation "
               f"{print_term(first.statement)}")
        if unused:
            msg += f"; {len(unused)} case(s) match no obligation"
        super().__init__(msg)
        self.missing = missing
        self.unused = unused


__all__ = ["Obligation", "InductionError", "MatchError", "induction_scheme", "match_cases",
           "exported_hyps"]
