"""Guard obligations, propositional equivalence, exportation and
contract-completion checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import TYPE_CHECKING

from .sexpr import NIL, T, Term, print_term
from .terms import (
    NOT, conjuncts, const_value, free_vars, is_call, is_const, mk_implies, normalize,
    split_implication,
)

if TYPE_CHECKING:
    from .world import World

MAX_ATOMS = 12
BOOL_OPS = ("not", "and", "or", "implies", "iff", "if")


@dataclass(frozen=True)
class GuardObligation:
    governors: tuple
    obligation: Term
    call: Term

    def formula(self) -> Term:
        return mk_implies(list(self.governors), self.obligation)


def guard_obligations(t: Term, world: "World") -> list[GuardObligation]:
    """Obligations in left-to-right, outside-in order, with their governors."""
    out: list[GuardObligation] = []
    _walk(normalize(t), (), world, out)
    return out


def _walk(t: Term, govs: tuple, world: "World", out: list) -> None:
    if not is_call(t):
        return
    h = str(t[0])
    a = t[1:]
    if h == "if" and len(a) == 3:
        _walk(a[0], govs, world, out)
        _walk(a[1], govs + (a[0],), world, out)
        _walk(a[2], govs + ((NOT, a[0]),), world, out)
        return
    if h in ("and", "implies"):
        acc = govs
        for x in a:
            _walk(x, acc, world, out)
            acc = acc + (x,)
        return
    if h == "or":
        acc = govs
        for x in a:
            _walk(x, acc, world, out)
            acc = acc + ((NOT, x),)
        return
    fdef = world.functions.get(t[0])
    if fdef is not None:
        if len(a) != len(fdef.formals):
            raise ValueError(f"wrong number of arguments to {h}")
        for ob in world.contract_of(t[0], a):
            out.append(GuardObligation(govs, ob, t))
    elif not world.is_defined(h) and h not in BOOL_OPS:
        raise ValueError(f"unknown function {h}")
    for x in a:
        _walk(x, govs, world, out)


def obligation_proved(ob: GuardObligation, world: "World", fuel: int | None = None) -> bool:
    from .kernel.prover import limited_prove

    kw = {} if fuel is None else {"fuel": fuel}
    return limited_prove(list(ob.governors), ob.obligation, world,
                         world.theory("contract-theory"), **kw)


def obligations_trivial(obs: list[GuardObligation], world: "World") -> bool:
    return all(obligation_proved(ob, world) for ob in obs)


def first_unproved(obs: list[GuardObligation], world: "World") -> GuardObligation | None:
    for ob in obs:
        if not obligation_proved(ob, world):
            return ob
    return None


# -- propositional structure ------------------------------------------------

class PropError(Exception):
    pass


def prop_atoms(t: Term) -> list[Term]:
    """Maximal non-connective subterms, in first-occurrence order."""
    out: dict[Term, None] = {}

    def go(x: Term) -> None:
        if is_const(x):
            return
        if is_call(x) and str(x[0]) in BOOL_OPS:
            for y in x[1:]:
                go(y)
        else:
            out.setdefault(x, None)

    go(t)
    return list(out)


def prop_eval(t: Term, env: dict) -> bool:
    if is_const(t):
        return const_value(t) != NIL
    if is_call(t) and str(t[0]) in BOOL_OPS:
        h = str(t[0])
        a = t[1:]
        if h == "not":
            return not prop_eval(a[0], env)
        if h == "and":
            return all(prop_eval(x, env) for x in a)
        if h == "or":
            return any(prop_eval(x, env) for x in a)
        if h == "implies":
            return (not prop_eval(a[0], env)) or prop_eval(a[1], env)
        if h == "iff":
            return prop_eval(a[0], env) == prop_eval(a[1], env)
        return prop_eval(a[1], env) if prop_eval(a[0], env) else prop_eval(a[2], env)
    return env[t]


def prop_equivalent(a: Term, b: Term) -> tuple[bool, dict | None]:
    """Truth-table equivalence over shared atoms; returns a falsifying
    assignment on failure. Atoms are compared after macro normalization."""
    a, b = normalize(a), normalize(b)
    atoms = list(dict.fromkeys(prop_atoms(a) + prop_atoms(b)))
    if len(atoms) > MAX_ATOMS:
        raise PropError(f"too many propositional atoms ({len(atoms)} > {MAX_ATOMS})")
    for bits in itertools.product((False, True), repeat=len(atoms)):
        env = dict(zip(atoms, bits))
        if prop_eval(a, env) != prop_eval(b, env):
            return False, env
    return True, None


def prop_valid(t: Term) -> bool:
    ok, _ = prop_equivalent(t, T)
    return ok


# -- exportation -------------------------------------------------------------

class ExportError(Exception):
    def __init__(self, kind: str, message: str, term: Term | None = None):
        super().__init__(message)
        self.kind = kind
        self.term = term


def nested_implication(t: Term) -> Term | None:
    """An (implies A (implies ...)) subterm, if any, searching everywhere."""
    if not is_call(t) or is_const(t):
        return None
    if str(t[0]) == "implies" and len(t) == 3 and is_call(t[2], "implies"):
        return t
    for x in t[1:]:
        found = nested_implication(x)
        if found is not None:
            return found
    return None


def check_exportation(original: Term, exported: Term) -> None:
    """Raise :class:`ExportError` unless ``exported`` is an equivalent, fully
    exported form of ``original``."""
    try:
        ok, env = prop_equivalent(original, exported)
    except PropError as e:
        raise ExportError("not-equivalent", str(e)) from None
    if not ok:
        shown = ", ".join(f"{print_term(k)}={'t' if v else 'nil'}" for k, v in env.items())
        raise ExportError("not-equivalent",
                          f"exportation is not equivalent to the statement (falsified by {shown})")
    bad = nested_implication(normalize(exported))
    if bad is not None:
        raise ExportError("not-fully-exported",
                          f"implication nested in a consequent: {print_term(bad)}", bad)


# -- contract completion -------------------------------------------------------

class CompletionError(Exception):
    def __init__(self, kind: str, message: str, hyp: Term | None = None):
        super().__init__(message)
        self.kind = kind
        self.hyp = hyp


def _parts(t: Term) -> tuple[list[Term], Term]:
    hyps, concl = split_implication(normalize(t))
    return hyps, concl


def _subsequence_positions(small: list, big: list) -> list[int] | None:
    out, j = [], 0
    for x in small:
        while j < len(big) and big[j] != x:
            j += 1
        if j == len(big):
            return None
        out.append(j)
        j += 1
    return out


def check_contract_completion(source: Term, completed: Term, world: "World") -> str:
    """Classify a completion as ``"trivial"`` or ``"non-trivial"``; raise
    :class:`CompletionError` (insufficient, excessive, misordered, malformed)."""
    source, completed = normalize(source), normalize(completed)
    if completed == source:
        ob = first_unproved(guard_obligations(source, world), world)
        if ob is not None:
            raise CompletionError(
                "insufficient",
                f"guard obligation {print_term(ob.obligation)} is not satisfied; "
                "a contract completion is required", None)
        return "trivial"
    s_hyps, s_concl = _parts(source)
    c_hyps, c_concl = _parts(completed)
    if c_concl != s_concl:
        raise CompletionError("malformed", "the completion must keep the statement's conclusion")
    pos = _subsequence_positions(s_hyps, c_hyps)
    if pos is None:
        raise CompletionError("malformed",
                              "the completion must keep the statement's hypotheses in order")
    added_idx = [i for i in range(len(c_hyps)) if i not in pos]
    svars = set(free_vars(source))
    for i in added_idx:
        h = c_hyps[i]
        if not world.types.is_type_predicate_call(h) or not set(free_vars(h)) <= svars:
            raise CompletionError(
                "malformed",
                f"added hypothesis {print_term(h)} must be a type-predicate call over the "
                "statement's variables", h)
    obs = guard_obligations(completed, world)
    bad = first_unproved(obs, world)
    if bad is not None:
        # would the hypotheses suffice if they all governed every obligation?
        unordered = all(
            _proved_under(c_hyps, ob.obligation, world) for ob in obs if not obligation_proved(ob, world)
        )
        if unordered:
            for k, h in enumerate(c_hyps):
                for ob in guard_obligations(h, world):
                    gov = tuple(c_hyps[:k]) + ob.governors
                    if not obligation_proved(GuardObligation(gov, ob.obligation, ob.call), world):
                        raise CompletionError(
                            "misordered",
                            f"hypothesis {print_term(h)} comes before the hypotheses that "
                            f"discharge its guard {print_term(ob.obligation)}", h)
        raise CompletionError("insufficient",
                              f"guard obligation {print_term(bad.obligation)} is not satisfied",
                              None)
    for i in added_idx:
        dropped = c_hyps[:i] + c_hyps[i + 1:]
        trial = mk_implies(dropped, c_concl)
        if obligations_trivial(guard_obligations(trial, world), world):
            raise CompletionError("excessive",
                                  f"added hypothesis {print_term(c_hyps[i])} is not needed",
                                  c_hyps[i])
    if not added_idx:
        raise CompletionError("malformed", "the completion adds no hypotheses")
    return "non-trivial"


def _proved_under(hyps: list[Term], goal: Term, world: "World") -> bool:
    from .kernel.prover import limited_prove

    return limited_prove(hyps, goal, world, world.theory("contract-theory"))


__all__ = [
    "GuardObligation", "guard_obligations", "obligations_trivial", "first_unproved",
    "prop_atoms", "prop_eval", "prop_equivalent", "PropError", "check_exportation",
    "ExportError", "nested_implication", "check_contract_completion", "CompletionError",
    "conjuncts",
]
