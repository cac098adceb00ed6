"""Expansion of step hints into hypotheses, enabled rules and lemma
instances, plus the automatic type hypotheses."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable, Mapping

from .proofdoc import Hint
from .sexpr import NIL, Term, print_term
from .terms import free_vars, is_var
from .world import CONS_AXIOMS

if TYPE_CHECKING:
    from .world import World


class HintError(Exception):
    def __init__(self, message: str, hint: Hint):
        super().__init__(message)
        self.hint = hint


@dataclass
class HintExpansion:
    hyps: list = field(default_factory=list)  # [(label, term)]
    rules: set = field(default_factory=set)
    instances: list = field(default_factory=list)  # [(lemma name, substitution form)]

    def merge(self, other: "HintExpansion") -> None:
        for lh in other.hyps:
            if lh not in self.hyps:
                self.hyps.append(lh)
        self.rules |= other.rules
        self.instances.extend(other.instances)


def check_substitution(stmt: Term, subst: Term, name: Term) -> None:
    """Raise ValueError unless ``subst`` is an alist binding free variables of ``stmt``."""
    if subst == NIL:
        return
    if not isinstance(subst, tuple):
        raise ValueError(f"substitution for {name} must be a list of (variable term) pairs")
    fv = set(free_vars(stmt))
    seen = set()
    for pair in subst:
        if not (isinstance(pair, tuple) and len(pair) == 2 and is_var(pair[0])):
            raise ValueError(f"bad substitution entry {print_term(pair)}")
        v = pair[0]
        if v not in fv:
            raise ValueError(f"substitution binds {v}, which is not a variable of {name}")
        if v in seen:
            raise ValueError(f"substitution binds {v} twice")
        seen.add(v)


def expand_hint(h: Hint, items: Mapping[str, Term], world: "World") -> HintExpansion:
    """``items`` maps the labels available to this step to their statements."""
    out = HintExpansion()
    k = h.kind
    if k == "ref":
        if h.label not in items:
            raise HintError(f"hint {h.label} does not name an available context item", h)
        out.hyps.append((h.label, items[h.label]))
    elif k == "def":
        name = str(h.name)
        rule = f"{name}-definition"
        if rule not in world.rules:
            raise HintError(f"Def {name}: no definition of {name} is available", h)
        out.rules.add(rule)
        if f"{name}-exec" in world.rules:
            out.rules.add(f"{name}-exec")
    elif k == "lemma":
        if h.name not in world.properties:
            raise HintError(f"unknown lemma {h.name}", h)
        subst = NIL if h.subst is None else h.subst
        try:
            check_substitution(world.properties[h.name], subst, h.name)
        except ValueError as e:
            raise HintError(str(e), h) from None
        out.instances.append((h.name, subst))
    elif k in ("cons-axioms", "car-cdr-axioms"):
        out.rules |= set(CONS_AXIOMS)
    elif k in ("arithmetic", "algebra"):
        out.rules |= world.theory("arith-5-theory")
    elif k == "evaluation":
        out.rules |= world.theory("executable-theory")
    elif k in ("obvious", "pl", "mp"):
        pass
    else:
        raise HintError(f"unknown hint {h.name!r}", h)
    return out


def expand_hints(hints: Iterable[Hint], items: Mapping[str, Term], world: "World") -> HintExpansion:
    out = HintExpansion()
    for h in hints:
        out.merge(expand_hint(h, items, world))
    return out


def auto_type_hypotheses(items: Mapping[str, Term], world: "World") -> list[str]:
    """Labels of items whose statement is a type-predicate call."""
    return [lab for lab, t in items.items() if world.types.is_type_predicate_call(t)]


__all__ = ["HintExpansion", "HintError", "expand_hint", "expand_hints", "auto_type_hypotheses",
           "check_substitution"]
