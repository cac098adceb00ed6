"""The proof-state machine: a goal stack transformed by instructions.

Instructions are S-expressions, e.g. ``(claim-simple (equal x nil))`` or
``(finish (bash))``; see :data:`OPCODES`. :func:`execute` is a pure
transition, and :func:`replay` runs a whole program from an initial goal,
recording a :class:`Trace` with digests of every intermediate state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Mapping

from ..guards import PropError, prop_equivalent
from ..sexpr import NIL, T, Sym, Term, print_term
from ..terms import (
    apply_subst, conjuncts, free_vars, is_call, is_var, mk_and, mk_implies, normalize,
    promote_all,
)
from .clausify import clause_term
from .prover import prove_clauses
from .rewrite import DEFAULT_FUEL

if TYPE_CHECKING:
    from ..world import World

OPCODES = (
    "claim-simple", "claim", "cg", "cg-or-skip", "pro-or-skip", "demote", "drop-or-skip",
    "retain-or-skip", "in-theory", "instantiate", "split-in-theory", "by", "induct", "bash",
    "finish", "repeat-until-done",
)

MAX_REPEAT = 64


class KernelError(Exception):
    def __init__(self, message: str, path: tuple = ()):
        super().__init__(message)
        self.path = path


@dataclass(frozen=True)
class Goal:
    name: str
    hyps: tuple  # ((id, term), ...)
    concl: Term
    counter: int = 1

    def formula(self) -> Term:
        return mk_implies([h for _, h in self.hyps], self.concl)

    def add_hyp(self, term: Term) -> "Goal":
        hid = f"hyp-{self.counter}"
        return replace(self, hyps=self.hyps + ((hid, term),), counter=self.counter + 1)

    def show(self) -> str:
        lines = [f"goal {self.name}"]
        lines += [f"  {hid}: {print_term(h)}" for hid, h in self.hyps]
        lines.append(f"  |- {print_term(self.concl)}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ProofState:
    stack: tuple
    thy: frozenset
    default_thy: frozenset
    world: "World" = field(compare=False)
    lemmas: Mapping = field(default_factory=dict, compare=False)
    claims: int = 0
    fuel: int = DEFAULT_FUEL

    @property
    def current(self) -> Goal:
        if not self.stack:
            raise KernelError("no goals remain")
        return self.stack[0]

    def with_current(self, g: Goal) -> "ProofState":
        return replace(self, stack=(g,) + self.stack[1:])

    def pop(self) -> "ProofState":
        return replace(self, stack=self.stack[1:])

    def names(self) -> set:
        return {g.name for g in self.stack}

    def digest(self) -> str:
        h = hashlib.sha256()
        for g in self.stack:
            h.update(g.show().encode())
            h.update(b"\n")
        h.update(("thy:" + ",".join(sorted(self.thy))).encode())
        return h.hexdigest()[:16]


def initial_state(stmt: Term, world: "World", lemmas: Mapping | None = None,
                  name: str = "main", fuel: int = DEFAULT_FUEL) -> ProofState:
    thy = world.theory("contract-theory")
    return ProofState((Goal(name, (), normalize(stmt)),), thy, thy, world,
                      dict(lemmas or {}), 0, fuel)


@dataclass
class TraceEntry:
    path: tuple
    instruction: str
    before: str
    after: str
    outcome: str


@dataclass
class Trace:
    entries: list = field(default_factory=list)

    def digests(self) -> list[tuple[str, str]]:
        return [(e.before, e.after) for e in self.entries]

    def final_digest(self) -> str:
        h = hashlib.sha256()
        for e in self.entries:
            h.update(f"{e.path}|{e.instruction}|{e.before}|{e.after}|{e.outcome}\n".encode())
        return h.hexdigest()[:16]


# -- helpers -------------------------------------------------------------------

def substitution_of(form: Term) -> dict:
    if form == NIL:
        return {}
    if not isinstance(form, tuple):
        raise KernelError(f"bad substitution {print_term(form)}")
    out = {}
    for pair in form:
        if not (isinstance(pair, tuple) and len(pair) == 2 and is_var(pair[0])):
            raise KernelError(f"bad substitution entry {print_term(pair)}")
        if pair[0] in out:
            raise KernelError(f"variable {pair[0]} bound twice")
        out[pair[0]] = normalize(pair[1])
    return out


def _lemma(st: ProofState, name: Term) -> Term:
    if name in st.lemmas:
        return st.lemmas[name]
    if name in st.world.properties:
        return st.world.properties[name]
    raise KernelError(f"unknown lemma {name}")


def _instance(st: ProofState, name: Term, subst_form: Term) -> Term:
    stmt = _lemma(st, name)
    s = substitution_of(subst_form)
    fv = set(free_vars(stmt))
    extra = [v for v in s if v not in fv]
    if extra:
        raise KernelError(f"substitution binds {extra[0]}, which is not free in {name}")
    return normalize(apply_subst(stmt, s))


def _implies_goal(inst: Term, goal: Term) -> bool:
    """``goal`` follows from the lemma instance ``inst`` by exportation alone:
    equal conclusions, and the goal's hypotheses propositionally imply the
    lemma's (identity is the common case)."""
    if inst == goal:
        return True
    lh, lc = promote_all(inst)
    gh, gc = promote_all(goal)
    if lc != gc:
        return False
    if set(lh) <= set(gh):
        return True
    try:
        ok, _ = prop_equivalent(mk_implies(gh, mk_and(lh)), T)
    except PropError:
        return False
    return ok


def _theory(st: ProofState, expr: Term) -> frozenset:
    try:
        return st.world.eval_theory(expr)
    except Exception as e:  # unknown theory or rule names
        raise KernelError(str(e)) from None


# -- execution -------------------------------------------------------------------

def execute(st: ProofState, instr: Term, trace: Trace | None = None,
            path: tuple = ()) -> ProofState:
    """Apply one instruction; raises :class:`KernelError`."""
    before = st.digest()
    text = print_term(instr)
    try:
        out = _execute(st, instr, trace, path)
    except KernelError as e:
        if trace is not None:
            trace.entries.append(TraceEntry(path, text, before, before, f"error: {e}"))
        if not e.path:
            e.path = path
        raise
    if trace is not None:
        trace.entries.append(TraceEntry(path, text, before, out.digest(), "ok"))
    return out


def _execute(st: ProofState, instr: Term, trace: Trace | None, path: tuple) -> ProofState:
    if not is_call(instr) or str(instr[0]) not in OPCODES:
        raise KernelError(f"unknown instruction {print_term(instr)}")
    op = str(instr[0])
    a = instr[1:]
    if op in ("claim-simple", "claim"):
        if len(a) < 1:
            raise KernelError(f"{op} needs a statement")
        s = normalize(a[0])
        cur = st.current
        n = st.claims + 1
        parent = cur.add_hyp(s)
        child = Goal(f"claim-{n}", cur.hyps, s, parent.counter)
        st2 = replace(st, claims=n)
        if op == "claim":
            if prove_clauses(child.formula(), st.world, st.thy, st.fuel):
                raise KernelError(f"claim {print_term(s)} was not proved automatically")
            return st2.with_current(parent)
        return replace(st2, stack=(parent, child) + st.stack[1:])
    if op in ("cg", "cg-or-skip"):
        if len(a) != 1:
            raise KernelError(f"{op} needs a goal name")
        name = str(a[0])
        if st.current.name == name:
            if op == "cg":
                raise KernelError(f"goal {name} is already the current goal")
            return st
        for i, g in enumerate(st.stack):
            if g.name == name:
                return replace(st, stack=(g,) + st.stack[:i] + st.stack[i + 1:])
        raise KernelError(f"no goal named {name}")
    if op == "pro-or-skip":
        g = st.current
        c = g.concl
        while is_call(c, "implies") and len(c) == 3:
            for h in conjuncts(c[1]):
                g = g.add_hyp(h)
            c = c[2]
        return st.with_current(replace(g, concl=c))
    if op == "demote":
        g = st.current
        return st.with_current(replace(g, hyps=(), concl=g.formula()))
    if op in ("drop-or-skip", "retain-or-skip"):
        ids = {str(x) for x in a}
        g = st.current
        if op == "drop-or-skip":
            keep = tuple(h for h in g.hyps if ids and h[0] not in ids)
        else:
            keep = tuple(h for h in g.hyps if h[0] in ids)
        return st.with_current(replace(g, hyps=keep))
    if op == "in-theory":
        if not a:
            return replace(st, thy=st.default_thy)
        return replace(st, thy=_theory(st, a[0]))
    if op == "instantiate":
        if len(a) not in (1, 2):
            raise KernelError("instantiate needs a lemma name and a substitution")
        inst = _instance(st, a[0], a[1] if len(a) == 2 else NIL)
        return st.with_current(st.current.add_hyp(inst))
    if op == "split-in-theory":
        thy = _theory(st, a[0]) if a else st.thy
        g = st.current
        goal = g.formula()
        residual = prove_clauses(goal, st.world, thy, st.fuel)
        if not residual:
            return st.pop()
        terms = [clause_term(c) for c in residual]
        if len(terms) == 1 and normalize(terms[0]) == normalize(goal):
            raise KernelError("split-in-theory made no progress")
        new = tuple(Goal(f"{g.name}.{k}", (), t, g.counter) for k, t in enumerate(terms, 1))
        return replace(st, stack=new + st.stack[1:])
    if op == "by":
        if len(a) not in (1, 2):
            raise KernelError("by needs a lemma name and a substitution")
        inst = _instance(st, a[0], a[1] if len(a) == 2 else NIL)
        g = st.current
        if _implies_goal(inst, g.concl) or _implies_goal(inst, g.formula()):
            return st.pop()
        raise KernelError(f"lemma {a[0]} does not match the goal {print_term(g.formula())}")
    if op == "induct":
        from ..induction import InductionError, induction_scheme

        if len(a) != 1:
            raise KernelError("induct needs a term")
        g = st.current
        try:
            obs = induction_scheme(g.formula(), a[0], st.world)
        except InductionError as e:
            raise KernelError(str(e)) from None
        taken = st.names() - {g.name}
        clash = [o.name for o in obs if o.name in taken]
        if clash:
            raise KernelError(f"goal name {clash[0]} is already in use")
        new = tuple(Goal(o.name, (), o.statement, g.counter) for o in obs)
        return replace(st, stack=new + st.stack[1:])
    if op == "bash":
        g = st.current
        if prove_clauses(g.formula(), st.world, st.thy, st.fuel):
            raise KernelError(f"bash could not prove goal {g.name}")
        return st.pop()
    if op == "finish":
        name = st.current.name
        before = st.names()
        cur = st
        for k, sub in enumerate(a):
            cur = execute(cur, sub, trace, path + (k,))
        after = cur.names()
        if name in after or (after - before):
            raise KernelError(f"finish: goal {name} was not proved")
        return cur
    if op == "repeat-until-done":
        name = st.current.name
        before = st.names()
        cur = st
        for it in range(MAX_REPEAT):
            after = cur.names()
            if name not in after and not (after - before):
                return cur
            prev = cur.digest()
            for k, sub in enumerate(a):
                cur = execute(cur, sub, trace, path + (it, k))
            if cur.digest() == prev:
                raise KernelError("repeat-until-done reached a fixpoint without proving the goal")
        raise KernelError("repeat-until-done iteration bound reached")
    raise KernelError(f"unhandled instruction {op}")


@dataclass
class ReplayResult:
    accepted: bool
    trace: Trace
    error: str | None = None
    failed_path: tuple | None = None
    final: ProofState | None = None


def replay(stmt: Term, program: list[Term], world: "World", lemmas: Mapping | None = None,
           fuel: int = DEFAULT_FUEL) -> ReplayResult:
    """Run ``program`` on the goal ``stmt``; accepted iff no error and no goals remain."""
    st = initial_state(stmt, world, lemmas, fuel=fuel)
    trace = Trace()
    for i, instr in enumerate(program):
        try:
            st = execute(st, instr, trace, (i,))
        except KernelError as e:
            return ReplayResult(False, trace, str(e), e.path or (i,), st)
    if st.stack:
        return ReplayResult(False, trace, f"{len(st.stack)} goal(s) remain: "
                            f"{', '.join(g.name for g in st.stack)}", None, st)
    return ReplayResult(True, trace, None, None, st)


def op_of(instr: Term) -> str:
    return str(instr[0]) if is_call(instr) else ""


__all__ = [
    "Goal", "ProofState", "Trace", "TraceEntry", "KernelError", "ReplayResult", "OPCODES",
    "execute", "replay", "substitution_of", "initial_state", "op_of", "Sym",
]
