"""Translation of checked proofs into kernel instruction programs.

Each derived-context item and each step becomes a block that claims the
item's statement, keeps only the hypotheses its hints name (plus type
hypotheses and a claimed guard hypothesis), enables the hinted rules and
bashes. An equational proof then demotes and splits; an inductive proof
inducts and discharges every obligation with the local theorem proved for
the matching case.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .guards import guard_obligations, obligation_proved
from .hints import auto_type_hypotheses, expand_hints
from .induction import induction_scheme, match_cases
from .proofdoc import InductiveBody, ProofNode, SimpleBody
from .sexpr import NIL, Span, Sym, Term, print_term, read_all
from .kernel.machine import replay, substitution_of
from .terms import apply_subst, mk_and, mk_implies, normalize, promote_all

if TYPE_CHECKING:
    from .world import World

RELATION_FNS = {"==": "equal", "=>": "implies", "<=>": "iff", "<": "<", "<=": "<=",
                ">": ">", ">=": ">="}


def S(name: str) -> Sym:
    return Sym(name)


def equivalent_expression(rel: str, left: Term, right: Term) -> Term:
    return (S(RELATION_FNS[rel]), left, right)


def final_statement(node: ProofNode) -> Term:
    """The statement the kernel proves: completion, else exportation, else the statement."""
    for t in (node.completion, node.exportation, node.statement):
        if t is not None:
            return normalize(t)
    raise ValueError("proof without a statement")


def context_split(stmt: Term) -> tuple[list[Term], Term]:
    """Hypotheses and conclusion exactly as hypothesis promotion produces them."""
    return promote_all(normalize(stmt))


@dataclass
class Block:
    """The kernel view of one derived item or step."""
    label: str
    stmt: Term
    span: Span | None
    retained: list  # [(hyp id, term)]
    contracts: Term | None
    rules: frozenset
    instances: list  # [(lemma, subst)]
    program: list = field(default_factory=list)

    def theory_expr(self) -> Term:
        if not self.rules:
            return S("contract-theory")
        return (S("union"), S("contract-theory"),
                (S("quote"), tuple(S(r) for r in sorted(self.rules))))


@dataclass
class Theorem:
    name: Sym
    stmt: Term
    program: list
    origins: list  # per top-level instruction: (span, description)
    local: bool = False
    span: Span | None = None

    def to_sexpr(self) -> Term:
        form = (S("theorem"), self.name, self.stmt, (S("instructions"),) + tuple(self.program))
        return (S("local"), form) if self.local else form


@dataclass
class TheoremPackage:
    main: Theorem
    locals: list = field(default_factory=list)

    def theorems(self) -> list[Theorem]:
        return list(self.locals) + [self.main]


class _Counter:
    """Mirrors the kernel's hypothesis-id and claim numbering on the main goal."""

    def __init__(self, nhyps: int):
        self.hyp = nhyps + 1
        self.claims = 0


def plan_block(label: str, stmt: Term, hints: tuple, items: dict, hid: dict, world: "World",
               ctr: _Counter | None = None, span: Span | None = None) -> Block:
    """Build the block for ``stmt`` proved from ``items`` (label -> term).

    ``hid`` maps labels to hypothesis ids. Raises HintError on bad hints.
    """
    stmt = normalize(stmt)
    exp = expand_hints(hints, items, world)
    hyp_terms = [normalize(t) for _, t in exp.hyps]
    obs = guard_obligations(mk_implies(hyp_terms, stmt), world)
    pending = [ob.formula() for ob in obs if not obligation_proved(ob, world)]
    contracts = mk_and(list(dict.fromkeys(pending))) if pending else None
    keep_labels = [lab for lab, _ in exp.hyps]
    for lab in auto_type_hypotheses(items, world):
        if lab not in keep_labels:
            keep_labels.append(lab)
    keep_labels.sort(key=lambda lab: _label_order(lab, hid))
    retained = [(hid[lab], normalize(items[lab])) for lab in keep_labels]
    prog: list[Term] = []
    if ctr is not None:
        parent_id = f"hyp-{ctr.hyp}"
        child_counter = ctr.hyp + 1
        ctr.hyp += 1
        ctr.claims += 1
        child = f"claim-{ctr.claims}"
        prog += [(S("claim-simple"), stmt), (S("cg"), S(child))]
        ids = [i for i, _ in retained]
        if contracts is not None:
            ctr.claims += 1
            ids.append(f"hyp-{child_counter}")
            prog.append((S("claim"), contracts))
        prog.append((S("retain-or-skip"),) + tuple(S(i) for i in ids))
        hid[label] = parent_id
    blk = Block(label, stmt, span, retained, contracts, frozenset(exp.rules), list(exp.instances))
    if ctr is not None:
        prog.append((S("in-theory"), blk.theory_expr()))
        for name, subst in blk.instances:
            prog.append((S("instantiate"), name, subst))
        prog += [(S("finish"), (S("bash"),)), (S("in-theory"),)]
        blk.program = prog
    return blk


def _label_order(label: str, hid: dict) -> int:
    return int(hid[label].split("-")[1])


def block_goal(blk: Block, world: "World") -> tuple[list[Term], Term, frozenset]:
    """Hypotheses, conclusion and theory of the kernel's bash for ``blk``."""
    hyps = [t for _, t in blk.retained]
    if blk.contracts is not None:
        hyps.append(blk.contracts)
    for name, subst in blk.instances:
        hyps.append(normalize(apply_subst(world.properties[name], substitution_of(subst))))
    return hyps, blk.stmt, world.eval_theory(blk.theory_expr())


def simple_items(body: SimpleBody) -> tuple[dict, dict]:
    """Context items keyed by label, and their hypothesis ids after promotion."""
    items = {i.label: normalize(i.term) for i in body.context}
    hid = {i.label: f"hyp-{k}" for k, i in enumerate(body.context, 1)}
    return items, hid


def equational_translate(node: ProofNode, world: "World") -> tuple[list, list, list[Block]]:
    """Program, per-instruction origins, and the blocks of a simple proof."""
    body = node.body
    assert isinstance(body, SimpleBody)
    stmt = final_statement(node)
    hyps, _ = context_split(stmt)
    items, hid = simple_items(body)
    ctr = _Counter(len(hyps))
    prog: list[Term] = [(S("pro-or-skip"),)]
    origins: list = [(node.statement_span, "hypothesis promotion")]
    blocks = []
    for d in body.derived:
        blk = plan_block(d.label, d.term, d.hints, dict(items), hid, world, ctr, d.span)
        items[d.label] = normalize(d.term)
        blocks.append(blk)
        prog += blk.program
        origins += [(d.span, d.label)] * len(blk.program)
    for k, s in enumerate(body.steps, 1):
        ee = equivalent_expression(s.rel, s.left, s.right)
        blk = plan_block(f"step {k}", ee, s.hints, dict(items), dict(hid), world, ctr, s.span)
        blocks.append(blk)
        prog += blk.program
        origins += [(s.span, f"step {k}")] * len(blk.program)
    tail = [(S("demote"),),
            (S("finish"), (S("repeat-until-done"), (S("split-in-theory"), S("min-executable-theory"))))]
    prog += tail
    chain_span = body.proof_span or body.goal_span or node.statement_span
    origins += [(chain_span, "final combination of steps")] * len(tail)
    return prog, origins, blocks


def case_theorem_name(parent: Term, k: int) -> Sym:
    return S(f"{print_term(parent)}-case-{k}")


def package(node: ProofNode, world: "World", name: Term | None = None) -> TheoremPackage:
    """Theorems for ``node``: local case theorems first, then the main one."""
    name = S(print_term(node.name if name is None else name))
    stmt = final_statement(node)
    body = node.body
    if isinstance(body, SimpleBody):
        prog, origins, _ = equational_translate(node, world)
        return TheoremPackage(Theorem(name, stmt, prog, origins, False, node.span))
    assert isinstance(body, InductiveBody)
    locals_: list[Theorem] = []
    case_names: list[Sym] = []
    case_stmts: list[Term] = []
    for k, case in enumerate(body.cases, 1):
        cname = case_theorem_name(name, k)
        sub = package(case.proof, world, cname)
        for t in sub.locals:
            locals_.append(t)
        main = sub.main
        main.local = True
        main.span = case.span
        locals_.append(main)
        case_names.append(cname)
        case_stmts.append(main.stmt)
    obs = induction_scheme(stmt, body.indterm, world)
    mapping = match_cases(obs, case_stmts)
    prog: list[Term] = [(S("pro-or-skip"),), (S("induct"), normalize(body.indterm))]
    origins: list = [(body.indterm_span, "induction")] * 2
    for i, ob in enumerate(obs):
        j = mapping[i]
        prog += [(S("cg-or-skip"), S(ob.name)),
                 (S("finish"), (S("demote"),), (S("by"), case_names[j], NIL))]
        origins += [(body.cases[j].span, f"{ob.name} by {case_names[j]}")] * 2
    return TheoremPackage(Theorem(name, stmt, prog, origins, False, node.span), locals_)


def replay_package(pkg: TheoremPackage, world: "World", fuel: int | None = None,
                   install: bool = True) -> list[tuple[Theorem, object]]:
    """Replay every theorem through the kernel, locals first; stops at the
    first rejection. On full acceptance the main theorem joins ``world``."""
    kw = {} if fuel is None else {"fuel": fuel}
    lemmas: dict = {}
    results = []
    for th in pkg.theorems():
        r = replay(th.stmt, th.program, world, lemmas, **kw)
        results.append((th, r))
        if not r.accepted:
            return results
        lemmas[th.name] = th.stmt
    if install:
        world.install_theorem(pkg.main.name, pkg.main.stmt)
    return results


# -- serialization -------------------------------------------------------------------

def dump_text(items: list) -> str:
    """Serialize events and theorems (``(event f)`` / theorem forms), one per line."""
    out = []
    for x in items:
        if isinstance(x, Theorem):
            out.append(print_term(x.to_sexpr()))
        else:
            out.append(print_term((S("event"), x)))
    return "\n".join(out) + ("\n" if out else "")


def load_dump(text: str, origin: str = "<dump>") -> list:
    """Inverse of :func:`dump_text`: event forms and :class:`Theorem` objects."""
    out: list = []
    for syn in read_all(text, origin):
        d = syn.datum
        local = False
        if isinstance(d, tuple) and d and d[0] == "local":
            local, d = True, d[1]
        if isinstance(d, tuple) and len(d) == 2 and d[0] == "event":
            out.append(d[1])
        elif (isinstance(d, tuple) and len(d) == 4 and d[0] == "theorem"
              and isinstance(d[3], tuple) and d[3][0] == "instructions"):
            out.append(Theorem(d[1], d[2], list(d[3][1:]), [], local))
        else:
            raise ValueError(f"{syn.span}: not an event or theorem form")
    return out


def replay_dump(items: list, fuel: int | None = None) -> tuple["World", list]:
    """Check a loaded dump with the kernel alone, in a fresh world.

    Events are admitted in order; theorems are replayed with the local theorems
    since the previous main theorem available to ``by``. Returns the world and
    ``[(Theorem, ReplayResult | None, error)]``; replay stops at the first failure.
    """
    from .world import World

    world = World()
    kw = {} if fuel is None else {"fuel": fuel}
    lemmas: dict = {}
    out: list = []
    for x in items:
        if not isinstance(x, Theorem):
            try:
                world.admit(x)
            except Exception as e:  # admission errors are reported, not raised
                out.append((None, None, f"event {print_term(x)} rejected: {e}"))
                return world, out
            continue
        r = replay(x.stmt, x.program, world, lemmas, **kw)
        out.append((x, r, r.error))
        if not r.accepted:
            return world, out
        if x.local:
            lemmas[x.name] = x.stmt
        else:
            world.install_theorem(x.name, x.stmt)
            lemmas = {}
    return world, out


__all__ = [
    "replay_dump", "Block", "Theorem", "TheoremPackage", "plan_block", "block_goal", "equational_translate",
    "package", "final_statement", "context_split", "equivalent_expression", "dump_text",
    "load_dump", "RELATION_FNS",
]
