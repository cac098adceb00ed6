"""The document driver: admit events, check proofs in three phases, report.

Phase 0 is the parser. Phase 1 checks a proof's setup (exportation,
contract completion, context and goal), every derived item and step with
the limited prover, and that the steps suffice. Phase 2 translates the
proof into kernel programs and replays them; only this phase accepts.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

from .diagnostics import Diagnostic, error, warning
from .evaluator import EvalError, eval_with
from .guards import CompletionError, ExportError, check_contract_completion, check_exportation, nested_implication
from .hints import HintError
from .induction import InductionError, MatchError, induction_scheme, match_cases
from .kernel.prover import limited_prove
from .kernel.rewrite import DEFAULT_FUEL
from .proofdoc import Event, InductiveBody, ProofNode, SimpleBody, parse_document
from .sexpr import NIL, Span, Sym, Term, print_term
from .terms import free_vars, is_call, is_var, mk_implies, normalize, promote_all
from .translator import (
    block_goal, context_split, equivalent_expression, final_statement, package, plan_block,
    replay_package, simple_items,
)
from .typesys import enumerate_by_size, parse_type
from .world import World

MAX_NESTING = 1
MAX_ASSIGNMENTS = 20000
GOAL_RELATIONS = {"equal": "==", "iff": "<=>", "implies": "=>", "<": "<", "<=": "<=",
                  ">": ">", ">=": ">="}


@dataclass
class RunConfig:
    bound: int = 3
    pool: tuple = (-2, 3)
    fuel: int = DEFAULT_FUEL
    fail_fast: bool = False
    max_assignments: int = MAX_ASSIGNMENTS

    def pool_values(self) -> list[int]:
        return list(range(self.pool[0], self.pool[1] + 1))


@dataclass
class ProofOutcome:
    name: str
    span: Span
    accepted: bool = False
    phase: int = 0  # last phase reached
    nontrivial: bool = False
    statement: Term | None = None
    package: object = None
    results: list = field(default_factory=list)  # [(Theorem, ReplayResult)]


@dataclass
class CheckReport:
    file: str
    diagnostics: list = field(default_factory=list)
    outcomes: list = field(default_factory=list)
    events_ok: int = 0
    events_failed: int = 0
    dump: list = field(default_factory=list)  # admitted event forms and theorems, in order
    world: World | None = None

    @property
    def proofs(self) -> int:
        return len(self.outcomes)

    @property
    def accepted(self) -> int:
        return sum(o.accepted for o in self.outcomes)

    @property
    def warnings(self) -> int:
        return sum(d.severity == "warning" for d in self.diagnostics)

    @property
    def sound(self) -> bool:
        return not any(o.accepted and o.nontrivial for o in self.outcomes)

    @property
    def ok(self) -> bool:
        return (self.accepted == self.proofs and self.events_failed == 0
                and not any(d.severity == "error" for d in self.diagnostics))

    def traces(self) -> list:
        return [(th.name, r.trace) for o in self.outcomes for th, r in o.results]

    def summary(self) -> dict:
        return {"file": self.file, "proofs": self.proofs, "accepted": self.accepted,
                "warnings": self.warnings, "sound": self.sound}

    def summary_text(self) -> str:
        p = self.proofs
        return (f"{self.file}: {p} proof{'' if p == 1 else 's'}, {self.accepted} accepted, "
                f"{'sound' if self.sound else 'NOT sound (non-trivial contract completion)'}")


# -- counterexamples -------------------------------------------------------------------

def _var_types(stmt: Term, world: World) -> dict:
    hyps, _ = promote_all(normalize(stmt))
    out: dict = {}
    for h in hyps:
        if is_call(h) and len(h) == 2 and is_var(h[1]) and h[1] not in out:
            ty = world.types.type_of_predicate(h[0])
            if ty is not None:
                out[h[1]] = ty
    return out


def counterexample_search(stmt: Term, world: World, bound: int = 3, pool=range(-2, 4),
                          max_assignments: int = MAX_ASSIGNMENTS,
                          types: dict | None = None) -> dict | None:
    """First falsifying assignment of ``stmt``, by increasing total value size.

    Variable types come from type-predicate hypotheses; untyped variables
    range over atoms unless ``types`` (variable name -> type name) says
    otherwise. Assignments violating guards are skipped.
    """
    stmt = normalize(stmt)
    vs = sorted(set(free_vars(stmt)), key=str)
    declared = {Sym(k): world.types.lookup(str(v)) for k, v in (types or {}).items()}
    types = {**_var_types(stmt, world), **declared}
    layers = []
    for v in vs:
        ty = types.get(v)
        te = parse_type(Sym("all"), world.types) if ty is None else _as_type(ty, world)
        layers.append(enumerate_by_size(te, bound, pool, world.types))
    if not vs:
        try:
            return {} if eval_with(stmt, {}, world) == NIL else None
        except EvalError:
            return None
    tried = 0
    for total in range(bound * len(vs) + 1):
        for sizes in _compositions(total, len(vs), bound):
            pools = [layers[i][s] for i, s in enumerate(sizes)]
            for vals in itertools.product(*pools):
                tried += 1
                if tried > max_assignments:
                    return None
                env = dict(zip(vs, vals))
                try:
                    if eval_with(stmt, env, world, normalized=True) == NIL:
                        return {str(k): print_term(v) for k, v in env.items()}
                except EvalError:
                    continue
    return None


def _as_type(ty, world: World):
    return parse_type(ty, world.types) if isinstance(ty, (Sym, tuple)) else ty


def _compositions(total: int, n: int, cap: int):
    """Size vectors of length n summing to total, each <= cap, lexicographic."""
    if n == 1:
        if total <= cap:
            yield (total,)
        return
    for first in range(min(total, cap) + 1):
        for rest in _compositions(total - first, n - 1, cap):
            yield (first,) + rest


# -- relations ----------------------------------------------------------------------------

def compose(a: str, b: str) -> str | None:
    if a == "==":
        return b
    if b == "==":
        return a
    if a == b:
        return a
    pair = {a, b}
    if pair == {"<", "<="}:
        return "<"
    if pair == {">", ">="}:
        return ">"
    if pair == {"<=>", "=>"}:
        return "=>"
    return None


def relation_implies(have: str, want: str) -> bool:
    if have == want:
        return True
    if have == "==":
        return want in ("<=", ">=", "=>", "<=>")
    return (have, want) in {("<", "<="), (">", ">="), ("<=>", "=>")}


# -- the checker ----------------------------------------------------------------------------

class Checker:
    def __init__(self, config: RunConfig | None = None):
        self.config = config or RunConfig()

    def check_file(self, path: str | Path) -> CheckReport:
        p = Path(path)
        return self.check_text(p.read_text(encoding="utf-8"), str(path))

    def check_text(self, text: str, file: str = "<input>") -> CheckReport:
        doc, pdiags = parse_document(text, file)
        world = World()
        rep = CheckReport(file, list(pdiags), world=world)
        for sp in doc.broken:
            rep.outcomes.append(ProofOutcome("?", sp))
        for el in doc.elements:
            if isinstance(el, Event):
                self._event(el, world, rep)
                continue
            out = ProofOutcome(print_term(el.name), el.span, statement=el.statement)
            rep.outcomes.append(out)
            if any(d.severity == "error" and el.span.contains(d.span) for d in pdiags):
                if self.config.fail_fast:
                    break
                continue
            self._proof(el, world, rep, out)
            if self.config.fail_fast and not out.accepted:
                break
        rep.diagnostics.sort(key=lambda d: (d.span.start_line, d.span.start_col, d.code))
        return rep

    def _event(self, ev: Event, world: World, rep: CheckReport) -> None:
        token = world.snapshot()
        try:
            world.admit(ev.term)
        except Exception as e:  # any admission failure becomes a diagnostic
            world.rollback(token)
            rep.events_failed += 1
            rep.diagnostics.append(error("E-EVENT", f"event rejected: {e}", ev.span))
            return
        rep.events_ok += 1
        rep.dump.append(ev.term)

    def _proof(self, node: ProofNode, world: World, rep: CheckReport, out: ProofOutcome) -> None:
        diags: list[Diagnostic] = []
        name = node.name
        if (isinstance(name, Sym) and (world.is_defined(name) or name in world.properties)) or \
                Sym(print_term(name)) in world.properties:
            diags.append(error("E-EVENT", f"{print_term(name)} is already defined", node.name_span))
        out.phase = 1
        out.nontrivial = self.phase1(node, world, diags, 0)
        rep.diagnostics.extend(diags)
        if any(d.severity == "error" for d in diags):
            return
        out.phase = 2
        try:
            pkg = package(node, world)
        except (InductionError, HintError, ValueError) as e:
            rep.diagnostics.append(error("E-REPLAY", f"translation failed: {e}", node.span))
            return
        out.package = pkg
        try:
            out.results = replay_package(pkg, world, self.config.fuel)
        except Exception as e:  # installing the theorem may clash with the world
            rep.diagnostics.append(error("E-REPLAY", f"cannot install theorem: {e}", node.name_span))
            return
        th, r = out.results[-1]
        if not r.accepted:
            span, what = node.span, "proof"
            if r.failed_path is not None and th.origins:
                span, what = th.origins[r.failed_path[0]]
            elif th.span is not None:
                span = th.span
            rep.diagnostics.append(error(
                "E-REPLAY", f"kernel rejected {what} in theorem {th.name}: {r.error}", span or node.span))
            return
        out.accepted = True
        rep.dump.extend(pkg.theorems())

    # -- phase 1 --------------------------------------------------------------------------

    def phase1(self, node: ProofNode, world: World, diags: list, depth: int) -> bool:
        """Append diagnostics; return True iff the contract completion is non-trivial."""
        nontrivial = False
        for t, sp in ((node.statement, node.statement_span), (node.exportation, node.exportation_span),
                      (node.completion, node.completion_span)):
            if t is None:
                continue
            try:
                world.check_term(normalize(t))
            except Exception as e:  # unknown function, arity
                diags.append(error("E-TERM", str(e), sp))
                return False
        source = node.statement
        if node.exportation is not None:
            try:
                check_exportation(node.statement, node.exportation)
            except ExportError as e:
                span = node.exportation_span
                diags.append(error("E-EXPORT", str(e), span))
                return False
            source = node.exportation
        elif nested_implication(normalize(node.statement)) is not None:
            diags.append(error("E-EXPORT", "the statement has a nested implication; "
                               "an Exportation: section is required", node.statement_span))
            return False
        completed = node.completion if node.completion is not None else source
        try:
            kind = check_contract_completion(source, completed, world)
        except CompletionError as e:
            code = {"insufficient": "E-CC-INSUFFICIENT", "excessive": "E-CC-EXCESSIVE",
                    "misordered": "E-CC-MISORDERED"}.get(e.kind, "E-CC-MALFORMED")
            span = node.completion_span if node.completion is not None else node.statement_span
            diags.append(error(code, str(e), span))
            return False
        except ValueError as e:
            diags.append(error("E-TERM", str(e), node.statement_span))
            return False
        if kind == "non-trivial":
            nontrivial = True
            diags.append(warning("W-NONTRIVIAL-CC",
                                 "non-trivial contract completion: the checked statement is weaker "
                                 "than the one written", node.completion_span))
        body = node.body
        if isinstance(body, InductiveBody):
            nontrivial |= self._inductive(node, body, world, diags, depth)
        elif isinstance(body, SimpleBody):
            self._simple(node, body, world, diags)
        return nontrivial

    def _simple(self, node: ProofNode, body: SimpleBody, world: World, diags: list) -> None:
        stmt = final_statement(node)
        hyps, concl = context_split(stmt)
        ctx = list(body.context)
        ok = True
        for k in range(max(len(hyps), len(ctx))):
            if k >= len(ctx):
                where = ctx[-1].span if ctx else (body.goal_span or node.statement_span)
                diags.append(error("E-CONTEXT", f"missing context item C{k + 1} for hypothesis "
                                   f"{print_term(hyps[k])}", where))
                ok = False
                break
            item = ctx[k]
            t = normalize(item.term)
            if k >= len(hyps) or t != hyps[k]:
                why = ("is not a hypothesis of the statement" if t not in hyps
                       else "is out of order with respect to the statement")
                diags.append(error("E-CONTEXT", f"{item.label} {print_term(item.term)} {why}"
                                   + (f"; expected {print_term(hyps[k])}" if k < len(hyps) else ""),
                                   item.span))
                ok = False
        if not ok:
            return
        derives_false = any(normalize(d.term) == NIL for d in body.derived)
        if body.goal is None:
            if not derives_false:
                diags.append(error("E-GOAL", "missing Goal: section", node.statement_span))
                return
        elif normalize(body.goal) != concl:
            diags.append(error("E-GOAL", f"goal {print_term(body.goal)} is not the conclusion "
                               f"{print_term(concl)} of the statement", body.goal_span))
            return
        if body.goal is not None and body.first is None and not derives_false:
            diags.append(error("E-CHAIN", "missing Proof: section", body.goal_span))
            return
        items, hid = simple_items(body)
        all_items = dict(items)
        for d in body.derived:
            self._block(d.label, d.term, d.hints, items, hid, world, diags, d.span,
                        "E-DERIVED-FAIL", list(all_items.values()))
            items[d.label] = normalize(d.term)
            all_items[d.label] = items[d.label]
            hid[d.label] = f"hyp-{1000 + len(hid)}"
        ees = []
        for k, s in enumerate(body.steps, 1):
            ee = equivalent_expression(s.rel, s.left, s.right)
            self._block(f"step {k}", ee, s.hints, items, hid, world, diags, s.span, "E-STEP-FAIL",
                        list(all_items.values()) + ees)
            ees.append(normalize(ee))
        if any(d.severity == "error" for d in diags):
            return
        self._sufficiency(node, body, list(all_items.values()) + ees, concl, world, diags)

    def _block(self, label, stmt, hints, items, hid, world, diags, span, code, full_ctx) -> None:
        try:
            blk = plan_block(label, stmt, hints, dict(items), dict(hid), world, None, span)
        except HintError as e:
            diags.append(error("E-HINT-REF", str(e), e.hint.span or span))
            return
        if blk.contracts is not None and not limited_prove(
                full_ctx, blk.contracts, world, world.theory("contract-theory"), self.config.fuel):
            diags.append(error(code, f"{label}: guard obligations {print_term(blk.contracts)} do not "
                               "follow from the context", span))
            return
        hyps, concl, thy = block_goal(blk, world)
        if limited_prove(hyps, concl, world, thy, self.config.fuel):
            return
        cex = counterexample_search(mk_implies(full_ctx, normalize(stmt)), world, self.config.bound,
                                    self.config.pool_values(), self.config.max_assignments)
        if cex is not None:
            msg = f"{label}: {print_term(normalize(stmt))} is false in this context"
        else:
            msg = (f"{label}: {print_term(normalize(stmt))} does not follow from the hints "
                   f"({', '.join(h.text() for h in hints) or 'none'})")
        diags.append(error(code, msg, span, cex))

    def _sufficiency(self, node, body: SimpleBody, hyps: list, concl: Term, world, diags) -> None:
        steps = body.steps
        goal = body.goal
        if steps and goal is not None:
            rel = steps[0].rel
            for s in steps[1:]:
                nxt = compose(rel, s.rel)
                if nxt is None:
                    diags.append(error("E-CHAIN", f"relations {rel} and {s.rel} do not compose",
                                       s.rel_span))
                    return
                rel = nxt
            first, last = normalize(steps[0].left), normalize(steps[-1].right)
            g = goal
            head = str(g[0]) if is_call(g) and len(g) == 3 else None
            if head in GOAL_RELATIONS:
                want = GOAL_RELATIONS[head]
                a, b = normalize(g[1]), normalize(g[2])
                symmetric = want in ("==", "<=>") and rel in ("==", "<=>")
                whole = first == normalize(g) and last == Sym("t") and rel in ("==", "<=>")
                if not whole:
                    if first != a and not (symmetric and first == b and last == a):
                        diags.append(error("E-CHAIN", f"the chain starts at {print_term(steps[0].left)}"
                                           f", not at {print_term(g[1])}", body.first_span))
                        return
                    if last != b and not (symmetric and first == b and last == a):
                        diags.append(error("E-CHAIN", f"the chain ends at {print_term(steps[-1].right)}"
                                           f", not at {print_term(g[2])}", steps[-1].right_span))
                        return
                    if not relation_implies(rel, want):
                        diags.append(error("E-CHAIN", f"the chain establishes {rel}, which does not "
                                           f"give the goal's {want}", body.proof_span or body.first_span))
                        return
        if not limited_prove(hyps, concl, world, world.theory("min-executable-theory"), self.config.fuel):
            diags.append(error("E-CHAIN", "the steps and context do not establish the goal",
                               body.proof_span or body.goal_span or node.statement_span))

    def _inductive(self, node: ProofNode, body: InductiveBody, world: World, diags: list,
                   depth: int) -> bool:
        """Check the cases; True iff some case has a non-trivial completion."""
        if depth > MAX_NESTING:
            diags.append(error("E-NESTING", "induction nested more than one level deep",
                               body.indterm_span))
            return False
        elided = [c for c in body.cases if c.proof is None]
        for c in elided:
            diags.append(error("E-CASE-ELIDED", f"{c.category} case {c.number} has no proof", c.span))
        stmt = final_statement(node)
        try:
            obs = induction_scheme(stmt, body.indterm, world)
        except InductionError as e:
            diags.append(error("E-INDUCTION", str(e), body.indterm_span))
            return False
        if elided:
            return False
        _, concl = promote_all(stmt)
        ok = True
        for c in body.cases:
            _, cc = promote_all(normalize(c.proof.statement))
            if cc != concl:
                diags.append(error("E-CASE-CONCL", f"case conclusion {print_term(cc)} differs from the "
                                   f"proof's conclusion {print_term(concl)}", c.proof.statement_span))
                ok = False
        if not ok:
            return False
        try:
            match_cases(obs, [normalize(c.proof.statement) for c in body.cases])
        except MatchError as e:
            msg = str(e)
            if e.unused:
                labels = ", ".join(f"{body.cases[j].category} case {body.cases[j].number}" for j in e.unused)
                msg += f" ({labels})"
            diags.append(error("E-CASES", msg, body.span))
            return False
        except InductionError as e:
            diags.append(error("E-CASES", str(e), body.span))
            return False
        nontrivial = False
        for c in body.cases:
            nontrivial |= self.phase1(c.proof, world, diags, depth + 1)
        return nontrivial


def check_file(path: str | Path, config: RunConfig | None = None) -> CheckReport:
    return Checker(config).check_file(path)


def check_text(text: str, file: str = "<input>", config: RunConfig | None = None) -> CheckReport:
    return Checker(config).check_text(text, file)


__all__ = ["Checker", "CheckReport", "ProofOutcome", "RunConfig", "check_file", "check_text",
           "counterexample_search", "compose", "relation_implies"]
