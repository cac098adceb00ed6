"""The logical environment: types, functions with contracts, rules and
theories, grown one admitted event at a time."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .sexpr import NIL, T, Sym, Term, print_term
from .terms import (
    MACROS, PRIMITIVE_ARITY, SPECIAL, apply_subst, const_value, free_vars, is_call, is_const,
    is_quote, is_var, mk_and, mk_implies, normalize, promote_all,
)
from .typesys import (
    Base, ListOf, TypeError_, TypeExpr, TypeTable, listof_body, parse_type,
    predicate_body,
)

RULE_CLASSES = ("definition", "rewrite", "executable-counterpart", "type-prescription",
                "contract", "builtin")

MIN_THEORY_RULES = ("tau-system", "booleanp-compound-recognizer", "not-definition")

ARITH_RULES = (
    "commutativity-of-+", "commutativity-of-*", "associativity-of-+", "associativity-of-*",
    "unicity-of-0", "unicity-of-1", "distributivity",
)
ARITH_5_RULES = ARITH_RULES + (
    "<-transitive", "<-irreflexive", "<-+-monotone", "<-*-monotone",
    "integerp-+", "integerp-*", "rationalp-+", "rationalp-*",
)

CONS_AXIOMS = ("car-cons", "cdr-cons", "car-cdr-elim", "cons-equal", "default-car",
               "default-cdr", "cons-car-cdr")

THEORY_NAMES = ("arith-5-theory", "min-theory", "arith-theory", "type-prescription-theory",
                "executable-theory", "contract-theory", "min-executable-theory")

_BUILTIN_STATEMENTS = {
    "car-cons": "(equal (car (cons x y)) x)",
    "cdr-cons": "(equal (cdr (cons x y)) y)",
    "car-cdr-elim": "(implies (consp x) (equal (cons (car x) (cdr x)) x))",
    "cons-equal": "(equal (equal (cons x1 y1) (cons x2 y2)) (and (equal x1 x2) (equal y1 y2)))",
    "default-car": "(implies (not (consp x)) (equal (car x) nil))",
    "default-cdr": "(implies (not (consp x)) (equal (cdr x) nil))",
    "cons-car-cdr": "(equal (cons (car x) (cdr x)) (if (consp x) x (cons nil nil)))",
    "tlp-definition": "(equal (tlp x) (if (consp x) (tlp (cdr x)) (equal x nil)))",
}


class EventError(Exception):
    """An event form could not be admitted."""


@dataclass
class FunctionDef:
    name: Sym
    formals: tuple
    input_types: tuple
    output_type: TypeExpr
    body: Term
    measure: int | None = None
    recursive: bool = False
    guard_verified: bool = False

    @property
    def contract_hyps(self) -> list[Term]:
        return [(pred, x) for x, pred in zip(self.formals, self._preds) if pred != "allp"]

    _preds: tuple = field(default=(), repr=False)


@dataclass(frozen=True)
class Rule:
    name: str
    cls: str
    hyps: tuple = ()
    lhs: Term = None
    rhs: Term = None
    fn: Sym | None = None
    statement: Term = None
    recursive: bool = False


@dataclass(frozen=True)
class Event:
    kind: str
    name: Sym
    form: Term


@dataclass(frozen=True)
class WorldToken:
    world_id: int
    length: int


_ids = itertools.count(1)


class World:
    def __init__(self):
        self.uid = next(_ids)
        self.events: list[Event] = []
        self.types = TypeTable({}, {}, {})
        self.functions: dict[Sym, FunctionDef] = {}
        self.rules: dict[str, Rule] = {}
        self._by_head: dict[Sym, list[Rule]] = {}
        self.properties: dict[Sym, Term] = {}
        self.arith_rule_names = frozenset(ARITH_5_RULES)
        self._saved: dict[int, tuple] = {}
        self._install_builtins()

    # -- rules ---------------------------------------------------------------

    def _add_rule(self, rule: Rule) -> None:
        if rule.name in self.rules:
            raise EventError(f"rule {rule.name} already exists")
        self.rules[rule.name] = rule
        if rule.lhs is not None and is_call(rule.lhs):
            self._by_head.setdefault(rule.lhs[0], []).append(rule)

    def rules_for(self, head: Term) -> list[Rule]:
        return self._by_head.get(head, [])

    def _install_builtins(self) -> None:
        from .sexpr import read_term

        for name in MIN_THEORY_RULES + ARITH_5_RULES:
            self._add_rule(Rule(name, "builtin"))
        for name in CONS_AXIOMS + ("tlp-definition",):
            stmt = normalize(read_term(_BUILTIN_STATEMENTS[name]))
            rule = rule_from_statement(name, stmt)
            cls = "definition" if name == "tlp-definition" else "rewrite"
            self._add_rule(Rule(name, cls, rule.hyps, rule.lhs, rule.rhs, statement=stmt,
                                fn=Sym("tlp") if name == "tlp-definition" else None,
                                recursive=name == "tlp-definition"))
        self._add_rule(Rule("tlp-exec", "executable-counterpart", fn=Sym("tlp")))

    # -- theories ------------------------------------------------------------

    def theory(self, name: str) -> frozenset:
        name = str(name)
        by_cls = lambda c: {n for n, r in self.rules.items() if r.cls == c}  # noqa: E731
        if name == "min-theory":
            return frozenset(MIN_THEORY_RULES)
        if name == "arith-theory":
            return frozenset(ARITH_RULES)
        if name == "arith-5-theory":
            return frozenset(ARITH_5_RULES)
        if name == "type-prescription-theory":
            return frozenset(by_cls("type-prescription"))
        if name == "executable-theory":
            return frozenset(by_cls("executable-counterpart"))
        if name == "contract-theory":
            named = {n for n in self.rules if n.endswith("-contract") or n.endswith("-contract-tp")}
            return frozenset(MIN_THEORY_RULES) | by_cls("type-prescription") | named
        if name == "min-executable-theory":
            return frozenset(MIN_THEORY_RULES) | by_cls("executable-counterpart")
        if name == "cons-axioms":
            return frozenset(CONS_AXIOMS)
        if name == "full-theory":
            return frozenset(self.rules)
        raise EventError(f"unknown theory {name}")

    def eval_theory(self, expr: Term) -> frozenset:
        """Evaluate a theory expression: a theory name, a quoted list of rule
        names, or (union e ...)."""
        if isinstance(expr, Sym):
            return self.theory(expr)
        if is_quote(expr):
            names = expr[1] if isinstance(expr[1], tuple) else ()
            unknown = [str(n) for n in names if str(n) not in self.rules]
            if unknown:
                raise EventError(f"unknown rule {unknown[0]}")
            return frozenset(str(n) for n in names)
        if is_call(expr, "union"):
            out: frozenset = frozenset()
            for e in expr[1:]:
                out |= self.eval_theory(e)
            return out
        raise EventError(f"bad theory expression {print_term(expr)}")

    # -- snapshots -----------------------------------------------------------

    def snapshot(self) -> WorldToken:
        n = len(self.events)
        self._saved[n] = (
            list(self.events), self.types.copy(), dict(self.functions), dict(self.rules),
            {k: list(v) for k, v in self._by_head.items()}, dict(self.properties),
        )
        return WorldToken(self.uid, n)

    def rollback(self, token: WorldToken) -> "World":
        if token.world_id != self.uid:
            raise EventError("snapshot token belongs to another world")
        if token.length > len(self.events) or token.length not in self._saved:
            raise EventError("stale snapshot token")
        events, types, functions, rules, by_head, props = self._saved[token.length]
        self.events = list(events)
        self.types = types.copy()
        self.functions = dict(functions)
        self.rules = dict(rules)
        self._by_head = {k: list(v) for k, v in by_head.items()}
        self.properties = dict(props)
        for k in [k for k in self._saved if k > token.length]:
            del self._saved[k]
        return self

    # -- queries -------------------------------------------------------------

    def is_defined(self, name: str) -> bool:
        return (name in PRIMITIVE_ARITY or name in MACROS or name in SPECIAL
                or Sym(name) in self.functions)

    def arity(self, name: str) -> int | None:
        if name in PRIMITIVE_ARITY:
            return PRIMITIVE_ARITY[name]
        f = self.functions.get(Sym(name))
        return None if f is None else len(f.formals)

    def contract_of(self, f: Sym, actuals: tuple | None = None) -> list[Term]:
        """Input-contract conjuncts of ``f``, instantiated on ``actuals``."""
        fdef = self.functions[f]
        hyps = fdef.contract_hyps
        if actuals is None:
            return hyps
        return [apply_subst(h, dict(zip(fdef.formals, actuals))) for h in hyps]

    def rule_table_digest(self) -> list[tuple]:
        return [(r.name, r.cls, print_term(r.statement) if r.statement is not None else "")
                for r in self.rules.values()]

    # -- admission -----------------------------------------------------------

    def admit(self, form: Term) -> Event:
        """Admit an event form; the world is unchanged if admission fails."""
        token = self.snapshot()
        try:
            if not is_call(form) or not isinstance(form[0], Sym):
                raise EventError("an event must be a (defdata ...), (definec ...) or (property ...) form")
            kind = str(form[0])
            if kind == "defdata":
                ev = self._admit_defdata(form)
            elif kind in ("definec", "defunc"):
                ev = self._admit_definec(form)
            elif kind in ("property", "defthm", "thm"):
                ev = self._admit_property(form)
            else:
                raise EventError(f"unsupported event {kind}")
        except (EventError, TypeError_) as e:
            self.rollback(token)
            raise EventError(str(e)) from None
        except Exception:
            self.rollback(token)
            raise
        return ev

    def _check_new_name(self, name: Term) -> Sym:
        if not isinstance(name, Sym) or not is_var(name):
            raise EventError(f"bad name {print_term(name)}")
        if self.is_defined(name) or name in self.properties:
            raise EventError(f"{name} is already defined")
        return name

    def check_term(self, t: Term, allowed_vars=None, self_fn: Sym | None = None,
                   self_arity: int = 0) -> None:
        """Every call names a known function with the right arity."""
        if is_var(t):
            if allowed_vars is not None and t not in allowed_vars:
                raise EventError(f"free variable {t} not among the formals")
            return
        if is_const(t) or not is_call(t):
            return
        h = t[0]
        if not isinstance(h, Sym):
            raise EventError(f"bad function position {print_term(h)}")
        n = len(t) - 1
        if h == "if" and n != 3:
            raise EventError("if takes three arguments")
        if h in ("not",) and n != 1:
            raise EventError("not takes one argument")
        if h in ("implies", "iff") and n != 2:
            raise EventError(f"{h} takes two arguments")
        if h not in ("if", "and", "or", "implies", "iff"):
            arity = self_arity if h == self_fn else self.arity(h)
            if arity is None:
                raise EventError(f"unknown function {h}")
            if arity != n:
                raise EventError(f"{h} expects {arity} arguments, got {n}")
        for a in t[1:]:
            self.check_term(a, allowed_vars, self_fn, self_arity)

    def _parse_typed_vars(self, spec: Term) -> tuple[list[Sym], list[TypeExpr]]:
        items = () if spec == NIL else spec
        if not isinstance(items, tuple) or len(items) % 2:
            raise EventError("expected (var :type ...) pairs")
        names, types = [], []
        for v, ty in zip(items[0::2], items[1::2]):
            if not is_var(v):
                raise EventError(f"bad variable {print_term(v)}")
            if not (isinstance(ty, Sym) and ty.startswith(":")):
                raise EventError(f"expected a :type keyword after {v}")
            names.append(v)
            types.append(self.types.lookup(ty[1:]))
        if len(set(names)) != len(names):
            raise EventError("variables must be distinct")
        return names, types

    def _install_function(self, fdef: FunctionDef) -> None:
        self.functions[fdef.name] = fdef
        lhs = (fdef.name,) + tuple(fdef.formals)
        hyps = tuple(fdef.contract_hyps)
        stmt = mk_implies(list(hyps), (Sym("equal"), lhs, fdef.body))
        self._add_rule(Rule(f"{fdef.name}-definition", "definition", hyps, lhs, fdef.body,
                            fdef.name, stmt, fdef.recursive))
        self._add_rule(Rule(f"{fdef.name}-exec", "executable-counterpart", fn=fdef.name))

    def _admit_defdata(self, form: Term) -> Event:
        if len(form) != 3:
            raise EventError("defdata takes a name and a type expression")
        name = self._check_new_name(form[1])
        trial = self.types.copy()
        trial.types[name] = Base("all")
        ty = parse_type(form[2], trial)
        pred = self.types.register(name, ty)
        if self.is_defined(pred):
            raise EventError(f"{pred} is already defined")
        x = Sym("x")
        aux: list = []
        if isinstance(ty, ListOf):
            body = listof_body(ty, pred, x, self.types, name, aux)
        else:
            body = predicate_body(ty, x, self.types, name, aux)
        defs = [(pred, body)]
        k = 0
        while k < len(aux):
            aux_name, aux_ty = aux[k]
            aux_pred = self.types.register(aux_name, aux_ty)
            defs.append((aux_pred, listof_body(aux_ty, aux_pred, x, self.types, name, aux)))
            k += 1
        new_preds = {p for p, _ in defs}
        fdefs = []
        for p, b in defs:
            b = normalize(b)
            rec = any(_calls_fn(b, q) for q in new_preds)
            fdefs.append(FunctionDef(p, (x,), (Base("all"),), Base("bool"), b, measure=0,
                                     recursive=rec, guard_verified=True, _preds=(Sym("allp"),)))
        # recognizers recurse only on car/cdr of a consp argument: structural by construction
        for fdef in reversed(fdefs):
            self._install_function(fdef)
        for fdef in fdefs:
            self.check_term(fdef.body, {x})
        ev = Event("defdata", name, form)
        self.events.append(ev)
        return ev

    def _admit_definec(self, form: Term) -> Event:
        if len(form) != 5:
            raise EventError("definec takes a name, typed formals, a :type and a body")
        name = self._check_new_name(form[1])
        formals, in_types = self._parse_typed_vars(form[2])
        rt = form[3]
        if not (isinstance(rt, Sym) and rt.startswith(":")):
            raise EventError("expected an output :type")
        out_type = self.types.lookup(rt[1:])
        body = normalize(form[4])
        self.check_term(body, set(formals), name, len(formals))
        preds = tuple(self.types.predicate_name(t) for t in in_types)
        recursive = _calls_fn(body, name)
        measure = None
        if recursive:
            measure = termination_measure(name, formals, in_types, body)
            if measure is None:
                raise EventError(f"cannot prove termination of {name}: no argument decreases "
                                 "structurally (cdr of a consp argument or a positive nat minus "
                                 "a constant) in every recursive call")
        fdef = FunctionDef(name, tuple(formals), tuple(in_types), out_type, body, measure,
                           recursive, False, _preds=preds)
        self._install_function(fdef)
        self._prove_contract(fdef)
        self._verify_guards(fdef)
        fdef.guard_verified = True
        ev = Event("definec", name, form)
        self.events.append(ev)
        return ev

    def _contract_statement(self, fdef: FunctionDef) -> Term:
        call = (fdef.name,) + tuple(fdef.formals)
        out_pred = self.types.predicate_name(fdef.output_type)
        return mk_implies(fdef.contract_hyps, (out_pred, call))

    def _prove_contract(self, fdef: FunctionDef) -> None:
        from .induction import InductionError, induction_scheme
        from .kernel.prover import limited_prove

        stmt = self._contract_statement(fdef)
        thy = self.theory("contract-theory") | {f"{fdef.name}-definition"} | self.theory("cons-axioms")
        ok = limited_prove([], stmt, self, thy)
        if not ok and fdef.recursive:
            call = (fdef.name,) + tuple(fdef.formals)
            try:
                obs = induction_scheme(stmt, call, self)
            except InductionError:
                obs = None
            ok = obs is not None and all(limited_prove([], o.statement, self, thy) for o in obs)
        if not ok:
            raise EventError(f"cannot prove the function contract of {fdef.name}: "
                             f"{print_term(stmt)}")
        hyps, concl = promote_all(stmt)
        self._add_rule(Rule(f"{fdef.name}-contract", "contract", tuple(hyps), concl, T,
                            fdef.name, stmt))
        self._add_rule(Rule(f"{fdef.name}-contract-tp", "type-prescription", tuple(hyps), None,
                            None, fdef.name, stmt))

    def _verify_guards(self, fdef: FunctionDef) -> None:
        from .guards import guard_obligations
        from .kernel.prover import limited_prove

        thy = self.theory("contract-theory")
        for ob in guard_obligations(fdef.body, self):
            hyps = fdef.contract_hyps + list(ob.governors)
            if not limited_prove(hyps, ob.obligation, self, thy):
                raise EventError(f"cannot verify guard {print_term(ob.obligation)} in the body "
                                 f"of {fdef.name}")

    def _admit_property(self, form: Term) -> Event:
        if len(form) == 4:
            name, spec, body = form[1], form[2], form[3]
        elif len(form) == 3:
            name, spec, body = form[1], NIL, form[2]
        else:
            raise EventError("property takes a name, optional typed variables and a body")
        name = self._check_new_name(name)
        names, types = self._parse_typed_vars(spec)
        body = normalize(body)
        self.check_term(body)
        hyps = [(self.types.predicate_name(t), v) for v, t in zip(names, types)
                if self.types.predicate_name(t) != "allp"]
        stmt = mk_implies(hyps, body)
        if not self.prove_theorem(stmt):
            raise EventError(f"cannot prove property {name}")
        self.install_theorem(name, stmt, record=False)
        ev = Event("property", name, form)
        self.events.append(ev)
        return ev

    def prove_theorem(self, stmt: Term) -> bool:
        """Limited prover at full theory, then automatic induction on each
        recursive call in the statement whose arguments are distinct variables."""
        from .induction import InductionError, induction_scheme
        from .kernel.prover import limited_prove

        thy = self.theory("full-theory")
        if limited_prove([], stmt, self, thy):
            return True
        for call in _induction_candidates(stmt, self):
            try:
                obs = induction_scheme(stmt, call, self)
            except InductionError:
                continue
            if all(limited_prove([], o.statement, self, thy) for o in obs):
                return True
        return False

    def install_theorem(self, name: Sym, stmt: Term, record: bool = True) -> None:
        """Record a proved theorem and, when orientable, its rewrite rule."""
        if name in self.properties or str(name) in self.rules:
            raise EventError(f"{name} is already defined")
        self.properties[name] = stmt
        rule = rule_from_statement(str(name), stmt)
        if rule is not None:
            self._add_rule(rule)
        if record:
            self.events.append(Event("theorem", name, stmt))

    def install_function_def(self, fdef: FunctionDef) -> None:
        self._install_function(fdef)


def _calls_fn(t: Term, f: Sym) -> bool:
    if not is_call(t):
        return False
    return t[0] == f or any(_calls_fn(a, f) for a in t[1:])


def _permutative(lhs: Term, rhs: Term) -> bool:
    """True when rhs is lhs with its variables permuted (would loop)."""
    vs = free_vars(lhs)
    if set(free_vars(rhs)) != set(vs) or lhs == rhs:
        return lhs == rhs
    for perm in itertools.permutations(vs):
        if apply_subst(lhs, dict(zip(vs, perm))) == rhs:
            return True
    return False


def rule_from_statement(name: str, stmt: Term) -> Rule | None:
    """Orient a theorem as a rewrite rule, or None when it is not usable."""
    hyps, concl = promote_all(stmt)
    if is_call(concl, "equal") and len(concl) == 3:
        lhs, rhs = concl[1], concl[2]
        vl = set(free_vars(lhs))
        if (is_call(lhs) and lhs[0] not in ("if", "and", "or", "not", "implies", "iff")
                and set(free_vars(rhs)) <= vl
                and all(set(free_vars(h)) <= vl for h in hyps)
                and not (len(free_vars(lhs)) > 1 and _permutative(lhs, rhs))):
            return Rule(name, "rewrite", tuple(hyps), lhs, rhs, statement=stmt)
    lhs, rhs = concl, T
    if is_call(concl, "not") and len(concl) == 2:
        lhs, rhs = concl[1], NIL
    if (is_call(lhs) and lhs[0] not in ("if", "and", "or", "not", "implies", "iff")
            and all(set(free_vars(h)) <= set(free_vars(lhs)) for h in hyps)):
        return Rule(name, "rewrite", tuple(hyps), lhs, rhs, statement=stmt)
    return None


def _governed_calls(t: Term, f: Sym, govs: tuple, out: list) -> None:
    """Recursive calls of ``f`` in ``t`` with their (test, polarity) governors."""
    if not is_call(t):
        return
    h = t[0]
    if h == "if" and len(t) == 4:
        _governed_calls(t[1], f, govs, out)
        _governed_calls(t[2], f, govs + ((t[1], True),), out)
        _governed_calls(t[3], f, govs + ((t[1], False),), out)
        return
    if h in ("and", "implies"):
        acc = govs
        for a in t[1:]:
            _governed_calls(a, f, acc, out)
            acc = acc + ((a, True),)
        return
    if h == "or":
        acc = govs
        for a in t[1:]:
            _governed_calls(a, f, acc, out)
            acc = acc + ((a, False),)
        return
    if h == f:
        out.append((t, govs))
    for a in t[1:]:
        _governed_calls(a, f, govs, out)


def _literal_facts(govs) -> set:
    """Governors as (atom, truth) facts with negations pushed in."""
    facts = set()
    for g, pol in govs:
        while is_call(g, "not") and len(g) == 2:
            g, pol = g[1], not pol
        facts.add((g, pol))
        if pol and is_call(g, "and"):
            for a in g[1:]:
                facts |= _literal_facts([(a, True)])
        if not pol and is_call(g, "or"):
            for a in g[1:]:
                facts |= _literal_facts([(a, False)])
    return facts


def _is_cdr_chain(arg: Term, x: Sym) -> bool:
    if not is_call(arg, "cdr"):
        return False
    while is_call(arg, "cdr"):
        arg = arg[1]
    return arg == x


def _nat_decrement(arg: Term, x: Sym) -> bool:
    if not (is_call(arg, "+") and len(arg) == 3):
        return False
    a, b = arg[1], arg[2]
    if a == x and is_const(b):
        c = const_value(b)
    elif b == x and is_const(a):
        c = const_value(a)
    else:
        return False
    return isinstance(c, int) and c < 0


def _positive_fact(facts: set, x: Sym) -> bool:
    return ((Sym("zp"), x), False) in facts or \
        ((Sym("equal"), x, 0), False) in facts or ((Sym("equal"), 0, x), False) in facts or \
        ((Sym("<"), 0, x), True) in facts or ((Sym("posp"), x), True) in facts


def termination_measure(f: Sym, formals, types, body: Term) -> int | None:
    """Index of a formal that decreases structurally in every recursive call."""
    calls: list = []
    _governed_calls(body, f, (), calls)
    for i, x in enumerate(formals):
        ok = True
        for call, govs in calls:
            arg = call[1 + i]
            facts = _literal_facts(govs)
            if _is_cdr_chain(arg, x) and ((Sym("consp"), x), True) in facts:
                continue
            if (isinstance(types[i], Base) and types[i].name == "nat"
                    and _nat_decrement(arg, x) and _positive_fact(facts, x)):
                continue
            ok = False
            break
        if ok:
            return i
    return None


def _induction_candidates(stmt: Term, world: World) -> list[Term]:
    out: dict = {}

    def go(t: Term) -> None:
        if not is_call(t):
            return
        for a in t[1:]:
            go(a)
        f = world.functions.get(t[0])
        if f is not None and f.recursive and all(is_var(a) for a in t[1:]) \
                and len(set(t[1:])) == len(t) - 1:
            out.setdefault(t, None)

    go(stmt)
    return list(out)


__all__ = [
    "World", "FunctionDef", "Rule", "Event", "EventError", "WorldToken", "THEORY_NAMES",
    "CONS_AXIOMS", "MIN_THEORY_RULES", "ARITH_RULES", "ARITH_5_RULES", "rule_from_statement",
    "termination_measure", "mk_and",
]
