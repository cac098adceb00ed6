"""Proof documents: parser, AST and printer.

A document interleaves event forms (plain S-expressions) with proofs::

    Lemma name:
    <statement>
    [Exportation: <term>] [Contract Completion: <term>]
    <body>
    QED

where a body is either a simple body (``Context:``, ``Derived Context:``,
``Goal:``, ``Proof:`` followed by a step chain) or an inductive body
(``Proof by: Induction on <term>`` followed by numbered cases, each a nested
proof ending in ``QED``). Section keywords are case-insensitive.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .diagnostics import Diagnostic, error
from .sexpr import LineIndex, ReadError, Span, Term, parse_atom, print_term, read_syntax, skip_blank

RELATIONS = ("==", "=>", "<=>", "<", "<=", ">", ">=")
RELATION_ALIASES = {"=": "==", "iff": "<=>"}
PROOF_KINDS = ("conjecture", "property", "lemma", "theorem")
CASE_KINDS = ("contract", "base", "induction")

_I = re.IGNORECASE
_HEADER = re.compile(r"(conjecture|property|lemma|theorem)[ \t]+([^\s:(){},]+)[ \t]*:", _I)
_CASE = re.compile(r"(contract|base|induction)\s+case\s+(\d+)\s*:", _I)
_SECTIONS = {
    "exportation": re.compile(r"exportation\s*:", _I),
    "completion": re.compile(r"contract\s+completion\s*:", _I),
    "context": re.compile(r"context\s*:", _I),
    "derived": re.compile(r"derived\s+context\s*:", _I),
    "goal": re.compile(r"goal\s*:", _I),
    "proofby": re.compile(r"proof\s+by\s*:(\s*induction\s+on\b)?", _I),
    "proof": re.compile(r"proof\s*:", _I),
    "qed": re.compile(r"qed(?![^\s(){},;])", _I),
}
_LABEL = re.compile(r"([cd])(\d+)\s*[.:](?=\s)", _I)
_KEYWORD = re.compile(
    r"(qed(?![^\s(){},;])|exportation\s*:|contract\s+completion\s*:|context\s*:|derived\s+context\s*:"
    r"|goal\s*:|proof\s*(by\s*)?:|(contract|base|induction)\s+case\s+\d+\s*:|[cd]\d+\s*[.:](?=\s)"
    r"|(conjecture|property|lemma|theorem)[ \t]+[^\s:(){},]+[ \t]*:)", _I)
_RELATION = re.compile(r"(<=>|==|=>|<=|>=|=|<|>|iff)(?=[\s{])", _I)
_BAD_RELATION = re.compile(r"[^\s{}()]+(?=\s*\{)")
_END_WORD = r"(?=[\s,}])"
_HINTS = [
    ("ref", re.compile(r"([cd])(\d+)" + _END_WORD, _I)),
    ("def", re.compile(r"def\s+([^\s,{}()]+)" + _END_WORD, _I)),
    ("lemma", re.compile(r"(lemma|theorem|conjecture|property)\s+([^\s,{}()]+)(?=[\s,}(])", _I)),
    ("cons-axioms", re.compile(r"(cons\s+axioms|consaxioms)" + _END_WORD, _I)),
    ("car-cdr-axioms", re.compile(r"(car-cdr\s+axioms|carcdraxioms)" + _END_WORD, _I)),
    ("arithmetic", re.compile(r"(arithmetic|arith)" + _END_WORD, _I)),
    ("algebra", re.compile(r"algebra" + _END_WORD, _I)),
    ("evaluation", re.compile(r"(evaluation|eval)" + _END_WORD, _I)),
    ("obvious", re.compile(r"obvious" + _END_WORD, _I)),
    ("pl", re.compile(r"pl" + _END_WORD, _I)),
    ("mp", re.compile(r"mp" + _END_WORD, _I)),
]


# -- AST ---------------------------------------------------------------------------

def _span() -> Span:
    return field(default=None, compare=False, repr=False)


@dataclass
class Hint:
    kind: str  # ref, def, lemma, cons-axioms, car-cdr-axioms, arithmetic, algebra, ...
    label: str | None = None  # "C3" / "D1" for references
    name: Term | None = None  # function or lemma name
    lemma_kind: str | None = None
    subst: Term | None = None
    span: Span = _span()

    def text(self) -> str:
        if self.kind == "ref":
            return self.label
        if self.kind == "def":
            return f"Def {print_term(self.name)}"
        if self.kind == "lemma":
            s = f"{self.lemma_kind.capitalize()} {print_term(self.name)}"
            return s if self.subst is None else f"{s} {print_term(self.subst)}"
        return {"cons-axioms": "cons axioms", "car-cdr-axioms": "car-cdr axioms",
                "pl": "PL", "mp": "MP"}.get(self.kind, self.kind)


@dataclass
class Item:
    label: str  # "C1", "D2"
    term: Term
    hints: tuple = ()
    span: Span = _span()
    term_span: Span = _span()

    @property
    def number(self) -> int:
        return int(self.label[1:])


@dataclass
class Step:
    left: Term
    rel: str
    hints: tuple
    right: Term
    span: Span = _span()
    left_span: Span = _span()
    right_span: Span = _span()
    rel_span: Span = _span()


@dataclass
class SimpleBody:
    context: tuple = ()
    derived: tuple = ()
    goal: Term | None = None
    first: Term | None = None  # chain head; None when there is no Proof: section
    steps: tuple = ()
    goal_span: Span = _span()
    first_span: Span = _span()
    proof_span: Span = _span()


@dataclass
class Case:
    category: str  # contract, base, induction
    number: int
    proof: "ProofNode | None"  # None for an elided case
    span: Span = _span()


@dataclass
class InductiveBody:
    indterm: Term
    cases: tuple = ()
    indterm_span: Span = _span()
    span: Span = _span()


@dataclass
class ProofNode:
    kind: str
    name: Term
    statement: Term
    exportation: Term | None = None
    completion: Term | None = None
    body: SimpleBody | InductiveBody | None = None
    span: Span = _span()
    name_span: Span = _span()
    statement_span: Span = _span()
    exportation_span: Span = _span()
    completion_span: Span = _span()
    qed_span: Span = _span()


@dataclass
class Event:
    term: Term
    span: Span = _span()


@dataclass
class ProofDocument:
    elements: list = field(default_factory=list)
    file: str = field(default="<input>", compare=False)
    broken: list = field(default_factory=list, compare=False)  # spans of unparsable proofs

    def proofs(self) -> list[ProofNode]:
        return [e for e in self.elements if isinstance(e, ProofNode)]

    def events(self) -> list[Event]:
        return [e for e in self.elements if isinstance(e, Event)]


# -- parser ------------------------------------------------------------------------

class _Abort(Exception):
    pass


class _Parser:
    def __init__(self, text: str, file: str):
        self.text = text
        self.file = file
        self.index = LineIndex(text, file)
        self.pos = 0
        self.diags: list[Diagnostic] = []
        self.last_end = 0

    # low level
    def span(self, a: int, b: int) -> Span:
        return self.index.span(a, max(a, b))

    def skip(self) -> int:
        self.pos = skip_blank(self.text, self.pos)
        return self.pos

    def at_end(self) -> bool:
        return self.skip() >= len(self.text)

    def look(self, rx: re.Pattern) -> re.Match | None:
        self.skip()
        return rx.match(self.text, self.pos)

    def take(self, rx: re.Pattern) -> re.Match | None:
        m = self.look(rx)
        if m:
            self.pos = self.last_end = m.end()
        return m

    def token_span(self) -> Span:
        """Span of the token at the current position (at least one character)."""
        self.skip()
        end = self.pos
        while end < len(self.text) and not self.text[end].isspace():
            end += 1
        if end == self.pos:
            return self.span(max(self.last_end - 1, 0), max(self.last_end, 1))
        return self.span(self.pos, end)

    def fail(self, code: str, msg: str, span: Span | None = None) -> None:
        self.diags.append(error(code, msg, span or self.token_span()))

    def abort(self, msg: str, span: Span | None = None) -> None:
        self.fail("E-PARSE", msg, span)
        raise _Abort()

    def at_keyword(self) -> bool:
        return self.look(_KEYWORD) is not None

    def term(self, what: str) -> tuple[Term, Span]:
        if self.at_end():
            self.abort(f"expected {what}, found end of file")
        if self.at_keyword() or self.text[self.pos] in "{},":
            self.abort(f"expected {what}")
        try:
            syn, end = read_syntax(self.text, self.file, self.pos, self.index)
        except ReadError as e:
            self.fail("E-PARSE", e.message, e.span)
            raise _Abort() from None
        self.pos = self.last_end = end
        return syn.datum, syn.span

    # document
    def document(self) -> ProofDocument:
        doc = ProofDocument([], self.file)
        while not self.at_end():
            start = self.pos
            header = self.look(_HEADER)
            try:
                if self.text[self.pos] == "(":
                    t, sp = self.term("an event form")
                    doc.elements.append(Event(t, sp))
                elif self.look(_HEADER):
                    doc.elements.append(self.proof())
                else:
                    self.abort("expected an event form or a proof header "
                               "(Conjecture/Property/Lemma/Theorem name:)")
            except _Abort:
                if header:
                    doc.broken.append(self.span(header.start(), header.end()))
                self.recover(start)
        return doc

    def recover(self, start: int) -> None:
        """Skip to the next line that starts a proof header or an event."""
        rx = re.compile(r"^(\(|(conjecture|property|lemma|theorem)[ \t]+[^\s:]+[ \t]*:)", re.M | _I)
        nl = self.text.find("\n", max(start, self.pos - 1) + 1)
        m = rx.search(self.text, nl + 1) if nl >= 0 else None
        self.pos = m.start() if m else len(self.text)

    def proof(self) -> ProofNode:
        m = self.take(_HEADER)
        start = m.start()
        node = ProofNode(m.group(1).lower(), parse_atom(m.group(2)), None,
                         name_span=self.span(m.start(2), m.end(2)))
        node.statement, node.statement_span = self.term("the proof statement")
        self.proof_rest(node)
        node.span = self.span(start, self.last_end)
        return node

    def proof_rest(self, node: ProofNode) -> None:
        if self.take(_SECTIONS["exportation"]):
            node.exportation, node.exportation_span = self.term("the exported statement")
        if self.take(_SECTIONS["completion"]):
            node.completion, node.completion_span = self.term("the contract-completed statement")
        if self.look(_SECTIONS["proofby"]):
            node.body = self.inductive()
        else:
            node.body = self.simple()
        self.qed(node)

    def qed(self, node: ProofNode) -> None:
        m = self.take(_SECTIONS["qed"])
        if m:
            node.qed_span = self.span(m.start(), m.end())
            return
        self.skip()
        a = max(self.last_end, 0)
        b = self.pos if self.pos < len(self.text) else len(self.text)
        end_tok = self.token_span()
        sp = self.span(a, b) if b > a else end_tok
        if b < len(self.text):
            sp = sp.join(end_tok)
        self.fail("E-QED", "missing QED", sp)
        node.qed_span = sp
        if not (self.at_end() or self.look(_HEADER) or self.look(_CASE)
                or self.text[self.pos] == "("):
            raise _Abort()

    def inductive(self) -> InductiveBody:
        m = self.take(_SECTIONS["proofby"])
        start = m.start()
        t, sp = self.term("an induction term")
        body = InductiveBody(t, (), sp)
        seen: set = set()
        cases = []
        while self.look(_CASE):
            c = self.case()
            key = (c.category, c.number)
            if key in seen:
                self.fail("E-DUP-LABEL", f"duplicate {c.category} case {c.number}", c.span)
            seen.add(key)
            cases.append(c)
        if not cases:
            self.abort("an induction proof needs at least one case")
        body.cases = tuple(cases)
        body.span = self.span(start, self.last_end)
        return body

    def case(self) -> Case:
        m = self.take(_CASE)
        start = m.start()
        cat, n = m.group(1).lower(), int(m.group(2))
        if self.look(_SECTIONS["qed"]):
            node = None
            q = self.take(_SECTIONS["qed"])
            return Case(cat, n, node, self.span(start, q.end()))
        node = ProofNode(f"{cat} case", n, None, name_span=self.span(m.start(), m.end()))
        node.statement, node.statement_span = self.term("the case statement")
        self.proof_rest(node)
        node.span = self.span(start, self.last_end)
        return Case(cat, n, node, node.span)

    def items(self, kind: str, with_hints: bool) -> tuple:
        out = []
        seen: set = set()
        while True:
            m = self.look(_LABEL)
            if not m or m.group(1).lower() != kind:
                break
            self.take(_LABEL)
            label = f"{kind.upper()}{int(m.group(2))}"
            lspan = self.span(m.start(), m.end())
            t, tsp = self.term(f"the statement of {label}")
            hints: tuple = ()
            if with_hints:
                hints = self.hints()
            num = int(m.group(2))
            if label in seen:
                self.fail("E-DUP-LABEL", f"duplicate label {label}", lspan)
            elif num != len(seen) + 1:
                self.fail("E-DUP-LABEL", f"label {label} is out of sequence; expected "
                          f"{kind.upper()}{len(seen) + 1}", lspan)
            seen.add(label)
            out.append(Item(label, t, hints, self.span(m.start(), self.last_end), tsp))
        return tuple(out)

    def simple(self) -> SimpleBody:
        body = SimpleBody()
        if self.take(_SECTIONS["context"]):
            body.context = self.items("c", False)
        if self.take(_SECTIONS["derived"]):
            body.derived = self.items("d", True)
        stray = self.look(_LABEL)
        if stray:
            self.abort(f"label {stray.group(0).rstrip('.:')} is not in its section",
                       self.span(stray.start(), stray.end()))
        if self.take(_SECTIONS["goal"]):
            body.goal, body.goal_span = self.term("the goal")
        m = self.take(_SECTIONS["proof"])
        if m:
            body.proof_span = self.span(m.start(), m.end())
            body.first, body.first_span = self.term("the first term of the proof chain")
            self.chain(body)
        return body

    def chain(self, body: SimpleBody) -> None:
        left, lsp = body.first, body.first_span
        steps = []
        while True:
            if self.at_end() or self.at_keyword():
                break
            m = self.take(_RELATION)
            if m:
                rel = RELATION_ALIASES.get(m.group(1).lower(), m.group(1))
                rsp = self.span(m.start(), m.end())
            else:
                bad = self.look(_BAD_RELATION)
                if bad:
                    self.take(_BAD_RELATION)
                    rsp = self.span(bad.start(), bad.end())
                    self.fail("E-RELATION", f"unknown relation {bad.group(0)}; expected one of "
                              + ", ".join(RELATIONS), rsp)
                    rel = bad.group(0)
                else:
                    # a term with no relation before it: the chain is broken here
                    t, sp = self.term("a relation")
                    self.fail("E-CHAIN-DISCONNECTED",
                              f"{print_term(t)} does not continue the chain from "
                              f"{print_term(left)}", sp)
                    left, lsp = t, sp
                    continue
            hints = self.hints()
            right, rspan = self.term("the next term of the proof chain")
            steps.append(Step(left, rel, hints, right, lsp.join(rspan), lsp, rspan, rsp))
            left, lsp = right, rspan
        body.steps = tuple(steps)

    def hints(self) -> tuple:
        self.skip()
        if not self.text.startswith("{", self.pos):
            self.abort("expected '{' starting a hint list")
        open_at = self.pos
        self.pos += 1
        out = []
        while True:
            self.skip()
            if self.pos >= len(self.text):
                self.abort("unterminated hint list", self.span(open_at, open_at + 1))
            if self.text[self.pos] == "}" and not out:
                self.pos += 1
                break
            out.append(self.hint())
            self.skip()
            c = self.text[self.pos] if self.pos < len(self.text) else ""
            if c == ",":
                self.pos += 1
                continue
            if c == "}":
                self.pos += 1
                break
            self.abort("expected ',' or '}' in hint list")
        self.last_end = self.pos
        return tuple(out)

    def hint(self) -> Hint:
        self.skip()
        start = self.pos
        for kind, rx in _HINTS:
            m = rx.match(self.text, self.pos)
            if not m:
                continue
            self.pos = m.end()
            if kind == "ref":
                h = Hint("ref", label=f"{m.group(1).upper()}{int(m.group(2))}")
            elif kind == "def":
                h = Hint("def", name=parse_atom(m.group(1).lower()))
            elif kind == "lemma":
                h = Hint("lemma", name=parse_atom(m.group(2).lower()), lemma_kind=m.group(1).lower())
                if self.skip() < len(self.text) and self.text[self.pos] == "(":
                    h.subst, _ = self.term("a substitution")
            else:
                h = Hint(kind)
            h.span = self.span(start, self.pos)
            return h
        end = self.pos
        while end < len(self.text) and self.text[end] not in ",}\n":
            end += 1
        word = self.text[start:end].strip()
        self.pos = end
        self.fail("E-HINT", f"unknown hint {word!r}", self.span(start, start + max(len(word), 1)))
        return Hint("unknown", name=word, span=self.span(start, end))


def parse_document(text: str, file: str = "<input>") -> tuple[ProofDocument, list[Diagnostic]]:
    """Parse a proof document; syntax problems come back as diagnostics."""
    p = _Parser(text, file)
    doc = p.document()
    for node in doc.proofs():
        _check_chain(node, p.diags)
    p.diags.sort(key=lambda d: (d.span.start_line, d.span.start_col))
    return doc, p.diags


def _check_chain(node: ProofNode, diags: list) -> None:
    body = node.body
    if isinstance(body, InductiveBody):
        for c in body.cases:
            if c.proof is not None:
                _check_chain(c.proof, diags)
    elif isinstance(body, SimpleBody):
        for a, b in zip(body.steps, body.steps[1:]):
            if a.right != b.left and not any(
                    d.code == "E-CHAIN-DISCONNECTED" and d.span == b.left_span for d in diags):
                diags.append(error("E-CHAIN-DISCONNECTED",
                                   f"{print_term(b.left)} does not continue the chain from "
                                   f"{print_term(a.right)}", b.left_span))


# -- printer -------------------------------------------------------------------------

def _hints_text(hints: tuple) -> str:
    return "{ " + ", ".join(h.text() for h in hints) + " }" if hints else "{ }"


def _print_body(node: ProofNode, out: list[str]) -> None:
    out.append(print_term(node.statement))
    out.append("")
    if node.exportation is not None:
        out += ["Exportation:", print_term(node.exportation), ""]
    if node.completion is not None:
        out += ["Contract Completion:", print_term(node.completion), ""]
    body = node.body
    if isinstance(body, InductiveBody):
        out += [f"Proof by: Induction on {print_term(body.indterm)}", ""]
        for c in body.cases:
            out.append(f"{c.category.capitalize()} Case {c.number}:")
            if c.proof is not None:
                _print_body(c.proof, out)
            out += ["QED", ""]
    elif isinstance(body, SimpleBody):
        if body.context:
            out.append("Context:")
            out += [f"{i.label}. {print_term(i.term)}" for i in body.context]
            out.append("")
        if body.derived:
            out.append("Derived Context:")
            out += [f"{i.label}. {print_term(i.term)} {_hints_text(i.hints)}" for i in body.derived]
            out.append("")
        if body.goal is not None:
            out += [f"Goal: {print_term(body.goal)}", ""]
        if body.first is not None:
            out += ["Proof:", print_term(body.first)]
            prev = body.first
            for s in body.steps:
                if s.left != prev:
                    out.append(print_term(s.left))
                out += [f"{s.rel} {_hints_text(s.hints)}", print_term(s.right)]
                prev = s.right
            out.append("")


def print_document(doc: ProofDocument) -> str:
    out: list[str] = []
    for e in doc.elements:
        if isinstance(e, Event):
            out += [print_term(e.term), ""]
        else:
            out.append(f"{e.kind.capitalize()} {print_term(e.name)}:")
            _print_body(e, out)
            out += ["QED", ""]
    return "\n".join(out)


__all__ = [
    "ProofDocument", "ProofNode", "SimpleBody", "InductiveBody", "Case", "Item", "Step", "Hint",
    "Event", "parse_document", "print_document", "RELATIONS",
]
