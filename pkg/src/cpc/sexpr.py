"""S-expression reader and printer with source spans.

Terms are plain immutable Python values:

* symbols are :class:`Sym` (a lower-cased ``str`` subclass); ``t`` and ``nil``
  double as the booleans, and ``nil`` is also the empty list,
* integers are ``int`` and non-integral rationals are ``Fraction``,
* strings and characters are :class:`Str` and :class:`Char`,
* non-empty proper lists are tuples.

The reader returns a :class:`Syntax` tree so that every node keeps the span it
was read from; ``Syntax.datum`` is the plain term.
"""

from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union


class Sym(str):
    """A case-insensitive symbol, normalized to lower case."""

    __slots__ = ()

    def __new__(cls, name: str) -> "Sym":
        return super().__new__(cls, name.lower())

    def __repr__(self) -> str:
        return f"Sym({str.__repr__(self)})"


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Char:
    value: str


@dataclass(frozen=True)
class Pair:
    """An improper cons cell. Only produced by evaluation, never by the reader."""

    car: "Term"
    cdr: "Term"


Term = Union[Sym, int, Fraction, Str, Char, tuple, Pair]

NIL = Sym("nil")
T = Sym("t")
QUOTE = Sym("quote")


def num(x: Union[int, Fraction]) -> Union[int, Fraction]:
    """Normalize a rational: integral fractions become ints."""
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def is_number(x: object) -> bool:
    return (isinstance(x, int) and not isinstance(x, bool)) or isinstance(x, Fraction)


def atom_kind(x: Term) -> str:
    if x is NIL or x == NIL or x == T:
        return "boolean"
    if isinstance(x, Sym):
        return "symbol"
    if isinstance(x, int):
        return "integer"
    if isinstance(x, Fraction):
        return "rational"
    if isinstance(x, Str):
        return "string"
    if isinstance(x, Char):
        return "character"
    raise TypeError(f"not an atom: {x!r}")


@dataclass(frozen=True, order=True)
class Span:
    """Source region; lines and columns are 1-based, end is exclusive."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def contains(self, other: "Span") -> bool:
        return (self.start_line, self.start_col) <= (other.start_line, other.start_col) and (
            other.end_line,
            other.end_col,
        ) <= (self.end_line, self.end_col)

    def overlaps(self, other: "Span") -> bool:
        return (self.start_line, self.start_col) < (other.end_line, other.end_col) and (
            other.start_line,
            other.start_col,
        ) < (self.end_line, self.end_col)

    def join(self, other: "Span") -> "Span":
        start = min((self.start_line, self.start_col), (other.start_line, other.start_col))
        end = max((self.end_line, self.end_col), (other.end_line, other.end_col))
        return Span(self.file, start[0], start[1], end[0], end[1])

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}-{self.end_line}:{self.end_col}"


class LineIndex:
    """Maps character offsets of a text to (line, column) pairs."""

    def __init__(self, text: str, file: str = "<input>"):
        self.text = text
        self.file = file
        self.starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def position(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.starts, offset) - 1
        return line + 1, offset - self.starts[line] + 1

    def span(self, start: int, end: int) -> Span:
        sl, sc = self.position(start)
        el, ec = self.position(end)
        return Span(self.file, sl, sc, el, ec)


class ReadError(Exception):
    def __init__(self, message: str, span: Span):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}")


@dataclass(frozen=True)
class Syntax:
    """A term together with the span it was read from."""

    datum: Term
    span: Span
    children: tuple["Syntax", ...] = field(default=(), compare=False)

    def walk(self) -> Iterator["Syntax"]:
        yield self
        for c in self.children:
            yield from c.walk()


_DELIMS = set("()'\";")
_ILLEGAL = set("`,")
_INT_RE = re.compile(r"[+-]?\d+\Z")
_RAT_RE = re.compile(r"([+-]?\d+)/(\d+)\Z")


def skip_blank(text: str, pos: int) -> int:
    """Skip whitespace and ``;`` line comments."""
    n = len(text)
    while pos < n:
        c = text[pos]
        if c.isspace():
            pos += 1
        elif c == ";":
            nl = text.find("\n", pos)
            pos = n if nl < 0 else nl + 1
        else:
            break
    return pos


def parse_atom(token: str) -> Term:
    if _INT_RE.match(token):
        return int(token)
    m = _RAT_RE.match(token)
    if m and int(m.group(2)) != 0:
        return num(Fraction(int(m.group(1)), int(m.group(2))))
    return Sym(token)


class _Reader:
    def __init__(self, text: str, index: LineIndex):
        self.text = text
        self.index = index

    def error(self, msg: str, start: int, end: int | None = None) -> ReadError:
        end = start + 1 if end is None else end
        end = min(max(end, start), len(self.text))
        return ReadError(msg, self.index.span(start, end))

    def read(self, pos: int) -> tuple[Syntax, int]:
        text = self.text
        pos = skip_blank(text, pos)
        if pos >= len(text):
            raise self.error("unexpected end of input", pos, pos)
        c = text[pos]
        if c == "(":
            return self.read_list(pos)
        if c == ")":
            raise self.error("unexpected ')'", pos)
        if c == "'":
            inner, end = self.read(pos + 1)
            span = self.index.span(pos, end)
            quote = Syntax(QUOTE, self.index.span(pos, pos + 1))
            return Syntax((QUOTE, inner.datum), span, (quote, inner)), end
        if c == '"':
            return self.read_string(pos)
        if c == "#":
            if text.startswith("#\\", pos) and pos + 2 < len(text):
                end = pos + 3
                while end < len(text) and text[end] not in _DELIMS and not text[end].isspace():
                    end += 1
                name = text[pos + 2 : end]
                names = {"space": " ", "newline": "\n", "tab": "\t"}
                if len(name) == 1:
                    val = name
                elif name.lower() in names:
                    val = names[name.lower()]
                else:
                    raise self.error(f"unknown character name #\\{name}", pos, end)
                return Syntax(Char(val), self.index.span(pos, end)), end
            raise self.error("illegal character '#'", pos)
        if c in _ILLEGAL or (not c.isprintable() and not c.isspace()):
            raise self.error(f"illegal character {c!r}", pos)
        end = pos
        while end < len(text) and text[end] not in _DELIMS and not text[end].isspace():
            if text[end] in _ILLEGAL:
                raise self.error(f"illegal character {text[end]!r}", end)
            end += 1
        token = text[pos:end]
        return Syntax(parse_atom(token), self.index.span(pos, end)), end

    def read_string(self, pos: int) -> tuple[Syntax, int]:
        text = self.text
        i = pos + 1
        out = []
        while i < len(text):
            c = text[i]
            if c == "\\" and i + 1 < len(text):
                out.append(text[i + 1])
                i += 2
            elif c == '"':
                return Syntax(Str("".join(out)), self.index.span(pos, i + 1)), i + 1
            else:
                out.append(c)
                i += 1
        raise self.error("unterminated string", pos, len(text))

    def read_list(self, pos: int) -> tuple[Syntax, int]:
        text = self.text
        items: list[Syntax] = []
        i = pos + 1
        while True:
            i = skip_blank(text, i)
            if i >= len(text):
                raise self.error("unterminated list", pos, len(text))
            if text[i] == ")":
                end = i + 1
                span = self.index.span(pos, end)
                if not items:
                    return Syntax(NIL, span), end
                return Syntax(tuple(s.datum for s in items), span, tuple(items)), end
            if text[i] == "." and (i + 1 >= len(text) or text[i + 1] in _DELIMS or text[i + 1].isspace()):
                raise self.error("improper list: dotted pairs are not supported", i)
            item, i = self.read(i)
            items.append(item)


def read_syntax(text: str, origin: str = "<input>", pos: int = 0,
                index: LineIndex | None = None) -> tuple[Syntax, int]:
    """Read the first complete term at ``pos``; return it and the resume offset."""
    index = index or LineIndex(text, origin)
    return _Reader(text, index).read(pos)


def read_term(text: str, origin: str = "<input>") -> Term:
    """Read a single term and return its datum."""
    syn, _ = read_syntax(text, origin)
    return syn.datum


def read_all(text: str, origin: str = "<input>") -> list[Syntax]:
    index = LineIndex(text, origin)
    reader = _Reader(text, index)
    out = []
    pos = skip_blank(text, 0)
    while pos < len(text):
        syn, pos = reader.read(pos)
        out.append(syn)
        pos = skip_blank(text, pos)
    return out


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


def print_term(t: Term) -> str:
    """Canonical text: single spaces, lower-case symbols, rationals as p/q."""
    if isinstance(t, Sym):
        return str(t)
    if isinstance(t, bool):
        return "t" if t else "nil"
    if isinstance(t, int):
        return str(t)
    if isinstance(t, Fraction):
        t = num(t)
        return str(t) if isinstance(t, int) else f"{t.numerator}/{t.denominator}"
    if isinstance(t, Str):
        return f'"{_escape(t.value)}"'
    if isinstance(t, Char):
        names = {" ": "Space", "\n": "Newline", "\t": "Tab"}
        return "#\\" + names.get(t.value, t.value)
    if isinstance(t, Pair):
        parts = []
        while isinstance(t, (tuple, Pair)):
            if isinstance(t, tuple):
                parts.extend(print_term(x) for x in t)
                t = NIL
                break
            parts.append(print_term(t.car))
            t = t.cdr
        tail = "" if t == NIL else f" . {print_term(t)}"
        return "(" + " ".join(parts) + tail + ")"
    if isinstance(t, tuple):
        if len(t) == 2 and t[0] == QUOTE:
            return "'" + print_term(t[1])
        return "(" + " ".join(print_term(x) for x in t) + ")"
    raise TypeError(f"cannot print {t!r}")
