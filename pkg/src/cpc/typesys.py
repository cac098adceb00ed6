"""A small data-definition system: type expressions, recognizers and bounded
enumerators."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .sexpr import NIL, QUOTE, T, Pair, Sym, Term, is_number
from .terms import (
    AND, CAR, CDR, CONSP, EQUAL, OR, is_call, is_quote, make_const, value_size, vcar, vcdr,
    vcons,
)

BASE_TYPES = ("all", "bool", "nat", "int", "rational", "symbol", "tl")

BASE_PREDICATES = {
    "all": Sym("allp"),
    "bool": Sym("booleanp"),
    "nat": Sym("natp"),
    "int": Sym("integerp"),
    "rational": Sym("rationalp"),
    "symbol": Sym("symbolp"),
    "tl": Sym("tlp"),
}

TYPE_ALIASES = {
    "integer": "int",
    "boolean": "bool",
    "true-list": "tl",
    "any": "all",
    "natural": "nat",
}


class TypeError_(Exception):
    """Raised for unknown or ill-formed type expressions."""


@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class ListOf:
    elem: "TypeExpr"


@dataclass(frozen=True)
class OneOf:
    alts: tuple["TypeExpr", ...]


@dataclass(frozen=True)
class Enum:
    values: tuple[Term, ...]


@dataclass(frozen=True)
class ConsOf:
    car: "TypeExpr"
    cdr: "TypeExpr"


@dataclass(frozen=True)
class Named:
    name: Sym


TypeExpr = Base | ListOf | OneOf | Enum | ConsOf | Named

TL = Base("tl")
ALL = Base("all")


@dataclass
class TypeTable:
    """Named types and the bijection between type names and predicate names."""

    types: dict[Sym, TypeExpr] = field(default_factory=dict)
    pred_of_type: dict[Sym, Sym] = field(default_factory=dict)
    type_of_pred: dict[Sym, Sym] = field(default_factory=dict)

    def copy(self) -> "TypeTable":
        return TypeTable(dict(self.types), dict(self.pred_of_type), dict(self.type_of_pred))

    def lookup(self, name: str) -> TypeExpr:
        name = TYPE_ALIASES.get(str(name), str(name))
        if name in BASE_TYPES:
            return Base(name)
        sym = Sym(name)
        if sym in self.types:
            return Named(sym)
        raise TypeError_(f"unknown type {name}")

    def resolve(self, ty: TypeExpr) -> TypeExpr:
        seen = set()
        while isinstance(ty, Named):
            if ty.name in seen:
                raise TypeError_(f"unguarded recursive type {ty.name}")
            seen.add(ty.name)
            if ty.name not in self.types:
                raise TypeError_(f"unknown type {ty.name}")
            ty = self.types[ty.name]
        if isinstance(ty, Base) and ty.name == "tl":
            return ListOf(ALL)
        return ty

    def register(self, name: Sym, ty: TypeExpr) -> Sym:
        if name in self.types or str(name) in BASE_TYPES:
            raise TypeError_(f"type {name} already defined")
        pred = Sym(f"{name}p")
        if pred in self.type_of_pred:
            raise TypeError_(f"predicate {pred} already defined")
        self.types[name] = ty
        self.pred_of_type[name] = pred
        self.type_of_pred[pred] = name
        try:
            _check_guarded(ty, self, {name}, guarded=False)
        except TypeError_:
            del self.types[name], self.pred_of_type[name], self.type_of_pred[pred]
            raise
        return pred

    def predicate_name(self, ty: TypeExpr) -> Sym:
        if isinstance(ty, Base):
            return BASE_PREDICATES[ty.name]
        if isinstance(ty, Named):
            return self.pred_of_type[ty.name]
        raise TypeError_("only named or base types have predicates")

    def type_of_predicate(self, pred: str) -> TypeExpr | None:
        for base, p in BASE_PREDICATES.items():
            if p == pred:
                return Base(base)
        name = self.type_of_pred.get(Sym(pred))
        return Named(name) if name is not None else None

    def is_type_predicate_call(self, s: Term) -> bool:
        return (
            is_call(s)
            and len(s) == 2
            and isinstance(s[0], str)
            and self.type_of_predicate(s[0]) is not None
        )


def _check_guarded(ty: TypeExpr, table: TypeTable, active: set, guarded: bool) -> None:
    if isinstance(ty, Named):
        if ty.name in active and not guarded:
            raise TypeError_(f"unguarded recursive type {ty.name}")
        if ty.name not in table.types:
            raise TypeError_(f"unknown type {ty.name}")
        if ty.name in active:
            return
        _check_guarded(table.types[ty.name], table, active | {ty.name}, guarded)
    elif isinstance(ty, ListOf):
        _check_guarded(ty.elem, table, active, True)
    elif isinstance(ty, ConsOf):
        _check_guarded(ty.car, table, active, True)
        _check_guarded(ty.cdr, table, active, True)
    elif isinstance(ty, OneOf):
        for a in ty.alts:
            _check_guarded(a, table, active, guarded)


def parse_type(form: Term, table: TypeTable) -> TypeExpr:
    """Surface type syntax: a type name, (listof T), (oneof T ...),
    (enum v ...), (cons T T), or a constant (a singleton type)."""
    if isinstance(form, Sym):
        name = form[1:] if form.startswith(":") else str(form)
        if form == NIL or form == T:
            return Enum((form,))
        return table.lookup(name)
    if is_number(form):
        return Enum((form,))
    if is_quote(form):
        return Enum((form[1],))
    if isinstance(form, tuple) and form:
        head = str(form[0])
        rest = form[1:]
        if head == "listof" and len(rest) == 1:
            return ListOf(parse_type(rest[0], table))
        if head == "oneof" and rest:
            return OneOf(tuple(parse_type(x, table) for x in rest))
        if head == "enum" and rest:
            if len(rest) == 1 and is_quote(rest[0]) and isinstance(rest[0][1], tuple):
                vals = rest[0][1]
            else:
                vals = tuple(x[1] if is_quote(x) else x for x in rest)
            return Enum(tuple(dict.fromkeys(vals)))
        if head == "cons" and len(rest) == 2:
            return ConsOf(parse_type(rest[0], table), parse_type(rest[1], table))
    raise TypeError_(f"ill-formed type expression {form!r}")


def _is_proper(v: Term) -> bool:
    return v == NIL or isinstance(v, tuple)


def recognize(v: Term, ty: TypeExpr, table: TypeTable) -> bool:
    """Semantic membership of value ``v`` in type ``ty``."""
    if isinstance(ty, Named):
        return recognize(v, table.resolve(ty), table)
    if isinstance(ty, Base):
        n = ty.name
        if n == "all":
            return True
        if n == "bool":
            return v == T or v == NIL
        if n == "nat":
            return isinstance(v, int) and v >= 0
        if n == "int":
            return isinstance(v, int)
        if n == "rational":
            return is_number(v)
        if n == "symbol":
            return isinstance(v, Sym)
        if n == "tl":
            return _is_proper(v)
    if isinstance(ty, ListOf):
        return _is_proper(v) and all(recognize(x, ty.elem, table) for x in (() if v == NIL else v))
    if isinstance(ty, OneOf):
        return any(recognize(v, a, table) for a in ty.alts)
    if isinstance(ty, Enum):
        return v in ty.values
    if isinstance(ty, ConsOf):
        return (
            isinstance(v, (tuple, Pair))
            and recognize(vcar(v), ty.car, table)
            and recognize(vcdr(v), ty.cdr, table)
        )
    raise TypeError_(f"unknown type expression {ty!r}")


def canonical_pool(pool: Iterable[Term]) -> list[Term]:
    """Deterministic pool order: small magnitudes first, then by sign."""
    items = list(dict.fromkeys(pool))
    nums = sorted((x for x in items if is_number(x)), key=lambda x: (abs(x), x < 0))
    others = [x for x in items if not is_number(x)]
    return nums + others


class _Enumerator:
    def __init__(self, pool: Sequence[Term], table: TypeTable):
        self.pool = canonical_pool(pool)
        self.table = table
        self.memo: dict[tuple[TypeExpr, int], list[Term]] = {}

    def atoms(self, name: str) -> list[Term]:
        nums = [x for x in self.pool if is_number(x)]
        if name == "all":
            return list(self.pool)
        if name == "bool":
            return [NIL, T]
        if name == "nat":
            return [x for x in nums if isinstance(x, int) and x >= 0]
        if name == "int":
            return [x for x in nums if isinstance(x, int)]
        if name == "rational":
            extra = [Fraction(1, 2), Fraction(-1, 2)]
            return nums + [x for x in extra if x not in nums]
        if name == "symbol":
            syms = [x for x in self.pool if isinstance(x, Sym)]
            return list(dict.fromkeys([NIL, T] + syms + [Sym("a")]))
        return []

    def exact(self, ty: TypeExpr, size: int) -> list[Term]:
        key = (ty, size)
        if key in self.memo:
            return self.memo[key]
        self.memo[key] = []  # guards against unguarded cycles
        out = self._exact(ty, size)
        out = list(dict.fromkeys(out))
        self.memo[key] = out
        return out

    def _exact(self, ty: TypeExpr, size: int) -> list[Term]:
        if isinstance(ty, Named):
            return self.exact(self.table.resolve(ty), size)
        if isinstance(ty, Base):
            if ty.name == "tl":
                return self.exact(ListOf(ALL), size)
            return self.atoms(ty.name) if size == 0 else []
        if isinstance(ty, Enum):
            return [v for v in ty.values if value_size(v) == size]
        if isinstance(ty, OneOf):
            out: list[Term] = []
            for a in ty.alts:
                out.extend(self.exact(a, size))
            return out
        if isinstance(ty, ListOf):
            if size == 0:
                return [NIL]
            out = []
            for k in range(size):
                for x in self.exact(ty.elem, k):
                    for rest in self.exact(ty, size - 1 - k):
                        out.append(vcons(x, rest))
            return out
        if isinstance(ty, ConsOf):
            if size == 0:
                return []
            out = []
            for k in range(size):
                for x in self.exact(ty.car, k):
                    for y in self.exact(ty.cdr, size - 1 - k):
                        out.append(vcons(x, y))
            return out
        raise TypeError_(f"unknown type expression {ty!r}")


def enumerate_type(ty: TypeExpr, bound: int, pool: Iterable[Term], table: TypeTable) -> list[Term]:
    """All values of ``ty`` with at most ``bound`` cons cells whose atoms come
    from ``pool``; ordered by size, then lexicographically in pool order."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    en = _Enumerator(list(pool), table)
    out: list[Term] = []
    for s in range(bound + 1):
        out.extend(en.exact(ty, s))
    return list(dict.fromkeys(out))


def enumerate_by_size(ty: TypeExpr, bound: int, pool: Iterable[Term],
                      table: TypeTable) -> list[list[Term]]:
    """Values of ``ty`` grouped by exact size 0..bound (same order as enumerate_type)."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    en = _Enumerator(list(pool), table)
    seen: set = set()
    out = []
    for s in range(bound + 1):
        layer = [v for v in dict.fromkeys(en.exact(ty, s)) if v not in seen]
        seen.update(layer)
        out.append(layer)
    return out


def predicate_body(ty: TypeExpr, x: Term, table: TypeTable, self_name: Sym | None = None,
                   aux: list | None = None) -> Term:
    """The body of the recognizer function for ``ty`` applied to term ``x``.

    Nested ``listof`` types get auxiliary named types appended to ``aux``.
    """
    if isinstance(ty, Named):
        return (table.pred_of_type[ty.name], x)
    if isinstance(ty, Base):
        return (BASE_PREDICATES[ty.name], x)
    if isinstance(ty, Enum):
        alts = [(EQUAL, x, make_const(v)) for v in ty.values]
        return alts[0] if len(alts) == 1 else (OR,) + tuple(alts)
    if isinstance(ty, OneOf):
        alts = [predicate_body(a, x, table, self_name, aux) for a in ty.alts]
        return alts[0] if len(alts) == 1 else (OR,) + tuple(alts)
    if isinstance(ty, ConsOf):
        return (
            AND,
            (CONSP, x),
            predicate_body(ty.car, (CAR, x), table, self_name, aux),
            predicate_body(ty.cdr, (CDR, x), table, self_name, aux),
        )
    if isinstance(ty, ListOf):
        if self_name is None or aux is None:
            raise TypeError_("nested listof needs an auxiliary predicate")
        aux_name = Sym(f"{self_name}-listof{len(aux) + 1}")
        aux.append((aux_name, ty))
        return (Sym(f"{aux_name}p"), x)
    raise TypeError_(f"unknown type expression {ty!r}")


def listof_body(ty: ListOf, pred: Sym, x: Term, table: TypeTable, self_name: Sym,
                aux: list) -> Term:
    """Recursive recognizer body for a list type with predicate ``pred``."""
    elem = predicate_body(ty.elem, (CAR, x), table, self_name, aux)
    return (
        Sym("if"),
        (CONSP, x),
        (AND, elem, (pred, (CDR, x))),
        (EQUAL, x, NIL),
    )


__all__ = [
    "Base", "ListOf", "OneOf", "Enum", "ConsOf", "Named", "TypeExpr", "TypeTable",
    "TypeError_", "parse_type", "recognize", "enumerate_type", "enumerate_by_size", "canonical_pool",
    "predicate_body", "listof_body", "BASE_TYPES", "BASE_PREDICATES", "QUOTE",
]
