"""Type-set reasoning: a finite abstraction of values as bit masks.

This is the kernel's built-in, always-on type reasoning (the counterpart of
recognizer/compound-recognizer reasoning in the minimal theory).
"""

from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

from ..sexpr import NIL, T, Char, Pair, Str, Sym, Term
from ..terms import const_value, is_call, is_const, is_var
from ..typesys import recognize, Base, ConsOf, Enum, ListOf, Named, OneOf, TypeExpr, TypeTable

if TYPE_CHECKING:
    from ..world import World

TS_NIL = 1
TS_T = 2
TS_SYM = 4
TS_ZERO = 8
TS_POSINT = 16
TS_NEGINT = 32
TS_POSRAT = 64
TS_NEGRAT = 128
TS_CONS_P = 256
TS_CONS_I = 512
TS_STR = 1024
TS_CHAR = 2048
TS_ALL = 4095
TS_EMPTY = 0

TS_BOOL = TS_NIL | TS_T
TS_SYMBOL = TS_NIL | TS_T | TS_SYM
TS_NAT = TS_ZERO | TS_POSINT
TS_INT = TS_ZERO | TS_POSINT | TS_NEGINT
TS_NUM = TS_INT | TS_POSRAT | TS_NEGRAT
TS_POS = TS_POSINT | TS_POSRAT
TS_NEG = TS_NEGINT | TS_NEGRAT
TS_CONS = TS_CONS_P | TS_CONS_I
TS_TL = TS_NIL | TS_CONS_P
TS_LIST = TS_NIL | TS_CONS

# recognizer name -> (mask, exact)
RECOGNIZERS: dict[str, tuple[int, bool]] = {
    "consp": (TS_CONS, True),
    "tlp": (TS_TL, True),
    "listp": (TS_LIST, True),
    "natp": (TS_NAT, True),
    "posp": (TS_POSINT, True),
    "negp": (TS_NEGINT, True),
    "integerp": (TS_INT, True),
    "rationalp": (TS_NUM, True),
    "acl2-numberp": (TS_NUM, True),
    "symbolp": (TS_SYMBOL, True),
    "booleanp": (TS_BOOL, True),
    "allp": (TS_ALL, True),
    "stringp": (TS_STR, True),
    "characterp": (TS_CHAR, True),
    "keywordp": (TS_SYM, False),
    "zp": (TS_ALL & ~TS_POSINT, True),
}

BASE_MASKS = {
    "all": TS_ALL, "bool": TS_BOOL, "nat": TS_NAT, "int": TS_INT,
    "rational": TS_NUM, "symbol": TS_SYMBOL, "tl": TS_TL,
}


def value_bits(v: Term) -> int:
    if v == NIL:
        return TS_NIL
    if v == T:
        return TS_T
    if isinstance(v, Sym):
        return TS_SYM
    if isinstance(v, int):
        return TS_ZERO if v == 0 else TS_POSINT if v > 0 else TS_NEGINT
    if isinstance(v, Fraction):
        return TS_POSRAT if v > 0 else TS_NEGRAT
    if isinstance(v, tuple):
        return TS_CONS_P
    if isinstance(v, Pair):
        return TS_CONS_I
    if isinstance(v, Str):
        return TS_STR
    if isinstance(v, Char):
        return TS_CHAR
    return TS_ALL


def singleton_value(bits: int) -> Term | None:
    """The unique value of a mask denoting exactly one value."""
    return {TS_NIL: NIL, TS_T: T, TS_ZERO: 0}.get(bits)


def cons_bits(cdr_bits: int) -> int:
    if cdr_bits & ~TS_TL == 0:
        return TS_CONS_P
    if cdr_bits & TS_TL == 0:
        return TS_CONS_I
    return TS_CONS


def type_mask(ty: TypeExpr, table: TypeTable, _active: dict | None = None) -> int:
    """A superset mask of the values of ``ty``."""
    active = {} if _active is None else _active
    if isinstance(ty, Base):
        return BASE_MASKS[ty.name]
    if isinstance(ty, ListOf):
        return TS_TL
    if isinstance(ty, Enum):
        m = 0
        for v in ty.values:
            m |= value_bits(v)
        return m
    if isinstance(ty, OneOf):
        m = 0
        for a in ty.alts:
            m |= type_mask(a, table, active)
        return m
    if isinstance(ty, ConsOf):
        return cons_bits(type_mask(ty.cdr, table, active))
    if isinstance(ty, Named):
        if ty.name in active:
            return active[ty.name]
        # least fixpoint over the recursive definition
        active[ty.name] = 0
        m = 0
        for _ in range(8):
            m = type_mask(table.types[ty.name], table, active)
            if m == active[ty.name]:
                break
            active[ty.name] = m
        del active[ty.name]
        return m
    return TS_ALL


def type_exact(ty: TypeExpr, table: TypeTable) -> bool:
    """True when ``ty`` contains exactly the values admitted by its mask."""
    ty = table.resolve(ty) if isinstance(ty, Named) else ty
    if isinstance(ty, Base):
        return True
    if isinstance(ty, ListOf):
        return ty.elem == Base("all")
    if isinstance(ty, OneOf):
        return all(type_exact(a, table) for a in ty.alts)
    if isinstance(ty, Enum):
        return all(singleton_value(value_bits(v)) == v for v in ty.values)
    return False


def recognizer_info(name: str, world: "World") -> tuple[int, bool] | None:
    if name in RECOGNIZERS:
        return RECOGNIZERS[name]
    ty = world.types.type_of_predicate(name)
    if ty is None:
        return None
    return type_mask(ty, world.types), type_exact(ty, world.types)


def fix_bits(b: int) -> int:
    return (b & TS_NUM) | (TS_ZERO if b & ~TS_NUM else 0)


def _plus_bits(a: int, b: int) -> int:
    a, b = fix_bits(a), fix_bits(b)
    if a & ~TS_NAT == 0 and b & ~TS_NAT == 0:
        if a & TS_ZERO == 0 or b & TS_ZERO == 0:
            return TS_POSINT
        return TS_NAT
    if a & ~TS_INT == 0 and b & ~TS_INT == 0:
        return TS_INT
    if a & ~(TS_NEG | TS_ZERO) == 0 and b & ~(TS_NEG | TS_ZERO) == 0:
        return TS_NEG | TS_ZERO
    if a & ~(TS_POS | TS_ZERO) == 0 and b & ~(TS_POS | TS_ZERO) == 0:
        return TS_POS | TS_ZERO
    return TS_NUM


def _times_bits(a: int, b: int) -> int:
    a, b = fix_bits(a), fix_bits(b)
    if a == TS_ZERO or b == TS_ZERO:
        return TS_ZERO
    if a & ~TS_NAT == 0 and b & ~TS_NAT == 0:
        return TS_NAT
    if a & ~TS_INT == 0 and b & ~TS_INT == 0:
        return TS_INT
    return TS_NUM


def _neg_bits(a: int) -> int:
    a = fix_bits(a)
    out = a & TS_ZERO
    if a & TS_POSINT:
        out |= TS_NEGINT
    if a & TS_NEGINT:
        out |= TS_POSINT
    if a & TS_POSRAT:
        out |= TS_NEGRAT
    if a & TS_NEGRAT:
        out |= TS_POSRAT
    return out


class TypeEnv:
    """Type-set assumptions: a mask restriction per term."""

    def __init__(self, restrict: dict | None = None):
        self.restrict: dict[Term, int] = dict(restrict or {})

    def copy(self) -> "TypeEnv":
        return TypeEnv(self.restrict)

    def narrow(self, term: Term, mask: int) -> None:
        self.restrict[term] = self.restrict.get(term, TS_ALL) & mask


def _list_type(pred: str, world: "World") -> TypeExpr | None:
    ty = world.types.type_of_predicate(pred)
    return world.types.resolve(ty) if isinstance(ty, Named) else ty


def _has_type(x: Term, ty: TypeExpr, tenv: TypeEnv, world: "World", ts) -> bool:
    if type_exact(ty, world.types) and ts(x) & ~type_mask(ty, world.types) == 0:
        return True
    if isinstance(ty, (Base, Named)):
        pred = world.types.predicate_name(ty)
        return tenv.restrict.get((pred, x), TS_ALL) & TS_NIL == 0
    return False


def known_lists(x: Term, tenv: TypeEnv, world: "World") -> set:
    """Recognizers of list types known to hold of ``x``; the cdr of a typed
    list has the same type."""
    out = set()
    while True:
        for key, m in tenv.restrict.items():
            if (m & TS_NIL == 0 and isinstance(key, tuple) and len(key) == 2 and key[1] == x
                    and isinstance(_list_type(str(key[0]), world), ListOf)):
                out.add(str(key[0]))
        if is_call(x) and x[0] == "cdr" and len(x) == 2:
            x = x[1]
        else:
            return out


def type_set(term: Term, tenv: TypeEnv, world: "World", thy: frozenset | set,
             depth: int = 0) -> int:
    """A mask containing every value ``term`` can take under ``tenv``."""
    base = tenv.restrict.get(term, TS_ALL)
    if is_const(term):
        return value_bits(const_value(term))
    if is_var(term) or not is_call(term) or depth > 40:
        return base
    h = str(term[0])
    a = term[1:]

    def ts(x: Term) -> int:
        return type_set(x, tenv, world, thy, depth + 1)

    if h == "cons":
        return base & cons_bits(ts(a[1]))
    if h == "cdr":
        x = ts(a[0])
        if x & TS_CONS == 0:
            return base & TS_NIL
        if x & ~TS_TL == 0:
            return base & TS_TL
        return base
    if h == "car":
        x = ts(a[0])
        if x & TS_CONS == 0:
            return base & TS_NIL
        m = TS_ALL
        for p in known_lists(a[0], tenv, world):
            m &= type_mask(_list_type(p, world).elem, world.types)
        return base & (m | (TS_NIL if x & TS_NIL else 0))
    if h in RECOGNIZERS or world.types.type_of_predicate(h) is not None:
        if len(a) == 1 and h in known_lists(a[0], tenv, world):
            return base & TS_T
        lt = _list_type(h, world) if h not in RECOGNIZERS else None
        if len(a) == 1 and isinstance(lt, ListOf) and is_call(a[0]) and a[0][0] == "cons":
            x, y = a[0][1], a[0][2]
            if _has_type(x, lt.elem, tenv, world, ts) and ts((term[0], y)) & TS_NIL == 0:
                return base & TS_T
        if len(a) == 1 and is_const(a[0]) and h not in RECOGNIZERS:
            ty = world.types.type_of_predicate(h)
            return base & (TS_T if recognize(const_value(a[0]), ty, world.types) else TS_NIL)
        info = recognizer_info(h, world)
        if info and len(a) == 1:
            mask, exact = info
            x = ts(a[0])
            if x & mask == 0:
                return base & TS_NIL
            if exact and x & ~mask == 0:
                return base & TS_T
        return base & TS_BOOL
    if h == "equal":
        x, y = ts(a[0]), ts(a[1])
        if x & y == 0:
            return base & TS_NIL
        return base & TS_BOOL
    if h == "<":
        x, y = fix_bits(ts(a[0])), fix_bits(ts(a[1]))
        if x & ~(TS_NEG | TS_ZERO) == 0 and y & ~TS_POS == 0:
            return base & TS_T
        if x & ~TS_NEG == 0 and y & ~(TS_ZERO | TS_POS) == 0:
            return base & TS_T
        if x & ~(TS_ZERO | TS_POS) == 0 and y & ~(TS_ZERO | TS_NEG) == 0:
            return base & TS_NIL
        return base & TS_BOOL
    if h in ("not", "implies", "iff"):
        return base & TS_BOOL
    if h == "+":
        return base & _plus_bits(ts(a[0]), ts(a[1]))
    if h == "*":
        return base & _times_bits(ts(a[0]), ts(a[1]))
    if h == "-":
        return base & _neg_bits(ts(a[0]))
    if h == "/":
        return base & TS_NUM
    if h == "len":
        x = ts(a[0])
        return base & (TS_ZERO if x & TS_CONS == 0 else TS_POSINT if x & ~TS_CONS == 0 else TS_NAT)
    if h == "if":
        return base & (ts(a[1]) | ts(a[2]))
    if h == "and":
        return base & (TS_NIL | ts(a[-1])) if a else base & TS_T
    if h == "or":
        m = 0
        for x in a:
            m |= ts(x)
        return base & m
    fdef = world.functions.get(term[0])
    if fdef is not None and fdef.output_type is not None and f"{h}-contract-tp" in thy:
        ok = True
        for arg, ty in zip(a, fdef.input_types):
            mask = type_mask(ty, world.types)
            if not (type_exact(ty, world.types) and ts(arg) & ~mask == 0):
                pred = world.types.predicate_name(ty) if isinstance(ty, (Base, Named)) else None
                if pred is None or tenv.restrict.get((pred, arg), TS_ALL) & TS_NIL:
                    ok = False
                    break
        if ok:
            return base & type_mask(fdef.output_type, world.types)
    return base
