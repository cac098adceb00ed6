"""Hypothesis strategies for S-expressions and proof documents."""

from fractions import Fraction

from hypothesis import strategies as st

from cpc.sexpr import Char, Str, Sym, print_term

_FIRST = "abcdefghijklmnopqrstuvwxyz"
_REST = _FIRST + "0123456789-+*/<>=!?_"

symbols = st.builds(
    lambda a, b: Sym(a + b),
    st.sampled_from(_FIRST),
    st.text(_REST, max_size=6),
)
rationals = st.builds(Fraction, st.integers(-50, 50), st.integers(2, 9)).filter(
    lambda q: q.denominator != 1)
chars = st.one_of(
    st.sampled_from([" ", "\n", "\t"]),
    st.characters(min_codepoint=33, max_codepoint=126),
).map(Char)
strings = st.text(st.characters(blacklist_categories=("Cs",)), max_size=8).map(Str)
atoms = st.one_of(st.integers(-10**6, 10**6), rationals, symbols, strings, chars)


def sexprs():
    """Datums: atoms and non-empty lists, quote forms included."""
    return st.recursive(
        atoms,
        lambda kids: st.one_of(
            st.lists(kids, min_size=1, max_size=5).map(tuple),
            kids.map(lambda x: (Sym("quote"), x)),
        ),
        max_leaves=25,
    )


# -- proof documents ----------------------------------------------------------------------

_VARS = ["x", "y", "z", "acc", "l"]
_FNS = {"aapp": 2, "rrev": 1, "revt": 2, "cons": 2, "car": 1, "cdr": 1, "+": 2, "len": 1}


@st.composite
def terms(draw, depth=3):
    if depth == 0 or draw(st.integers(0, 3)) == 0:
        return draw(st.one_of(st.sampled_from(_VARS), st.sampled_from(["nil", "t", "0", "1", "'(1 2)"])))
    f = draw(st.sampled_from(sorted(_FNS)))
    args = [draw(terms(depth - 1)) for _ in range(_FNS[f])]
    return f"({f} {' '.join(args)})"


_HINTS = ["Def aapp", "Def rrev", "Arithmetic", "cons axioms", "Evaluation", "Obvious", "PL",
          "MP", "Lemma assoc-append", "Lemma assoc-append ((x y) (z acc))"]


@st.composite
def hint_sets(draw, labels):
    pool = _HINTS + labels
    picked = draw(st.lists(st.sampled_from(pool), max_size=3, unique=True))
    return "{ " + ", ".join(picked) + " }" if picked else "{ }"


@st.composite
def simple_bodies(draw):
    lines = []
    labels = []
    n_ctx = draw(st.integers(0, 3))
    if n_ctx:
        lines.append("Context:")
        for i in range(1, n_ctx + 1):
            lines.append(f"C{i}. (tlp {draw(st.sampled_from(_VARS))})")
            labels.append(f"C{i}")
        lines.append("")
    n_der = draw(st.integers(0, 2))
    if n_der:
        lines.append("Derived Context:")
        for i in range(1, n_der + 1):
            lines.append(f"D{i}. {draw(terms(2))} {draw(hint_sets(labels))}")
            labels.append(f"D{i}")
        lines.append("")
    if draw(st.booleans()):
        lines += [f"Goal: (equal {draw(terms(2))} {draw(terms(2))})", ""]
    n_steps = draw(st.integers(0, 3))
    if n_steps or draw(st.booleans()):
        lines += ["Proof:", draw(terms(3))]
        for _ in range(n_steps):
            rel = draw(st.sampled_from(["==", "=>", "<=>", "<", "<=", ">", ">="]))
            lines += [f"{rel} {draw(hint_sets(labels))}", draw(terms(3))]
        lines.append("")
    return lines


@st.composite
def proofs(draw, index):
    kind = draw(st.sampled_from(["Conjecture", "Lemma", "Property", "Theorem"]))
    name = draw(st.one_of(st.sampled_from(["p", "foo", "app-nil", "r2"]), st.just(str(index))))
    stmt = f"(implies (tlp x) (equal {draw(terms(2))} {draw(terms(2))}))"
    lines = [f"{kind} {name}{index if not name.isdigit() else ''}:", stmt, ""]
    if draw(st.booleans()):
        lines += ["Exportation:", stmt, ""]
    if draw(st.booleans()):
        lines += ["Contract Completion:", stmt, ""]
    if draw(st.integers(0, 3)) == 0:
        lines += [f"Proof by: Induction on {draw(terms(1))}", ""]
        for k in range(draw(st.integers(1, 3))):
            cat = draw(st.sampled_from(["Induction", "Base", "Contract"]))
            lines.append(f"{cat} Case {k}:")
            if draw(st.integers(0, 4)):
                lines += [f"(implies (endp x) {stmt})", ""]
                lines += draw(simple_bodies())
            lines += ["QED", ""]
    else:
        lines += draw(simple_bodies())
    lines += ["QED", ""]
    return lines


@st.composite
def documents(draw):
    lines = []
    if draw(st.booleans()):
        lines += ["(definec aapp (a :tl b :tl) :tl", "  (if (endp a) b (cons (car a) (aapp (cdr a) b))))", ""]
    for i in range(draw(st.integers(1, 3))):
        lines += draw(proofs(i))
    return "\n".join(lines)


__all__ = ["sexprs", "documents", "terms", "print_term"]
