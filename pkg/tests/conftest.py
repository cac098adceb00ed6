import pathlib

import pytest

from cpc.sexpr import read_term
from cpc.world import World

ROOT = pathlib.Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
RREV = CORPUS / "pass" / "rrev.proof"

RREV_EVENTS = [
    "(definec aapp (a :tl b :tl) :tl (if (endp a) b (cons (first a) (aapp (rest a) b))))",
    "(definec rrev (x :tl) :tl (if (endp x) nil (aapp (rrev (rest x)) (list (first x)))))",
    "(definec revt (x :tl acc :tl) :tl (if (endp x) acc (revt (rest x) (cons (first x) acc))))",
    "(property assoc-append (x :tl y :tl z :tl)"
    " (equal (aapp x (aapp y z)) (aapp (aapp x y) z)))",
]

IN_DEF = ("(definec in (e :all l :tl) :bool"
          " (and (consp l) (or (equal e (car l)) (in e (cdr l)))))")

PRELUDE = RREV.read_text()[:RREV.read_text().index("Lemma")]

# A false conjecture justified by one bogus step.
APP_COMM = PRELUDE + """Conjecture app-comm:
(implies (and (tlp x) (tlp y)) (equal (aapp x y) (aapp y x)))

Context:
C1. (tlp x)
C2. (tlp y)

Goal: (equal (aapp x y) (aapp y x))

Proof:
(aapp x y)
== { Def aapp }
(aapp y x)
QED
"""


def rrev_world() -> World:
    w = World()
    for e in RREV_EVENTS:
        w.admit(read_term(e))
    return w


@pytest.fixture
def world():
    return rrev_world()


@pytest.fixture(scope="session")
def shared_world():
    """Reverse-proof world for read-only tests."""
    return rrev_world()


# Acceptance results are printed after the run, one line per criterion.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
