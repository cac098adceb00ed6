"""Regenerate corpus/mutations from corpus/pass/rrev.proof, with MANIFEST.json
recording each mutant's expected diagnostic code and mutated line range."""

import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
src = (ROOT / "corpus/pass/rrev.proof").read_text().split("\n")
out = ROOT / "corpus/mutations"
out.mkdir(exist_ok=True)
muts = []

def mut(name, desc, edits, expect):
    """edits: list of (first_line, last_line, new_lines) 1-based, applied bottom-up.
    The mutated region is reported in mutant line numbers."""
    lines = list(src)
    regions = []
    for a, b, new in sorted(edits, key=lambda e: -e[0]):
        lines[a-1:b] = new
    # regions in the mutant's numbering
    shift = 0
    for a, b, new in sorted(edits, key=lambda e: e[0]):
        start = a + shift
        end = start + max(len(new), 1) - 1
        regions.append([start, end])
        shift += len(new) - (b - a + 1)
    (out / f"{name}.proof").write_text("\n".join(lines))
    muts.append({"file": f"{name}.proof", "mutation": desc, "expected_code": expect,
                 "region": regions})

def sub(line, old, new):
    assert old in src[line-1], (line, old)
    return (line, line, [src[line-1].replace(old, new)])

mut("rrev-no-def-hint", "Def revt removed from Case 1 step 1", [sub(74, "{ D1, Def revt }", "{ D1 }")], "E-STEP-FAIL")
mut("rrev-no-d3-hint", "D3 hint of Case 2 step 2 replaced by C3", [sub(133, "{ D3 }", "{ C3 }")], "E-STEP-FAIL")
mut("rrev-no-lemma-hint", "lemma instantiation removed from Case 2 step 4", [(137, 138, ["== { Def aapp }"])], "E-STEP-FAIL")
mut("rrev-disconnected-chain", "relation line deleted between two chain terms", [(76, 76, [])], "E-CHAIN-DISCONNECTED")
mut("rrev-deleted-case", "Induction Case 1 deleted", [(51, 82, [])], "E-CASES")
mut("rrev-wrong-subst", "lemma substitution binds z to x instead of acc", [sub(138, "(z acc)", "(z x)")], "E-STEP-FAIL")
mut("rrev-off-goal", "last chain term of Case 2 differs from the goal", [sub(141, "(aapp (rrev x) acc)", "(aapp acc (rrev x))")], "E-STEP-FAIL")
mut("rrev-missing-qed", "QED of Case 1 deleted", [(81, 81, [])], "E-QED")
mut("rrev-dup-label", "context label C3 duplicated", [sub(65, "C3.", "C2.")], "E-DUP-LABEL")
mut("rrev-unknown-relation", "unknown relation in a step", [sub(76, "==", "~=")], "E-RELATION")
mut("rrev-unknown-hint", "misspelled Def hint", [sub(74, "Def revt", "Deff revt")], "E-HINT")
mut("rrev-bad-exportation", "exportation of Case 1 changes a hypothesis", [sub(58, "(endp x)", "(consp x)")], "E-EXPORT")
mut("rrev-context-mismatch", "context item differs from the hypothesis", [sub(65, "(endp x)", "(consp x)")], "E-CONTEXT")
mut("rrev-goal-mismatch", "goal differs from the conclusion", [sub(70, "(aapp (rrev x) acc)", "(aapp acc (rrev x))")], "E-GOAL")
mut("rrev-derived-fail", "derived item loses its C3 hint", [sub(68, "{ C1, C3 }", "{ C1 }")], "E-DERIVED-FAIL")
mut("rrev-elided-case", "Case 0 body elided", [(29, 48, [])], "E-CASE-ELIDED")
mut("rrev-wrong-induction", "induction on a different term", [sub(26, "(revt x acc)", "(rrev x)")], "E-CASES")
# Built-in list functions are total, so no pair of reverse-proof hypotheses has a
# guard dependency; the swap is made in an appended in/consp lemma.
extra = (ROOT / "corpus/nontrivial/in-consp.proof").read_text().rstrip("\n").split("\n")
cc = [i for i, l in enumerate(extra) if l.startswith("(implies (and (tlp l)")][0]
src_lines = len(src)
src.extend([""] + extra)
mut("rrev-swapped-completion", "completion hypotheses of an appended in/consp lemma swapped",
    [sub(src_lines + 2 + cc, "(and (tlp l) (in e l))", "(and (in e l) (tlp l))")], "E-CC-MISORDERED")
(out / "MANIFEST.json").write_text(json.dumps(muts, indent=2) + "\n")
