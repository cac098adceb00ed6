"""Check the reverse/accumulator proof and show what the kernel replayed.

Run from the repository root: python3 demos/check_rrev.py
"""

from pathlib import Path

from cpc.checker import check_file

ROOT = Path(__file__).resolve().parent.parent

rep = check_file(ROOT / "corpus" / "pass" / "rrev.proof")
print(rep.summary_text())
for out in rep.outcomes:
    print(f"\n{out.name}: accepted at phase {out.phase}")
    for th, res in out.results:
        kind = "local case theorem" if th.local else "main theorem"
        print(f"  {kind} {th.name}: {len(th.program)} instructions, "
              f"{len(res.trace.entries)} trace entries, digest {res.trace.final_digest()}")
