"""Emit the instruction dump for a proof, then replay it in a fresh world.

The replay sees only the dump text: events are re-admitted and every theorem
is re-proved by the kernel. Trace digests must match the checker's own run.

Run from the repository root: python3 demos/replay_dump.py [FILE.proof]
"""

import sys
from pathlib import Path

from cpc.checker import check_file
from cpc.translator import dump_text, load_dump, replay_dump

src = Path(sys.argv[1]) if len(sys.argv) > 1 else (
    Path(__file__).resolve().parent.parent / "corpus" / "pass" / "rrev.proof")

rep = check_file(src)
text = dump_text(rep.dump)
print(f"{src.name}: {len(text.splitlines())} dump lines")
print(text.splitlines()[-1][:160] + " ...")

before = {str(name): t.final_digest() for name, t in rep.traces()}
_, results = replay_dump(load_dump(text))
for th, res, err in results:
    if th is None:
        print("error:", err)
        continue
    same = "same" if before.get(str(th.name)) == res.trace.final_digest() else "DIFFERENT"
    print(f"  {th.name}: {'accepted' if res.accepted else 'rejected: ' + str(err)}, digest {same}")
