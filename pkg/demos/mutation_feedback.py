"""Show the diagnostics each seeded mistake in the mutation corpus produces.

Run from the repository root: python3 demos/mutation_feedback.py [NAME...]
With no names, a handful of representative mutants are shown.
"""

import json
import sys
from pathlib import Path

from cpc.checker import check_file

MUT = Path(__file__).resolve().parent.parent / "corpus" / "mutations"
DEFAULT = ["rrev-no-def-hint", "rrev-wrong-subst", "rrev-deleted-case", "rrev-swapped-completion"]

manifest = {m["file"]: m for m in json.loads((MUT / "MANIFEST.json").read_text())}
for name in sys.argv[1:] or DEFAULT:
    m = manifest[name + ".proof"]
    print(f"== {name}: {m['mutation']}")
    lines = (MUT / m["file"]).read_text().splitlines()
    for a, b in m["region"]:
        for n in range(a, b + 1):
            print(f"   {n:4} | {lines[n - 1]}")
    for d in check_file(MUT / m["file"]).diagnostics:
        print("   " + d.format())
    print()
