"""Command-line front end.

    cpc check FILE... [--json] [--emit-instructions PATH] [--test-bound N]
                      [--pool LO..HI] [--fuel N] [--fail-fast]
    cpc replay FILE.instr [--json] [--fuel N]
    cpc corpus DIR [--fuel N]

Exit codes: 0 when everything is accepted (and sound), 1 on any rejection,
2 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .checker import CheckReport, Checker, RunConfig
from .kernel.rewrite import DEFAULT_FUEL
from .sexpr import ReadError
from .translator import Theorem, dump_text, load_dump, replay_dump

EXIT_OK, EXIT_REJECTED, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if n <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {n}")
    return n


def parse_pool(text: str) -> tuple[int, int]:
    """``LO..HI`` with LO <= HI, e.g. ``-2..3``."""
    lo, sep, hi = text.partition("..")
    try:
        if not sep:
            raise ValueError
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}") from None
    if a > b:
        raise argparse.ArgumentTypeError(f"empty pool {text!r}")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cpc", description="Calculational proof checker.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check proof documents")
    c.add_argument("files", nargs="+", metavar="FILE")
    c.add_argument("--json", action="store_true", help="JSON lines instead of text")
    c.add_argument("--emit-instructions", metavar="PATH",
                   help="write the instruction dump (a directory when several files are given)")
    c.add_argument("--test-bound", type=_positive, default=3, metavar="N")
    c.add_argument("--pool", type=parse_pool, default=(-2, 3), metavar="LO..HI")
    c.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, metavar="N")
    c.add_argument("--fail-fast", action="store_true", help="stop a file at its first rejection")

    r = sub.add_parser("replay", help="replay an instruction dump through the kernel")
    r.add_argument("file", metavar="FILE.instr")
    r.add_argument("--json", action="store_true")
    r.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, metavar="N")

    k = sub.add_parser("corpus", help="run a corpus directory (pass/, nontrivial/, mutations/)")
    k.add_argument("root", metavar="DIR")
    k.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL, metavar="N")
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE
    try:
        if args.command == "check":
            return cmd_check(args)
        if args.command == "replay":
            return cmd_replay(args)
        return cmd_corpus(args)
    except UsageError as e:
        print(f"cpc: {e}", file=sys.stderr)
        return EXIT_USAGE


# -- check ---------------------------------------------------------------------------------

def _emit(line: str) -> None:
    print(line, flush=True)


def cmd_check(args) -> int:
    missing = [f for f in args.files if not Path(f).is_file()]
    if missing:
        raise UsageError(f"cannot read {missing[0]}")
    config = RunConfig(bound=args.test_bound, pool=args.pool, fuel=args.fuel,
                       fail_fast=args.fail_fast)
    checker = Checker(config)
    reports: list[CheckReport] = []
    for f in args.files:
        try:
            rep = checker.check_file(f)
        except (OSError, UnicodeDecodeError) as e:
            raise UsageError(f"cannot read {f}: {e}") from None
        reports.append(rep)
        for d in rep.diagnostics:
            _emit(json.dumps({"type": "diagnostic", **d.to_json()}) if args.json else d.format())
        if args.json:
            _emit(json.dumps({"type": "summary", **rep.summary()}))
        else:
            _emit(rep.summary_text())
    if len(reports) > 1:
        total = {"file": None, "proofs": sum(r.proofs for r in reports),
                 "accepted": sum(r.accepted for r in reports),
                 "warnings": sum(r.warnings for r in reports),
                 "sound": all(r.sound for r in reports)}
        if args.json:
            _emit(json.dumps({"type": "summary", **total}))
        else:
            _emit(f"total: {total['proofs']} proofs, {total['accepted']} accepted, "
                  f"{'sound' if total['sound'] else 'NOT sound'}")
    if args.emit_instructions:
        _write_dumps(args.emit_instructions, reports)
    return EXIT_OK if all(r.ok and r.sound for r in reports) else EXIT_REJECTED


def _write_dumps(target: str, reports: list[CheckReport]) -> None:
    try:
        if len(reports) == 1:
            Path(target).write_text(dump_text(reports[0].dump), encoding="utf-8")
            return
        d = Path(target)
        d.mkdir(parents=True, exist_ok=True)
        for rep in reports:
            (d / (Path(rep.file).stem + ".instr")).write_text(dump_text(rep.dump), encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot write {target}: {e}") from None


# -- replay --------------------------------------------------------------------------------

def cmd_replay(args) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise UsageError(f"cannot read {args.file}: {e}") from None
    try:
        items = load_dump(text, args.file)
    except (ReadError, ValueError) as e:
        raise UsageError(f"malformed dump: {e}") from None
    _, results = replay_dump(items, args.fuel)
    ok = True
    for th, r, err in results:
        if th is None:
            ok = False
            row = {"theorem": None, "accepted": False, "error": err}
        else:
            ok &= r.accepted
            row = {"theorem": str(th.name), "local": th.local, "accepted": r.accepted,
                   "digest": r.trace.final_digest(), "error": err}
        if args.json:
            _emit(json.dumps({"type": "theorem", **row}))
        elif th is None:
            _emit(f"error: {err}")
        else:
            status = "accepted" if r.accepted else f"REJECTED: {err}"
            _emit(f"{'local ' if th.local else ''}theorem {th.name}: {status} [{row['digest']}]")
    n = sum(1 for x in items if isinstance(x, Theorem))
    done = sum(1 for th, r, _ in results if th is not None and r.accepted)
    summary = {"theorems": n, "accepted": done, "ok": ok and done == n}
    _emit(json.dumps({"type": "summary", **summary}) if args.json
          else f"{args.file}: {done}/{n} theorems accepted")
    return EXIT_OK if summary["ok"] else EXIT_REJECTED


# -- corpus --------------------------------------------------------------------------------

def run_corpus(root: str | Path, config: RunConfig | None = None) -> list[tuple[str, bool, str]]:
    """Check every file of a corpus against its category's expectation.

    ``pass/`` files must be accepted and sound, ``nontrivial/`` files accepted
    with the soundness flag false, and each mutant listed in
    ``mutations/MANIFEST.json`` rejected with its expected code inside its
    mutated line range. Returns ``[(file, as expected, note)]``.
    """
    root = Path(root)
    checker = Checker(config)
    rows = []
    for f in sorted((root / "pass").glob("*.proof")):
        rep = checker.check_file(f)
        rows.append((str(f), rep.ok and rep.sound, rep.summary_text()))
    for f in sorted((root / "nontrivial").glob("*.proof")):
        rep = checker.check_file(f)
        good = rep.accepted == rep.proofs and not rep.sound and any(
            d.code == "W-NONTRIVIAL-CC" for d in rep.diagnostics)
        rows.append((str(f), good, rep.summary_text()))
    manifest = root / "mutations" / "MANIFEST.json"
    if manifest.is_file():
        for m in json.loads(manifest.read_text(encoding="utf-8")):
            f = root / "mutations" / m["file"]
            rep = checker.check_file(f)
            good, note = mutant_verdict(rep, m["expected_code"], m["region"])
            rows.append((str(f), good, note))
    return rows


def mutant_verdict(rep: CheckReport, code: str, region: list) -> tuple[bool, str]:
    """A mutant must be rejected with ``code``, and every error must touch ``region``."""
    errs = [d for d in rep.diagnostics if d.severity == "error"]
    inside = [any(d.span.start_line <= b and d.span.end_line >= a for a, b in region) for d in errs]
    codes = ", ".join(f"{d.code}@{d.span.start_line}" for d in errs) or "no errors"
    good = rep.accepted < rep.proofs and any(d.code == code for d in errs) and all(inside)
    return good, f"expected {code} in lines {region}: {codes}"


def cmd_corpus(args) -> int:
    root = Path(args.root)
    if not root.is_dir():
        raise UsageError(f"{root} is not a directory")
    rows = run_corpus(root, RunConfig(fuel=args.fuel))
    for f, good, note in rows:
        _emit(f"{'ok  ' if good else 'FAIL'} {f}: {note}")
    bad = sum(1 for _, g, _ in rows if not g)
    _emit(f"{len(rows) - bad}/{len(rows)} corpus files behave as expected")
    return EXIT_OK if bad == 0 else EXIT_REJECTED


if __name__ == "__main__":
    sys.exit(main())


__all__ = ["main", "run_corpus", "mutant_verdict", "parse_pool", "build_parser"]
