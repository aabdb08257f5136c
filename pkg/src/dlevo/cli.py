"""``dlevo`` command line: validate, closure, sat, insert, delete, apply.

Exit codes: 0 ok, 1 input KB unsatisfiable, 2 parse/validation error,
3 precondition error, 4 oracle bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

from . import oracle
from .evolution import EvolutionResult, compute_deletion, compute_insertion
from .model import KnowledgeBase, sorted_atoms
from .parser import ParseError, parse_changelog, parse_facts, parse_kb, serialize_kb
from .reasoner import PreconditionError, closure, is_satisfiable, violation_sets

EXIT_CODES = {
    "ok": 0,
    "unsat": 1,
    "parse-error": 2,
    "precondition-error": 3,
    "bound-exceeded": 4,
}


@dataclass
class CliReport:
    status: str
    payload: Any = ""
    diagnostics: list[str] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]


def _strs(atoms) -> list[str]:
    return [str(a) for a in sorted_atoms(atoms)]


def _doc(status: str, atoms=(), dropped=(), added=(), violations=()) -> dict:
    return {
        "status": status,
        "atoms": _strs(atoms),
        "dropped": _strs(dropped),
        "added": _strs(added),
        "violations": [
            {"assertion": str(v.violated), "atoms": _strs(v.atoms)} for v in violations
        ],
    }


def _load_kb(path: str) -> KnowledgeBase:
    return parse_kb(Path(path).read_text(encoding="utf-8"))


def _guarded(fn: Callable[..., CliReport]) -> Callable[..., CliReport]:
    def run(*args, **kwargs) -> CliReport:
        try:
            return fn(*args, **kwargs)
        except ParseError as e:
            return CliReport("parse-error", _doc("parse-error"), [str(e)])
        except PreconditionError as e:
            status = "unsat" if e.kind == "unsat-kb" else "precondition-error"
            return CliReport(status, _doc(status), [f"{e.kind}: {e}"])
        except oracle.BoundExceeded as e:
            return CliReport("bound-exceeded", _doc("bound-exceeded"), [str(e)])

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


@_guarded
def cmd_validate(kb_file: str) -> CliReport:
    kb = _load_kb(kb_file)
    return CliReport(
        "ok", _doc("ok", kb.abox), [f"{len(kb.tbox)} TBox assertions, {len(kb.abox)} ABox atoms"]
    )


@_guarded
def cmd_closure(kb_file: str) -> CliReport:
    kb = _load_kb(kb_file)
    return CliReport("ok", _doc("ok", closure(kb.tbox, kb.abox).atoms))


@_guarded
def cmd_sat(kb_file: str) -> CliReport:
    kb = _load_kb(kb_file)
    closed = closure(kb.tbox, kb.abox).atoms
    found = violation_sets(kb.tbox, closed)
    status = "unsat" if found else "ok"
    return CliReport(status, _doc(status, closed, violations=found))


def _evolve(kb_file: str, facts_file: str, kind: str, use_oracle: bool) -> CliReport:
    kb = _load_kb(kb_file)
    facts = parse_facts(Path(facts_file).read_text(encoding="utf-8"), kb.signature)
    if use_oracle:
        if not is_satisfiable(kb.tbox, kb.abox):
            raise PreconditionError("unsat-kb", "the input knowledge base is unsatisfiable")
        result = oracle.widtio(kb, facts, kind)
    elif kind == "insertion":
        result = compute_insertion(kb, facts)
    else:
        result = compute_deletion(kb, facts)
    return _report(result)


def _report(result: EvolutionResult) -> CliReport:
    doc = _doc(
        "ok", result.kb.abox, result.dropped, result.added, result.fired_violations
    )
    doc["kb"] = serialize_kb(result.kb)
    doc["noop"] = result.no_op
    return CliReport("ok", doc, list(result.diagnostics))


@_guarded
def cmd_insert(kb_file: str, facts_file: str, use_oracle: bool = False) -> CliReport:
    return _evolve(kb_file, facts_file, "insertion", use_oracle)


@_guarded
def cmd_delete(kb_file: str, facts_file: str, use_oracle: bool = False) -> CliReport:
    return _evolve(kb_file, facts_file, "deletion", use_oracle)


@_guarded
def cmd_apply(kb_file: str, changelog_file: str, output_file: str) -> CliReport:
    """Fold a changelog over a KB, write the final KB, journal every step."""
    kb = _load_kb(kb_file)
    steps = parse_changelog(Path(changelog_file).read_text(encoding="utf-8"), kb.signature)
    journal = []
    start = closure(kb.tbox, kb.abox).atoms
    for n, (op, facts) in enumerate(steps, start=1):
        result = compute_insertion(kb, facts) if op == "insert" else compute_deletion(kb, facts)
        journal.append(
            {
                "step": n,
                "op": op,
                "outcome": "noop" if result.no_op else "changed",
                "facts": _strs(facts),
                "added": _strs(result.added),
                "dropped": _strs(result.dropped),
            }
        )
        kb = result.kb
    Path(output_file).write_text(serialize_kb(kb), encoding="utf-8")
    doc = _doc("ok", kb.abox, start - kb.abox, kb.abox - start)
    doc["journal"] = journal
    doc["kb"] = serialize_kb(kb)
    return CliReport("ok", doc)


# ---------------------------------------------------------------------------
# rendering


def render_text(command: str, report: CliReport) -> str:
    if report.status in ("parse-error", "precondition-error", "bound-exceeded"):
        return "".join(f"error: {d}\n" for d in report.diagnostics)
    doc = report.payload
    if command == "validate":
        return f"OK {report.diagnostics[0]}\n"
    if command == "closure":
        return "".join(f"{a}.\n" for a in doc["atoms"])
    if command == "sat":
        if report.status == "unsat" and not doc["violations"]:
            return "".join(f"error: {d}\n" for d in report.diagnostics)
        lines = ["SAT" if report.status == "ok" else "UNSAT"]
        lines += [
            f"violation {v['assertion']}: " + " ".join(f"{a}." for a in v["atoms"])
            for v in doc["violations"]
        ]
        return "\n".join(lines) + "\n"
    if report.status == "unsat":
        return "".join(f"error: {d}\n" for d in report.diagnostics)
    out = [doc["kb"]]
    if command == "apply":
        for j in doc["journal"]:
            out.append(
                f"# step {j['step']} {j['op']} {j['outcome']} "
                f"+{len(j['added'])} -{len(j['dropped'])}\n"
            )
    elif doc.get("noop"):
        out.append("# noop\n")
    out += [f"# added {a}.\n" for a in doc["added"]]
    out += [f"# dropped {a}.\n" for a in doc["dropped"]]
    out += [f"# {d}\n" for d in report.diagnostics]
    return "".join(out)


def render_json(report: CliReport) -> str:
    doc = dict(report.payload) if isinstance(report.payload, dict) else {"status": report.status}
    doc["status"] = report.status
    doc["diagnostics"] = report.diagnostics
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlevo", description="WIDTIO evolution of DL-Lite_{A,id} knowledge bases"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "closure", "sat"):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--json", action="store_true")
    for name in ("insert", "delete"):
        p = sub.add_parser(name)
        p.add_argument("file")
        p.add_argument("--facts", required=True)
        p.add_argument("--oracle", action="store_true", help="use the exhaustive oracle")
        p.add_argument("--json", action="store_true")
    p = sub.add_parser("apply")
    p.add_argument("file")
    p.add_argument("--changelog", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json", action="store_true")
    return parser


def run(argv: Sequence[str] | None = None) -> tuple[CliReport, str]:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        report = cmd_validate(args.file)
    elif args.command == "closure":
        report = cmd_closure(args.file)
    elif args.command == "sat":
        report = cmd_sat(args.file)
    elif args.command == "insert":
        report = cmd_insert(args.file, args.facts, args.oracle)
    elif args.command == "delete":
        report = cmd_delete(args.file, args.facts, args.oracle)
    else:
        report = cmd_apply(args.file, args.changelog, args.out)
    text = render_json(report) if args.json else render_text(args.command, report)
    return report, text


def main(argv: Sequence[str] | None = None) -> int:
    try:
        report, text = run(argv)
    except OSError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_CODES["parse-error"]
    stream = sys.stdout if report.exit_code == 0 or report.status == "unsat" else sys.stderr
    stream.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
