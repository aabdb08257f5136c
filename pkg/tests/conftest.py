from __future__ import annotations

from pathlib import Path

import pytest

from dlevo.model import AtomicConcept, ConceptAtom, ConceptInclusion, KnowledgeBase, Signature
from dlevo.parser import parse_facts, parse_kb

DATA = Path(__file__).parent / "data"


def atoms(kb: KnowledgeBase, text: str) -> frozenset:
    """Parse a fact list against ``kb``'s signature."""
    return frozenset(parse_facts(text, kb.signature))


def strs(xs) -> list[str]:
    return sorted(str(x) for x in xs)


@pytest.fixture
def f1_kb() -> KnowledgeBase:
    return parse_kb((DATA / "racing.kb").read_text())


def chain_kb() -> KnowledgeBase:
    """T = {B isa C, C isa D, E isa D}, A = {B(a), E(a)}."""
    sig = Signature(frozenset("BCDE"))
    tbox = {
        ConceptInclusion(AtomicConcept("B"), AtomicConcept("C")),
        ConceptInclusion(AtomicConcept("C"), AtomicConcept("D")),
        ConceptInclusion(AtomicConcept("E"), AtomicConcept("D")),
    }
    return KnowledgeBase(sig, tbox, {ConceptAtom("B", "a"), ConceptAtom("E", "a")})


@pytest.fixture
def chain() -> KnowledgeBase:
    return chain_kb()


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
