"""WIDTIO insertion and deletion of ground facts.

Both operators return the result ABox fully closed, so two results are
logically equivalent exactly when their ABoxes are equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .model import Atom, KnowledgeBase, sorted_atoms
from .reasoner import (
    PreconditionError,
    ViolationSet,
    closure,
    compile_tbox,
    is_satisfiable,
    violation_sets,
)


@dataclass(frozen=True)
class EvolutionResult:
    kb: KnowledgeBase
    dropped: frozenset = frozenset()
    retained_new: frozenset = frozenset()
    no_op: bool = False
    fired_violations: tuple[ViolationSet, ...] = ()
    added: frozenset = frozenset()
    diagnostics: tuple[str, ...] = field(default=())

    @property
    def atoms(self) -> frozenset:
        return self.kb.abox


def accomplishes_insertion(tbox, candidate: Iterable[Atom], facts: Iterable[Atom]) -> bool:
    candidate = list(candidate)
    return is_satisfiable(tbox, candidate) and set(facts) <= closure(tbox, candidate).atoms


def accomplishes_deletion(tbox, candidate: Iterable[Atom], facts: Iterable[Atom]) -> bool:
    candidate = list(candidate)
    return is_satisfiable(tbox, candidate) and not set(facts) <= closure(tbox, candidate).atoms


def _result(kb: KnowledgeBase, before: frozenset, after: frozenset, **kw) -> EvolutionResult:
    return EvolutionResult(
        kb=kb.with_abox(after),
        dropped=before - after,
        added=after - before,
        **kw,
    )


def _check_kb(kb: KnowledgeBase) -> None:
    if not is_satisfiable(kb.tbox, kb.abox):
        raise PreconditionError("unsat-kb", "the input knowledge base is unsatisfiable")


def compute_deletion(kb: KnowledgeBase, facts: Iterable[Atom]) -> EvolutionResult:
    """Remove ``facts`` from ``kb`` under WIDTIO semantics.

    Raises PreconditionError(unsat-kb | unsat-facts).
    """
    idx = compile_tbox(kb.tbox)
    facts = set(facts)
    _check_kb(kb)
    if not is_satisfiable(idx, facts):
        raise PreconditionError("unsat-facts", "the facts to delete are unsatisfiable with the TBox")
    before = closure(idx, kb.abox).atoms
    if not facts or not facts <= before:
        # the input already fails to entail F, and nothing closer does
        return _result(kb, before, before, no_op=True)

    reps: list[Atom] = []
    for f in sorted_atoms(facts):
        if not any(f in idx.consequences(r) and r in idx.consequences(f) for r in reps):
            reps.append(f)
    targets = [
        f for f in reps if not any(g != f and f in idx.consequences(g) for g in reps)
    ]
    removed = {g for g in before if any(f in idx.consequences(g) for f in targets)}
    return _result(kb, before, before - removed)


def compute_insertion(kb: KnowledgeBase, facts: Iterable[Atom]) -> EvolutionResult:
    """Add ``facts`` to ``kb`` under WIDTIO semantics.

    If the facts are unsatisfiable with the TBox the KB is returned
    unchanged (closed) with ``no_op`` set. Raises PreconditionError(unsat-kb).
    """
    idx = compile_tbox(kb.tbox)
    facts = set(facts)
    _check_kb(kb)
    before = closure(idx, kb.abox).atoms
    if not is_satisfiable(idx, facts):
        return _result(
            kb, before, before, no_op=True, diagnostics=("facts unsatisfiable with the TBox",)
        )
    new = closure(idx, facts).atoms
    candidates = before - new
    fired: list[ViolationSet] = []
    doomed: set = set()
    sat_cache: dict = {}
    for v in violation_sets(idx, before | new):
        hit = False
        for alpha in v.atoms & candidates:
            rest = frozenset(facts | (v.atoms - {alpha}))
            ok = sat_cache.get(rest)
            if ok is None:
                ok = sat_cache[rest] = is_satisfiable(idx, rest)
            if ok:
                doomed.add(alpha)
                hit = True
        if hit:
            fired.append(v)
    after = closure(idx, facts | (before - doomed)).atoms
    return _result(
        kb,
        before,
        after,
        retained_new=new,
        no_op=after == before,
        fired_violations=tuple(fired),
    )
