"""Exhaustive reference implementation of minimal change and WIDTIO.

Nothing here touches the reasoner module. Entailment and consistency come
from a naive chase that builds a finite model (named individuals plus
anonymous witnesses for existentials) and scans it for clashes. Minimal
changes are found by enumerating every candidate ABox drawn from the
closures involved, so the cost is exponential and guarded by a bound on
the number of atoms.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .evolution import EvolutionResult
from .model import (
    AtomicConcept,
    Atom,
    AttributeAtom,
    AttributeDomain,
    AttributeFunctionality,
    AttributeInclusion,
    AttributeStep,
    ConceptAtom,
    ConceptInclusion,
    ExistsRole,
    Identification,
    KnowledgeBase,
    RoleAtom,
    RoleExpr,
    RoleInclusion,
    RoleStep,
    TypedValue,
    ValueDomainInclusion,
    is_positive,
    sorted_atoms,
)
from .reasoner import PreconditionError

DEFAULT_BOUND = 20


class BoundExceeded(RuntimeError):
    def __init__(self, size: int, bound: int) -> None:
        super().__init__(f"{size} atoms exceed the oracle bound of {bound}")
        self.size = size
        self.bound = bound


# ---------------------------------------------------------------------------
# naive chase


class _Model:
    def __init__(self, tbox: Iterable, atoms: Iterable[Atom]) -> None:
        tbox = list(tbox)
        self.plus = [t for t in tbox if is_positive(t)]
        roles = {t.lhs.name for t in self.plus if isinstance(t, RoleInclusion)}
        roles |= {t.rhs.name for t in self.plus if isinstance(t, RoleInclusion)}
        for t in self.plus:
            for b in (getattr(t, "lhs", None), getattr(t, "rhs", None)):
                if isinstance(b, ExistsRole):
                    roles.add(b.role.name)
        self.depth_limit = 2 * len(roles) + 2
        self.labels: dict = defaultdict(set)
        self.depth: dict = {}
        self.out: dict = defaultdict(set)  # element -> {(RoleExpr, element)}
        self.attrs: set = set()  # (attribute, element, value)
        for a in atoms:
            if isinstance(a, ConceptAtom):
                self._elem(a.individual)
                self.labels[a.individual].add(AtomicConcept(a.concept))
            elif isinstance(a, RoleAtom):
                self._elem(a.subject)
                self._elem(a.object)
                self._add_role(RoleExpr(a.role), a.subject, a.object)
            else:
                self._elem(a.subject)
                self.attrs.add((a.attribute, a.subject, a.value))
        self._run()

    def _elem(self, e, depth: int = 0) -> None:
        self.depth.setdefault(e, depth)
        self.labels[e]

    def _add_role(self, q: RoleExpr, x, y) -> bool:
        if (q, y) in self.out[x]:
            return False
        self.out[x].add((q, y))
        self.out[y].add((q.inverse, x))
        return True

    def _add_label(self, e, b) -> bool:
        if b in self.labels[e]:
            return False
        self.labels[e].add(b)
        return True

    def _run(self) -> None:
        changed = True
        while changed:
            changed = False
            for x in list(self.out):
                for q, _ in list(self.out[x]):
                    changed |= self._add_label(x, ExistsRole(q))
            for u, x, _ in list(self.attrs):
                changed |= self._add_label(x, AttributeDomain(u))
            for t in self.plus:
                if isinstance(t, ConceptInclusion):
                    for e in list(self.labels):
                        if t.lhs in self.labels[e]:
                            changed |= self._add_label(e, t.rhs)
                elif isinstance(t, RoleInclusion):
                    for x in list(self.out):
                        for q, y in list(self.out[x]):
                            if q == t.lhs:
                                changed |= self._add_role(t.rhs, x, y)
                else:
                    for u, x, v in list(self.attrs):
                        if u == t.lhs and (t.rhs, x, v) not in self.attrs:
                            self.attrs.add((t.rhs, x, v))
                            changed = True
            for e in list(self.labels):
                for b in list(self.labels[e]):
                    if isinstance(b, ExistsRole):
                        if any(q == b.role for q, _ in self.out[e]):
                            continue
                        if self.depth[e] >= self.depth_limit:
                            continue
                        child = ("anon", e, str(b.role))
                        self._elem(child, self.depth[e] + 1)
                        self._add_role(b.role, e, child)
                        changed = True
                    elif isinstance(b, AttributeDomain):
                        if not any(u == b.attribute and x == e for u, x, _ in self.attrs):
                            self.attrs.add((b.attribute, e, ("anonval", e, b.attribute)))
                            changed = True

    # -- reading the model back -------------------------------------------

    def named_atoms(self) -> frozenset:
        out: set = set()
        for e, ls in self.labels.items():
            if isinstance(e, str):
                out |= {ConceptAtom(b.name, e) for b in ls if isinstance(b, AtomicConcept)}
                for q, y in self.out[e]:
                    if isinstance(y, str) and not q.inverted:
                        out.add(RoleAtom(q.name, e, y))
        for u, x, v in self.attrs:
            if isinstance(x, str) and isinstance(v, TypedValue):
                out.add(AttributeAtom(u, x, v))
        return frozenset(out)

    def _fillers(self, x, path) -> set:
        current = {x}
        for step in path.steps:
            nxt = set()
            for e in current:
                if isinstance(step, RoleStep):
                    nxt |= {y for q, y in self.out[e] if q == step.role and isinstance(y, str)}
                elif isinstance(step, AttributeStep):
                    nxt |= {
                        v
                        for u, x2, v in self.attrs
                        if u == step.attribute and x2 == e and isinstance(v, TypedValue)
                    }
                elif step.concept in self.labels[e]:
                    nxt.add(e)
            current = nxt
        return current

    def violates(self, t) -> bool:
        if isinstance(t, ConceptInclusion):
            return any(t.lhs in ls and t.rhs in ls for ls in self.labels.values())
        if isinstance(t, RoleInclusion):
            return any(
                (t.lhs, y) in edges and (t.rhs, y) in edges
                for edges in self.out.values()
                for _, y in edges
            )
        if isinstance(t, AttributeInclusion):
            return any(
                u == t.lhs and (t.rhs, x, v) in self.attrs for u, x, v in self.attrs
            )
        if isinstance(t, AttributeFunctionality):
            seen: dict = defaultdict(set)
            for u, x, v in self.attrs:
                if u == t.attribute and isinstance(x, str) and isinstance(v, TypedValue):
                    seen[x].add(v)
            return any(len(vs) > 1 for vs in seen.values())
        if isinstance(t, ValueDomainInclusion):
            return t.datatype != "top" and any(
                u == t.attribute and isinstance(v, TypedValue) and v.datatype != t.datatype
                for u, _, v in self.attrs
            )
        if isinstance(t, Identification):
            inst = sorted(e for e, ls in self.labels.items() if isinstance(e, str) and t.concept in ls)
            fillers = {e: [self._fillers(e, p) for p in t.paths] for e in inst}
            return any(
                all(fa & fb for fa, fb in zip(fillers[a], fillers[b]))
                for a, b in itertools.combinations(inst, 2)
            )
        return False


def naive_closure(tbox, atoms: Iterable[Atom]) -> frozenset:
    """Named atoms true in the chased model of ``<T, atoms>``."""
    return _Model(tbox, atoms).named_atoms()


def naive_satisfiable(tbox, atoms: Iterable[Atom]) -> bool:
    """Scan the chased model for a violation of any non-positive assertion."""
    tbox = list(tbox)
    model = _Model(tbox, atoms)
    return not any(model.violates(t) for t in tbox if not is_positive(t))


def naive_violates(tbox, t, atoms: Iterable[Atom]) -> bool:
    """Whether ``atoms`` contradict the positive part of ``tbox`` together with ``t``."""
    return _Model(tbox, atoms).violates(t)


# ---------------------------------------------------------------------------
# enumeration


@dataclass(frozen=True)
class MinimalSet:
    closed_abox: frozenset
    kind: str


def _closure_table(singles: list[int]) -> np.ndarray:
    """Closure bitmask of every subset, indexed by subset bitmask."""
    table = np.zeros(1 << len(singles), dtype=np.int64)
    for i, s in enumerate(singles):
        half = 1 << i
        table[half : 2 * half] = table[:half] | s
    return table


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _fewer_changes(d1: frozenset, i1: frozenset, d2: frozenset, i2: frozenset) -> bool:
    return d1 < d2 or (d1 == d2 and i1 < i2)


def enumerate_minimal(
    kb: KnowledgeBase, facts: Iterable[Atom], kind: str, bound: int = DEFAULT_BOUND
) -> list[MinimalSet]:
    """All closed ABoxes accomplishing the change of ``facts`` minimally.

    Raises BoundExceeded when the closures involved hold more than ``bound``
    atoms, and PreconditionError(unsat-kb) for an unsatisfiable input.
    """
    if kind not in ("insertion", "deletion"):
        raise ValueError(f"unknown kind {kind!r}")
    tbox = list(kb.tbox)
    facts = frozenset(facts)
    if not naive_satisfiable(tbox, kb.abox):
        raise PreconditionError("unsat-kb", "the input knowledge base is unsatisfiable")
    before = naive_closure(tbox, kb.abox)
    new = naive_closure(tbox, facts)
    size = len(before | new)
    if size > bound:
        raise BoundExceeded(size, bound)

    if kind == "deletion":
        candidates = _deletion_candidates(tbox, before, facts)
    else:
        candidates = _insertion_candidates(tbox, before, new, facts)

    changes = {c: (before - c, c - before) for c in candidates}
    minimal = [
        c
        for c in candidates
        if not any(_fewer_changes(*changes[o], *changes[c]) for o in candidates)
    ]
    return [
        MinimalSet(c, kind) for c in sorted(minimal, key=lambda c: [str(a) for a in sorted_atoms(c)])
    ]


def _deletion_candidates(tbox, before: frozenset, facts: frozenset) -> set:
    universe = sorted_atoms(before)
    pos = {a: i for i, a in enumerate(universe)}
    singles = [sum(1 << pos[b] for b in naive_closure(tbox, [a])) for a in universe]
    table = _closure_table(singles)
    masks = np.arange(len(table), dtype=np.int64)
    if not facts <= before:
        fmask = -1  # no subset of the closure can contain F
    else:
        fmask = sum(1 << pos[f] for f in facts)
    keep = table == masks
    if fmask != -1:
        keep &= (masks & fmask) != fmask
    closed = sorted((int(m) for m in masks[keep]), key=_popcount, reverse=True)
    # subsets of a consistent closure are consistent; keep the inclusion-maximal ones
    maximal: list[int] = []
    for m in closed:
        if not any(m & ~k == 0 for k in maximal):
            maximal.append(m)
    out = set()
    for m in maximal:
        cand = frozenset(universe[i] for i in range(len(universe)) if m >> i & 1)
        assert naive_satisfiable(tbox, cand)
        out.add(cand)
    return out


def _insertion_candidates(tbox, before: frozenset, new: frozenset, facts: frozenset) -> set:
    if not naive_satisfiable(tbox, facts):
        return set()
    # atoms already entailed by the facts add nothing to a candidate
    universe = sorted_atoms(before - new)
    pos = {a: i for i, a in enumerate(universe)}
    singles = []
    for a in universe:
        singles.append(sum(1 << pos[b] for b in naive_closure(tbox, [a]) if b in pos))
    table = _closure_table(singles)
    order = sorted(range(len(table)), key=lambda m: -_popcount(m))
    found: list[int] = []
    verdict: dict[int, bool] = {}
    for m in order:
        if any(m & ~k == 0 for k in found):
            continue
        closed = int(table[m])
        ok = verdict.get(closed)
        if ok is None:
            atoms = [universe[i] for i in range(len(universe)) if closed >> i & 1]
            ok = verdict[closed] = naive_satisfiable(tbox, [*atoms, *facts])
        if ok:
            found.append(m)
    out = set()
    for m in found:
        sigma = [universe[i] for i in range(len(universe)) if m >> i & 1]
        out.add(naive_closure(tbox, [*sigma, *facts]))
    return out


def widtio(
    kb: KnowledgeBase, facts: Iterable[Atom], kind: str, bound: int = DEFAULT_BOUND
) -> EvolutionResult:
    """The WIDTIO result: intersection of all minimal accomplishing closures."""
    facts = frozenset(facts)
    tbox = list(kb.tbox)
    before = naive_closure(tbox, kb.abox)
    if not naive_satisfiable(tbox, facts):
        return EvolutionResult(kb.with_abox(before), no_op=True)
    minimal = enumerate_minimal(kb, facts, kind, bound)
    if not minimal:
        return EvolutionResult(kb.with_abox(before), no_op=True)
    after = frozenset.intersection(*(m.closed_abox for m in minimal))
    return EvolutionResult(
        kb.with_abox(after),
        dropped=before - after,
        added=after - before,
        retained_new=naive_closure(tbox, facts) if kind == "insertion" else frozenset(),
        no_op=after == before,
    )
