"""Closure, entailment and violation-set machinery over ground atoms.

Every derivation in DL-Lite_{A,id} over named individuals is single-premise,
so the TBox is compiled once into three reflexive-transitive hierarchies
(basic concepts, roles, attributes) and the closure of an atom set is the
union of the per-atom consequences. Negative inclusions, functionality,
value-domain inclusions and identifications never derive atoms; they are
checked against the positive closure.

Satisfiability is decided one non-positive assertion at a time: a set of
atoms is unsatisfiable iff it contains a violation set for some assertion
``t``, i.e. a minimal subset inconsistent with the positive inclusions plus
``t`` alone.
"""

from __future__ import annotations

import hashlib
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

from .model import (
    AtomicConcept,
    Atom,
    AttributeAtom,
    AttributeDomain,
    AttributeFunctionality,
    AttributeInclusion,
    AttributeStep,
    BasicConcept,
    ConceptAtom,
    ConceptInclusion,
    ExistsRole,
    Identification,
    Path,
    RoleAtom,
    RoleExpr,
    RoleInclusion,
    RoleStep,
    TBoxAssertion,
    TypedValue,
    ValueDomainInclusion,
    atoms_individuals,
    partition_tbox,
    role_atom,
    sorted_atoms,
)


def _reach(start, edges: dict) -> frozenset:
    seen = {start}
    todo = [start]
    while todo:
        for nxt in edges.get(todo.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
    return frozenset(seen)


def tbox_fingerprint(tbox: Iterable[TBoxAssertion]) -> str:
    text = "\n".join(sorted(str(t) for t in tbox))
    return hashlib.sha256(text.encode()).hexdigest()[:16]


class TBoxIndex:
    """Hierarchies and per-atom consequences of the positive part of a TBox."""

    def __init__(self, tbox: frozenset) -> None:
        self.tbox = tbox
        self.positive, self.negative, self.ids = partition_tbox(tbox)
        self.fingerprint = tbox_fingerprint(tbox)
        self._concept_edges: dict = defaultdict(set)
        self._role_edges: dict = defaultdict(set)
        self._attr_edges: dict = defaultdict(set)
        for t in self.positive:
            if isinstance(t, ConceptInclusion):
                self._concept_edges[t.lhs].add(t.rhs)
            elif isinstance(t, RoleInclusion):
                self._role_edges[t.lhs].add(t.rhs)
                self._role_edges[t.lhs.inverse].add(t.rhs.inverse)
                self._concept_edges[ExistsRole(t.lhs)].add(ExistsRole(t.rhs))
                self._concept_edges[ExistsRole(t.lhs.inverse)].add(ExistsRole(t.rhs.inverse))
            else:
                self._attr_edges[t.lhs].add(t.rhs)
                self._concept_edges[AttributeDomain(t.lhs)].add(AttributeDomain(t.rhs))
        self._concept_up: dict = {}
        self._role_up: dict = {}
        self._attr_up: dict = {}
        self._consequences: dict = {}
        self._empty: dict = {}

    # -- hierarchies ---------------------------------------------------------

    def concept_up(self, b: BasicConcept) -> frozenset:
        """All basic concepts subsuming ``b`` (reflexive)."""
        up = self._concept_up.get(b)
        if up is None:
            up = self._concept_up[b] = _reach(b, self._concept_edges)
        return up

    def role_up(self, q: RoleExpr) -> frozenset:
        up = self._role_up.get(q)
        if up is None:
            up = self._role_up[q] = _reach(q, self._role_edges)
        return up

    def attr_up(self, u: str) -> frozenset:
        up = self._attr_up.get(u)
        if up is None:
            up = self._attr_up[u] = _reach(u, self._attr_edges)
        return up

    # -- atoms ---------------------------------------------------------------

    @staticmethod
    def bases(atom: Atom) -> tuple[tuple[str, BasicConcept], ...]:
        """(individual, basic concept) memberships asserted directly by ``atom``."""
        if isinstance(atom, ConceptAtom):
            return ((atom.individual, AtomicConcept(atom.concept)),)
        if isinstance(atom, RoleAtom):
            return (
                (atom.subject, ExistsRole(RoleExpr(atom.role))),
                (atom.object, ExistsRole(RoleExpr(atom.role, True))),
            )
        return ((atom.subject, AttributeDomain(atom.attribute)),)

    def consequences(self, atom: Atom) -> frozenset:
        """Closure of the singleton ``{atom}`` under the positive inclusions."""
        out = self._consequences.get(atom)
        if out is not None:
            return out
        derived = {atom}
        for x, base in self.bases(atom):
            for b in self.concept_up(base):
                if isinstance(b, AtomicConcept):
                    derived.add(ConceptAtom(b.name, x))
        if isinstance(atom, RoleAtom):
            for q in self.role_up(RoleExpr(atom.role)):
                derived.add(role_atom(q, atom.subject, atom.object))
        elif isinstance(atom, AttributeAtom):
            for u in self.attr_up(atom.attribute):
                derived.add(AttributeAtom(u, atom.subject, atom.value))
        out = self._consequences[atom] = frozenset(derived)
        return out

    # -- emptiness under T+ plus one negative inclusion ----------------------

    def _role_empty(self, q: RoleExpr, t) -> bool:
        if not isinstance(t, RoleInclusion):
            return False
        up = self.role_up(q)
        return (t.lhs in up and t.rhs in up) or (t.lhs.inverse in up and t.rhs.inverse in up)

    def _attr_empty(self, u: str, t) -> bool:
        if not isinstance(t, AttributeInclusion):
            return False
        up = self.attr_up(u)
        return t.lhs in up and t.rhs in up

    def empty_concepts(self, t) -> frozenset:
        """Basic concepts with no instance in any model of T+ together with ``t``.

        An instance of such a concept, or an anonymous object it is forced
        to have, would violate ``t``. Only negative inclusions can make a
        concept empty; functionality, value domains and (local) IDs cannot.
        """
        cached = self._empty.get(t)
        if cached is not None:
            return cached
        if not isinstance(t, (ConceptInclusion, RoleInclusion, AttributeInclusion)):
            self._empty[t] = frozenset()
            return self._empty[t]
        universe = set(self._concept_edges)
        for targets in self._concept_edges.values():
            universe |= targets
        if isinstance(t, ConceptInclusion):
            universe |= {t.lhs, t.rhs}
        elif isinstance(t, RoleInclusion):
            universe |= {ExistsRole(t.lhs), ExistsRole(t.rhs)}
        else:
            universe |= {AttributeDomain(t.lhs), AttributeDomain(t.rhs)}
        for b in list(universe):
            if isinstance(b, ExistsRole):
                universe.add(ExistsRole(b.role.inverse))
        empty: set = set()
        for b in universe:
            up = self.concept_up(b)
            if isinstance(t, ConceptInclusion) and t.lhs in up and t.rhs in up:
                empty.add(b)
            for c in up:
                if isinstance(c, ExistsRole) and self._role_empty(c.role, t):
                    empty.add(b)
                elif isinstance(c, AttributeDomain) and self._attr_empty(c.attribute, t):
                    empty.add(b)
        changed = True
        while changed:
            changed = False
            for b in universe - empty:
                for c in self.concept_up(b):
                    if isinstance(c, ExistsRole) and ExistsRole(c.role.inverse) in empty:
                        empty.add(b)
                        changed = True
                        break
        self._empty[t] = frozenset(empty)
        return self._empty[t]


@lru_cache(maxsize=256)
def compile_tbox(tbox: frozenset) -> TBoxIndex:
    return TBoxIndex(frozenset(tbox))


def _index(tbox) -> TBoxIndex:
    if isinstance(tbox, TBoxIndex):
        return tbox
    return compile_tbox(frozenset(tbox))


# ---------------------------------------------------------------------------
# closure and entailment


@dataclass(frozen=True)
class ClosedAtomSet:
    atoms: frozenset
    tbox_fingerprint: str

    def __iter__(self):
        return iter(self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom) -> bool:
        return atom in self.atoms


def closure(tbox, atoms: Iterable[Atom]) -> ClosedAtomSet:
    """All atoms over the input's individuals entailed by T+ and ``atoms``."""
    idx = _index(tbox)
    out: set = set()
    for a in set(atoms):
        out |= idx.consequences(a)
    return ClosedAtomSet(frozenset(out), idx.fingerprint)


class PreconditionError(ValueError):
    """A documented precondition failed; ``kind`` names which one."""

    def __init__(self, kind: str, message: str) -> None:
        super().__init__(message)
        self.kind = kind


def entails_atom(tbox, premise: Atom, conclusion: Atom, check: bool = True) -> bool:
    """Whether ``<T, {premise}>`` entails ``conclusion``."""
    idx = _index(tbox)
    if check and not is_satisfiable(idx, [premise]):
        raise PreconditionError("unsat-premise", f"{{{premise}}} is unsatisfiable")
    return conclusion in idx.consequences(premise)


def subsumee(tbox, closed: Iterable[Atom], target: Atom) -> frozenset:
    """Atoms of ``closed`` that on their own entail ``target``."""
    idx = _index(tbox)
    return frozenset(g for g in closed if target in idx.consequences(g))


# ---------------------------------------------------------------------------
# memberships and paths


class _Facts:
    """Per-individual indexes of a positively closed atom set.

    Witness lists hold every atom of the set that on its own establishes
    the membership or edge, so enumeration built on them is complete.
    """

    def __init__(self, idx: TBoxIndex, atoms: Iterable[Atom]) -> None:
        self.idx = idx
        self.atoms = frozenset(atoms)
        self.members: dict = defaultdict(lambda: defaultdict(list))
        self.edges: dict = defaultdict(lambda: defaultdict(list))
        self.values: dict = defaultdict(lambda: defaultdict(lambda: defaultdict(list)))
        for a in self.atoms:
            for x, base in idx.bases(a):
                for b in idx.concept_up(base):
                    self.members[x][b].append(a)
            if isinstance(a, RoleAtom):
                # q holds on the same ordered pair as the asserted role
                for q in idx.role_up(RoleExpr(a.role)):
                    self.edges[a.subject][(q, a.object)].append(a)
                    self.edges[a.object][(q.inverse, a.subject)].append(a)
            elif isinstance(a, AttributeAtom):
                for u in idx.attr_up(a.attribute):
                    self.values[a.subject][u][a.value].append(a)

    def witnesses(self, x, b: BasicConcept) -> list:
        return self.members.get(x, {}).get(b, [])

    def step_pairs(self, step) -> dict:
        """x -> list of (y, support) for one path step."""
        rel: dict = defaultdict(list)
        if isinstance(step, RoleStep):
            for x, out in self.edges.items():
                for (q, y), ws in out.items():
                    if q == step.role:
                        rel[x].extend((y, frozenset([w])) for w in ws)
        elif isinstance(step, AttributeStep):
            for x, by_attr in self.values.items():
                for v, ws in by_attr.get(step.attribute, {}).items():
                    rel[x].extend((v, frozenset([w])) for w in ws)
        else:
            for x, by_concept in self.members.items():
                for w in by_concept.get(step.concept, []):
                    rel[x].append((x, frozenset([w])))
        return rel

    def path_relation(self, path: Path) -> dict:
        """x -> {filler: [minimal supports]} for a whole path."""
        rel = self.step_pairs(path.steps[0])
        for step in path.steps[1:]:
            nxt = self.step_pairs(step)
            joined: dict = defaultdict(list)
            for x, pairs in rel.items():
                for y, s1 in pairs:
                    for z, s2 in nxt.get(y, ()):
                        joined[x].append((z, s1 | s2))
            rel = joined
        out: dict = {}
        for x, pairs in rel.items():
            by_filler: dict = defaultdict(set)
            for y, s in pairs:
                by_filler[y].add(s)
            out[x] = {y: _minimal_sets(ss) for y, ss in by_filler.items()}
        return out


def _minimal_sets(sets: Iterable[frozenset]) -> list[frozenset]:
    ordered = sorted(set(sets), key=len)
    keep: list[frozenset] = []
    for s in ordered:
        if not any(k <= s for k in keep):
            keep.append(s)
    return keep


def member_basic(atoms: Iterable[Atom], b: BasicConcept, x: str, tbox=()) -> tuple[bool, frozenset]:
    """Whether ``x`` is an instance of ``b`` given ``atoms``, plus witnesses.

    Every returned witness is a single atom that establishes the membership
    on its own. With an empty TBox only syntactic membership counts.
    """
    ws = _Facts(_index(tbox), atoms).witnesses(x, b)
    return bool(ws), frozenset(ws)


@dataclass(frozen=True)
class PathMatch:
    source: str
    target: str | TypedValue
    support: frozenset


def eval_path(atoms: Iterable[Atom], path: Path, tbox=()) -> frozenset[PathMatch]:
    """Pairs connected by ``path``, one entry per minimal support set."""
    rel = _Facts(_index(tbox), atoms).path_relation(path)
    return frozenset(
        PathMatch(x, y, s) for x, fillers in rel.items() for y, ss in fillers.items() for s in ss
    )


# ---------------------------------------------------------------------------
# violation sets


@dataclass(frozen=True)
class ViolationSet:
    violated: TBoxAssertion
    atoms: frozenset = field(default_factory=frozenset)

    def sort_key(self) -> tuple:
        return (str(self.violated), [str(a) for a in sorted_atoms(self.atoms)])

    def __str__(self) -> str:
        return f"{self.violated}: " + " ".join(f"{a}." for a in sorted_atoms(self.atoms))


def _clash_candidates(facts: _Facts, t) -> Iterator[frozenset]:
    """Subsets of ``facts`` inconsistent with T+ and ``t``, not necessarily minimal.

    Every minimal violation set for ``t`` inside the facts is yielded
    exactly as one of the candidates.
    """
    idx = facts.idx
    empty = idx.empty_concepts(t)
    if empty:
        for x, by_concept in facts.members.items():
            for b in empty & by_concept.keys():
                for w in by_concept[b]:
                    yield frozenset([w])
    if isinstance(t, ConceptInclusion):
        for by_concept in facts.members.values():
            if t.lhs in by_concept and t.rhs in by_concept:
                for w1, w2 in itertools.product(by_concept[t.lhs], by_concept[t.rhs]):
                    yield frozenset([w1, w2])
    elif isinstance(t, RoleInclusion):
        for out in facts.edges.values():
            for (q, y), ws1 in out.items():
                if q == t.lhs:
                    for w1, w2 in itertools.product(ws1, out.get((t.rhs, y), ())):
                        yield frozenset([w1, w2])
    elif isinstance(t, AttributeInclusion):
        for by_attr in facts.values.values():
            if t.lhs in by_attr and t.rhs in by_attr:
                for v, ws1 in by_attr[t.lhs].items():
                    for w1, w2 in itertools.product(ws1, by_attr[t.rhs].get(v, ())):
                        yield frozenset([w1, w2])
    elif isinstance(t, AttributeFunctionality):
        for by_attr in facts.values.values():
            vals = by_attr.get(t.attribute)
            if vals and len(vals) > 1:
                for v1, v2 in itertools.combinations(vals, 2):
                    for w1, w2 in itertools.product(vals[v1], vals[v2]):
                        yield frozenset([w1, w2])
    elif isinstance(t, ValueDomainInclusion):
        if t.datatype != "top":
            for by_attr in facts.values.values():
                for v, ws in by_attr.get(t.attribute, {}).items():
                    if v.datatype != t.datatype:
                        for w in ws:
                            yield frozenset([w])
    elif isinstance(t, Identification):
        yield from _id_candidates(facts, t)


def _id_candidates(facts: _Facts, t: Identification) -> Iterator[frozenset]:
    rels = [facts.path_relation(p) for p in t.paths]
    # index the most selective length-1 path by filler to find candidate pairs
    anchor = min(
        (i for i, p in enumerate(t.paths) if p.length == 1),
        key=lambda i: sum(len(f) for f in rels[i].values()),
    )
    by_filler: dict = defaultdict(set)
    for x, fillers in rels[anchor].items():
        if facts.witnesses(x, t.concept):
            for c in fillers:
                by_filler[c].add(x)
    pairs: set = set()
    for xs in by_filler.values():
        if len(xs) > 1:
            pairs.update(itertools.combinations(sorted(xs), 2))
    for a, b in sorted(pairs):
        per_path = []
        for rel in rels:
            fa, fb = rel.get(a, {}), rel.get(b, {})
            options = [
                sa | sb for c in fa.keys() & fb.keys() for sa in fa[c] for sb in fb[c]
            ]
            if not options:
                break
            per_path.append(_minimal_sets(options))
        else:
            for combo in itertools.product(*per_path):
                support = frozenset().union(*combo)
                yield from _with_memberships(facts, t.concept, a, b, support)


def _with_memberships(facts: _Facts, concept, a, b, support: frozenset) -> Iterator[frozenset]:
    choices = []
    for x in (a, b):
        ws = facts.witnesses(x, concept)
        inside = [w for w in ws if w in support]
        # a witness already in the support makes any other choice non-minimal
        choices.append([None] if inside else ws)
    for wa, wb in itertools.product(*choices):
        yield support | {w for w in (wa, wb) if w is not None}


def _clashes(idx: TBoxIndex, t, atoms: Iterable[Atom]) -> bool:
    facts = _Facts(idx, closure(idx, atoms).atoms)
    return next(_clash_candidates(facts, t), None) is not None


def _minimize(idx: TBoxIndex, t, atoms: frozenset) -> frozenset:
    current = set(atoms)
    for a in sorted_atoms(atoms):
        trial = current - {a}
        if trial and _clashes(idx, t, trial):
            current = trial
    return frozenset(current)


def violation_sets(tbox, atoms: Iterable[Atom]) -> list[ViolationSet]:
    """Every minimal violation set inside ``atoms`` (which must be T-closed)."""
    idx = _index(tbox)
    facts = _Facts(idx, atoms)
    found: set = set()
    for t in sorted(idx.negative | idx.ids, key=str):
        seen: set = set()
        for cand in _clash_candidates(facts, t):
            if cand in seen:
                continue
            seen.add(cand)
            found.add(ViolationSet(t, _minimize(idx, t, cand)))
    return sorted(found, key=ViolationSet.sort_key)


def is_satisfiable(tbox, abox: Iterable[Atom]) -> bool:
    idx = _index(tbox)
    facts = _Facts(idx, closure(idx, abox).atoms)
    for t in idx.negative | idx.ids:
        if next(_clash_candidates(facts, t), None) is not None:
            return False
    return True


def clashes_with(tbox, t, atoms: Iterable[Atom]) -> bool:
    """Whether ``atoms`` are inconsistent with T+ together with ``t`` alone."""
    return _clashes(_index(tbox), t, atoms)


__all__ = [
    "ClosedAtomSet",
    "PathMatch",
    "PreconditionError",
    "TBoxIndex",
    "ViolationSet",
    "atoms_individuals",
    "clashes_with",
    "closure",
    "compile_tbox",
    "entails_atom",
    "eval_path",
    "is_satisfiable",
    "member_basic",
    "subsumee",
    "violation_sets",
]
