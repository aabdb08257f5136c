"""Large generated KBs for the timing checks."""

from __future__ import annotations

import random

from dlevo.model import (
    AtomicConcept,
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
    Path,
    RoleAtom,
    RoleExpr,
    RoleInclusion,
    RoleStep,
    Signature,
    TypedValue,
    ValueDomainInclusion,
)

X = [f"X{i}" for i in range(10)]
Y = [f"Y{i}" for i in range(10)]
P = [f"P{i}" for i in range(5)]
Q = [f"Q{i}" for i in range(4)]
U = [f"U{i}" for i in range(3)]


def _c(name: str) -> AtomicConcept:
    return AtomicConcept(name)


def scale_tbox() -> frozenset:
    """50 assertions: two disjoint concept chains, role and attribute
    hierarchies, and three identifications."""
    t: set = set()
    for chain in (X, Y):
        t |= {ConceptInclusion(_c(chain[i + 1]), _c(chain[i])) for i in range(len(chain) - 1)}
    t.add(ConceptInclusion(_c("X0"), _c("Y0"), negated=True))
    t.add(ConceptInclusion(_c("W"), _c("Y0"), negated=True))
    t.add(ConceptInclusion(_c("X0"), _c("W"), negated=True))
    for i in range(len(P) - 1):
        t.add(RoleInclusion(RoleExpr(P[i + 1]), RoleExpr(P[i])))
    for p in P:
        t.add(ConceptInclusion(ExistsRole(RoleExpr(p)), _c(X[P.index(p) + 1])))
        t.add(ConceptInclusion(ExistsRole(RoleExpr(p, True)), _c("W")))
    for i in range(len(Q) - 1):
        t.add(RoleInclusion(RoleExpr(Q[i + 1]), RoleExpr(Q[i])))
    for q in Q:
        t.add(ConceptInclusion(ExistsRole(RoleExpr(q)), _c(Y[Q.index(q) + 1])))
    t |= {AttributeInclusion(u, "U0") for u in U[1:]}
    t.add(ConceptInclusion(AttributeDomain("U0"), _c("Y0")))
    t.add(AttributeFunctionality("U0"))
    t.add(ValueDomainInclusion("U0", "integer"))
    t.add(Identification(_c("X0"), (Path((RoleStep(RoleExpr("P0")),)),)))
    t.add(Identification(_c("Y0"), (Path((AttributeStep("U0"),)),)))
    t.add(Identification(_c("W"), (Path((RoleStep(RoleExpr("P0", True)),)),)))
    return frozenset(t)


SIG = Signature(frozenset(X + Y + ["W"]), frozenset(P + Q), frozenset(U))


def scale_kb(n_atoms: int, seed: int = 0) -> KnowledgeBase:
    """A satisfiable KB with about ``n_atoms`` ABox atoms."""
    rng = random.Random(seed)
    abox: set = set()
    i = 0
    while len(abox) < n_atoms:
        if i % 2 == 0:
            x = f"x{i}"
            abox.add(ConceptAtom(rng.choice(X), x))
            abox.add(RoleAtom(rng.choice(P), x, f"w{i}"))
        else:
            y = f"y{i}"
            abox.add(ConceptAtom(rng.choice(Y), y))
            abox.add(AttributeAtom(rng.choice(U), y, TypedValue(str(i), "integer")))
            abox.add(RoleAtom(rng.choice(Q), y, f"z{i}"))
        i += 1
    return KnowledgeBase(SIG, scale_tbox(), frozenset(abox))


def id_blowup_kb(n: int) -> tuple[KnowledgeBase, frozenset]:
    """``n`` identifications all violated by inserting the single fact B(b).

    Each violation can be repaired by retracting any of three atoms, so
    there are 3^n maximal consistent subsets.
    """
    concepts = ["B"] + [f"A{i}" for i in range(n)]
    roles = [f"R{i}" for i in range(n)]
    tbox: set = set()
    abox: set = set()
    for i in range(n):
        tbox.add(ConceptInclusion(_c("B"), _c(f"A{i}")))
        tbox.add(Identification(_c(f"A{i}"), (Path((RoleStep(RoleExpr(f"R{i}")),)),)))
        abox |= {
            ConceptAtom(f"A{i}", f"a{i}"),
            RoleAtom(f"R{i}", f"a{i}", f"c{i}"),
            RoleAtom(f"R{i}", "b", f"c{i}"),
        }
    kb = KnowledgeBase(Signature(frozenset(concepts), frozenset(roles)), tbox, abox)
    return kb, frozenset({ConceptAtom("B", "b")})
