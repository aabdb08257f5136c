from __future__ import annotations

import random

import pytest

from conftest import atoms, strs
from dlevo.evolution import (
    accomplishes_deletion,
    accomplishes_insertion,
    compute_deletion,
    compute_insertion,
)
from dlevo.model import (
    AtomicConcept,
    ConceptAtom,
    ConceptInclusion,
    KnowledgeBase,
    RoleAtom,
    RoleExpr,
    RoleInclusion,
    Signature,
)
from dlevo.parser import parse_kb, serialize_kb
from dlevo.reasoner import PreconditionError, closure, is_satisfiable
from kbgen import random_case

F1 = "RD(p). OD(b). mf(b,t1)."
K1 = "RD(p). OD(b). mf(b,t1). TM(s). mf(s,t1)."
K3 = "RD(p). OD(b). mf(b,t1). TM(s)."


def cl(kb, a) -> frozenset:
    return closure(kb.tbox, a).atoms


def test_insertion_golden_racing(f1_kb):
    r = compute_insertion(f1_kb, atoms(f1_kb, F1))
    assert r.atoms == cl(f1_kb, atoms(f1_kb, K3))
    assert strs(r.atoms) == ["FT(t1)", "OD(b)", "RD(p)", "TM(b)", "TM(s)", "mf(b,t1)"]
    assert strs(r.dropped) == ["OD(s)", "TD(b)", "TM(p)", "mf(s,t1)"]
    assert strs(r.added) == ["OD(b)", "RD(p)", "mf(b,t1)"]
    assert not r.no_op
    fired = {str(v.violated) for v in r.fired_violations}
    assert {"RD ISA not TM", "id OD: mf", "OD ISA not TD"} <= fired


def test_insertion_without_conflict_is_union(f1_kb):
    tm_c = atoms(f1_kb, "TM(c).")
    r = compute_insertion(f1_kb, tm_c)
    assert r.atoms == cl(f1_kb, f1_kb.abox | tm_c)
    assert {ConceptAtom("TD", "b"), ConceptAtom("TM", "p")} <= r.atoms
    assert r.dropped == frozenset()


def test_insertion_of_entailed_facts_changes_nothing(f1_kb):
    r = compute_insertion(f1_kb, atoms(f1_kb, "TM(s). FT(t1)."))
    assert r.atoms == cl(f1_kb, f1_kb.abox)
    assert r.no_op and not r.fired_violations


def test_insertion_unsat_facts_is_noop(f1_kb):
    r = compute_insertion(f1_kb, atoms(f1_kb, "RD(q). TM(q)."))
    assert r.no_op and r.atoms == cl(f1_kb, f1_kb.abox)
    assert r.diagnostics


def test_deletion_golden_chain(chain):
    r = compute_deletion(chain, {ConceptAtom("C", "a"), ConceptAtom("D", "a")})
    assert strs(r.atoms) == ["D(a)", "E(a)"]
    assert r.atoms == cl(chain, {ConceptAtom("E", "a")})
    assert strs(r.dropped) == ["B(a)", "C(a)"]


def test_deletion_is_not_iterated_single_deletion(chain):
    batch = compute_deletion(chain, [ConceptAtom("C", "a"), ConceptAtom("D", "a")])
    first = compute_deletion(chain, [ConceptAtom("C", "a")])
    second = compute_deletion(first.kb, [ConceptAtom("D", "a")])
    assert batch.atoms != second.atoms
    assert second.atoms == frozenset()


def test_deletion_golden_racing(f1_kb):
    k3 = f1_kb.with_abox(atoms(f1_kb, K3))
    r = compute_deletion(k3, atoms(f1_kb, "TM(b). mf(b,t1)."))
    assert strs(r.atoms) == ["FT(t1)", "OD(b)", "RD(p)", "TM(b)", "TM(s)"]


def test_deletion_of_absent_fact_is_noop(f1_kb):
    r = compute_deletion(f1_kb, atoms(f1_kb, "TM(s). OD(zz)."))
    assert r.no_op and r.atoms == cl(f1_kb, f1_kb.abox)
    assert compute_deletion(f1_kb, []).no_op


def test_deletion_preconditions(f1_kb):
    with pytest.raises(PreconditionError) as e:
        compute_deletion(f1_kb, atoms(f1_kb, "RD(q). TM(q)."))
    assert e.value.kind == "unsat-facts"
    bad = f1_kb.with_abox(f1_kb.abox | atoms(f1_kb, "RD(p)."))
    for op in (compute_deletion, compute_insertion):
        with pytest.raises(PreconditionError) as e:
            op(bad, atoms(f1_kb, "TM(q)."))
        assert e.value.kind == "unsat-kb"


def test_deletion_of_mutually_entailing_facts():
    p, q = RoleExpr("P"), RoleExpr("Q")
    kb = KnowledgeBase(
        Signature(roles=frozenset("PQ")),
        {RoleInclusion(p, q), RoleInclusion(q, p)},
        {RoleAtom("P", "a", "b")},
    )
    facts = {RoleAtom("P", "a", "b"), RoleAtom("Q", "a", "b")}
    r = compute_deletion(kb, facts)
    assert r.atoms == frozenset()
    assert accomplishes_deletion(kb.tbox, r.atoms, facts)


def test_accomplishes_examples(f1_kb):
    f1 = atoms(f1_kb, F1)
    assert accomplishes_insertion(f1_kb.tbox, atoms(f1_kb, K1), f1)
    assert not accomplishes_insertion(f1_kb.tbox, f1_kb.abox, f1)
    assert not accomplishes_deletion(f1_kb.tbox, f1_kb.abox, ())
    assert not accomplishes_deletion(f1_kb.tbox, (), ())


def test_order_and_duplicates_do_not_matter(f1_kb):
    fwd = [ConceptAtom("RD", "p"), ConceptAtom("OD", "b"), RoleAtom("mf", "b", "t1")]
    a = compute_insertion(f1_kb, fwd)
    b = compute_insertion(f1_kb, list(reversed(fwd)) + fwd)
    assert a == b


# -- randomized invariants -------------------------------------------------


def _cases(seed: int, n: int):
    rng = random.Random(seed)
    for _ in range(n):
        yield (*random_case(rng), rng)


def test_deletion_invariants_random():
    for kb, facts, _ in _cases(11, 200):
        before = cl(kb, kb.abox)
        r = compute_deletion(kb, facts)
        assert r.atoms == cl(kb, r.atoms)
        assert r.atoms <= before and r.dropped == before - r.atoms
        assert is_satisfiable(kb.tbox, r.atoms)
        if not r.no_op:
            assert not facts <= r.atoms
        # deleting again is a no-op
        again = compute_deletion(r.kb, facts)
        assert again.no_op and again.atoms == r.atoms
        if r.no_op:
            assert r.atoms == before


def test_insertion_invariants_random():
    for kb, facts, _ in _cases(12, 200):
        before = cl(kb, kb.abox)
        r = compute_insertion(kb, facts)
        assert r.atoms == cl(kb, r.atoms)
        assert accomplishes_insertion(kb.tbox, r.atoms, facts)
        assert r.atoms <= cl(kb, kb.abox | facts)
        if is_satisfiable(kb.tbox, kb.abox | facts):
            assert r.atoms == cl(kb, kb.abox | facts)
            assert not r.fired_violations
        again = compute_insertion(r.kb, facts)
        assert again.atoms == r.atoms
        assert r.no_op == (r.atoms == before)


def test_results_reparse_within_signature():
    for kb, facts, _ in _cases(13, 60):
        for r in (compute_insertion(kb, facts), compute_deletion(kb, facts)):
            assert parse_kb(serialize_kb(r.kb)) == r.kb


def _equivalent_superset(kb, rng):
    """A random subset of the closure added to the ABox: same closure."""
    extra = {a for a in cl(kb, kb.abox) if rng.random() < 0.5}
    return kb.with_abox(kb.abox | extra)


def test_syntax_independence_random():
    for kb, facts, rng in _cases(14, 100):
        other = _equivalent_superset(kb, rng)
        assert cl(kb, other.abox) == cl(kb, kb.abox)
        assert compute_insertion(kb, facts).atoms == compute_insertion(other, facts).atoms
        assert compute_deletion(kb, facts).atoms == compute_deletion(other, facts).atoms


def test_syntax_independence_on_reduced_abox(f1_kb):
    # mf(s,t1) alone already entails TM(s) and FT(t1)
    lean = f1_kb.with_abox(atoms(f1_kb, "OD(s). mf(s,t1). TD(b). TM(p)."))
    fat = f1_kb.with_abox(cl(f1_kb, lean.abox))
    f1 = atoms(f1_kb, F1)
    assert compute_insertion(lean, f1).atoms == compute_insertion(fat, f1).atoms


def test_concept_inclusion_chain_deletion_keeps_unrelated():
    sig = Signature(frozenset("ABX"))
    kb = KnowledgeBase(
        sig,
        {ConceptInclusion(AtomicConcept("A"), AtomicConcept("B"))},
        {ConceptAtom("A", "a"), ConceptAtom("X", "a"), ConceptAtom("A", "c")},
    )
    r = compute_deletion(kb, {ConceptAtom("B", "a")})
    assert strs(r.atoms) == ["A(c)", "B(c)", "X(a)"]
