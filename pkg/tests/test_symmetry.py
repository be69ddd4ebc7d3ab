import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcut.families import catalog
from bellcut.model import (COMPLETE, TRIPARTITE, CutIneq, Graph, ModelError,
                           Node, X, convert_cg_to_cut)
from bellcut.symmetry import (FULL, PARTY, BudgetExceeded, canonical_form,
                              class_key, classify, equivalent, party_swap,
                              permute, switch, verify_certificate)


def _random_party_perm(graph, rng, allow_swap):
    alice = list(range(1, graph.nA + 1))
    bob = list(range(1, graph.nB + 1))
    rng.shuffle(alice)
    rng.shuffle(bob)
    swap = allow_swap and rng.random() < 0.5
    pa, pb = ("B", "A") if swap else ("A", "B")
    perm = {X: X}
    perm.update({Node("A", i): Node(pa, k) for i, k in zip(range(1, graph.nA + 1), alice)})
    perm.update({Node("B", j): Node(pb, k) for j, k in zip(range(1, graph.nB + 1), bob)})
    return perm


def _disguise(ineq, seed):
    rng = random.Random(seed)
    moved = permute(ineq, _random_party_perm(ineq.graph, rng, True), PARTY)
    W = [n for n in moved.graph.observables if rng.random() < 0.5]
    return switch(moved, W).scaled(rng.choice([1, 2, 3]))


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["chsh", "i3322", "i3422_1", "i3422_2"]),
       st.integers(0, 10**6))
def test_canonical_key_invariant(name, seed):
    base = convert_cg_to_cut(catalog(name))
    other = _disguise(base, seed)
    assert class_key(base).key == class_key(other).key
    cert = equivalent(base, other)
    assert cert is not None
    assert verify_certificate(cert, base, other)


def test_inequivalent_facets():
    a, b = catalog("i3422_1"), catalog("i3422_2")
    assert equivalent(a, b) is None
    assert class_key(a).key != class_key(b).key


def test_switch_is_involution_and_validity_preserving():
    ineq = convert_cg_to_cut(catalog("i3322"))
    W = [Node("A", 1), Node("B", 3)]
    assert switch(switch(ineq, W), W) == ineq
    with pytest.raises(ModelError):
        switch(ineq, [X])


def test_full_mode_on_complete_graph():
    g = Graph(COMPLETE, 3, 0)
    tri = CutIneq.from_terms(g, {"A1A2": -1, "A1A3": -1, "A2A3": 1}, 0)
    other = CutIneq.from_terms(g, {"XA1": 1, "XA2": -1, "A1A2": -1}, 0)
    assert canonical_form(tri, FULL).key == canonical_form(other, FULL).key
    with pytest.raises(ModelError):
        permute(convert_cg_to_cut(catalog("chsh")), {X: Node("A", 1), Node("A", 1): X}, FULL)


def test_party_mode_fixes_x():
    ineq = CutIneq.zero(Graph(TRIPARTITE, 1, 1))
    with pytest.raises(ModelError):
        permute(ineq, {X: Node("A", 1), Node("A", 1): X}, PARTY)


def test_party_swap_changes_shape():
    ineq = convert_cg_to_cut(catalog("i3422_1"))
    swapped = party_swap(ineq)
    assert (swapped.graph.nA, swapped.graph.nB) == (ineq.graph.nB, ineq.graph.nA)
    assert party_swap(swapped) == ineq


def test_classify_groups_disguises():
    base = [convert_cg_to_cut(catalog(n)) for n in ("chsh", "i3322")]
    items = [base[0], _disguise(base[1], 1), _disguise(base[0], 2), base[1]]
    classes = classify(items)
    assert sorted(c.members for c in classes) == [[0, 2], [1, 3]]
    assert all(c.count == 2 for c in classes)


def test_budget():
    ineq = convert_cg_to_cut(catalog("i3322"))
    with pytest.raises(BudgetExceeded):
        canonical_form(ineq, PARTY, budget=1)
