from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcut.model import (COMPLETE, TRIPARTITE, CgIneq, CutIneq, Graph,
                           ModelError, Node, X, convert_cg_to_cut,
                           convert_cut_to_cg, cut_value, enumerate_cuts,
                           evaluate, parse_edge_label, to_complete,
                           to_tripartite)
from bellcut.rank import bareiss_rank, exact_rank, rank_mod_p


@st.composite
def cg_ineqs(draw, max_side=3):
    mA = draw(st.integers(1, max_side))
    mB = draw(st.integers(1, max_side))
    val = st.integers(-3, 3)
    alice = draw(st.lists(val, min_size=mA, max_size=mA))
    bob = draw(st.lists(val, min_size=mB, max_size=mB))
    joint = [draw(st.lists(val, min_size=mB, max_size=mB)) for _ in range(mA)]
    return CgIneq(alice, bob, joint, draw(val))


@st.composite
def tripartite_ineqs(draw, max_side=3):
    g = Graph(TRIPARTITE, draw(st.integers(1, max_side)),
              draw(st.integers(1, max_side)))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=g.dim, max_size=g.dim))
    return CutIneq(g, coeffs, draw(st.integers(-3, 3)))


@given(cg_ineqs())
def test_cg_round_trip(ineq):
    # both directions return primitive integer vectors
    assert convert_cut_to_cg(convert_cg_to_cut(ineq)) == ineq.normalized()


@given(tripartite_ineqs())
def test_cut_round_trip(ineq):
    assert convert_cg_to_cut(convert_cut_to_cg(ineq)) == ineq.normalized()


@settings(max_examples=30)
@given(cg_ineqs(max_side=2))
def test_cg_value_matches_cut_value(ineq):
    cut = convert_cg_to_cut(ineq)
    slack_cg, slack_cut = [], []
    for c in enumerate_cuts(cut.graph):
        alice = [int(Node("A", i) in c) for i in range(1, ineq.mA + 1)]
        bob = [int(Node("B", j) in c) for j in range(1, ineq.mB + 1)]
        slack_cg.append(ineq.rhs - ineq.evaluate(alice, bob))
        slack_cut.append(cut.rhs - evaluate(cut, c))
    # the two slack vectors differ by one positive factor
    nonzero = [(a, b) for a, b in zip(slack_cg, slack_cut) if a or b]
    if nonzero:
        a0, b0 = nonzero[0]
        assert a0 * b0 > 0
        assert all(a * b0 == b * a0 for a, b in zip(slack_cg, slack_cut))


def test_cut_value_matches_evaluate():
    g = Graph(COMPLETE, 2, 1)
    ineq = CutIneq(g, range(g.dim), 0)
    for c in enumerate_cuts(g):
        assert cut_value(ineq, c) == evaluate(ineq, c)
    with pytest.raises(ModelError):
        evaluate(ineq, {X})


def test_chsh_known_conversion():
    chsh = CgIneq((-1, 0), (-1, 0), ((1, 1), (1, -1)), 0)
    cut = convert_cg_to_cut(chsh)
    assert cut.coeff(X, Node("A", 1)) != 0 or cut.coeff(Node("A", 1), Node("B", 1)) != 0
    assert max(evaluate(cut, c) for c in enumerate_cuts(cut.graph)) == 0


def test_complete_tripartite_embedding():
    g = Graph(TRIPARTITE, 2, 2)
    ineq = CutIneq(g, range(g.dim), 1)
    back = to_tripartite(to_complete(ineq))
    assert back == ineq


def test_intra_edge_rejected_on_tripartite():
    with pytest.raises(ModelError):
        CutIneq.from_terms(Graph(TRIPARTITE, 2, 1), {"A1A2": 1})


def test_bad_labels():
    with pytest.raises(ModelError):
        parse_edge_label("A0B1")
    with pytest.raises(ModelError):
        Graph("bipartite", 1, 1)
    with pytest.raises(ModelError):
        CgIneq((1,), (1, 2), ((1,),), 0)


def test_normalized_is_primitive():
    ineq = CutIneq(Graph(TRIPARTITE, 1, 1), (Fraction(1, 2), 1, Fraction(3, 2)), 1)
    assert ineq.normalized().coeffs == (1, 2, 3)
    assert ineq.normalized().rhs == 2


@settings(max_examples=60)
@given(st.lists(st.lists(st.integers(-4, 4), min_size=5, max_size=5),
                min_size=1, max_size=7))
def test_rank_methods_agree(rows):
    expected = np.linalg.matrix_rank(np.array(rows, dtype=float))
    assert bareiss_rank(rows) == expected
    assert rank_mod_p(np.array(rows, dtype=np.int64)) == expected
    assert exact_rank(np.array(rows, dtype=np.int64)) == expected
