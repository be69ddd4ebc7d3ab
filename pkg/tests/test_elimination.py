import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcut.analysis import is_valid, tightness_report
from bellcut.elimination import (CensusOptions, census, census_class_counts,
                                 eliminate_with_triangle, labellings,
                                 support_nodes, triangular_eliminate)
from bellcut.families import catalog
from bellcut.model import (COMPLETE, TRIPARTITE, CutIneq, Graph, ModelError,
                           Node, convert_cut_to_cg)


@st.composite
def complete_ineqs(draw):
    g = Graph(COMPLETE, draw(st.integers(1, 3)), draw(st.integers(0, 2)))
    coeffs = draw(st.lists(st.integers(-3, 3), min_size=g.dim, max_size=g.dim))
    return CutIneq(g, coeffs, 0)


@given(complete_ineqs())
def test_fresh_nodes_carry_equal_magnitudes(ineq):
    te = triangular_eliminate(ineq)
    g = ineq.graph
    assert te.graph.kind == TRIPARTITE
    for j in range(g.nB + 1, te.graph.nB + 1):
        vals = [c for c in te.incident(Node("B", j)) if c]
        assert len(vals) == 2 and abs(vals[0]) == abs(vals[1])
    for i in range(g.nA + 1, te.graph.nA + 1):
        vals = [c for c in te.incident(Node("A", i)) if c]
        assert len(vals) == 2 and abs(vals[0]) == abs(vals[1])


@settings(max_examples=40, deadline=None)
@given(complete_ineqs())
def test_elimination_keeps_validity(ineq):
    # TE of a valid inequality is valid
    if is_valid(ineq)[0]:
        assert is_valid(triangular_eliminate(ineq))[0]


def test_no_intra_terms_is_unchanged():
    g = Graph(COMPLETE, 2, 2)
    ineq = CutIneq.from_terms(g, {"XA1": -1, "A1B1": 1, "A2B2": 1}, 0)
    te = triangular_eliminate(ineq)
    assert te.graph == Graph(TRIPARTITE, 2, 2)
    assert te.terms() == {k: v for k, v in ineq.terms().items()}


def test_full_creates_node_per_pair():
    g = Graph(COMPLETE, 3, 2)
    ineq = CutIneq.from_terms(g, {"A1A2": 1}, 0)
    assert triangular_eliminate(ineq).graph == Graph(TRIPARTITE, 3, 3)
    assert triangular_eliminate(ineq, full=True).graph == Graph(TRIPARTITE, 4, 5)


def test_pentagonal_gives_i3322():
    te = triangular_eliminate(catalog("pentagonal"))
    report = tightness_report(te)
    assert report.is_facet
    assert (te.graph.nA, te.graph.nB) == (3, 3)
    assert convert_cut_to_cg(te).mA == 3


def test_triangle_step():
    pent = catalog("pentagonal")
    step = eliminate_with_triangle(pent, "A1A2", "B3")
    assert step.graph.nB == pent.graph.nB + 1
    assert step.coeff(Node("A", 1), Node("A", 2)) == 0
    assert is_valid(step)[0]


def test_triangle_step_errors():
    pent = catalog("pentagonal")
    with pytest.raises(ModelError):
        eliminate_with_triangle(catalog("triangle"), "XA1", "B1")  # zero edge
    with pytest.raises(ModelError):
        eliminate_with_triangle(pent, "A1A2", "B5")  # not the next index
    with pytest.raises(ModelError):
        eliminate_with_triangle(pent, "A1A2", "A1")
    with pytest.raises(ModelError):
        eliminate_with_triangle(pent, "A1A2", "B3", sign_choice=0)


def test_labelling_options():
    tri = catalog("triangle")
    support = support_nodes(tri)
    n = len(support)
    every = list(labellings(tri))
    # each choice of X (or none) times 2^(remaining) party bits
    assert len(every) == n * 2 ** (n - 1) + 2 ** n
    inside = list(labellings(tri, CensusOptions(allow_x_outside_support=False)))
    assert len(inside) == n * 2 ** (n - 1)
    both = list(labellings(tri, CensusOptions(allow_empty_party=False)))
    assert all(min(lab.sizes) >= 1 for lab in both)


def test_census_small():
    tri = CutIneq.from_terms(Graph(COMPLETE, 2, 0),
                             {"XA1": -1, "XA2": -1, "A1A2": 1}, 0)
    result = census(3, [tri])
    assert result.count == 2
    assert len(result.dropped) == 2
    assert all(s.outcome == "ok" for s in result.spot_checks)
    kept = census(3, [tri], CensusOptions(drop_nonfacets=False))
    assert kept.count == 4
    assert sum(census_class_counts(result).values()) == 2
    with pytest.raises(ModelError):
        census(3, [])
