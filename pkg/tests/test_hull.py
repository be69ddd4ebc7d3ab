import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcut.hull import (NotFullDimensional, cut_points, cut_polytope_facets,
                          enumerate_facets, parse_points)
from bellcut.model import COMPLETE, Graph, ModelError


def test_unit_square():
    facets = enumerate_facets([(0, 0), (1, 0), (0, 1), (1, 1)])
    assert sorted(facets) == sorted([((-1, 0), 0), ((0, -1), 0),
                                     ((1, 0), 1), ((0, 1), 1)])


def test_cube_with_interior_point():
    pts = list(itertools.product((0, 2), repeat=3)) + [(1, 1, 1)]
    assert len(enumerate_facets(pts)) == 6


def test_not_full_dimensional():
    with pytest.raises(NotFullDimensional):
        enumerate_facets([(0, 0, 0), (1, 0, 0), (0, 1, 0)])


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-3, 3)] * 3), min_size=4, max_size=12))
def test_points_satisfy_facets(points):
    try:
        facets = enumerate_facets(points)
    except NotFullDimensional:
        return
    for a, a0 in facets:
        values = [sum(x * y for x, y in zip(a, p)) for p in points]
        assert max(values) == a0
        # a facet is touched by at least dim affinely independent points
        assert sum(v == a0 for v in values) >= 3


@pytest.mark.parametrize("n, count, classes", [(3, 4, 1), (4, 16, 1), (5, 56, 2)])
def test_small_cut_polytopes(n, count, classes):
    rep = cut_polytope_facets(n)
    assert len(rep.facets) == count
    assert rep.class_count == classes
    assert rep.certified


def test_cut6_counts(hulls):
    rep = hulls[6]
    assert len(rep.facets) == 368
    assert rep.as_dict()["rhs_zero"] == 210
    assert sorted(c.count for c in rep.classes) == [80, 96, 192]


def test_range_and_long_running_guard():
    with pytest.raises(ModelError):
        cut_polytope_facets(2)
    with pytest.raises(ModelError):
        cut_polytope_facets(7)


def test_cut_points_and_parse():
    g = Graph(COMPLETE, 2, 0)
    assert len(cut_points(g)) == 4
    assert parse_points("# square\n0 0\n1,0\n\n0 1\n1 1\n")[1] == (1, 0)
    with pytest.raises(ModelError):
        parse_points("0 0\n1\n")
    with pytest.raises(ModelError):
        parse_points("0 x\n")
