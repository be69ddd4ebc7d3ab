import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bellcut.analysis import is_valid, tightness_report
from bellcut.elimination import triangular_eliminate
from bellcut.families import (CliqueWebParams, WeightVector, catalog,
                              cliqueweb_bell, cliqueweb_bell_literal,
                              fix_observable, fix_observables, hypermetric,
                              hypermetric_bell, hypermetric_tightness_condition,
                              hypermetric_tightness_conditions, immm22,
                              includes_chsh, pure_weights)
from bellcut.model import CgIneq, ModelError, convert_cut_to_cg
from bellcut.symmetry import equivalent


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=1, max_size=3),
       st.lists(st.integers(-2, 2), min_size=1, max_size=2))
def test_hypermetric_bell_matches_pipeline(bA, bB):
    b = WeightVector(bA, bB)
    via_pipeline = convert_cut_to_cg(triangular_eliminate(hypermetric(b)))
    assert hypermetric_bell(b).normalized() == via_pipeline


@given(st.lists(st.integers(-2, 2), min_size=1, max_size=3),
       st.lists(st.integers(-2, 2), min_size=0, max_size=3))
def test_hypermetric_is_valid(bA, bB):
    assert is_valid(hypermetric(WeightVector(bA, bB)))[0]


def test_weight_vector():
    b = WeightVector((1, 1), (-1,))
    assert b.bX == 0 and b.entries() == [1, 1, -1, 0]
    with pytest.raises(ModelError):
        pure_weights(1, 2, 0)


def test_tightness_conditions():
    tail = WeightVector((1, 1, 1), (-1, -1, -1))
    kinds = {c.kind for c in hypermetric_tightness_conditions(tail)}
    assert kinds == {"pure", "negativeTail"}
    assert str(hypermetric_tightness_condition(tail)) == "negativeTail"
    assert str(hypermetric_tightness_condition(
        WeightVector((1, 1), (-1, -1)))) == "pure(2)"
    assert str(hypermetric_tightness_condition(
        WeightVector((2,), (-1,)))) == "none"


def test_conditions_imply_facets():
    for b in [WeightVector((1, 1), (-1, -1)), WeightVector((1, 1, 1), (-1, -1, -1))]:
        assert tightness_report(hypermetric(b)).is_facet


def test_cliqueweb_parameters():
    with pytest.raises(ModelError):
        CliqueWebParams(4, 2, 0)   # s - t != 2r
    with pytest.raises(ModelError):
        CliqueWebParams(2, 1, 0)   # t < 2
    with pytest.raises(ModelError):
        CliqueWebParams(3, 3, -1)
    CliqueWebParams(5, 3, 1)


def test_cliqueweb_forms():
    p0 = CliqueWebParams(3, 3, 0)
    assert cliqueweb_bell(p0) == cliqueweb_bell_literal(p0)
    p1 = CliqueWebParams(4, 2, 1)
    assert tightness_report(cliqueweb_bell(p1)).is_facet
    assert not is_valid(cliqueweb_bell_literal(p1))[0]


@pytest.mark.parametrize("m", [2, 3, 4])
def test_immm22_tight(m):
    report = tightness_report(immm22(m))
    assert report.is_facet
    assert equivalent(immm22(2), catalog("chsh")) is not None


def test_immm22_small_m():
    with pytest.raises(ModelError):
        immm22(1)


def test_fix_observable():
    chsh = catalog("chsh")
    # A2 = 0 removes its row; A1 = 1 moves its row onto Bob's marginals
    zero = fix_observable(chsh, "A2", 0)
    assert zero == CgIneq((-1,), (-1, 0), ((1, 1),), 0)
    one = fix_observable(chsh, "A1", 1)
    assert one == CgIneq((0,), (0, 1), ((1, -1),), 1)
    assert fix_observable(chsh, "B1", 0) == CgIneq((-1, 0), (0,), ((1,), (-1,)), 0)
    with pytest.raises(ModelError):
        fix_observable(chsh, "A3", 0)
    with pytest.raises(ModelError):
        fix_observable(chsh, "A1", 2)


def test_fix_i3322_gives_chsh():
    residual = fix_observables(catalog("i3322"), {"A3": 0, "B1": 0})
    assert equivalent(residual, catalog("chsh")) is not None


def test_includes_chsh():
    assert includes_chsh(catalog("i3322")).status == "found"
    assert includes_chsh(catalog("chsh")).status == "found"
    assert includes_chsh(catalog("positive_probability")).status == "none"
    found = includes_chsh(immm22(3))
    assert found.status == "found"
    assert equivalent(found.residual, catalog("chsh")) is not None
