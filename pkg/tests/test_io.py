import pytest
from hypothesis import given
from hypothesis import strategies as st

from bellcut.families import CATALOG_NAMES, catalog
from bellcut.io import (CG_MATRIX, RECORD, IneqRecord, ParseError, emit_ineq,
                        emit_records, parse_ineq, parse_records)
from bellcut.model import CgIneq, CutIneq, Graph, ModelError, TRIPARTITE


@pytest.mark.parametrize("name", CATALOG_NAMES)
def test_catalog_round_trip(name):
    ineq = catalog(name)
    assert parse_ineq(emit_ineq(ineq)) == ineq
    if isinstance(ineq, CgIneq):
        assert parse_ineq(emit_ineq(ineq, CG_MATRIX)) == ineq


@given(st.lists(st.integers(-5, 5), min_size=9, max_size=9),
       st.fractions(max_denominator=7))
def test_cg_round_trip(vals, rhs):
    ineq = CgIneq(vals[:2], vals[2:3], (vals[3:4], vals[4:5]), rhs)
    assert parse_ineq(emit_ineq(ineq)) == ineq
    assert parse_ineq(emit_ineq(ineq, CG_MATRIX)) == ineq


def test_records_with_metadata_and_comments():
    text = emit_records([IneqRecord(catalog("chsh"), {"name": "chsh"}),
                         IneqRecord(catalog("triangle"), {"name": "tri"})])
    text = "# two inequalities\n" + text
    records = parse_records(text)
    assert [r.meta["name"] for r in records] == ["chsh", "tri"]
    assert records[1].ineq == catalog("triangle")


def test_i3322_matrix_layout():
    text = emit_ineq(catalog("i3322"), CG_MATRIX)
    lines = text.splitlines()
    assert lines[0] == "cg-matrix mA=3 mB=3"
    assert lines[-1] == "<= 0"
    assert all("|" in line for line in lines[1:-1])
    assert len(lines) == 6


def test_zero_inequality():
    zero = CutIneq.zero(Graph(TRIPARTITE, 1, 1))
    text = emit_ineq(zero)
    assert text == "cut tripartite nA=1 nB=1\nrhs 0\n"
    assert parse_ineq(text) == zero


@pytest.mark.parametrize("text, line", [
    ("cut tripartite nA=2 nB=1\nrhs 0\nA1A2 1\n", 3),
    ("cut tripartite nA=1 nB=1\nrhs 0\nXA1 1\nXA1 2\n", 4),
    ("cg mA=1 mB=1\nrhs 0\nA1 1.5\n", 3),
    ("\n\nbell mA=1\n", 3),
    ("cg mA=1 mB=1\nrhs 0\nA2 1\n", 3),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as info:
        parse_records(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_single_inequality_expected():
    with pytest.raises(ParseError):
        parse_ineq(emit_records([IneqRecord(catalog("chsh")),
                                 IneqRecord(catalog("chsh"))]))


def test_matrix_needs_cg():
    with pytest.raises(ModelError):
        emit_ineq(catalog("triangle"), CG_MATRIX)
    with pytest.raises(ModelError):
        emit_ineq(catalog("chsh"), "xml")
    assert RECORD == "record"
