import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cyl1, doc
from tsspic import surfaces
from tsspic.model import (
    TssParseError,
    TssValidationError,
    build_graph,
    euler_characteristic,
    format_rational,
    parse_rational,
    parse_tss,
    serialize_tss,
    validate,
)


def test_parse_one_curve_cylinder():
    s = parse_tss(doc(False, [("A", 0, "-", "-1", 1), ("B", 0, "+", "1", 1)], [("Z", "44/7", "A", "B")]))
    assert len(s.leaves) == 2 and len(s.curves) == 1
    assert s.curve("Z").period == Fraction(44, 7)
    assert validate(s) == []


def test_parse_two_curve_cylinder():
    s = parse_tss(doc(False, [("L", 0, "+", "1", 1), ("M", 0, "-", "-1"), ("R", 0, "+", "1", 1)],
                      [("Z1", "1/2", "M", "L"), ("Z2", "1/2", "M", "R")]))
    assert len(s.leaves) == 3 and len(s.curves) == 2
    assert validate(s) == []


def test_dangling_reference():
    text = doc(False, [("A", 0, "-", "-1", 1), ("B", 0, "+", "1", 1)], [("Z", "1", "A", "L9")])
    with pytest.raises(TssParseError, match="dangling.*L9"):
        parse_tss(text)


@pytest.mark.parametrize("text, match", [
    ('{"closed": true, "leaves": [], "curves": [', "line 1 column"),
    ('{"closed": true, "leaves": [], "curves": [], "extra": 1}', "unknown field"),
    ('{"closed": true, "leaves": [{"id": "A", "genus": 0, "sign": "+", "volume": "1", "colour": 3}], "curves": []}',
     "unknown field"),
    (doc(True, [("A", 0, "-", "-1"), ("B", 0, "+", "1")], [("Z", "0", "A", "B")]), "positive"),
    (doc(True, [("A", 0, "-", "-1"), ("B", 0, "+", "1")], [("Z", "-3/2", "A", "B")]), "positive"),
    (doc(True, [("A", 0, "-", "-1"), ("B", 0, "+", "1")], [("Z", "1/0", "A", "B")]), "denominator"),
    (doc(True, [("A", 0, "-", "-1"), ("A", 0, "+", "1")], [("Z", "1", "A", "A")]), "duplicate"),
    ('{"closed": true, "leaves": [{"id": "A", "genus": 0, "sign": "+", "volume": 1.5}], "curves": []}', "string"),
    ('{"closed": 1, "leaves": [], "curves": []}', "boolean"),
    ('[1, 2]', "object"),
])
def test_parse_errors(text, match):
    with pytest.raises(TssParseError, match=match):
        parse_tss(text)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_parse_is_total(text):
    # anything may happen except an unexpected exception type
    try:
        parse_tss(text)
    except TssParseError:
        pass


def test_rationals():
    assert parse_rational("-6/4") == Fraction(-3, 2)
    assert parse_rational("7") == 7
    assert format_rational(Fraction(6, 4)) == "3/2"
    assert format_rational(Fraction(-4, 2)) == "-2"
    with pytest.raises(TssParseError):
        parse_rational("3/-2")
    with pytest.raises(TssParseError):
        parse_rational(0.5)


@given(st.fractions())
def test_rational_round_trip(x):
    y = parse_rational(format_rational(x))
    assert y == x and y.denominator > 0


def test_sphere_equator_valid():
    s = parse_tss(doc(True, [("P", 0, "+", "1"), ("N", 0, "-", "-1")], [("E", "1", "N", "P")]))
    assert validate(s) == []
    assert euler_characteristic(s) == 2


def test_sign_bipartiteness_violation():
    s = parse_tss(doc(True, [("P", 0, "-", "-1"), ("N", 0, "-", "-1")], [("E", "1", "N", "P")]))
    assert any("pos leaf P has sign -1" in v for v in validate(s))


def test_torus_two_parallel_euler():
    s = parse_tss(doc(True, [("A", 0, "+", "1"), ("B", 0, "-", "-1")],
                      [("Z1", "1", "B", "A"), ("Z2", "1", "B", "A")]))
    assert validate(s) == []
    assert euler_characteristic(s) == 0


def test_genus2_separating_euler():
    assert euler_characteristic(surfaces.genus2_separating()) == -2


@pytest.mark.parametrize("leaves, curves, closed, fragment", [
    ([("A", 0, "-", "-1"), ("B", 0, "+", "1")], [], True, "at least one zero curve"),
    ([("A", 0, "-", "1"), ("B", 0, "+", "1")], [("Z", "1", "A", "B")], True, "volume sign"),
    ([("A", 0, "-", "0"), ("B", 0, "+", "1")], [("Z", "1", "A", "B")], True, "nonzero"),
    ([("A", 0, "-", "-1", 1), ("B", 0, "+", "1")], [("Z", "1", "A", "B")], True, "free boundary on a closed"),
    ([("A", 0, "-", "-1"), ("B", 0, "+", "1"), ("C", 0, "+", "1")], [("Z", "1", "A", "B")], True,
     "not bounded"),
    ([("A", 0, "-", "-1"), ("B", 0, "+", "1"), ("C", 0, "-", "-1"), ("D", 0, "+", "1")],
     [("Z", "1", "A", "B"), ("W", "1", "C", "D")], True, "disconnected"),
])
def test_validation_violations(leaves, curves, closed, fragment):
    s = parse_tss(doc(closed, leaves, curves))
    problems = validate(s)
    assert any(fragment in p for p in problems), problems


def test_open_disc_with_odd_chi_is_valid():
    # a disc around a half-open annulus: chi = 1, one free circle
    s = parse_tss(doc(False, [("A", 0, "-", "-1"), ("B", 0, "+", "1", 1)], [("Z", "1", "A", "B")]))
    assert validate(s) == []
    assert euler_characteristic(s) == 1


def test_same_leaf_both_sides():
    s = parse_tss(doc(True, [("A", 1, "+", "1")], [("Z", "1", "A", "A")]))
    assert any("both sides" in p for p in validate(s))


def test_build_graph_one_curve_cylinder():
    g = build_graph(cyl1())
    assert [(v.genus, v.sign) for v in g.vertices] == [(0, -1), (0, 1)]
    (e,) = g.edges
    assert (g.vertex(e.tail).sign, g.vertex(e.head).sign) == (-1, 1)


def test_build_graph_two_curve_cylinder_path():
    g = build_graph(surfaces.shipped_example("cyl2"))
    signs = {v.id: v.sign for v in g.vertices}
    middle = [v for v in g.vertices if v.ends == 0]
    assert len(middle) == 1 and middle[0].sign == -1
    # path graph with both edges leaving the negative middle vertex
    assert all(e.tail == middle[0].id and signs[e.head] == 1 for e in g.edges)


def test_build_graph_torus_parallel_edges():
    g = build_graph(surfaces.torus_parallel(2))
    e1, e2 = g.edges
    assert (e1.tail, e1.head) == (e2.tail, e2.head)


def test_build_graph_rejects_invalid():
    s = parse_tss(doc(True, [("P", 0, "-", "-1"), ("N", 0, "-", "-1")], [("E", "1", "N", "P")]))
    with pytest.raises(TssValidationError):
        build_graph(s)


def test_shipped_round_trip(shipped):
    assert validate(shipped) == []
    assert parse_tss(serialize_tss(shipped)) == shipped
    g = build_graph(shipped)
    assert len(g.vertices) == len(shipped.leaves) and len(g.edges) == len(shipped.curves)
    for e in g.edges:
        assert g.vertex(e.tail).sign == -1 and g.vertex(e.head).sign == 1
    if shipped.closed:
        chi = euler_characteristic(shipped)
        assert chi % 2 == 0 and chi <= 2


@st.composite
def chain_surfaces(draw):
    """Random valid surfaces: cylinders and parallel-curve tori with random periods and volumes."""
    kind = draw(st.sampled_from(["cyl", "torus"]))
    pos = st.fractions(min_value=Fraction(1, 50), max_value=50)
    if kind == "cyl":
        n = draw(st.integers(1, 5))
        periods = draw(st.lists(pos, min_size=n, max_size=n))
        s = surfaces.cylinder(n, periods, first_sign=draw(st.sampled_from([1, -1])))
    else:
        n = 2 * draw(st.integers(1, 3))
        s = surfaces.torus_parallel(n, draw(st.lists(pos, min_size=n, max_size=n)))
    vols = [draw(pos) * lf.sign for lf in s.leaves]
    d = json.loads(serialize_tss(s))
    for lf, v in zip(d["leaves"], vols):
        lf["volume"] = format_rational(v)
    return parse_tss(json.dumps(d))


@settings(max_examples=100, deadline=None)
@given(chain_surfaces())
def test_serialize_round_trip_property(s):
    assert validate(s) == []
    assert parse_tss(serialize_tss(s)) == s
    g = build_graph(s)
    assert len(g.vertices) == len(s.leaves) and len(g.edges) == len(s.curves)
    assert all(g.vertex(e.tail).sign == -1 and g.vertex(e.head).sign == 1 for e in g.edges)
    if s.closed:
        assert euler_characteristic(s) % 2 == 0 and euler_characteristic(s) <= 2
