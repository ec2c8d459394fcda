import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from pivotkit.farey import INF, IntegerMoebius, Slope, apply, translation
from pivotkit.halfplane import (
    EndInvariant, UHPoint, bracket, bracket_ends, extremal_length, hyp_dist, parse_end_invariant,
    parse_uhpoint, shortest_vertex, teich_sum,
)
from pivotkit.surd import CFPrefix, QuadSurd

from strategies import fractions, slopes

F = Fraction
pos_fractions = st.builds(Fraction, st.integers(1, 400), st.integers(1, 60))
points = st.builds(UHPoint, fractions, pos_fractions)


@pytest.mark.parametrize("x, y, expected", [
    (F(1, 5), F(37, 10), 2),
    (F(37, 10), F(1, 5), -2),
    (F(1, 2), F(5, 2), 1),
    (-1, 1, 2),
    (3, 3, 0),
    (F(-7, 3), F(1, 3), 2),
])
def test_bracket_frozen(x, y, expected):
    assert bracket(x, y) == expected


def test_bracket_ends_and_undefined():
    assert bracket_ends(F(1, 5), F(37, 10)) == (1, 3)
    with pytest.raises(ValueError):
        bracket(F(1, 4), F(3, 4))


def test_bracket_surd_endpoints():
    golden = QuadSurd(F(1, 2), F(1, 2), 5)
    assert bracket(golden, QuadSurd(0, 3, 2)) == 2  # 1.618 .. 4.243 -> 2 and 4


@given(fractions, fractions)
def test_bracket_bounds(x, y):
    assume(math.floor(max(x, y)) >= math.ceil(min(x, y)))
    b = bracket(x, y)
    assert b * (y - x) >= 0
    assert abs(y - x) - 2 < abs(b) <= abs(y - x)


@given(fractions, fractions, st.integers(-50, 50))
def test_bracket_translation_invariant(x, y, k):
    assume(math.floor(max(x, y)) >= math.ceil(min(x, y)))
    assert bracket(x + k, y + k) == bracket(x, y)


def test_hyp_dist_and_sum():
    assert hyp_dist(UHPoint(0, 1), UHPoint(0, 2)) == pytest.approx(math.log(2), abs=1e-15)
    assert teich_sum([UHPoint(1, 2), UHPoint(3, 1)]) == UHPoint(4, 3)
    with pytest.raises(ValueError):
        teich_sum([])


def test_uhpoint_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        UHPoint(0, -1)
    with pytest.raises(ValueError):
        parse_uhpoint("3")


def test_parse_uhpoint_exact():
    z = parse_uhpoint("1/2+3/4i")
    assert (z.x, z.y) == (F(1, 2), F(3, 4)) and z.exact
    assert parse_uhpoint("2i") == UHPoint(0, 2)


@pytest.mark.parametrize("text, kind", [
    ("2i", "interior"), ("1/2+i", "interior"), ("inf", "rational"), ("-3/7", "rational"),
    ("(1+sqrt(5))/2", "irrational"), ("[0;2,3]", "irrational"), ("[1;1]period=1", "irrational"),
])
def test_parse_end_invariant(text, kind):
    nu = parse_end_invariant(text)
    assert nu.kind == kind
    assert nu.on_boundary == (kind != "interior")
    assert nu.truncated == (text == "[0;2,3]")


def test_end_invariant_images():
    m = translation(2)
    assert EndInvariant.rational(Slope(1, 3)).image(m) == Slope(7, 3)
    assert EndInvariant.interior(0, 1).image(m) == UHPoint(2, 1)
    assert EndInvariant.irrational(QuadSurd(0, 1, 2)).image(m) == QuadSurd(2, 1, 2)
    assert isinstance(EndInvariant.irrational(CFPrefix([0, 2, 3])).image(m), Fraction)


def test_shortest_vertex_frozen():
    assert shortest_vertex(UHPoint(0, 2)) == (INF, [])
    assert shortest_vertex(UHPoint(F(2, 5), F(1, 100)))[0] == Slope(2, 5)
    # the hexagonal point is equidistant from three slopes; the least in Stern-Brocot order wins
    assert shortest_vertex(UHPoint(F(1, 2), math.sqrt(3) / 2)) == (INF, [Slope(0, 1), Slope(1, 1)])
    assert shortest_vertex(UHPoint(F(1, 2), F(1, 2))) == (Slope(0, 1), [Slope(1, 1)])


@given(points, st.integers(-30, 30))
def test_shortest_vertex_translation_equivariant(z, k):
    s, alt = shortest_vertex(z)
    s2, alt2 = shortest_vertex(UHPoint(z.x + k, z.y))
    shift = translation(k)
    assert {s2, *alt2} == {apply(shift, v) for v in (s, *alt)}


@given(points, st.sampled_from([IntegerMoebius(0, -1, 1, 0), IntegerMoebius(2, 1, 1, 1), IntegerMoebius(1, 0, 3, 1)]))
def test_shortest_vertex_modular_equivariant(z, m):
    s, alt = shortest_vertex(z)
    s2, alt2 = shortest_vertex(apply(m, z))
    assert {s2, *alt2} == {apply(m, v) for v in (s, *alt)}


@given(points, st.lists(slopes, min_size=1, max_size=12))
def test_extremal_length_cross_check(z, others):
    s, _ = shortest_vertex(z)
    best = extremal_length(s, z)
    for t in others:
        assert best <= extremal_length(t, z)
