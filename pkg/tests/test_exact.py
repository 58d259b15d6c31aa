from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fraczeta.exact import (EMPTY, UNIT, Interval, IntervalSet, as_rational,
                            complement_in_unit, format_rational,
                            intersection_de_morgan, minkowski_sum_window,
                            symmetric_difference, union)
from oracles import as_tuples, grid, member, window_sum_member

DEN = 12
CHECK = grid(96)


@st.composite
def intervals(draw):
    a = draw(st.integers(0, DEN))
    b = draw(st.integers(a, DEN))
    if a == b:
        return Interval.point(F(a, DEN))
    return Interval(F(a, DEN), F(b, DEN), draw(st.booleans()), draw(st.booleans()))


sets = st.lists(intervals(), max_size=5).map(lambda ivs: (ivs, IntervalSet(ivs)))


def raw_member(ivs, x):
    return member([(i.lo, i.hi, i.lo_closed, i.hi_closed) for i in ivs], x)


def test_examples():
    a = IntervalSet([Interval.closed(0, F(1, 3)), Interval.closed(F(2, 3), 1)])
    assert a.length == F(2, 3)
    assert complement_in_unit(a) == IntervalSet([Interval.open(F(1, 3), F(2, 3))])
    assert symmetric_difference(a, a) == EMPTY
    assert union(IntervalSet([Interval(0, F(1, 2), True, False)]),
                 IntervalSet([Interval.closed(F(1, 2), 1)])) == UNIT
    # open ends at the same point do not merge
    s = IntervalSet([Interval(0, F(1, 2), True, False), Interval(F(1, 2), 1, False, True)])
    assert len(s) == 2 and F(1, 2) not in s


def test_validation():
    with pytest.raises(ValueError):
        Interval(F(1), F(0))
    with pytest.raises(ValueError):
        Interval(F(1, 2), F(1, 2), True, False)
    with pytest.raises(TypeError):
        as_rational(0.5)
    with pytest.raises(ValueError):
        IntervalSet([Interval.closed(-1, 1)]).complement_in_unit()
    with pytest.raises(ValueError):
        minkowski_sum_window(UNIT, 0)
    assert format_rational(F(2)) == "2/1"


@given(sets)
def test_normalized(data):
    ivs, s = data
    comps = s.components
    for a, b in zip(comps, comps[1:]):
        assert a.hi < b.lo or (a.hi == b.lo and not a.hi_closed and not b.lo_closed)
    for x in CHECK:
        assert s.contains(x) == raw_member(ivs, x)


@given(sets, sets)
def test_boolean_ops_match_pointwise_oracle(d1, d2):
    (i1, a), (i2, b) = d1, d2
    u, x, d, n = a | b, a ^ b, a - b, a & b
    for p in CHECK:
        m1, m2 = raw_member(i1, p), raw_member(i2, p)
        assert u.contains(p) == (m1 or m2)
        assert x.contains(p) == (m1 != m2)
        assert d.contains(p) == (m1 and not m2)
        assert n.contains(p) == (m1 and m2)


@given(sets, sets)
def test_de_morgan_and_complement(d1, d2):
    a, b = d1[1], d2[1]
    assert intersection_de_morgan(a, b) == a & b
    assert complement_in_unit(complement_in_unit(a)) == a
    assert (a ^ b) == ((a - b) | (b - a))
    assert a.length + complement_in_unit(a).length == 1


@given(sets)
def test_json_round_trip(data):
    s = data[1]
    assert IntervalSet.from_json(s.to_json()) == s


@given(sets, st.integers(1, 3))
def test_minkowski_sum_oracle(data, k):
    s = data[1]
    eta = F(k, DEN)
    ws = minkowski_sum_window(s, eta)
    starts = as_tuples(s)
    for x in grid(48, F(0), F(1) + eta):
        assert ws.contains(x) == window_sum_member(starts, eta, x, 96), x
