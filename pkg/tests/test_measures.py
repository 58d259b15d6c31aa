import math
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fraczeta.exact import Interval, IntervalSet, minkowski_sum_window
from fraczeta.measures import (Regularity, boundary_measure, classify_starts,
                               classify_window, measure_of, minus_inf_starts,
                               plus_inf_starts, regularity, window_start_set)
from fraczeta.strings import make_string
from oracles import DepthCounter


@pytest.fixture(scope="module")
def mu1():
    return boundary_measure(make_string("cantor", 6))


def test_measure_of_examples(mu1):
    assert measure_of(mu1, Interval.closed(F(1, 3), F(4, 9))) == 1
    assert measure_of(mu1, Interval.closed(F(1, 3), F(2, 3))) == 2
    assert measure_of(mu1, Interval.closed(F(0), F(1, 9))) == math.inf
    assert measure_of(mu1, Interval.closed(F(4, 9), F(5, 9))) == 0
    # accumulation at 1/3 is from the left only
    assert measure_of(mu1, Interval.closed(F(1, 3), F(1, 2))) == 1
    assert measure_of(mu1, Interval.closed(F(1, 3) - F(1, 10 ** 9), F(1, 2))) == math.inf
    with pytest.raises(ValueError):
        measure_of(mu1, Interval.closed(F(-1), F(1, 2)))


def test_regularity_values(mu1):
    assert regularity(mu1, Interval.closed(F(4, 9), F(5, 9))).kind == "+inf"
    assert regularity(mu1, Interval.closed(F(0), F(1, 9))).kind == "-inf"
    r = regularity(mu1, Interval.closed(F(1, 3), F(2, 3)))
    assert r.count == 2 and math.isclose(r.value, math.log(2) / math.log(F(1, 3)))
    assert Regularity.parse("2@1/9").matches(4, F(1, 81))
    assert not Regularity.parse("2@1/9").matches(3, F(1, 81))
    assert Regularity.parse("+inf").matches(0, F(1, 9))
    with pytest.raises(ValueError):
        regularity(mu1, Interval.point(F(1, 2)))


def test_known_start_sets():
    m1 = boundary_measure(make_string("omega1", 6))
    m2 = boundary_measure(make_string("omega2", 6))
    eta = F(1, 9)
    r = minkowski_sum_window(window_start_set(m1, eta, Regularity.minus_inf()), eta)
    assert r == IntervalSet([Interval(F(0), F(4, 9), True, False), Interval(F(5, 9), F(1), False, True)])
    r2 = minkowski_sum_window(window_start_set(m2, F(1, 27), Regularity.minus_inf()), F(1, 27))
    assert r2 == IntervalSet([Interval.closed(0, F(1, 27))])
    rp = minkowski_sum_window(window_start_set(m1, eta, Regularity.plus_inf()), eta)
    assert rp == IntervalSet([Interval.open(F(1, 3), F(2, 3))])


def test_resolution_guards():
    m = boundary_measure(make_string("cantor", 3))
    with pytest.raises(ValueError):
        classify_starts(m, F(1, 81))
    with pytest.raises(ValueError):
        window_start_set(m, F(1, 200), Regularity.plus_inf())
    deeper = boundary_measure(make_string("cantor", 3), min_eta=F(1, 81))
    assert deeper.count_resolution < F(1, 81)


GRID = 2 * 3 ** 5


@pytest.fixture(scope="module")
def cantor_oracle():
    return DepthCounter("cantor", 9, 13)


@given(st.integers(0, GRID), st.integers(3, GRID // 3))
def test_window_class_matches_depth_oracle(cantor_oracle, ci, ei):
    # starts and lengths on a 1/(2*3^5) grid keep window ends away from
    # Cantor points unless they are Cantor endpoints (see oracles.DepthCounter)
    m = boundary_measure(make_string("cantor", 6))
    c, eta = F(ci, GRID), F(ei, GRID)
    if c + eta > 1:
        return
    assert classify_window(m, c, eta) == cantor_oracle.classify(c, eta)


@given(st.integers(1, 60), st.sampled_from(["omega1", "omega2", "omega3"]))
def test_sweep_partition_consistent(k, gen):
    m = boundary_measure(make_string(gen, 7))
    eta = F(k, 243)
    if eta <= m.count_resolution or eta >= 1:
        return
    classes = classify_starts(m, eta)
    # the classes partition [0, 1 - eta]
    total = IntervalSet()
    for s in classes.values():
        assert not (total & s)
        total = total | s
    assert total == IntervalSet([Interval.closed(0, 1 - eta)])
    # spot-check each class at rational points
    for key, s in classes.items():
        for comp in s:
            for p in (comp.lo, comp.hi, (comp.lo + comp.hi) / 2):
                if comp.contains(p):
                    assert classify_window(m, p, eta) == key
    # the closed formulas agree with the sweep
    assert minus_inf_starts(m, eta) == classes.get("-inf", IntervalSet())
    if eta >= m.resolution:
        assert plus_inf_starts(m, eta) == classes.get(0, IntervalSet())


def test_omega2_depth_oracle():
    m = boundary_measure(make_string("omega2", 6))
    oracle = DepthCounter("omega2", 9, 13)
    for ci in range(0, 81):
        c = F(ci, 81)
        for eta in (F(1, 9), F(1, 27), F(2, 27)):
            if c + eta > 1:
                continue
            got = classify_window(m, c, eta)
            if got == "unresolved":
                continue
            assert got == oracle.classify(c, eta)
