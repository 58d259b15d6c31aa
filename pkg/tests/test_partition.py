import math
from fractions import Fraction as F
from math import comb

import pytest
from hypothesis import given, strategies as st

from fraczeta.analysis import abscissa_of_convergence, complex_dimensions, Window
from fraczeta.partition import (BINOMIAL, CascadeMeasure, abscissa_bisection, alpha_of,
                                diverges, is_concave, legendre_gap, modified_mzf,
                                partition_zeta, sigma_of_q, spectrum_from_partition)

LOG3 = math.log(3)
D = math.log(2) / LOG3


def test_partition_zeta_examples():
    assert partition_zeta(1, 2).abscissa == pytest.approx(D, abs=1e-12)
    assert partition_zeta(0, 1).abscissa == 0
    assert partition_zeta(1, 3).abscissa == pytest.approx(math.log(27 / 4) / (3 * LOG3), abs=1e-12)
    assert partition_zeta(1, 2).coefficient(1) == 2
    assert partition_zeta(2, 5).coefficient(3) == comb(15, 6)
    with pytest.raises(ValueError):
        partition_zeta(3, 2)
    with pytest.raises(ValueError):
        partition_zeta(0, 0)


def test_geometric_case_value():
    # (0, 1): sum 3^-ns = 1 / (3^s - 1)
    val, bound = partition_zeta(0, 1).evaluate(1.0)
    assert abs(val - 0.5) <= bound + 1e-15


def test_central_binomial_value():
    # sum_{n>=1} C(2n, n) y^n = 1/sqrt(1 - 4y) - 1 with y = 9^-s
    s = 1.0
    y = 9 ** -s
    val, bound = partition_zeta(1, 2).evaluate(s)
    assert abs(val - (1 / math.sqrt(1 - 4 * y) - 1)) <= bound + 1e-12


@pytest.mark.parametrize("k", [(1, 2), (1, 3), (2, 5), (0, 1)])
def test_series_abscissa_consistency(k):
    z = partition_zeta(*k)
    assert not diverges(z, z.abscissa + 0.05)
    assert diverges(z, z.abscissa - 0.05)
    lo, hi = abscissa_bisection(z)
    assert lo <= z.abscissa <= hi and hi - lo < 2e-3


def test_modified_mzf():
    f0 = modified_mzf(BINOMIAL, 0)
    assert f0.denominator == (1, -2.0) and f0.base == 3
    assert abscissa_of_convergence(f0).value == pytest.approx(D, abs=1e-12)
    lines, _ = complex_dimensions(f0, Window(t_max=1))
    assert lines[0].sigma == pytest.approx(D, abs=1e-12)
    assert abscissa_of_convergence(modified_mzf(BINOMIAL, 2)).value == pytest.approx(
        sigma_of_q(BINOMIAL, 2), abs=1e-12)


def test_sigma_of_q():
    assert sigma_of_q(BINOMIAL, 0) == pytest.approx(D, abs=1e-12)
    assert sigma_of_q(BINOMIAL, 1) == pytest.approx(0, abs=1e-12)
    assert sigma_of_q(BINOMIAL, 2) == pytest.approx(math.log(5 / 9) / LOG3, abs=1e-12)
    amin = math.log(1.5) / LOG3
    assert -sigma_of_q(BINOMIAL, 50) == pytest.approx(50 * amin, abs=1e-3)
    zero = CascadeMeasure((F(0), F(1)), (F(1, 3), F(1, 3)))
    with pytest.raises(ValueError):
        sigma_of_q(zero, -1)


@given(st.floats(-20, 20))
def test_sigma_solves_moran(q):
    s = sigma_of_q(BINOMIAL, q)
    total = sum(float(p) ** q * 3 ** (-s) for p in BINOMIAL.weights)
    assert total == pytest.approx(1.0, rel=1e-10)


def test_spectrum():
    assert alpha_of(1, 2) == pytest.approx((LOG3 + math.log(1.5)) / (2 * LOG3))
    assert alpha_of(0, 1) == pytest.approx(math.log(1.5) / LOG3)
    assert alpha_of(1, 1) == 1
    sp = spectrum_from_partition(12)
    assert len(sp) >= 40
    assert is_concave(sp)
    top = max(sp, key=lambda r: r[1])
    assert top[1] == pytest.approx(D, abs=1e-12) and top[2:] == (1, 2)
    with pytest.raises(ValueError):
        spectrum_from_partition(1)


def test_legendre_tightens():
    qs = [-2, -1, 0, 0.5, 1, 2, 5]
    gaps = [legendre_gap(spectrum_from_partition(k), BINOMIAL, qs) for k in (12, 24, 48)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[1] <= 1e-2
