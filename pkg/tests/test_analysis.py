import math
from dataclasses import replace
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from fraczeta.analysis import (PoleError, UnsupportedAnalysis, Window, ZetaForm,
                               _poly_roots, abscissa_of_convergence, complex_dimensions,
                               detect_lattice_form, evaluate, evaluate_truncated,
                               geometric_form, minkowski_report, pole_lines, ring_residue,
                               series_evaluate, tube_explicit_formula)
from fraczeta.engine import ScaleSequence, build_mzf
from fraczeta.measures import Regularity, boundary_measure
from fraczeta.partition import BINOMIAL, modified_mzf
from fraczeta.strings import LengthSystem, make_a_string, make_string, tube_volume
from oracles import dirichlet_mp

LOG2, LOG3, LOG9 = math.log(2), math.log(3), math.log(9)


@pytest.fixture(scope="module")
def cantor():
    return geometric_form(make_string("cantor", 6))


@pytest.fixture(scope="module")
def topo():
    def build(gen):
        m = boundary_measure(make_string(gen, 8))
        return build_mzf(m, ScaleSequence.geometric(8), Regularity.minus_inf()).closed_form
    return {g: build(g) for g in ("omega1", "omega2", "omega3")}


def test_evaluate_examples(cantor):
    assert cantor(1) == pytest.approx(1.0, abs=1e-14)
    assert cantor(0) == pytest.approx(-1.0, abs=1e-14)
    empty = ZetaForm.finite(LengthSystem())
    assert empty(0.3 + 2j) == 0 and evaluate(empty, 5)[0] == 0
    with pytest.raises(PoleError):
        cantor(complex(LOG2 / LOG3, 0))
    with pytest.raises(PoleError):
        cantor(complex(LOG2 / LOG3, 2 * math.pi / LOG3))


def test_form_validation():
    with pytest.raises(ValueError):
        ZetaForm("lattice", 1, (), ((1, F(1, 3)),), (1, -2))
    with pytest.raises(ValueError):
        ZetaForm("lattice", 3, (), ((1, F(1, 3)),), (2, -2))
    with pytest.raises(ValueError):
        ZetaForm("weird")


def test_abscissae(cantor, topo):
    assert abscissa_of_convergence(cantor).value == pytest.approx(LOG2 / LOG3, abs=1e-12)
    assert abscissa_of_convergence(topo["omega3"]).value == pytest.approx(LOG2 / LOG9, abs=1e-12)
    a2 = abscissa_of_convergence(topo["omega2"])
    assert a2.value == -math.inf and a2.exact
    est = abscissa_of_convergence(make_string("cantor", 12).length_system)
    assert not est.exact and abs(est.value - LOG2 / LOG3) <= est.uncertainty


def test_abscissa_independent_of_layout():
    vals = {abscissa_of_convergence(geometric_form(make_string(g, 5))).value
            for g in ("omega1", "omega2", "omega3")}
    assert len(vals) == 1


def test_cantor_dimensions(cantor):
    lines, poles = complex_dimensions(cantor, Window(t_max=10))
    assert len(lines) == 1
    assert lines[0].spacing == pytest.approx(2 * math.pi / LOG3, abs=1e-12)
    assert [round(p.s.imag / lines[0].spacing) for p in poles] == [-1, 0, 1]
    d = [p for p in poles if p.s.imag == 0][0]
    assert d.residue.real == pytest.approx(1 / (2 * LOG3), abs=1e-12)
    assert complex_dimensions(topo_finite(), Window())[0] == []


def topo_finite():
    return ZetaForm.finite([(F(1), F(1, 9))])


def all_forms(cantor, topo):
    return [cantor, topo["omega1"], topo["omega3"], modified_mzf(BINOMIAL, 2),
            ZetaForm("lattice", 2, (), ((1, F(1, 2)),), (1, F(-5, 6), F(1, 6)), True)]


def test_ring_residues(cantor, topo):
    for form in all_forms(cantor, topo):
        _, poles = complex_dimensions(form, Window(t_max=15))
        assert poles
        for p in poles:
            for k in range(3, 7):
                assert abs(ring_residue(form, p.s, 10.0 ** -k) - p.residue) < 1e-8


def test_rational_roots_exact():
    roots = _poly_roots([F(1), F(-5, 6), F(1, 6)])  # (1 - x/2)(1 - x/3)
    assert sorted(r.real for r, _ in roots) == [2.0, 3.0]
    assert _poly_roots([F(1), F(-2), F(1)]) == [(1 + 0j, 2)]
    rs = _poly_roots([1.0, 0.0, 1.0])  # x = +-i, numeric path
    assert sorted(round(r.imag, 12) for r, _ in rs) == [-1.0, 1.0]


def test_double_pole_marked_not_simple():
    f = ZetaForm("lattice", 3, (), ((1, F(1, 3)),), (1, -4, 4))  # (1 - 2x)^2
    lines = pole_lines(f)
    assert len(lines) == 1 and not lines[0].simple
    with pytest.raises(UnsupportedAnalysis):
        lines[0].residue_at_line(0)


def test_pole_sets_equal_for_omega1(cantor, topo):
    w = Window(t_max=20)
    a = [p.s for p in complex_dimensions(topo["omega1"], w)[1]]
    b = [p.s for p in complex_dimensions(cantor, w)[1]]
    assert len(a) == len(b)
    for x, y in zip(a, b):
        assert abs(x.real - y.real) < 1e-9 and abs(x.imag - y.imag) < 1e-9


@given(st.integers(0, 19))
def test_series_and_closed_form_agree_real(i):
    form = geometric_form(make_string("cantor", 6))
    sigma = LOG2 / LOG3 + 0.05 + i * 0.15
    val, bound, _ = series_evaluate(form, sigma, tol=1e-9)
    assert abs(val - form(sigma)) <= bound + 1e-12


@given(st.floats(0.7, 3.0), st.floats(-30, 30))
def test_series_and_closed_form_agree_complex(re, im):
    form = geometric_form(make_string("cantor", 6))
    s = complex(re, im)
    val, bound, _ = series_evaluate(form, s, tol=1e-9)
    assert abs(val - form(s)) <= bound + 1e-12


def test_truncated_raw_sum_matches_mpmath():
    ls = make_string("cantor", 6).length_system
    for s in (1.0, 0.8 + 3j, 2.5 - 1j):
        assert abs(evaluate_truncated(ls, s) - dirichlet_mp(ls.entries, complex(s))) < 1e-12
    assert evaluate(ls, 1.0)[1] == math.inf


def test_expansion_consistency(cantor):
    assert cantor.expand(F(1, 3 ** 8)) == make_string("cantor", 8).length_system.as_counter()


def test_detection_needs_four_stages():
    from collections import Counter
    stages = [Counter({F(1, 3 ** n): 2 ** (n - 1)}) for n in range(1, 4)]
    assert detect_lattice_form(stages) == (None, None)
    form, n0 = detect_lattice_form(stages + [Counter({F(1, 81): 8})])
    assert n0 == 1 and form.denominator == (1, -2)


def test_minkowski_reports():
    rc = minkowski_report(make_string("cantor", 6))
    assert not rc.measurable and rc.upper / rc.lower >= 1.001
    ra = minkowski_report(make_a_string(1, 10))
    assert ra.measurable
    assert ra.content == pytest.approx(2 * math.sqrt(2), rel=1e-5)
    assert ra.L_limit == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(UnsupportedAnalysis):
        minkowski_report(replace(make_string("omega2", 3), generator="custom"))


def test_tube_formula(cantor):
    s = make_string("cantor", 6)
    v, info = tube_explicit_formula(cantor, F(1, 18), 50)
    assert abs(v - 7 / 9) < 1e-3
    assert info["zeta0"] == pytest.approx(-1.0)
    assert abs(tube_explicit_formula(cantor, F(1, 2), 50)[0] - 1) < 1e-3
    for k in range(2, 9):
        eps = F(1, 2 * 3 ** k)
        assert abs(tube_explicit_formula(cantor, eps, 50)[0] - float(tube_volume(s, eps))) < 1e-3
    with pytest.raises(UnsupportedAnalysis):
        tube_explicit_formula(cantor, F(3, 4), 50)
    m = boundary_measure(make_string("omega1", 8))
    topo = build_mzf(m, ScaleSequence.geometric(8), Regularity.minus_inf()).closed_form
    with pytest.raises(UnsupportedAnalysis):
        tube_explicit_formula(topo, F(1, 18), 50)
