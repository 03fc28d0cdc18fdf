import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from thomform.coeff import Scalar
from thomform.forms import (Chart, ChartForm, ChartMismatch, GaussianChartForm, WeightClash, WeightNotPreserved,
                            substitute_fiber_frame)
from thomform.harness.generators import random_skew_forms, random_skew_jet
from thomform.matforms import JetMatrix, cayley, maurer_cartan
from thomform.mq import connection_factors, thom_gaussian

from conftest import jets

C = Chart(2, 2, 3)
dt1, dt2 = ChartForm.dt(C, 0), ChartForm.dt(C, 1)
dx1, dx2 = ChartForm.dx(C, 0), ChartForm.dx(C, 1)
x1, x2 = ChartForm.x(C, 0), ChartForm.x(C, 1)
t1, t2 = ChartForm.t(C, 0), ChartForm.t(C, 1)


def test_anticommutation():
    assert (dt1 ^ dt2) == -(dt2 ^ dt1)
    assert (dt1 ^ dt2).to_text() == "dt1^dt2"


def test_square_vanishes():
    assert (dx1 ^ dx1).is_zero()


def test_coefficients_multiply():
    assert ((t1 ^ dt1) ^ (x1 ^ dx1)).to_text() == "t1*x1 dt1^dx1"


def test_d_of_base_form():
    assert (t1 ^ dt2).d() == (dt1 ^ dt2)


def test_d_of_gaussian_weight():
    w = GaussianChartForm.weight(C)
    expected = GaussianChartForm.from_inner((x1 ^ dx1) * -2 + (x2 ^ dx2) * -2)
    assert w.d() == expected


def test_weight_clash():
    w = GaussianChartForm.weight(C)
    with pytest.raises(WeightClash):
        w ^ w
    assert (dx1 ^ w).weighted


def test_chart_mismatch():
    other = Chart(1, 2, 3)
    with pytest.raises(ChartMismatch):
        dx1 ^ ChartForm.dx(other, 0)


def test_base_forms_lift_into_fiber_chart():
    base = Chart(2, 0, 3)
    mixed = ChartForm.dt(base, 0) ^ dx1
    assert mixed.chart == C


def test_scalar_multiplication_with_pi():
    f = dx1 * Scalar.pi_power(-1)
    assert f.to_text() == "pi^(-1/2) dx1"


def test_serialization_is_deterministic():
    f = (t1 ^ dt1 ^ dx2) * 3 + x1 * x1 * mpq(-1, 2) + (dx1 ^ dx2)
    assert f.to_text() == "- 1/2*x1^2 + 3*t1 dt1^dx2 + dx1^dx2"
    assert f.to_text() == ((dx1 ^ dx2) + (t1 ^ dt1 ^ dx2) * 3 + x1 * x1 * mpq(-1, 2)).to_text()


@st.composite
def forms(draw, chart=C, max_terms=4, weighted=False):
    gens = [ChartForm.dt(chart, a) for a in range(chart.base_dim)] + \
           [ChartForm.dx(chart, i) for i in range(chart.fiber_dim)]
    xs = [ChartForm.x(chart, i) for i in range(chart.fiber_dim)]
    degree = draw(st.integers(0, 2))
    total = ChartForm.zero(chart)
    for _ in range(draw(st.integers(1, max_terms))):
        term = ChartForm.from_jet(chart, draw(jets(chart.base_dim, chart.order)))
        for i in draw(st.lists(st.integers(0, chart.fiber_dim - 1), max_size=2)):
            term = term ^ xs[i]
        for g in draw(st.lists(st.sampled_from(range(len(gens))), min_size=degree, max_size=degree, unique=True)):
            term = term ^ gens[g]
        total = total + term
    return GaussianChartForm.from_inner(total) if weighted else total


@settings(max_examples=30, deadline=None)
@given(forms(), forms(), forms())
def test_wedge_associative(a, b, c):
    assert ((a ^ b) ^ c) == (a ^ (b ^ c))


@settings(max_examples=30, deadline=None)
@given(forms(), forms())
def test_graded_commutativity(a, b):
    if a.degree is None or b.degree is None:
        return
    assert (a ^ b) == (b ^ a) * (-1) ** (a.degree * b.degree)


@settings(max_examples=30, deadline=None)
@given(forms(), forms())
def test_graded_leibniz(a, b):
    if a.degree is None:
        return
    lhs = (a ^ b).d()
    rhs = (a.d() ^ b) + (a ^ b.d()) * (-1) ** a.degree
    assert lhs.equals(rhs, C.order - 1)


@settings(max_examples=30, deadline=None)
@given(forms(weighted=True), forms())
def test_graded_leibniz_with_weight(a, b):
    if a.degree is None:
        return
    rhs = (a.d() ^ b) + (a ^ b.d()) * (-1) ** a.degree
    assert (a ^ b).d().equals(rhs, C.order - 1)


@settings(max_examples=30, deadline=None)
@given(st.one_of(forms(), forms(weighted=True)))
def test_d_squared_vanishes(a):
    assert a.d().d().equals(type(a).zero(C), C.order - 2)


@settings(max_examples=20, deadline=None)
@given(jets())
def test_d_of_d_of_function(f):
    g = ChartForm.from_jet(C, f)
    assert g.d().d().equals(ChartForm.zero(C), C.order - 2)


class TestSubstitution:
    def test_identity_frame(self):
        w = GaussianChartForm.from_inner((x1 ^ dx1 ^ dt2) + (t1 ^ dx2))
        assert substitute_fiber_frame(w, JetMatrix.identity(2, 2, 3)) == w

    def test_rotation_preserves_top_form(self):
        R = JetMatrix.from_rationals([[mpq(3, 5), mpq(-4, 5)], [mpq(4, 5), mpq(3, 5)]], 2, 3)
        top = GaussianChartForm.weight(C) ^ dx1 ^ dx2
        assert substitute_fiber_frame(top, R) == top

    def test_non_isometry_rejected(self):
        M = JetMatrix.from_rationals([[2, 0], [0, 1]], 2, 3)
        with pytest.raises(WeightNotPreserved):
            substitute_fiber_frame(GaussianChartForm.weight(C), M)
        substitute_fiber_frame(dx1, M)

    def test_base_dependent_frame_matches_maurer_cartan_expansion(self):
        # y = A x turns dy_1 dy_2 into (dx + A^-1 dA x)_1 (dx + A^-1 dA x)_2 since det A = 1
        chart = Chart(1, 2, 3)
        S = random_skew_jet(2, 1, 3, seed=5)
        S.rows[0][1] = S.rows[0][1] - S.rows[0][1].at_origin()
        S.rows[1][0] = -S.rows[0][1]
        A = cayley(S)
        assert A.at_origin() == [[1, 0], [0, 1]]
        phi0 = thom_gaussian(chart)
        pulled = substitute_fiber_frame(phi0, A, chart)
        f1, f2 = connection_factors(chart, maurer_cartan(A))
        direct = (GaussianChartForm.scalar(chart, Scalar.pi_power(-2)) ^ f1) ^ f2
        assert pulled.equals(direct, chart.order - 1)

    def test_composition(self):
        A1 = cayley(random_skew_jet(2, 2, 3, seed=3))
        A2 = cayley(random_skew_jet(2, 2, 3, seed=4))
        w = GaussianChartForm.from_inner((x1 ^ dx1 ^ dt2) + (t1 ^ x2 ^ x2 ^ dx2) + (dx1 ^ dx2))
        twice = substitute_fiber_frame(substitute_fiber_frame(w, A1), A2)
        assert twice.equals(substitute_fiber_frame(w, A1 @ A2), C.order - 1)

    @settings(max_examples=15, deadline=None)
    @given(forms(weighted=True), st.integers(1, 50))
    def test_commutes_with_d(self, w, seed):
        A = cayley(random_skew_jet(2, 2, 3, seed=seed))
        lhs = substitute_fiber_frame(w.d(), A)
        rhs = substitute_fiber_frame(w, A).d()
        assert lhs.equals(rhs, C.order - 1)

    def test_rectangular_inclusion(self):
        iota = JetMatrix.from_rationals([[mpq(3, 5)], [mpq(4, 5)]], 2, 3)
        small = Chart(2, 1, 3)
        pulled = substitute_fiber_frame(GaussianChartForm.weight(C) ^ x1, iota, small)
        assert pulled == GaussianChartForm.from_inner(ChartForm.x(small, 0) * mpq(3, 5))


def test_random_skew_forms_are_base_one_forms():
    theta = random_skew_forms(3, 2, 2, seed=9)
    assert theta.is_skew()
    assert all(e.degree in (0, 1) and e.chart.fiber_dim == 0 for r in theta.rows for e in r)
