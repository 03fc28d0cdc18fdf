import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from thomform.coeff import DimensionMismatch, Jet, Scalar
from thomform.forms import Chart, ChartForm, GaussianChartForm
from thomform.gaussian import (DegreeMismatch, WickInput, fiber_integrate, fiber_integrate_rotated,
                               gaussian_integral_direct, gaussian_moment, pullback_inclusion, wick, wick_integrand)
from thomform.harness.generators import partition_from, random_jet
from thomform.harness.scenarios import random_wick_input
from thomform import oracle
from thomform.matforms import JetMatrix
from thomform.mq import thom_gaussian

# values frozen from 6-node Gauss-Hermite quadrature (exact for these degrees)
MOMENTS = {0: Scalar.pi_power(1), 1: Scalar(), 2: Scalar.pi_power(1, mpq(1, 2)),
           4: Scalar.pi_power(1, mpq(3, 4)), 6: Scalar.pi_power(1, mpq(15, 8))}


@pytest.mark.parametrize("k", sorted(MOMENTS))
def test_moments(k):
    assert gaussian_moment(k) == MOMENTS[k]


def test_moments_match_quadrature():
    chart = Chart(0, 1, 0)
    for k in range(9):
        form = GaussianChartForm.one(chart)
        for _ in range(k):
            form = form ^ ChartForm.x(chart, 0)
        form = form ^ ChartForm.dx(chart, 0)
        quad = oracle.quad_fiber_integrate(oracle.evaluate_at(form, ()), [0])
        assert quad.terms.get(0, {}).get((), 0.0) == pytest.approx(float(gaussian_moment(k)), abs=1e-12)


class TestFiberIntegrate:
    def test_thom_normalization(self):
        for N in range(1, 5):
            assert fiber_integrate(thom_gaussian(Chart(2, N, 2)), range(N)) == ChartForm.one(Chart(2, 0, 2))

    def test_odd_moment_vanishes(self):
        c = Chart(1, 1, 2)
        form = GaussianChartForm.one(c) ^ ChartForm.x(c, 0) ^ ChartForm.dx(c, 0)
        assert fiber_integrate(form, [0]).is_zero()

    def test_empty_fiber_set_is_identity(self):
        form = thom_gaussian(Chart(1, 2, 2))
        assert fiber_integrate(form, []) is form

    def test_terms_without_full_vertical_degree_drop(self):
        c = Chart(1, 2, 2)
        form = GaussianChartForm.one(c) ^ ChartForm.x(c, 1) ^ ChartForm.x(c, 1) ^ ChartForm.dx(c, 0)
        assert fiber_integrate(form, [1]).is_zero()

    def test_residual_sign(self):
        # dx2 ^ dx1 = -(dx1 ^ dx2): integrating x2 leaves -dx1 * sqrt(pi)
        c = Chart(0, 2, 0)
        form = GaussianChartForm.one(c) ^ ChartForm.dx(c, 1) ^ ChartForm.dx(c, 0)
        out = fiber_integrate(form, [1])
        target = Chart(0, 1, 0)
        assert out == GaussianChartForm.from_inner(ChartForm.dx(target, 0) * Scalar.pi_power(1, -1))

    def test_out_of_range(self):
        with pytest.raises(DimensionMismatch):
            fiber_integrate(thom_gaussian(Chart(1, 2, 2)), [2])

    def test_orientation_argument(self):
        c = Chart(0, 3, 0)
        form = thom_gaussian(c)
        assert fiber_integrate(form, [0, 2], [2, 0]) == -fiber_integrate(form, [0, 2])

    @pytest.mark.parametrize("H1,H2", [([1], [3]), ([0, 2], [1]), ([3], [0])])
    def test_iterated_integration(self, H1, H2):
        c = Chart(1, 4, 2)
        form = _mixed_form(c, seed=3)
        # the inner integral's differentials sit rightmost: orientation H2 then H1
        once = fiber_integrate(form, H1 + H2, H2 + H1)
        keep = [i for i in range(4) if i not in H1]
        twice = fiber_integrate(fiber_integrate(form, H1), [keep.index(h) for h in H2])
        assert twice == once

    @pytest.mark.parametrize("H", [[0], [1], [0, 2], [1, 2], [2]])
    def test_interleaved_sign_matches_quadrature(self, H):
        c = Chart(1, 3, 2)
        form = _mixed_form(c, seed=7)
        exact = fiber_integrate(form, H)
        p = (0.3,)
        quad = oracle.quad_fiber_integrate(oracle.evaluate_at(form, p), H)
        assert oracle.relative_error(oracle.evaluate_at(exact, p), quad) < 1e-12

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_commutes_with_d(self, seed):
        c = Chart(2, 3, 3)
        form = _mixed_form(c, seed)
        lhs = fiber_integrate(form.d(), [1, 2])
        rhs = fiber_integrate(form, [1, 2]).d()
        assert lhs.equals(rhs, c.order - 1)


def _mixed_form(chart, seed):
    """A Gaussian form mixing base and fiber differentials with polynomial coefficients."""
    d, N, K = chart.base_dim, chart.fiber_dim, chart.order
    gens = [ChartForm.dt(chart, a) for a in range(d)] + [ChartForm.dx(chart, i) for i in range(N)]
    xs = [ChartForm.x(chart, i) for i in range(N)]
    total = ChartForm.zero(chart)
    for k in range(6):
        f = ChartForm.from_jet(chart.base(), random_jet(d, K, seed, tag=k)).lift(chart)
        term = f ^ xs[k % N] ^ xs[(k * 2) % N]
        picks = [(k + j) % len(gens) for j in range(1 + k % 3)]
        for g in sorted(set(picks)):
            term = term ^ gens[g]
        total = total + term
    top = ChartForm.one(chart)
    for i in range(N):
        top = top ^ gens[d + i]
    total = total + (xs[0] ^ xs[0] ^ top)
    return GaussianChartForm.from_inner(total)


class TestRotated:
    def test_identity_frame(self):
        c = Chart(1, 3, 2)
        form = _mixed_form(c, 4)
        R = JetMatrix.identity(3, 1, 2)
        assert fiber_integrate_rotated(form, R, 1) == fiber_integrate(form, [1, 2])

    def test_constant_partition_frame(self):
        n = 2
        c = Chart(1, 2 * n, 2)
        x1, x2 = mpq(3, 5), mpq(4, 5)
        eye = JetMatrix.identity(n, 1, 2)
        R = JetMatrix.block([[eye.scale(x1), eye.scale(-x2)], [eye.scale(x2), eye.scale(x1)]])
        out = fiber_integrate_rotated(thom_gaussian(c), R, n)
        assert out == thom_gaussian(Chart(1, n, 2))


class TestPullback:
    def test_axis_inclusion_restricts(self):
        c = Chart(1, 2, 2)
        iota = JetMatrix.from_rationals([[1], [0]], 1, 2)
        form = GaussianChartForm.one(c) ^ ChartForm.x(c, 0) ^ ChartForm.x(c, 1)
        form = form + (GaussianChartForm.one(c) ^ ChartForm.dx(c, 0))
        small = Chart(1, 1, 2)
        assert pullback_inclusion(form, iota) == GaussianChartForm.from_inner(ChartForm.dx(small, 0))

    def test_constant_weight(self):
        c = Chart(1, 4, 2)
        eye = JetMatrix.identity(2, 1, 2)
        iota = JetMatrix.block([[eye.scale(mpq(3, 5))], [eye.scale(mpq(4, 5))]])
        out = pullback_inclusion(GaussianChartForm.weight(c), iota)
        assert out == GaussianChartForm.weight(Chart(1, 2, 2))

    @pytest.mark.parametrize("seed", [1, 2])
    def test_commutes_with_d(self, seed):
        d, K = 1, 3
        xi1, xi2 = partition_from(random_jet(d, K, seed))
        eye = JetMatrix.identity(1, d, K)
        iota = JetMatrix.block([[eye.scale(xi1)], [eye.scale(xi2)]])
        form = _mixed_form(Chart(d, 2, K), seed)
        lhs = pullback_inclusion(form.d(), iota)
        rhs = pullback_inclusion(form, iota).d()
        assert lhs.equals(rhs, K - 1)


class TestWick:
    def _rows(self, values, chart):
        return [[ChartForm.from_jet(chart, Jet.constant(v, chart.base_dim, chart.order)) for v in row]
                for row in values]

    def test_odd_count_vanishes(self):
        chart = Chart(1, 0, 2)
        inp = WickInput(2, self._rows([[1, 2]], chart))
        assert wick(inp).is_zero()
        assert gaussian_integral_direct(inp).is_zero()

    def test_two_scalar_rows(self):
        chart = Chart(1, 0, 2)
        inp = WickInput(3, self._rows([[1, 2, 0], [3, -1, 5]], chart))
        expected = ChartForm.scalar(chart, Scalar.pi_power(3, mpq(1, 2) * (3 - 2)))
        assert wick(inp) == expected
        assert gaussian_integral_direct(inp) == expected

    def test_two_one_form_rows(self):
        chart = Chart(2, 0, 1)
        dt1, dt2 = ChartForm.dt(chart, 0), ChartForm.dt(chart, 1)
        inp = WickInput(2, [[dt1, dt2 * 3], [dt2, dt1]])
        # b1.b2 = dt1^dt2 + 3 dt2^dt1 = -2 dt1^dt2
        expected = (dt1 ^ dt2) * Scalar.pi_power(2, mpq(1, 2) * -2)
        assert wick(inp) == expected
        assert gaussian_integral_direct(inp) == expected

    def test_mixed_degrees_rejected(self):
        chart = Chart(1, 0, 1)
        with pytest.raises(DegreeMismatch):
            wick(WickInput(1, [[ChartForm.one(chart)], [ChartForm.dt(chart, 0)]]))

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 4), st.booleans(), st.integers(1, 500))
    def test_routes_agree(self, l, s, one_forms, seed):
        inp = random_wick_input(l, s, 2, 2, seed, one_forms)
        assert wick(inp) == gaussian_integral_direct(inp)

    def test_integrand_shape(self):
        inp = random_wick_input(2, 2, 1, 1, 3, False)
        assert wick_integrand(inp).chart.fiber_dim == 2
