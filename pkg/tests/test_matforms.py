import pytest
from hypothesis import given, settings, strategies as st

from thomform.coeff import Jet
from thomform.forms import Chart, ChartForm
from thomform.harness.generators import random_skew_forms, random_skew_jet
from thomform.matforms import (FormMatrix, JetMatrix, NotInvolution, NotOrthogonal, NotSkew, OrthoJetMatrix, block,
                               cayley, constrain, curvature_structure, frame_connection, maurer_cartan, reflection,
                               restricted_connection)

seeds = st.integers(1, 10_000)


def det3(m):
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


class TestCayley:
    def test_zero_gives_identity(self):
        assert cayley(JetMatrix.zeros(3, 3, 1, 2)).equals(JetMatrix.identity(3, 1, 2))

    def test_rotation_2x2(self):
        # (1-S)(1+S)^-1 = [[1-t^2, -2t], [2t, 1-t^2]] / (1+t^2), expanded to order 2
        t = Jet.variable(0, 1, 2)
        S = JetMatrix([[Jet.zero(1, 2), t], [-t, Jet.zero(1, 2)]])
        A = cayley(S)
        expected = JetMatrix([[1 - 2 * t * t, -2 * t], [2 * t, 1 - 2 * t * t]])
        assert A.equals(expected)
        assert A.is_orthogonal()

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_det_at_origin_is_one(self, seed):
        A = cayley(random_skew_jet(3, 1, 2, seed))
        assert det3(A.at_origin()) == 1

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.integers(2, 4))
    def test_exactly_orthogonal(self, seed, n):
        assert cayley(random_skew_jet(n, 2, 3, seed)).is_orthogonal()

    def test_rejects_non_skew(self):
        with pytest.raises(NotSkew):
            cayley(JetMatrix.from_rationals([[0, 1], [1, 0]], 1, 2))

    def test_ortho_check(self):
        with pytest.raises(NotOrthogonal):
            OrthoJetMatrix.of(JetMatrix.from_rationals([[1, 1], [0, 1]], 1, 2))


class TestMaurerCartan:
    def test_identity(self):
        mc = maurer_cartan(OrthoJetMatrix.of(JetMatrix.identity(3, 2, 2)))
        assert mc.equals(FormMatrix.zeros(3, 3, Chart(2, 0, 2)))

    @settings(max_examples=10, deadline=None)
    @given(seeds)
    def test_skew(self, seed):
        A = cayley(random_skew_jet(4, 2, 3, seed))
        assert maurer_cartan(A).is_skew(order=2)

    def test_block_diagonal(self):
        A1 = cayley(random_skew_jet(2, 1, 3, 11))
        A2 = cayley(random_skew_jet(3, 1, 3, 12))
        A = OrthoJetMatrix.of(JetMatrix.block_diag(A1, A2))
        expected = FormMatrix.block_diag(maurer_cartan(A1), maurer_cartan(A2))
        assert maurer_cartan(A).equals(expected)

    def test_rejects_non_orthogonal(self):
        with pytest.raises(NotOrthogonal):
            maurer_cartan(JetMatrix.from_rationals([[2, 0], [0, 1]], 1, 2))

    @settings(max_examples=10, deadline=None)
    @given(seeds, st.integers(2, 4))
    def test_flatness(self, seed, n):
        mc = maurer_cartan(cayley(random_skew_jet(n, 2, 3, seed)))
        assert (mc.d() + mc @ mc).equals(FormMatrix.zeros(n, n, mc.chart), order=1)


class TestBlock:
    chart = Chart(1, 0, 2)

    def test_zero_block(self):
        z = FormMatrix.zeros(4, 4, self.chart)
        assert block(z, "oo", 2).equals(FormMatrix.zeros(2, 2, self.chart))

    def test_off_diagonal_of_block_diag(self):
        P = random_skew_forms(2, 1, 2, 1)
        R = random_skew_forms(3, 1, 2, 2)
        assert block(FormMatrix.block_diag(P, R), "oh", 2).equals(FormMatrix.zeros(2, 3, self.chart))

    def test_reassembly(self):
        M = random_skew_forms(5, 1, 2, 3)
        parts = [block(M, w, 2) for w in ("oo", "oh", "ho", "hh")]
        assert FormMatrix.assemble(*parts).equals(M)

    def test_bad_split(self):
        with pytest.raises(ValueError):
            block(FormMatrix.zeros(2, 2, self.chart), "oo", 3)


class TestRestrictedConnection:
    def test_identity_frame(self):
        theta, omega = restricted_connection(OrthoJetMatrix.of(JetMatrix.identity(3, 1, 2)), 2)
        zero = FormMatrix.zeros(2, 2, Chart(1, 0, 2))
        assert theta.equals(zero) and omega.equals(zero)

    def test_block_diagonal_frame_is_flat(self):
        A = OrthoJetMatrix.of(JetMatrix.block_diag(cayley(random_skew_jet(2, 2, 3, 4)),
                                                   cayley(random_skew_jet(2, 2, 3, 5))))
        _, omega = restricted_connection(A, 2)
        assert omega.equals(FormMatrix.zeros(2, 2, Chart(2, 0, 3)))

    @pytest.mark.parametrize("seed", [1, 2, 3, 17])
    def test_block_product_is_curvature(self, seed):
        A = cayley(random_skew_jet(3, 1, 3, seed))
        theta, omega = restricted_connection(A, 2)
        assert theta.is_skew(order=2)
        assert omega.equals(curvature_structure(theta), order=1)


class TestCurvature:
    def test_zero(self):
        z = FormMatrix.zeros(3, 3, Chart(2, 0, 2))
        assert curvature_structure(z).equals(z)

    def test_constant_one_direction(self):
        chart = Chart(2, 0, 2)
        dt = ChartForm.dt(chart, 0)
        theta = FormMatrix([[ChartForm.zero(chart), dt * 2], [dt * -2, ChartForm.zero(chart)]])
        assert curvature_structure(theta).equals(FormMatrix.zeros(2, 2, chart))


class TestConstrain:
    def test_identity_involution(self):
        theta = random_skew_forms(3, 2, 2, 7)
        assert constrain(theta, JetMatrix.identity(3, 2, 2)).equals(theta)

    def test_axis_involution_block_diagonalizes(self):
        theta = random_skew_forms(4, 2, 2, 8)
        q0 = JetMatrix.scalar_diag([-1, -1, 1, 1], 2, 2)
        z = FormMatrix.zeros(2, 2, theta.chart)
        expected = FormMatrix.assemble(block(theta, "oo", 2), z, z, block(theta, "hh", 2))
        assert constrain(theta, q0).equals(expected)

    def test_rejects_non_involution(self):
        with pytest.raises(NotInvolution):
            constrain(random_skew_forms(2, 1, 2, 1), JetMatrix.from_rationals([[1, 1], [0, 1]], 1, 2))

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_nested_restriction(self, seed):
        theta = random_skew_forms(4, 1, 3, seed)
        A = cayley(random_skew_jet(4, 1, 3, seed, tag=9))
        q1, q2 = reflection(A, 3), reflection(A, 1)
        nested = block(frame_connection(constrain(constrain(theta, q1), q2), A), "oo", 1)
        direct = block(frame_connection(constrain(theta, q2), A), "oo", 1)
        assert nested.equals(direct, order=2)

    @pytest.mark.parametrize("seed", [4, 5])
    def test_idempotent(self, seed):
        theta = random_skew_forms(3, 2, 3, seed)
        Q = reflection(cayley(random_skew_jet(3, 2, 3, seed, tag=2)), 1)
        once = constrain(theta, Q)
        assert constrain(once, Q).equals(once, order=2)

    def test_direct_sum(self):
        t1, t2 = random_skew_forms(2, 1, 3, 1), random_skew_forms(3, 1, 3, 2)
        q1 = reflection(cayley(random_skew_jet(2, 1, 3, 3)), 1)
        q2 = reflection(cayley(random_skew_jet(3, 1, 3, 4)), 2)
        summed = constrain(FormMatrix.block_diag(t1, t2), JetMatrix.block_diag(q1, q2))
        assert summed.equals(FormMatrix.block_diag(constrain(t1, q1), constrain(t2, q2)))
