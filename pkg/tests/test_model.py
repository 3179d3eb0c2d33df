import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfscope.errors import DomainError
from hopfscope.model import (
    KineticParams,
    NormalForm,
    alpha_of_nu,
    eigen_split,
    find_hopf_nu,
    jacobian_origin,
    kinetic,
    kinetic_deriv,
    normal_form,
    normal_transform,
    nu_of_alpha,
    rhs_normal,
    rhs_original,
)


class TestKinetic:
    @pytest.mark.parametrize("p", [0.3, 1.0, 2.2, 3.0, 5.0])
    def test_zero_at_origin(self, p):
        assert kinetic(0.0, p) == 0.0

    @pytest.mark.parametrize("p", [0.3, 1.0, 2.2, 3.0, 5.0])
    def test_slope_at_origin(self, p):
        assert kinetic_deriv(0.0, p) == pytest.approx(-1.0, abs=1e-14)

    def test_half_point(self):
        assert kinetic(0.5, 1.0) == pytest.approx(-0.75, abs=1e-15)

    def test_domain(self):
        with pytest.raises(DomainError):
            kinetic(1.0, 2.0)
        with pytest.raises(DomainError):
            kinetic_deriv(1.5, 2.0)

    @given(
        v=st.floats(min_value=-2.0, max_value=0.9),
        p=st.floats(min_value=0.1, max_value=5.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_deriv_matches_finite_difference(self, v, p):
        h = 1e-6
        fd = (kinetic(v + h, p) - kinetic(v - h, p)) / (2 * h)
        assert kinetic_deriv(v, p) == pytest.approx(fd, rel=1e-6, abs=1e-7)


class TestOriginalField:
    def test_origin_is_equilibrium(self):
        for nu, p in [(1 / 3, 3.0), (0.3, 2.2), (0.4, 1.0)]:
            f = rhs_original(np.zeros(3), KineticParams(nu=nu, p=p))
            assert np.allclose(f, 0.0, atol=1e-14)

    def test_second_equation_decouples(self):
        # v2dot = v3 - v1 regardless of the kinetic parameters
        f = rhs_original(np.array([0.0, 1.0, 0.0]), KineticParams(nu=1 / 3, p=3.0))
        assert f[1] == 0.0
        assert np.all(np.isfinite(f))

    def test_linearization_matches_jacobian(self):
        # finite-difference oracle for the Jacobian at the origin
        nu, p = 1 / 3, 3.0
        params = KineticParams(nu=nu, p=p)
        h = 1e-6
        J = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            J[:, j] = (rhs_original(e, params) - rhs_original(-e, params)) / (2 * h)
        assert np.allclose(J, jacobian_origin(nu), rtol=1e-6, atol=1e-6)

    def test_invalid_params(self):
        with pytest.raises(DomainError):
            KineticParams(nu=-0.1, p=3.0)
        with pytest.raises(DomainError):
            rhs_original(np.array([1.2, 0.0, 0.0]), KineticParams(nu=0.3, p=3.0))


class TestJacobian:
    def test_rows_at_one_third(self):
        A = jacobian_origin(1 / 3)
        assert np.allclose(A[0], [8.0, -9.0, -9.0])

    def test_row3_at_one(self):
        A = jacobian_origin(1.0)
        assert np.allclose(A[2], [8.0, -6.0, -9.0])

    def test_eigenvalues_at_hopf(self):
        # characteristic invariants of A(1/3): trace -1, second invariant 3,
        # det -3  =>  eigenvalues {-1, +i sqrt 3, -i sqrt 3}
        w = np.linalg.eigvals(jacobian_origin(1 / 3))
        w = sorted(w, key=lambda z: (abs(z.imag), z.imag))
        assert abs(w[0] - (-1.0)) < 1e-10
        assert abs(w[1] - (-1j * math.sqrt(3))) < 1e-10
        assert abs(w[2] - (1j * math.sqrt(3))) < 1e-10

    def test_nu_zero_rejected(self):
        with pytest.raises(DomainError):
            jacobian_origin(0.0)


class TestHopfLocation:
    def test_nu_ah(self, hopf):
        assert abs(hopf.nu - 1 / 3) < 1e-6

    def test_alpha_residual(self, hopf):
        assert hopf.alpha_residual < 1e-10

    def test_beta_is_sqrt3(self, hopf):
        assert abs(hopf.beta - math.sqrt(3)) < 1e-6

    def test_transversality(self, hopf):
        assert abs(hopf.a_prime) > 0.1

    def test_eigen_structure_over_bracket(self):
        # one real negative eigenvalue plus a pair; Re(pair) changes sign once
        nus = np.linspace(0.25, 0.45, 41)
        signs = []
        for nu in nus:
            lam_r, lam_c, _, _ = eigen_split(nu)
            assert lam_r < 0
            assert lam_c.imag > 0
            signs.append(np.sign(lam_c.real))
        flips = np.sum(np.abs(np.diff(signs)) > 0)
        assert flips == 1


class TestNormalTransform:
    def test_inverse(self, hopf):
        ld = normal_transform(hopf.nu)
        assert np.max(np.abs(ld.T @ ld.T_inv - np.eye(3))) < 1e-12

    def test_block_form_at_hopf(self, hopf):
        ld = normal_transform(hopf.nu)
        got = ld.T_inv @ jacobian_origin(hopf.nu) @ ld.T
        want = np.array(
            [
                [-1.0, 0.0, 0.0],
                [0.0, 0.0, -math.sqrt(3)],
                [0.0, math.sqrt(3), 0.0],
            ]
        )
        assert np.max(np.abs(got - want)) < 1e-8

    @pytest.mark.parametrize("nu", [0.30, 1 / 3, 0.36, 0.42])
    def test_conjugation_identity(self, nu):
        ld = normal_transform(nu)
        got = ld.T_inv @ jacobian_origin(nu) @ ld.T
        assert np.max(np.abs(got - ld.block)) < 1e-10

    @pytest.mark.parametrize("nu", [0.30, 0.335, 0.40])
    def test_columns_span_eigenspaces(self, nu):
        # oracle: check A T = T B column by column, independent of how T was built
        A = jacobian_origin(nu)
        ld = normal_transform(nu)
        assert np.max(np.abs(A @ ld.T - ld.T @ ld.block)) < 1e-10

    def test_b_positive_orientation(self):
        for nu in (0.30, 0.36, 0.44):
            assert normal_transform(nu).beta > 0


class TestAlphaNuMaps:
    def test_alpha_zero_at_hopf(self, hopf):
        assert abs(alpha_of_nu(hopf.nu)) < 1e-10

    @pytest.mark.parametrize("nu", [0.30, 0.32, 1 / 3, 0.35, 0.38])
    def test_roundtrip(self, nu):
        assert nu_of_alpha(alpha_of_nu(nu)) == pytest.approx(nu, abs=1e-8)


class TestNormalField:
    def test_origin_fixed(self):
        assert np.allclose(rhs_normal(np.zeros(3), 0.02, 3.0), 0.0, atol=1e-12)

    def test_jacobian_is_block(self):
        # finite-difference Jacobian oracle
        nf = normal_form(0.01, 2.5)
        h = 1e-6
        J = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            J[:, j] = (nf.field(e) - nf.field(-e)) / (2 * h)
        assert np.max(np.abs(J - nf.linear.block)) < 1e-8

    def test_nonlinear_part_quadratic_scaling(self):
        # |h(x)| <= C |x|^2 on a ball of radius 0.1: log-log slope 2 +- 0.1
        nf = normal_form(0.0, 3.0)
        rng = np.random.default_rng(7)
        dirs = rng.normal(size=(40, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        radii = np.array([0.1, 0.05, 0.025, 0.0125])
        sup = []
        for r in radii:
            sup.append(max(np.linalg.norm(nf.nonlinear(r * d)) for d in dirs))
        slope = np.polyfit(np.log(radii), np.log(sup), 1)[0]
        assert abs(slope - 2.0) < 0.1

    def test_axis_deviation_decays_quadratically(self):
        # h_{2,3} on the x1 axis is not exactly zero (the stable manifold is
        # only tangent to the axis); record the decay rate toward the origin
        nf = normal_form(0.0, 3.0)
        xs = np.array([-0.2, -0.1, -0.05, -0.025])
        dev = np.array(
            [np.hypot(*nf.field([x, 0.0, 0.0])[1:]) for x in xs]
        )
        slope = np.polyfit(np.log(-xs), np.log(dev), 1)[0]
        assert 1.7 < slope < 2.3
        # near the origin the deviation is far below the drift scale |x1|
        assert dev[-1] < 0.05 * 0.025

    def test_original_normal_consistency(self):
        nf = normal_form(0.03, 2.2)
        x = np.array([0.01, -0.02, 0.015])
        v = nf.to_original(x)
        f_orig = rhs_original(v, KineticParams(nu=nf.nu, p=nf.p))
        assert np.allclose(nf.field(x), nf.from_original(f_orig), atol=1e-13)
