"""Symplectic core: states, spectra, normal forms and integral identities."""

import numpy as np
import pytest
from scipy.integrate import dblquad

from conftest import random_valid_two_mode
from gaussianlink import core
from gaussianlink.channels import phase_shifter, single_mode_squeezer
from gaussianlink.core import (
    GaussianState,
    InvalidStateError,
    SymplecticMap,
    check_cm_validity,
    gaussian_integral,
    gaussian_integral_quadratic,
    gaussian_integral_quartic,
    gaussian_integral_sextic,
    is_separable,
    log_negativity,
    make_tmst,
    make_tmsv,
    negativity,
    omega,
    pt_symplectic_eigenvalue,
    purity,
    standard_form_state,
    symplectic_diagonalize,
    symplectic_eigenvalues,
    symplectic_spectrum,
    thermal_state,
    to_normal_form,
    vacuum_state,
    w_function,
)


class TestConstructors:
    def test_tmsv_zero_squeezing_is_vacuum(self):
        st = make_tmsv(0.0)
        assert np.allclose(st.covariance, np.eye(4))

    def test_tmsv_negative_r_rejected(self):
        with pytest.raises(ValueError):
            make_tmsv(-0.1)

    def test_tmst_negative_n_rejected(self):
        with pytest.raises(ValueError):
            make_tmst(0.5, -1e-3)

    def test_tmst_reduces_to_tmsv(self):
        assert np.allclose(
            make_tmst(0.7, 0.0).covariance, make_tmsv(0.7).covariance
        )

    def test_tmsv_determinant_unity(self):
        assert np.linalg.det(make_tmsv(1.3).covariance) == pytest.approx(1.0)

    def test_asymmetric_covariance_rejected(self):
        cov = np.eye(4)
        cov[0, 1] = 1e-6
        with pytest.raises(InvalidStateError):
            GaussianState(2, np.zeros(4), cov)

    def test_unphysical_covariance_rejected(self):
        with pytest.raises(InvalidStateError):
            GaussianState(1, np.zeros(2), 0.5 * np.eye(2))

    def test_mean_photons(self):
        assert thermal_state(1.0).mean_photons(0) == pytest.approx(1.0)
        assert core.coherent_state(1 + 2j).mean_photons(0) == pytest.approx(5.0)


class TestSpectra:
    def test_tmsv_pt_eigenvalue(self):
        assert pt_symplectic_eigenvalue(make_tmsv(1.0)) == pytest.approx(
            np.exp(-2.0), abs=1e-12
        )

    def test_tmst_pt_eigenvalue(self):
        # nu-tilde = (1 + 2n) e^{-2r}
        assert pt_symplectic_eigenvalue(make_tmst(1.0, 0.01)) == pytest.approx(
            1.02 * np.exp(-2.0), abs=1e-12
        )

    def test_tmsv_symplectic_eigenvalues_pure(self):
        nu_p, nu_m = symplectic_eigenvalues(make_tmsv(0.8))
        assert nu_p == pytest.approx(1.0, abs=1e-9)
        assert nu_m == pytest.approx(1.0, abs=1e-9)

    def test_tmst_symplectic_eigenvalues(self):
        nu_p, nu_m = symplectic_eigenvalues(make_tmst(1.0, 0.01))
        assert nu_p == pytest.approx(1.02, abs=1e-9)
        assert nu_m == pytest.approx(1.02, abs=1e-9)

    def test_vacuum_thermal_product(self):
        st = vacuum_state(1).tensor(thermal_state(1.0))
        nu_p, nu_m = symplectic_eigenvalues(st)
        assert (nu_p, nu_m) == pytest.approx((3.0, 1.0))

    def test_two_mode_formula_matches_general_spectrum(self, rng):
        for _ in range(25):
            st = random_valid_two_mode(rng)
            nu_p, nu_m = symplectic_eigenvalues(st)
            spec = symplectic_spectrum(st)
            assert np.allclose(sorted([nu_p, nu_m]), sorted(spec), atol=1e-10)

    def test_negativity_tmsv_closed_form(self):
        lam = np.tanh(0.9)
        assert negativity(make_tmsv(0.9)) == pytest.approx(lam / (1 - lam))

    def test_negativity_product_vacua_zero(self):
        assert negativity(vacuum_state(2)) == 0.0

    def test_tmst_negativity_value(self):
        nu = 1.02 * np.exp(-2.0)
        assert negativity(make_tmst(1.0, 0.01)) == pytest.approx(
            (1 - nu) / (2 * nu)
        )
        assert log_negativity(make_tmst(1.0, 0.01)) == pytest.approx(
            np.log2(1.0 / nu)
        )

    def test_separability(self):
        assert is_separable(vacuum_state(2))
        assert not is_separable(make_tmst(1.0, 0.01))

    def test_purity(self):
        assert purity(make_tmsv(1.2)) == pytest.approx(1.0)
        assert purity(thermal_state(1.0)) == pytest.approx(1.0 / 3.0)
        assert purity(make_tmst(1.0, 0.01)) == pytest.approx(1.0 / 1.02**2)

    def test_check_cm_validity(self):
        assert check_cm_validity(1.0, 1.0, 0.0) == pytest.approx(0.0)
        assert check_cm_validity(2.0, 1.5, 0.5) > 0.0


class TestSymplecticMaps:
    def test_non_symplectic_rejected(self):
        with pytest.raises(ValueError):
            SymplecticMap(2.0 * np.eye(2))

    def test_validity_preserved_under_symplectics(self, rng):
        for _ in range(40):
            st = random_valid_two_mode(rng)
            xi, phi = rng.uniform(0, 1.2), rng.uniform(0, 2 * np.pi)
            local = np.block(
                [
                    [single_mode_squeezer(xi, phi).matrix, np.zeros((2, 2))],
                    [np.zeros((2, 2)), phase_shifter(phi).matrix],
                ]
            )
            moved = SymplecticMap(local).apply(st)  # constructor re-validates
            assert moved.n_modes == 2

    def test_pt_eigenvalue_local_invariance(self, rng):
        for _ in range(30):
            st = random_valid_two_mode(rng)
            s1 = single_mode_squeezer(rng.uniform(0, 1.0), rng.uniform(0, 6)).matrix
            s2 = phase_shifter(rng.uniform(0, 6)).matrix
            local = np.block([[s1, np.zeros((2, 2))], [np.zeros((2, 2)), s2]])
            moved = SymplecticMap(local).apply(st)
            assert pt_symplectic_eigenvalue(moved) == pytest.approx(
                pt_symplectic_eigenvalue(st), rel=1e-9
            )

    def test_uncertainty_invariant_form(self, rng):
        for _ in range(40):
            st = random_valid_two_mode(rng)
            a, b = st.block(0, 0), st.block(1, 1)
            e = st.block(0, 1)
            delta = np.linalg.det(a) + np.linalg.det(b) + 2 * np.linalg.det(e)
            assert np.linalg.det(st.covariance) - delta + 1 >= -1e-9


class TestNormalForm:
    def test_already_normal_form_identity_like(self):
        st = standard_form_state(2.0, 1.5, 0.8)
        nf = to_normal_form(st)
        assert nf.a == pytest.approx(2.0)
        assert nf.b == pytest.approx(1.5)
        assert nf.c1 == pytest.approx(0.8)
        assert nf.c2 == pytest.approx(-0.8)

    def test_random_states_reach_form_and_preserve_nu(self, rng):
        for _ in range(60):
            st = random_valid_two_mode(rng)
            nf = to_normal_form(st)
            s = nf.transform.matrix
            rec = s @ st.covariance @ s.T
            assert np.max(np.abs(rec - nf.covariance())) < 1e-9
            assert nf.c1 >= nf.c2
            nf_state = GaussianState(2, np.zeros(4), nf.covariance())
            assert pt_symplectic_eigenvalue(nf_state) == pytest.approx(
                pt_symplectic_eigenvalue(st), rel=1e-9, abs=1e-10
            )

    def test_rotated_tmst_recovery(self):
        st = make_tmst(0.7, 0.03)
        lift = np.eye(4)
        lift[:2, :2] = phase_shifter(0.83).matrix
        rotated = SymplecticMap(lift).apply(st)
        nf = to_normal_form(rotated)
        c = 1.06 * np.cosh(1.4)
        s = 1.06 * np.sinh(1.4)
        assert nf.a == pytest.approx(c)
        assert nf.b == pytest.approx(c)
        assert nf.c1 == pytest.approx(s)
        assert nf.c2 == pytest.approx(-s)


class TestSymplecticDiagonalization:
    def test_tmsv_product_form(self):
        nf = to_normal_form(make_tmsv(0.6))
        s_d = symplectic_diagonalize(nf)
        diag = s_d.matrix @ nf.covariance() @ s_d.matrix.T
        assert np.allclose(diag, np.eye(4), atol=1e-8)

    def test_tmst_diagonal(self):
        nf = to_normal_form(make_tmst(1.0, 0.01))
        s_d = symplectic_diagonalize(nf)
        diag = s_d.matrix @ nf.covariance() @ s_d.matrix.T
        assert np.allclose(diag, 1.02 * np.eye(4), atol=1e-8)

    def test_random_matches_symplectic_eigenvalues(self, rng):
        for _ in range(20):
            st = random_valid_two_mode(rng)
            nf = to_normal_form(st)
            s_d = symplectic_diagonalize(nf)
            diag = s_d.matrix @ nf.covariance() @ s_d.matrix.T
            nu_p, nu_m = symplectic_eigenvalues(st)
            got = np.sort(np.diag(diag))
            assert np.allclose(
                got, sorted([nu_m, nu_m, nu_p, nu_p]), atol=1e-8
            )
            assert np.max(np.abs(diag - np.diag(np.diag(diag)))) < 1e-8

    def test_free_parameters_still_symplectic(self):
        nf = to_normal_form(make_tmst(0.8, 0.02))
        s_d = symplectic_diagonalize(nf, w1=0.1, w2=-0.05)
        om = omega(2)
        assert np.linalg.norm(s_d.matrix @ om @ s_d.matrix.T - om) < 1e-9


def _random_pd_2x2(rng, scale=1.0):
    m = rng.normal(size=(2, 2))
    return m @ m.T + scale * np.eye(2)


def _random_sym_2x2(rng):
    m = rng.normal(size=(2, 2))
    return 0.5 * (m + m.T)


class TestWFunction:
    def test_identity_case(self):
        assert np.allclose(w_function(np.eye(2), np.eye(2)), np.eye(2))

    def test_w_of_x_x_is_inverse(self, rng):
        for _ in range(20):
            x = _random_pd_2x2(rng)
            assert np.allclose(w_function(x, x), np.linalg.inv(x), atol=1e-10)

    def test_identities_bulk(self, rng):
        # trace identities, involution, sandwich and linearity, 1000 cases
        for _ in range(1000):
            x = _random_pd_2x2(rng, scale=0.5)
            m = _random_sym_2x2(rng)
            p = _random_sym_2x2(rng)
            a, b = rng.normal(size=2)
            x_inv = np.linalg.inv(x)
            w = w_function(x, m)
            norm = max(1.0, np.linalg.norm(m), np.linalg.norm(x))
            assert abs(np.trace(x_inv @ w_function(x_inv, m)) - np.trace(x @ m)) \
                < 1e-9 * norm**2
            assert abs(np.trace(x_inv @ m) - np.trace(x @ w)) < 1e-9 * norm**2
            assert np.linalg.norm(w_function(np.linalg.inv(x), w) - m) \
                < 1e-9 * norm**2
            assert np.linalg.norm(x @ w @ x - m) < 1e-9 * norm**2
            assert np.linalg.norm(
                w_function(x, a * m + b * p)
                - a * w_function(x, m) - b * w_function(x, p)
            ) < 1e-9 * norm**2

    def test_determinant_identity(self, rng):
        for _ in range(50):
            x = _random_pd_2x2(rng)
            m = _random_sym_2x2(rng)
            x_inv = np.linalg.inv(x)
            lhs = np.linalg.det(x_inv @ w_function(x_inv, m))
            assert lhs == pytest.approx(np.linalg.det(m @ x), rel=1e-8, abs=1e-9)


class TestGaussianIntegralOracle:
    def test_plain_integral_value(self):
        assert gaussian_integral(2.0 * np.eye(2)) == pytest.approx(np.pi / 2.0)

    def test_quadratic_vs_quadrature(self):
        x = np.diag([1.0, 3.0])
        m = np.diag([1.0, -1.0])
        closed = gaussian_integral_quadratic(x, m)

        def integrand(p, q):
            v = np.array([q, p])
            return (v @ m @ v) * np.exp(-0.5 * v @ x @ v)

        # d^2 alpha = dx dp / 2
        num, _ = dblquad(integrand, -12, 12, -12, 12, epsabs=1e-10)
        assert closed == pytest.approx(num / 2.0, abs=1e-6)

    def test_with_source_vs_quadrature(self, rng):
        x = _random_pd_2x2(rng, scale=1.0)
        m = _random_sym_2x2(rng)
        j = rng.normal(size=2) * 0.5
        closed = gaussian_integral_quadratic(x, m, j)

        def integrand(p, q):
            v = np.array([q, p])
            return (v @ m @ v) * np.exp(-0.5 * v @ x @ v + v @ j)

        num, _ = dblquad(integrand, -14, 14, -14, 14, epsabs=1e-10)
        assert closed == pytest.approx(num / 2.0, rel=1e-6, abs=1e-6)

    def test_sextic_vs_monte_carlo(self, rng):
        x = np.diag([1.0, 2.0])
        m, p, q = (np.diag(d) for d in ([1.0, 0.5], [0.3, -0.2], [1.0, 1.0]))
        closed = gaussian_integral_sextic(x, m, p, q)
        n_samp = 10**7
        samples = rng.multivariate_normal(
            np.zeros(2), np.linalg.inv(x), size=n_samp
        )
        vals = (
            np.einsum("ni,ij,nj->n", samples, m, samples)
            * np.einsum("ni,ij,nj->n", samples, p, samples)
            * np.einsum("ni,ij,nj->n", samples, q, samples)
        )
        norm = gaussian_integral(x)
        mc = vals.mean() * norm
        err = 3.0 * vals.std() / np.sqrt(n_samp) * norm
        assert abs(closed - mc) < err

    def test_quartic_consistency_with_sextic(self, rng):
        # sextic with Q = 0 must vanish; quartic against quadrature
        x = _random_pd_2x2(rng)
        m = _random_sym_2x2(rng)
        p = _random_sym_2x2(rng)
        assert gaussian_integral_sextic(x, m, p, np.zeros((2, 2))) == 0.0

        def integrand(pp, qq):
            v = np.array([qq, pp])
            return (v @ m @ v) * (v @ p @ v) * np.exp(-0.5 * v @ x @ v)

        num, _ = dblquad(integrand, -14, 14, -14, 14, epsabs=1e-10)
        assert gaussian_integral_quartic(x, m, p) == pytest.approx(
            num / 2.0, rel=1e-6, abs=1e-6
        )

    def test_char_function_gaussian(self, rng):
        st = make_tmst(0.6, 0.02)
        val = st.char_function(np.zeros(4))
        assert val == pytest.approx(1.0)
        pt = rng.normal(size=4)
        assert abs(st.char_function(pt)) <= 1.0
