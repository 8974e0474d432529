"""Gaussian measurement conditioning and outcome statistics."""

import numpy as np
import pytest
from scipy.integrate import dblquad

from conftest import random_valid_two_mode
from gaussianlink.core import (
    GaussianState,
    make_tmst,
    make_tmsv,
    purity,
    thermal_state,
    vacuum_state,
)
from gaussianlink.measurements import (
    GaussianPovmElement,
    condition_on_measurement,
    finite_gain_homodyne,
    general_gaussian_povm,
    heterodyne,
    homodyne_p,
    homodyne_x,
    sample_outcome,
)
from gaussianlink.purification import purity_heterodyne_closed


class TestPovmConstruction:
    def test_bad_spec_rejected(self):
        with pytest.raises(ValueError):
            GaussianPovmElement(np.eye(2), quadrature="x")
        with pytest.raises(ValueError):
            GaussianPovmElement(None, quadrature="y")

    def test_unphysical_upsilon_rejected(self):
        with pytest.raises(ValueError):
            GaussianPovmElement(0.3 * np.eye(2))

    def test_finite_gain_limits(self):
        assert np.allclose(finite_gain_homodyne(1.0).upsilon, np.eye(2))
        with pytest.raises(ValueError):
            finite_gain_homodyne(0.5)

    def test_finite_gain_dB_point(self):
        ups = finite_gain_homodyne(1.0 / 0.008**2).upsilon
        assert ups[0, 0] == pytest.approx(0.008)


class TestConditioning:
    def test_product_state_unchanged(self):
        st = thermal_state(0.7).tensor(thermal_state(0.1))
        for povm in (heterodyne(), homodyne_x(), general_gaussian_povm(0.6, 1.0)):
            rec = condition_on_measurement(st, 1, povm)
            assert np.allclose(rec.conditioned.covariance, 2.4 * np.eye(2))

    def test_heterodyne_purity_closed_form(self):
        # measuring one TMST mode with a coherent projection
        r, n, tau, m = 0.8, 0.02, 0.45, 1.0
        # one-mode-out purity from the general machinery, cross-checked in
        # purification tests; here assert the direct two-mode conditioning
        st = make_tmst(r, n)
        rec = condition_on_measurement(st, 1, heterodyne())
        c = (1 + 2 * n) * np.cosh(2 * r)
        expect = (c + 1) / ((1 + 2 * n) ** 2 + c)
        assert purity(rec.conditioned) == pytest.approx(expect)
        del tau, m

    def test_homodyne_pseudo_inverse_on_tmsv(self):
        rec = condition_on_measurement(make_tmsv(1.0), 1, homodyne_x())
        cov = rec.conditioned.covariance
        assert cov[0, 0] == pytest.approx(1.0 / np.cosh(2.0))
        assert cov[1, 1] == pytest.approx(np.cosh(2.0))

    def test_homodyne_equals_squeezed_limit(self, rng):
        for _ in range(20):
            st = random_valid_two_mode(rng)
            ideal = condition_on_measurement(st, 1, homodyne_x()).conditioned
            squeezed = condition_on_measurement(
                st, 1, general_gaussian_povm(15.0, 0.0)
            ).conditioned
            assert np.max(np.abs(ideal.covariance - squeezed.covariance)) < 1e-6

    def test_finite_gain_converges_to_homodyne(self):
        st = make_tmst(1.0, 0.01)
        ideal = condition_on_measurement(st, 1, homodyne_x()).conditioned
        fg = condition_on_measurement(
            st, 1, finite_gain_homodyne(1e12)
        ).conditioned
        assert np.max(np.abs(ideal.covariance - fg.covariance)) < 1e-5

    def test_homodyne_p_direction(self):
        rec = condition_on_measurement(make_tmsv(1.0), 1, homodyne_p())
        assert rec.conditioned.covariance[1, 1] == pytest.approx(
            1.0 / np.cosh(2.0)
        )

    def test_conditioning_preserves_validity(self, rng):
        for _ in range(1000):
            st = random_valid_two_mode(rng, margin=1.01)
            povm = (
                heterodyne()
                if rng.uniform() < 0.5
                else general_gaussian_povm(rng.uniform(0, 2), rng.uniform(0, 6))
            )
            rec = condition_on_measurement(st, 1, povm)
            assert rec.conditioned.n_modes == 1  # constructor validated it

    def test_covariance_outcome_independent(self, rng):
        st = random_valid_two_mode(rng)
        povm = heterodyne()
        rec_a = condition_on_measurement(st, 1, povm, outcome=np.zeros(2))
        rec_b = condition_on_measurement(st, 1, povm, outcome=np.array([2.0, -1.0]))
        assert np.array_equal(
            rec_a.conditioned.covariance, rec_b.conditioned.covariance
        )
        assert not np.allclose(
            rec_a.conditioned.displacement, rec_b.conditioned.displacement
        )

    def test_displacement_update(self):
        st = GaussianState(
            2, np.array([0.0, 0.0, 1.0, -0.5]), make_tmsv(0.5).covariance
        )
        rec = condition_on_measurement(st, 1, heterodyne(), outcome=np.zeros(2))
        # correlated mode picks up a conditional displacement
        assert np.linalg.norm(rec.conditioned.displacement) > 0.0


class TestProbabilityDensity:
    def test_density_normalized(self):
        st = make_tmst(0.6, 0.05)

        def dens(y, x):
            rec = condition_on_measurement(
                st, 1, heterodyne(), outcome=np.array([x, y])
            )
            return rec.probability_density

        val, _ = dblquad(dens, -15, 15, -15, 15, epsabs=1e-9)
        assert val == pytest.approx(1.0, abs=1e-6)

    def test_homodyne_density_normalized(self):
        st = make_tmsv(0.8)

        def dens(x):
            rec = condition_on_measurement(
                st, 1, homodyne_x().with_offset([x, 0.0])
            )
            return rec.probability_density

        from scipy.integrate import quad

        val, _ = quad(dens, -20, 20)
        assert val == pytest.approx(1.0, abs=1e-8)

    def test_sampling_matches_density_covariance(self, rng):
        st = make_tmst(0.7, 0.02)
        povm = heterodyne()
        pts = np.array(
            [sample_outcome(st, 1, povm, rng) for _ in range(20000)]
        )
        target = (st.block(1, 1) + povm.upsilon) / 2.0
        sample_cov = np.cov(pts.T)
        assert np.max(np.abs(sample_cov - target)) < 0.1
