"""Gaussian channels: certificates, composition, JPA/HEMT, effective links."""

import numpy as np
import pytest

from conftest import random_valid_two_mode
from gaussianlink.channels import (
    GaussianChannel,
    JpaParams,
    TemperatureProfileLink,
    amplifier_channel,
    apply_channel,
    attenuation_channel,
    beam_splitter,
    beam_splitter_cascade,
    effective_link,
    effective_link_general,
    hemt_channel,
    hemt_gain_from_photons,
    identity_channel,
    jpa_channel,
    jpa_output_params,
    phase_shifter,
    single_mode_squeezer,
)
from gaussianlink.core import (
    GaussianState,
    InvalidChannelError,
    SymplecticMap,
    is_separable,
    make_tmst,
    make_tmsv,
    negativity,
    omega,
    symplectic_spectrum,
    thermal_state,
    to_normal_form,
    vacuum_state,
)


class TestChannelBasics:
    def test_invalid_channel_rejected(self):
        with pytest.raises(InvalidChannelError):
            GaussianChannel(2.0 * np.eye(2), np.zeros((2, 2)))

    def test_identity_channel(self):
        st = make_tmst(0.8, 0.02)
        out = apply_channel(st, identity_channel(2))
        assert np.allclose(out.covariance, st.covariance)

    def test_attenuation_on_vacuum_is_vacuum(self):
        out = apply_channel(vacuum_state(1), attenuation_channel(0.37, 1.0))
        assert np.allclose(out.covariance, np.eye(2))

    def test_attenuation_thermal_mixing(self):
        out = apply_channel(thermal_state(1.0), attenuation_channel(0.5, 1.0))
        assert out.covariance[0, 0] == pytest.approx(2.0)

    def test_attenuation_limits(self):
        assert np.allclose(attenuation_channel(1.0, 5.0).x, np.eye(2))
        ch = attenuation_channel(0.0, 3.0)
        out = apply_channel(make_tmsv(1.0), ch, [1])
        assert out.block(1, 1)[0, 0] == pytest.approx(3.0)
        assert np.allclose(out.block(0, 1), 0.0)

    def test_attenuation_range_errors(self):
        with pytest.raises(ValueError):
            attenuation_channel(1.2, 1.0)
        with pytest.raises(ValueError):
            attenuation_channel(0.5, 0.5)

    def test_asymmetric_state_reconstruction(self):
        # loss on mode B of a TMST reproduces the open-air covariance blocks
        eta = 0.1
        st = make_tmst(1.0, 0.01)
        out = apply_channel(st, attenuation_channel(1 - eta, 2501.0), [1])
        c, s = np.cosh(2.0), np.sinh(2.0)
        assert out.block(1, 1)[0, 0] == pytest.approx(
            2501.0 * eta + 1.02 * (1 - eta) * c
        )
        assert out.block(0, 1)[0, 0] == pytest.approx(
            1.02 * np.sqrt(1 - eta) * s
        )

    def test_composition_identity(self, rng):
        for _ in range(30):
            st = random_valid_two_mode(rng)
            t1, t2 = rng.uniform(0.2, 1.0, size=2)
            m1, m2 = rng.uniform(1.0, 4.0, size=2)
            c1 = attenuation_channel(t1, m1)
            c2 = amplifier_channel(1.0 + rng.uniform(0, 2), m2)
            seq = apply_channel(apply_channel(st, c1, [0]), c2, [0])
            combo = apply_channel(st, c2.compose(c1), [0])
            assert np.max(np.abs(seq.covariance - combo.covariance)) < 1e-10

    def test_attenuation_never_breaks_uncertainty(self, rng):
        for _ in range(20):
            st = random_valid_two_mode(rng)
            out = apply_channel(st, attenuation_channel(rng.uniform(), 1.0), [0])
            assert symplectic_spectrum(out).min() >= 1.0 - 1e-9


class TestSymplecticElements:
    def test_beam_splitter_identity(self):
        assert np.allclose(beam_splitter(1.0).matrix, np.eye(4))

    def test_beam_splitter_symplectic(self, rng):
        for _ in range(20):
            bs = beam_splitter(rng.uniform(), rng.uniform(0, 2 * np.pi))
            om = omega(2)
            assert np.linalg.norm(bs.matrix @ om @ bs.matrix.T - om) < 1e-12

    def test_two_squeezers_make_tmsv(self):
        # orthogonally squeezed vacua through a balanced splitter
        xi = 0.8
        sq_x = single_mode_squeezer(xi, 0.0)
        sq_p = single_mode_squeezer(xi, np.pi)
        st = sq_x.apply(vacuum_state(1)).tensor(sq_p.apply(vacuum_state(1)))
        out = beam_splitter(0.5).apply(st)
        assert np.allclose(out.covariance, make_tmsv(xi).covariance, atol=1e-12)

    def test_squeezer_on_vacuum(self):
        out = single_mode_squeezer(0.5, 0.0).apply(vacuum_state(1))
        assert np.allclose(
            out.covariance, np.diag([np.exp(-1.0), np.exp(1.0)])
        )

    def test_phase_shifter_rotates(self):
        st = single_mode_squeezer(0.5, 0.0).apply(vacuum_state(1))
        out = phase_shifter(np.pi / 2).apply(st)
        assert out.covariance[0, 0] == pytest.approx(np.exp(1.0))


class TestJpa:
    def test_param_validation(self):
        with pytest.raises(ValueError):
            JpaParams(1.2)
        with pytest.raises(ValueError):
            JpaParams(0.5, gamma_bar=1e-3)
        with pytest.raises(ValueError):
            JpaParams(0.5, m_jpa=0.5)

    def test_ideal_jpa_identity(self):
        p = JpaParams(0.0, 0.0, 1.0)
        ch = jpa_channel(p)
        assert np.allclose(np.abs(ch.x), np.eye(2))
        assert np.allclose(ch.y, 0.0)
        m_out, xi = jpa_output_params(1.0, p)
        assert m_out == pytest.approx(1.0)
        assert xi == pytest.approx(0.0)

    def test_squeezing_gain_closed_form(self):
        p = JpaParams(1.0 / 3.0, 0.0, 1.0)
        _, xi = jpa_output_params(1.0, p)
        assert np.exp(-2 * xi) == pytest.approx(0.25)

    def test_lossy_jpa_matrix_oracle(self):
        p = JpaParams(0.5, 1e-5, 1.0)
        m_out, xi = jpa_output_params(1.0, p)
        out = apply_channel(thermal_state(0.0), jpa_channel(p))
        # read (m', xi') back from the diagonal covariance
        sx, sp = out.covariance[0, 0], out.covariance[1, 1]
        assert np.sqrt(sx * sp) == pytest.approx(m_out, rel=1e-12)
        assert np.sqrt(sx / sp) == pytest.approx(np.exp(-2 * xi), rel=1e-12)

    def test_jpa_channel_certificate_holds(self):
        for chi in (0.1, 0.5, 0.99):
            jpa_channel(JpaParams(chi, 5e-5, 2.0))  # constructor checks CP


class TestHemt:
    def test_identity_at_unit_gain(self):
        st = thermal_state(0.3)
        out = apply_channel(st, hemt_channel(1.0, 15.0))
        assert np.allclose(out.covariance, st.covariance)

    def test_strong_amplification_destroys_entanglement(self):
        st = make_tmst(1.0, 0.01)
        out = apply_channel(st, hemt_channel(2000.0, 15.0), [1])
        assert is_separable(out)

    def test_gain_two_vacuum(self):
        out = apply_channel(vacuum_state(1), hemt_channel(2.0, 0.0))
        assert out.covariance[0, 0] == pytest.approx(3.0)

    def test_gain_from_photon_ratio(self):
        assert hemt_gain_from_photons(20.0, 1e-2) == pytest.approx(2000.0)

    def test_amplification_never_increases_negativity(self, rng):
        for _ in range(15):
            st = random_valid_two_mode(rng)
            g = 1.0 + rng.uniform(0, 3)
            out = apply_channel(st, amplifier_channel(g, 1.0), [1])
            assert negativity(out) <= negativity(st) + 1e-10


class TestEffectiveLink:
    def test_step_profile_limits(self):
        base = dict(mu_in=1e-3, mu_out=1e-2, n_in=0.01, n_out=1250.0)
        full_cold = TemperatureProfileLink(length=10.0, cold_length=10.0, **base)
        assert effective_link(full_cold)[1] == pytest.approx(0.01)
        no_cold = TemperatureProfileLink(length=10.0, cold_length=0.0, **base)
        assert effective_link(no_cold)[1] == pytest.approx(1250.0)

    def test_homogeneous_profile(self):
        link = TemperatureProfileLink(5.0, 2.5, 1e-3, 1e-3, 0.7, 0.7)
        eta, n_eff = effective_link(link)
        assert eta == pytest.approx(1.0 - np.exp(-5e-3))
        assert n_eff == pytest.approx(0.7)

    def test_invalid_profile(self):
        with pytest.raises(ValueError):
            TemperatureProfileLink(1.0, 2.0, 1e-3, 1e-3, 0.1, 0.1)

    def test_general_quadrature_matches_step(self):
        link = TemperatureProfileLink(8.0, 3.0, 2e-3, 8e-3, 0.05, 900.0)
        eta_s, n_s = effective_link(link)
        mu = lambda x: 2e-3 if x < 3.0 else 8e-3
        nf = lambda x: 0.05 if x < 3.0 else 900.0
        eta_g, n_g = effective_link_general(mu, nf, 8.0)
        assert eta_g == pytest.approx(eta_s, rel=1e-6)
        assert n_g == pytest.approx(n_s, rel=1e-4)

    def test_cascade_matches_effective_beam_splitter(self):
        # 64 homogeneous slices against the closed form
        n_slices = 64
        mu, length, n_th = 1.44e-6, 4e5, 1250.0
        eta_slice = 1.0 - np.exp(-mu * length / n_slices)
        eta, n_eff = beam_splitter_cascade(
            [eta_slice] * n_slices, [n_th] * n_slices
        )
        assert eta == pytest.approx(1.0 - np.exp(-mu * length), rel=1e-12)
        assert n_eff == pytest.approx(n_th, rel=1e-9)
