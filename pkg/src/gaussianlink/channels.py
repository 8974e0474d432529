"""Gaussian channel algebra: (X, Y) maps, loss, amplification, JPA noise."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .core import (
    I2,
    GaussianState,
    InvalidChannelError,
    SymplecticMap,
    omega,
)


@dataclass(frozen=True)
class GaussianChannel:
    """Covariance map Sigma -> X Sigma X^T + Y with CP certificate."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape[0] != y.shape[0] or y.shape[0] != y.shape[1]:
            raise ValueError("inconsistent channel shapes")
        if x.shape[0] % 2 or x.shape[1] % 2:
            raise ValueError("channel dimensions must be even")
        y = 0.5 * (y + y.T)
        om_out = omega(x.shape[0] // 2)
        om_in = omega(x.shape[1] // 2)
        cert = y + 1j * om_out - 1j * x @ om_in @ x.T
        scale = max(1.0, float(np.max(np.abs(y))), float(np.max(np.abs(x))) ** 2)
        if float(np.linalg.eigvalsh(cert).min()) < -1e-9 * scale:
            raise InvalidChannelError("Y + i Omega - i X Omega X^T is not PSD")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n_modes(self) -> int:
        return self.x.shape[1] // 2

    def compose(self, first: "GaussianChannel") -> "GaussianChannel":
        """Channel equal to `self` applied after `first`."""
        return GaussianChannel(
            self.x @ first.x, self.x @ first.y @ self.x.T + self.y
        )


def apply_channel(state: GaussianState, channel: GaussianChannel, modes=None):
    """Apply an (X, Y) channel to the listed modes (all modes by default)."""
    if modes is None:
        modes = list(range(state.n_modes))
    modes = list(modes)
    if channel.n_modes != len(modes):
        raise ValueError("channel acts on a different number of modes")
    idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
    n = state.n_modes
    x_full = np.eye(2 * n)
    y_full = np.zeros((2 * n, 2 * n))
    x_full[np.ix_(idx, idx)] = channel.x
    y_full[np.ix_(idx, idx)] = channel.y
    cov = x_full @ state.covariance @ x_full.T + y_full
    disp = x_full @ state.displacement
    return GaussianState(n, disp, cov)


def identity_channel(n_modes: int = 1) -> GaussianChannel:
    return GaussianChannel(np.eye(2 * n_modes), np.zeros((2 * n_modes, 2 * n_modes)))


def attenuation_channel(tau: float, m_env: float = 1.0) -> GaussianChannel:
    """Single-mode beam-splitter loss into an environment with variance m_env."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    if m_env < 1.0:
        raise ValueError("environment variance must be at least 1 (vacuum)")
    return GaussianChannel(np.sqrt(tau) * I2, (1.0 - tau) * m_env * I2)


def amplifier_channel(gain: float, m_env: float = 1.0) -> GaussianChannel:
    """Phase-insensitive amplifier of power gain >= 1."""
    if gain < 1.0:
        raise ValueError("gain must be at least 1")
    return GaussianChannel(np.sqrt(gain) * I2, (gain - 1.0) * m_env * I2)


def hemt_channel(g_h: float, n_h: float) -> GaussianChannel:
    """HEMT input-output relation as a one-mode Gaussian channel."""
    return amplifier_channel(g_h, 1.0 + 2.0 * n_h)


def hemt_gain_from_photons(n_h: float, n_signal: float) -> float:
    """Gain implied by the noise-to-signal photon ratio n_H / n."""
    if n_signal <= 0:
        raise ValueError("signal photon number must be positive")
    return n_h / n_signal


# -- symplectic building blocks ------------------------------------------


def rotation_2x2(phi: float) -> np.ndarray:
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, -s], [s, c]])


def phase_shifter(phi: float) -> SymplecticMap:
    return SymplecticMap(rotation_2x2(phi))


def beam_splitter(tau: float, phase: float = 0.0) -> SymplecticMap:
    """Two-mode beam splitter B(tau, phi) with transmissivity tau."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("transmissivity must lie in [0, 1]")
    t, r = np.sqrt(tau), np.sqrt(1.0 - tau)
    rot = rotation_2x2(phase)
    return SymplecticMap(
        np.block([[t * I2, r * rot], [-r * rot.T, t * I2]])
    )


def single_mode_squeezer(xi: float, phase: float = 0.0) -> SymplecticMap:
    ch, sh = np.cosh(xi), np.sinh(xi)
    c, s = np.cos(phase), np.sin(phase)
    return SymplecticMap(
        np.array([[ch - sh * c, -sh * s], [-sh * s, ch + sh * c]])
    )


# -- JPA noise model ------------------------------------------------------


@dataclass(frozen=True)
class JpaParams:
    """Normalized JPA parameters: three-wave mixing strength, loss, bath."""

    chi_bar: float
    gamma_bar: float = 0.0
    m_jpa: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.chi_bar <= 1.0:
            raise ValueError("chi_bar must lie in [0, 1]")
        if not 0.0 <= self.gamma_bar < 1e-4:
            raise ValueError("gamma_bar must lie in [0, 1e-4)")
        if self.m_jpa < 1.0:
            raise ValueError("bath variance must be at least 1")


def jpa_coefficients(p: JpaParams) -> tuple[float, float, float, float]:
    chi, gam = p.chi_bar, p.gamma_bar
    a1 = -(1.0 - chi - gam) / (1.0 + chi + gam)
    a2 = -2.0 * np.sqrt(gam) / (1.0 + chi + gam)
    b1 = -(1.0 + chi - gam) / (1.0 - chi + gam)
    b2 = 2.0 * np.sqrt(gam) / (1.0 - chi + gam)
    return a1, a2, b1, b2


def jpa_channel(p: JpaParams) -> GaussianChannel:
    """Single-mode channel of a lossy JPA (bath coupling traced out)."""
    a1, a2, b1, b2 = jpa_coefficients(p)
    x = np.diag([a1, b1])
    y = p.m_jpa * np.diag([a2 * a2, b2 * b2])
    return GaussianChannel(x, y)


def jpa_output_params(m: float, p: JpaParams) -> tuple[float, float]:
    """(m', xi') of the squeezed thermal state a JPA makes from variance m."""
    chi, gam = p.chi_bar, p.gamma_bar
    num1 = m * (1.0 - chi - gam) ** 2 + 4.0 * p.m_jpa * gam
    num2 = m * (1.0 + chi - gam) ** 2 + 4.0 * p.m_jpa * gam
    m_out = np.sqrt(num1 * num2) / ((1.0 - chi + gam) * (1.0 + chi + gam))
    e2xi = ((1.0 - chi + gam) / (1.0 + chi + gam)) * np.sqrt(num1 / num2)
    return float(m_out), float(-0.5 * np.log(e2xi))


# -- inhomogeneous-temperature link ---------------------------------------


@dataclass(frozen=True)
class TemperatureProfileLink:
    """Step profile of loss density and thermal occupation along a line."""

    length: float
    cold_length: float
    mu_in: float
    mu_out: float
    n_in: float
    n_out: float

    def __post_init__(self):
        if min(self.length, self.cold_length, self.mu_in, self.mu_out) < 0:
            raise ValueError("lengths and loss densities must be non-negative")
        if min(self.n_in, self.n_out) < 0:
            raise ValueError("thermal occupations must be non-negative")
        if self.cold_length > self.length:
            raise ValueError("cold section cannot exceed the total length")


def effective_link(profile: TemperatureProfileLink) -> tuple[float, float]:
    """(eta_eff, n_eff) of the single beam splitter replacing the array."""
    l, l0 = profile.length, profile.cold_length
    mu_in, mu_out = profile.mu_in, profile.mu_out
    n_in, n_out = profile.n_in, profile.n_out
    depth = mu_in * l0 + mu_out * (l - l0)
    eta = 1.0 - np.exp(-depth)
    if eta == 0.0:
        return 0.0, n_out
    e_in = np.exp(-mu_in * l0)
    e_out = np.exp(-mu_out * (l - l0))
    n_eff = (
        n_in * e_out * (1.0 - e_in) + n_out * (1.0 - e_out)
    ) / (1.0 - e_in * e_out)
    return float(eta), float(n_eff)


def effective_link_general(mu, n, length: float) -> tuple[float, float]:
    """(eta_eff, n_eff) for arbitrary profiles mu(x), n(x) by quadrature."""
    depth, _ = quad(mu, 0.0, length, limit=200)
    eta = 1.0 - np.exp(-depth)
    if eta == 0.0:
        return 0.0, n(length)

    def tail(x):
        val, _ = quad(mu, x, length, limit=200)
        return val

    integrand = lambda x: mu(x) * n(x) * np.exp(-tail(x))
    num, _ = quad(integrand, 0.0, length, limit=200)
    return float(eta), float(num / eta)


def beam_splitter_cascade(eta_slices, n_slices) -> tuple[float, float]:
    """Fold a finite beam-splitter array into (eta_eff, n_eff) exactly."""
    trans = 1.0
    noise = 0.0
    for eta_i, n_i in zip(eta_slices, n_slices):
        noise = noise * (1.0 - eta_i) + eta_i * n_i
        trans *= 1.0 - eta_i
    eta_eff = 1.0 - trans
    return float(eta_eff), float(noise / eta_eff) if eta_eff else 0.0
