"""Open-air and free-space propagation: loss models, entanglement reach,
diffraction, atmospheric attenuation, turbulence fading and link scenarios."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import i0e, i1e

from .core import (
    I2,
    SIGMA_Z,
    GaussianState,
    negativity,
    pt_symplectic_eigenvalue,
    two_mode_from_blocks,
)
from .teleportation import fidelity_coherent

PLANCK = 6.62607015e-34
C_LIGHT = 299792458.0
BOLTZMANN = 1.380649e-23
EARTH_RADIUS = 6371e3
SCALE_HEIGHT = 6600.0  # m, attenuation scale height

MU_OXYGEN_MICROWAVE = 1.44e-6  # 1/m at 5 GHz
MU_WATER_COEFF = 4.44e-8       # 1/m per (g/m^3), sea level, 5 GHz
MU_OPTICAL_SEA = 5e-6          # 1/m at 800 nm
MU_OPTICAL_RAIN = 3.4e-4       # 1/m

TABLE1 = {
    "mu": 1.44e-6,
    "temperature": 300.0,
    "n_th": 1250.0,
    "r": 1.0,
    "n": 1e-2,
    "tau": 0.95,
    "eta_ant": 0.0,
}

# Effective blackbody temperatures reproducing the printed background
# photon numbers for the optical links (radiance data folded into T).
BACKGROUND_TEMPS = {
    ("down", "day"): 1325.528,
    ("down", "night"): 720.665,
    ("up", "day"): 1295.905,
    ("up", "night"): 671.318,
}
HORIZONTAL_BACKGROUND = {"day": 4.75e-3, "night": 4.75e-8}
INTERSAT_BACKGROUND = 8.48e-9
HV_GROUND = {
    ("day", "clear"): 2.75e-14,
    ("night", "clear"): 1.7e-14,
    ("day", "rain"): 3.15e-14,
    ("night", "rain"): 2.15e-14,
}


# -- open-air (Ch. 5) ----------------------------------------------------------


@dataclass(frozen=True)
class OpenAirParams:
    mu: float = TABLE1["mu"]
    n_th: float = TABLE1["n_th"]
    eta_ant: float = 0.0
    length: float = 0.0

    def __post_init__(self):
        if min(self.mu, self.n_th, self.eta_ant, self.length) < 0:
            raise ValueError("open-air parameters must be non-negative")


def mu_with_humidity(p0: float = 0.0) -> float:
    """Oxygen plus water-vapor attenuation density at 5 GHz, sea level."""
    return MU_OXYGEN_MICROWAVE + MU_WATER_COEFF * p0


def eta_effective(params: OpenAirParams, length: float | None = None) -> float:
    ell = params.length if length is None else length
    return 1.0 - np.exp(-params.mu * ell) * (1.0 - params.eta_ant)


def lossy_tmst_asymmetric(r: float, n: float, params: OpenAirParams) -> GaussianState:
    """TMST with mode B sent a distance L through the thermal environment."""
    eta = eta_effective(params)
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    rho = (1.0 + 2.0 * params.n_th) / (1.0 + 2.0 * n)
    pref = 1.0 + 2.0 * n
    sig_a = pref * c * I2
    sig_b = pref * (rho * eta + (1.0 - eta) * c) * I2
    eps = pref * np.sqrt(1.0 - eta) * s * SIGMA_Z
    return two_mode_from_blocks(sig_a, sig_b, eps)


def lossy_tmst_symmetric(r: float, n: float, params: OpenAirParams,
                         l1: float | None = None, l2: float | None = None):
    """TMST generated midway; both modes propagate (L1 + L2 = L)."""
    if l1 is None and l2 is None:
        l1 = l2 = params.length / 2.0
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    rho = (1.0 + 2.0 * params.n_th) / (1.0 + 2.0 * n)
    pref = 1.0 + 2.0 * n
    etas = [eta_effective(params, l) for l in (l1, l2)]
    diag = [pref * (rho * e + (1.0 - e) * c) for e in etas]
    eps = pref * np.sqrt((1.0 - etas[0]) * (1.0 - etas[1])) * s * SIGMA_Z
    return two_mode_from_blocks(diag[0] * I2, diag[1] * I2, eps)


def entanglement_reach(r: float, n: float, n_th: float,
                       mu: float = TABLE1["mu"], eta_ant: float = 0.0,
                       kind: str = "asymmetric") -> tuple[float, float]:
    """(eta_max, L_max) where the lossy TMST state turns separable."""
    if r <= 0.0 or n >= np.exp(-r) * np.sinh(r):
        raise ValueError("no entanglement at the source for these r, n")
    c = (1.0 + 2.0 * n) * np.cosh(2.0 * r)
    nu_in = (1.0 + 2.0 * n) * np.exp(-2.0 * r)
    if kind == "asymmetric":
        eta_max = 1.0 / (
            1.0 + n_th / (1.0 + 2.0 * n * (1.0 + n) / (1.0 - c))
        )
        trips = 1.0
    elif kind == "symmetric":
        eta_max = (1.0 - nu_in) / (1.0 + 2.0 * n_th - nu_in)
        trips = 0.5
    else:
        raise ValueError("kind must be asymmetric or symmetric")
    if n_th == 0.0 or eta_max >= 1.0 - (1.0 - eta_ant) * 1e-300:
        return float(eta_max), float("inf")
    ratio = (1.0 - eta_max) / (1.0 - eta_ant)
    if ratio >= 1.0:
        return float(eta_max), 0.0
    return float(eta_max), float(-np.log(ratio) / (mu * trips))


# -- geometry, diffraction, attenuation (Ch. 6) --------------------------------


@dataclass(frozen=True)
class BeamGeometry:
    wavelength: float
    waist: float
    aperture: float
    curvature: float | None = None  # None = collimated

    @property
    def rayleigh(self) -> float:
        return np.pi * self.waist**2 / self.wavelength


def beam_waist(geom: BeamGeometry, z: float) -> float:
    focus = 0.0 if geom.curvature is None else z / geom.curvature
    return geom.waist * np.sqrt(
        (1.0 - focus) ** 2 + (z / geom.rayleigh) ** 2
    )


def diffraction_tau(geom: BeamGeometry, z: float, waist: float | None = None):
    w = beam_waist(geom, z) if waist is None else waist
    return 1.0 - np.exp(-2.0 * (geom.aperture / w) ** 2)


def friis_parabolic_tau(diameter: float, wavelength: float, z: float,
                        efficiency: float = 1.0) -> float:
    tau = (np.pi * diameter**2 * efficiency / (4.0 * z * wavelength)) ** 2
    return float(min(tau, 1.0))


def farfield_region(geom: BeamGeometry, z: float) -> str:
    lam = geom.wavelength
    two_w0 = 2.0 * geom.waist
    if two_w0 > (z * np.sqrt(lam) / 0.62) ** (2.0 / 3.0):
        return "near"
    if two_w0 < np.sqrt(z * lam / 2.0):
        return "far"
    return "fresnel"


def slant_altitude(y: float, theta: float, h0: float = 0.0) -> float:
    big_r = EARTH_RADIUS + h0
    return np.sqrt(big_r**2 + y**2 + 2.0 * y * big_r * np.cos(theta)) - big_r


def slant_distance(h: float, theta: float, h0: float = 0.0) -> float:
    big_r = EARTH_RADIUS + h0
    dh = h - h0
    return float(
        np.sqrt(dh * dh + 2.0 * dh * big_r + big_r**2 * np.cos(theta) ** 2)
        - big_r * np.cos(theta)
    )


def atm_tau_fixed(mu0: float, z: float, h: float = 0.0) -> float:
    return float(np.exp(-mu0 * z * np.exp(-h / SCALE_HEIGHT)))


def atm_tau_slant_optical(h: float, theta: float = 0.0, mu0: float = MU_OPTICAL_SEA,
                          h0: float = 0.0) -> float:
    z = slant_distance(h, theta, h0)
    g, _ = quad(
        lambda y: np.exp(-slant_altitude(y, theta, h0) / SCALE_HEIGHT),
        0.0, z, limit=200, epsrel=1e-8,
    )
    return float(np.exp(-mu0 * g))


def atm_tau_slant_microwave(h0: float, h: float, theta: float = 0.0,
                            p0: float = 7.5) -> float:
    """Oxygen + water-vapor slant absorption; altitudes in metres."""
    h0_km, h_km = h0 / 1e3, h / 1e3
    mu_o = 1.44e-3  # 1/km
    depth = mu_o * (h_km - h0_km) + 4.44e-5 * p0 * 2.0 * (
        np.exp(-h0_km / 2.0) - np.exp(-h_km / 2.0)
    )
    return float(np.exp(-depth / np.cos(theta)))


def thermal_background(wavelength: float, d_lambda: float, d_time: float,
                       fov: float, aperture: float, temperature: float) -> float:
    """Detected background photons via the blackbody collection formula."""
    g_r = d_lambda * d_time * fov * aperture**2
    n_bb = (
        2.0
        * C_LIGHT
        * wavelength**-4
        / (np.exp(PLANCK * C_LIGHT / (wavelength * BOLTZMANN * temperature)) - 1.0)
    )
    return float(g_r * n_bb)


def thermal_background_microwave(wavelength: float, fov: float, aperture: float,
                                 temperature: float) -> float:
    """Background photons with dt * dnu ~ 1 (microwave convention)."""
    g_r = wavelength**2 * fov * aperture**2 / C_LIGHT
    n_bb = (
        2.0
        * C_LIGHT
        * wavelength**-4
        / (np.exp(PLANCK * C_LIGHT / (wavelength * BOLTZMANN * temperature)) - 1.0)
    )
    return float(g_r * n_bb)


# -- turbulence ----------------------------------------------------------------


@dataclass(frozen=True)
class TurbulenceEnv:
    ground_cn2: float = HV_GROUND[("day", "clear")]
    wind: float = 21.0
    pointing_frac: float = 1e-6  # sigma_P = pointing_frac * z

    def cn2(self, h) -> np.ndarray:
        h = np.asarray(h, dtype=float)
        return (
            5.94e-53 * (self.wind / 27.0) ** 2 * h**10 * np.exp(-h / 1000.0)
            + 2.7e-16 * np.exp(-h / 1500.0)
            + self.ground_cn2 * np.exp(-h / 100.0)
        )


def coherence_length(env: TurbulenceEnv, z: float, wavelength: float,
                     path: str, h0: float = 0.0, theta: float = 0.0,
                     h_const: float | None = None) -> float:
    """Spherical-wave coherence length rho_0 along the path."""
    k = 2.0 * np.pi / wavelength
    if path == "horizontal":
        h_val = h0 if h_const is None else h_const
        y0 = 0.375 * z * env.cn2(h_val)  # Int (1-x/z)^{5/3} dx = 3z/8
    else:
        def weight(xi):
            pos = xi if path == "up" else z - xi
            return (1.0 - xi / z) ** (5.0 / 3.0) * env.cn2(
                slant_altitude(pos, theta, h0)
            )

        y0, _ = quad(weight, 0.0, z, limit=300, epsrel=1e-8)
    return float((1.46 * k * k * y0) ** (-3.0 / 5.0))


def short_term_waist(geom: BeamGeometry, z: float, rho0: float) -> float:
    w_z = beam_waist(geom, z)
    spread = 2.0 * (geom.wavelength * z / (np.pi * rho0)) ** 2
    corr = 1.0 - 0.66 * (rho0 / geom.waist) ** (1.0 / 3.0)
    return float(np.sqrt(w_z**2 + spread * max(corr, 0.0)))


def wandering_sigma(geom: BeamGeometry, z: float, rho0: float,
                    pointing_frac: float = 1e-6) -> float:
    sig_tb_sq = 0.1337 * geom.wavelength**2 * z**2 / (
        geom.waist ** (1.0 / 3.0) * rho0 ** (5.0 / 3.0)
    )
    return float(np.sqrt(sig_tb_sq + (pointing_frac * z) ** 2))


def weak_turbulence_ok(z: float, wavelength: float, aperture: float,
                       rho0: float) -> bool:
    k = 2.0 * np.pi / wavelength
    return z <= k * min(2.0 * aperture, rho0) ** 2


def aperture_transmission(q: float, waist: float, aperture: float) -> float:
    """Gaussian-beam power through a circular aperture displaced by q.

    Direct integration of the incomplete Weber integrand with the scaled
    modified Bessel function.
    """
    if q <= 0.0:
        return float(1.0 - np.exp(-2.0 * (aperture / waist) ** 2))
    w2 = waist * waist

    def integrand(t):
        return t * i0e(t) * np.exp(t - t * t * w2 / (8.0 * q * q))

    upper = 4.0 * q * aperture / w2
    val, _ = quad(integrand, 0.0, upper, limit=300, epsrel=1e-10)
    return float(np.exp(-4.0 * q * q / w2) * np.exp(2.0 * q * q / w2)
                 * val * w2 / (4.0 * q * q))


@dataclass(frozen=True)
class FadingChannel:
    """Ensemble of pure-loss channels induced by beam wandering."""

    tau_max: float
    q0: float
    kappa: float
    sigma: float
    waist_st: float
    aperture: float
    weak_ok: bool = True

    def tau_of_q(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=float)
        return self.tau_max * np.exp(-((q / self.q0) ** self.kappa))

    def pdf_tau(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        logratio = np.log(self.tau_max / tau)
        pref = self.q0**2 / (self.kappa * self.sigma**2 * tau)
        return (
            pref
            * logratio ** (2.0 / self.kappa - 1.0)
            * np.exp(-(self.q0**2 / (2.0 * self.sigma**2))
                     * logratio ** (2.0 / self.kappa))
        )

    def average(self, fn) -> float:
        """Int P(tau) fn(tau) dtau, integrated over the deflection."""
        def integrand(q):
            return (q / self.sigma**2) * np.exp(-q * q / (2.0 * self.sigma**2)) \
                * fn(float(self.tau_of_q(q)))

        val, _ = quad(integrand, 0.0, 9.0 * self.sigma, limit=400, epsrel=1e-9)
        return float(val)

    @property
    def tau_mean(self) -> float:
        return self.average(lambda t: t)

    @property
    def sqrt_tau_mean(self) -> float:
        return self.average(np.sqrt)


def fading_channel(geom: BeamGeometry, env: TurbulenceEnv, path: str, z: float,
                   tau_extra: float = 1.0, h0: float = 0.0, theta: float = 0.0,
                   h_const: float | None = None,
                   turbulent: bool = True) -> FadingChannel:
    """Weibull fading channel for one link leg.

    tau_extra multiplies in deterministic losses (atmosphere, detectors).
    With turbulent=False only pointing errors wander the beam.
    """
    if turbulent:
        rho0 = coherence_length(env, z, geom.wavelength, path, h0, theta, h_const)
        w_st = short_term_waist(geom, z, rho0)
        sigma = wandering_sigma(geom, z, rho0, env.pointing_frac)
        weak = weak_turbulence_ok(z, geom.wavelength, geom.aperture, rho0)
    else:
        w_st = beam_waist(geom, z)
        sigma = env.pointing_frac * z
        weak = True
    tau_far = 2.0 * geom.aperture**2 / w_st**2
    lam0 = np.exp(-2.0 * tau_far) * i0e(2.0 * tau_far) * np.exp(2.0 * tau_far)
    lam1 = np.exp(-2.0 * tau_far) * i1e(2.0 * tau_far) * np.exp(2.0 * tau_far)
    tau0 = 1.0 - np.exp(-2.0 * tau_far)  # aperture transmission at q = 0
    log_arg = np.log(2.0 * tau0 / (1.0 - lam0))
    kappa = 4.0 * tau_far * lam1 / (1.0 - lam0) / log_arg
    q0 = geom.aperture * log_arg ** (-1.0 / kappa)
    return FadingChannel(
        tau_max=float(tau0 * tau_extra),
        q0=float(q0),
        kappa=float(kappa),
        sigma=float(sigma),
        waist_st=float(w_st),
        aperture=geom.aperture,
        weak_ok=bool(weak),
    )


# -- applying fading channels to states ----------------------------------------


def faded_state_fast(r: float, channel: FadingChannel, m_env: float,
                     n: float = 0.0) -> GaussianState:
    """Fast-turbulence state: <tau> on the diagonal block, <sqrt tau> on eps."""
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    pref = 1.0 + 2.0 * n
    t_mean = channel.tau_mean
    st_mean = channel.sqrt_tau_mean
    sig_a = pref * c * I2
    sig_b = (t_mean * pref * c + (1.0 - t_mean) * m_env) * I2
    eps = st_mean * pref * s * SIGMA_Z
    return two_mode_from_blocks(sig_a, sig_b, eps)


def deterministic_loss_state(r: float, tau: float, m_env: float,
                             n: float = 0.0) -> GaussianState:
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    pref = 1.0 + 2.0 * n
    sig_b = (tau * pref * c + (1.0 - tau) * m_env) * I2
    return two_mode_from_blocks(
        pref * c * I2, sig_b, np.sqrt(tau) * pref * s * SIGMA_Z
    )


def two_leg_state(r: float, tau_d: float, tau_u: float, m_d: float, m_u: float,
                  n: float = 0.0) -> GaussianState:
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    pref = 1.0 + 2.0 * n
    sig_a = (tau_d * pref * c + (1.0 - tau_d) * m_d) * I2
    sig_b = (tau_u * pref * c + (1.0 - tau_u) * m_u) * I2
    eps = np.sqrt(tau_d * tau_u) * pref * s * SIGMA_Z
    return two_mode_from_blocks(sig_a, sig_b, eps)


def link_quantities_fast(r, channel, m_env, n=0.0):
    state = faded_state_fast(r, channel, m_env, n)
    return negativity(state), fidelity_coherent(state)


def link_quantities_slow(r, channel, m_env, n=0.0):
    neg = channel.average(
        lambda t: negativity(deterministic_loss_state(r, t, m_env, n))
    )
    fid = channel.average(
        lambda t: fidelity_coherent(deterministic_loss_state(r, t, m_env, n))
    )
    return neg, fid


# -- microwave entanglement thresholds -----------------------------------------


def microwave_tau_threshold_asym(r: float, n: float, n_received: float) -> float:
    """Transmissivity needed to keep an asymmetric lossy state entangled."""
    m = 1.0 + 2.0 * n_received
    c = (1.0 + 2.0 * n) * np.cosh(2.0 * r)
    s = (1.0 + 2.0 * n) * np.sinh(2.0 * r)
    if m <= c:
        raise ValueError("threshold formula assumes m > c")
    return float((m - 1.0) * (c - 1.0) / ((m - c) * (c - 1.0) + s * s))


def microwave_tau_threshold_sym(r: float, n: float, n_received: float) -> float:
    m = 1.0 + 2.0 * n_received
    c = (1.0 + 2.0 * n) * np.cosh(2.0 * r)
    s = (1.0 + 2.0 * n) * np.sinh(2.0 * r)
    return float((m - 1.0) / (m - c + s))


def intersat_eta_threshold(r: float, n_th: float, kind: str) -> float:
    """Diffraction-loss bound keeping an intersatellite pair entangled."""
    if kind == "asymmetric":
        return float(1.0 / (1.0 + n_th))
    if kind == "symmetric":
        return float(1.0 / (1.0 + n_th * (1.0 + 1.0 / np.tanh(r))))
    raise ValueError("kind must be asymmetric or symmetric")


def intersat_aperture_product_bound(wavelength: float, eta_lim: float) -> float:
    """Required a_R * waist / z for entanglement preservation."""
    return float((wavelength / np.pi) * np.sqrt(-0.5 * np.log(eta_lim)))
