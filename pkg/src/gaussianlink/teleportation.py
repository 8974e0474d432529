"""Braunstein-Kimble teleportation fidelities: coherent, photon-subtracted,
entanglement-swapped, finite-gain, qubit (CV, hybrid, DV) and two-qubit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .core import (
    I2,
    OMEGA_1,
    SIGMA_Z,
    GaussianState,
    make_tmsv,
    two_mode_from_blocks,
    w_function,
)
from .distillation import (
    HeuristicBundle,
    ProbabilisticBundle,
    ps_heuristic_bundle,
    ps_probabilistic_bundle,
)

_OM = OMEGA_1
_SZ = SIGMA_Z


def _blocks(state_or_blocks):
    if isinstance(state_or_blocks, GaussianState):
        s = state_or_blocks
        return s.block(0, 0), s.block(1, 1), s.block(0, 1)
    a, b, e = state_or_blocks
    return np.asarray(a, float), np.asarray(b, float), np.asarray(e, float)


def gamma_matrix(sig_a, sig_b, eps) -> np.ndarray:
    """Gamma = sz Sigma_A sz + Sigma_B - sz eps - eps^T sz."""
    return _SZ @ sig_a @ _SZ + sig_b - _SZ @ eps - eps.T @ _SZ


def fidelity_coherent(resource) -> float:
    """Average fidelity for teleporting an unknown coherent state."""
    sig_a, sig_b, eps = _blocks(resource)
    g = I2 + 0.5 * gamma_matrix(sig_a, sig_b, eps)
    return float(1.0 / np.sqrt(np.linalg.det(g)))


def fidelity_coherent_k_composed(resource, k: int) -> float:
    """Fidelity of k concatenated protocols with identical resources."""
    if k < 1:
        raise ValueError("need at least one teleportation step")
    sig_a, sig_b, eps = _blocks(resource)
    g = I2 + (k - 0.5) * gamma_matrix(sig_a, sig_b, eps)
    return float(1.0 / np.sqrt(np.linalg.det(g)))


def fidelity_tmsv(r: float) -> float:
    return float((1.0 + np.tanh(r)) / 2.0)


# -- photon-subtracted fidelities ------------------------------------------


def _e_matrices(b: HeuristicBundle):
    sig_b, eps = b.sig_b, b.eps
    e1 = (
        b.m_a * (b.big_b + _SZ @ b.big_c @ _SZ + _SZ @ b.big_bc)
        + b.m_b * (_SZ @ b.big_a @ _SZ + b.big_c + _SZ @ b.big_ac)
        + (2.0 * b.big_c + _SZ @ b.big_ac)
        @ _OM
        @ (I2 + _SZ @ eps - sig_b)
        @ _OM.T
    )
    e2a = b.big_c + _SZ @ b.big_ac + _SZ @ b.big_a @ _SZ
    e2b = b.big_b + _SZ @ b.big_bc + _SZ @ b.big_c @ _SZ
    return e1, e2a, e2b


def fidelity_2ps_heuristic(resource) -> tuple[float, float]:
    """(fidelity, h) after one-photon subtraction from each resource mode."""
    sig_a, sig_b, eps = _blocks(resource)
    bundle = ps_heuristic_bundle((sig_a, sig_b, eps))
    g = I2 + 0.5 * gamma_matrix(sig_a, sig_b, eps)
    g_inv = np.linalg.inv(g)
    det_g = np.linalg.det(g)
    e1, e2a, e2b = _e_matrices(bundle)
    rot = lambda m: _OM.T @ g_inv @ _OM @ m
    h = (
        np.trace(rot(e1))
        - (2.0 / det_g) * np.trace(_OM.T @ e2a @ _OM @ e2b)
        + 3.0 * np.trace(rot(e2a)) * np.trace(rot(e2b))
    ) / bundle.e0
    return float((1.0 + h) / np.sqrt(det_g)), float(h)


def fidelity_2ps_probabilistic(resource, tau: float) -> tuple[float, float, float]:
    """(fidelity, g, success probability) for beam-splitter subtraction."""
    bundle = ps_probabilistic_bundle(_blocks(resource), tau)
    f, g = _probabilistic_fidelity_from_bundle(bundle)
    return f, g, bundle.p_success


def _probabilistic_fidelity_from_bundle(b: ProbabilisticBundle):
    gt = I2 + 0.5 * gamma_matrix(b.sig_a_t, b.sig_b_t, b.eps_t)
    gt_inv = np.linalg.inv(gt)
    p_c = _SZ @ b.p1 @ _SZ + b.p2 + _SZ @ b.p12
    q_c = _SZ @ b.q1 @ _SZ + b.q2 + _SZ @ b.q12
    r_c = _SZ @ b.r1 @ _SZ + b.r2 + _SZ @ b.r12
    rot = lambda m: _OM.T @ gt_inv @ _OM @ m
    tp, tq = np.trace(rot(p_c)), np.trace(rot(q_c))
    g_val = (
        b.m1 * tq
        + b.m2 * tp
        + tp * tq
        + np.trace(rot(r_c))
        + 2.0 * np.trace(w_function(_OM.T @ gt @ _OM, p_c) @ q_c)
    ) / b.norm
    f = (1.0 + g_val) / np.sqrt(np.linalg.det(gt))
    return float(f), float(g_val)


def fidelity_2ps_tmsv(lam: float, tau: float = 1.0) -> float:
    """Closed form for the 2PS TMSV resource (tau -> 1 is heuristic)."""
    lt = lam * tau
    return float(
        (1.0 - lt + lt * lt / 2.0) * (1.0 + lt) ** 3 / (2.0 * (1.0 + lt * lt))
    )


def fidelity_4ps_tmsv(lam: float, tau: float = 1.0) -> float:
    lt = lam * tau
    return float(
        (1.0 + lt) ** 5
        * (8.0 - lt * (2.0 - lt) * (8.0 - 3.0 * lt * (2.0 - lt)))
        / (16.0 * (1.0 + 4.0 * lt**2 + lt**4))
    )


def fidelity_2ps_heuristic_standard(alpha, beta, gamma) -> float:
    """Printed closed form for heuristic 2PS on a standard-form resource."""
    num = 4.0 * (
        2.0 * (5.0 - alpha * beta) * gamma**2
        - 4.0 * gamma**3
        + gamma**4
        + (alpha - 1.0)
        * (beta - 1.0)
        * (4.0 * (1.0 + gamma) + (alpha + 1.0) * (beta + 1.0))
    )
    den = (2.0 + alpha + beta - 2.0 * gamma) ** 3 * (
        (alpha - 1.0) * (beta - 1.0) + gamma**2
    )
    return float(num / den)


def fidelity_2ps_probabilistic_standard(alpha, beta, gamma, tau) -> float:
    """Printed closed form for probabilistic 2PS on a standard-form resource."""
    s1 = 0.25 * (
        1.0
        + tau
        * (
            -alpha * beta
            + (1.0 + gamma) ** 2
            + ((1.0 - alpha) * (1.0 - beta) - gamma**2) * tau
        )
        / (
            (1.0 + alpha) * (1.0 + beta)
            - gamma**2
            - (alpha * beta - (1.0 - gamma) ** 2) * tau
        )
    ) ** 3
    c = 1.0 - alpha * beta + gamma**2
    d = (1.0 - alpha) * (1.0 - beta) - gamma**2
    s2 = 1.0 + (
        c**2 - (alpha - beta) ** 2 + 4.0 * gamma**2 + 4.0 * gamma * d * tau
    ) / ((c + d * tau) ** 2 - (alpha - beta) ** 2 + 4.0 * gamma**2)
    return float(s1 * s2)


def success_prob_2ps_standard(alpha, beta, gamma, tau) -> float:
    """Success probability of probabilistic 2PS on a standard-form resource."""
    c = 1.0 - alpha * beta + gamma**2
    d = (1.0 - alpha) * (1.0 - beta) - gamma**2
    num = (c + d * tau) ** 2 - (alpha - beta) ** 2 + 4.0 * gamma**2
    den = (
        (1.0 + tau) ** 2
        + (alpha + beta) * (1.0 - tau**2)
        + (alpha * beta - gamma**2) * (1.0 - tau) ** 2
    ) ** 3
    return float(4.0 * (1.0 - tau) ** 2 * num / den)


# -- re-Gaussification ------------------------------------------------------


@dataclass(frozen=True)
class TwoModeResource:
    """Gaussian resource, optionally tagged with a PS correction scalar."""

    state: GaussianState
    tag: str = "none"  # none | heuristic_2ps | probabilistic_2ps
    correction: float = 0.0
    tau: float | None = None

    def fidelity(self) -> float:
        if self.tag == "none":
            return fidelity_coherent(self.state)
        return (1.0 + self.correction) * fidelity_coherent(self.state)


def regaussify(blocks, correction: float, symmetric: bool) -> GaussianState:
    """Fold a PS fidelity correction into an effective Gaussian covariance.

    `blocks` are the (possibly transformed) submatrices entering the PS
    fidelity; `correction` is h or g.  The returned Gaussian state has the
    same teleportation fidelity as the PS state.
    """
    sig_a, sig_b, eps = _blocks(blocks)
    c = correction
    if symmetric:
        new_a = (sig_a - c * I2) / (1.0 + c)
        new_b = (sig_b - c * I2) / (1.0 + c)
    else:
        avg = 0.5 * (sig_a + sig_b)
        new_a = (avg - c * I2) / (1.0 + c)
        new_b = new_a
    new_eps = eps / (1.0 + c)
    return two_mode_from_blocks(new_a, new_b, new_eps)


def regaussified_heuristic(resource, symmetric: bool | None = None):
    sig_a, sig_b, eps = _blocks(resource)
    f, h = fidelity_2ps_heuristic((sig_a, sig_b, eps))
    if symmetric is None:
        symmetric = np.allclose(sig_a, sig_b, atol=1e-10)
    return regaussify((sig_a, sig_b, eps), h, symmetric), f


def regaussified_probabilistic(resource, tau: float, symmetric: bool | None = None):
    bundle = ps_probabilistic_bundle(_blocks(resource), tau)
    f, g = _probabilistic_fidelity_from_bundle(bundle)
    blocks = (bundle.sig_a_t, bundle.sig_b_t, bundle.eps_t)
    if symmetric is None:
        symmetric = np.allclose(bundle.sig_a_t, bundle.sig_b_t, atol=1e-10)
    return regaussify(blocks, g, symmetric), f


# -- entanglement swapping and finite gain ---------------------------------


def fidelity_es_resource(alpha: float, beta: float, gamma: float) -> float:
    """Fidelity using the resource swapped from two identical states."""
    return float(1.0 / (1.0 + alpha - gamma * gamma / beta))


def fidelity_finite_gain(
    alpha: float, beta: float, gamma: float, gain: float, n_photons: float = 0.0
) -> float:
    """Coherent-state fidelity with finite-gain homodyne Bell detection."""
    if gain < 1.0:
        raise ValueError("gain must be at least 1")
    rg = 1.0 / np.sqrt(gain)
    phi = (
        2.0
        * (2.0 + rg * (1.0 + alpha))
        / (
            4.0 * (1.0 + 0.5 * (alpha + beta - 2.0 * gamma))
            + rg * (alpha * (5.0 + beta) + beta - (gamma - 1.0) * (gamma + 5.0))
            + (2.0 / gain) * (1.0 + alpha)
        )
    )
    damp = ((1.0 - alpha + gamma) / (1.0 + 2.0 * np.sqrt(gain) + alpha)) ** 2
    return float(phi * np.exp(-phi * damp * n_photons))


# -- qubit teleportation ----------------------------------------------------


@dataclass(frozen=True)
class QubitState:
    """Pure qubit a|0> + b|1> with the derived phase-space vector y."""

    a: complex
    b: complex

    def __post_init__(self):
        norm = abs(self.a) ** 2 + abs(self.b) ** 2
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("qubit amplitudes must be normalized")

    @property
    def y_vec(self) -> np.ndarray:
        ab = self.a * np.conj(self.b)
        return np.array([ab - np.conj(ab), 1j * (ab + np.conj(ab))]) / np.sqrt(2.0)


def qubit_from_bloch(theta: float, phi: float) -> QubitState:
    return QubitState(np.cos(theta / 2.0), np.sin(theta / 2.0) * np.exp(1j * phi))


def _x_matrix(sig_a, sig_b, eps) -> np.ndarray:
    return _OM.T @ (I2 + 0.5 * gamma_matrix(sig_a, sig_b, eps)) @ _OM


def fidelity_qubit_cv(resource, qubit: QubitState) -> float:
    """CV Braunstein-Kimble fidelity for a specific qubit state."""
    sig_a, sig_b, eps = _blocks(resource)
    x = _x_matrix(sig_a, sig_b, eps)
    x_inv = np.linalg.inv(x)
    det_x = np.linalg.det(x)
    tr_inv = np.trace(x_inv)
    b2 = abs(qubit.b) ** 2
    y = qubit.y_vec
    val = (
        1.0
        - b2 * tr_inv
        - np.real(y @ x_inv @ y)
        + (b2**2 / 4.0) * 3.0 * tr_inv**2
        - b2**2 / det_x
    )
    return float(val / np.sqrt(det_x))


def fidelity_qubit_cv_haar(resource) -> float:
    """CV fidelity averaged over Bloch-uniform qubits (closed moments)."""
    sig_a, sig_b, eps = _blocks(resource)
    x = _x_matrix(sig_a, sig_b, eps)
    tr_inv = np.trace(np.linalg.inv(x))
    det_x = np.linalg.det(x)
    return float(
        (1.0 - (tr_inv + 1.0 / det_x) / 3.0 + 0.25 * tr_inv**2) / np.sqrt(det_x)
    )


def _gh_gaussian_integral_2d(poly_fn, weight: np.ndarray, n_nodes: int = 16):
    """Exact Int dx dp poly(t) exp(-t^T W t) for polynomial integrands.

    Whitened tensor Gauss-Hermite; exact once 2*n_nodes-1 covers the degree.
    """
    evals, evecs = np.linalg.eigh(weight)
    if np.any(evals <= 0):
        raise ValueError("Gaussian weight must be positive definite")
    a_map = evecs * (1.0 / np.sqrt(2.0 * evals))
    nodes, wts = np.polynomial.hermite.hermgauss(n_nodes)
    total = 0.0
    for i, ui in enumerate(nodes):
        for j, uj in enumerate(nodes):
            t = np.sqrt(2.0) * (a_map @ np.array([ui, uj]))
            total += wts[i] * wts[j] * poly_fn(t)
    return total / np.sqrt(np.linalg.det(weight))


def _qubit_cf_polys(qubit: QubitState):
    b2 = abs(qubit.b) ** 2
    y = qubit.y_vec

    def forward(t):
        return 1.0 + t @ y - 0.5 * b2 * (t @ t)

    def backward(t):
        return 1.0 - t @ y - 0.5 * b2 * (t @ t)

    return forward, backward


def fidelity_qubit_cv_2ps(resource, qubit: QubitState, n_nodes: int = 14) -> float:
    """CV qubit fidelity with heuristic photon subtraction on the resource.

    Computed from the exact channel identity chi_out(t) = chi_in(t) *
    chi_resource(sz t, t) by whitened Gauss-Hermite quadrature (the long
    closed expression printed for this quantity does not reproduce the
    operator-derived result).
    """
    from .distillation import heuristic_bracket

    sig_a, sig_b, eps = _blocks(resource)
    bundle = ps_heuristic_bundle((sig_a, sig_b, eps))
    gam = gamma_matrix(sig_a, sig_b, eps)
    weight = 0.5 * np.eye(2) + 0.25 * _OM.T @ gam @ _OM
    fwd, bwd = _qubit_cf_polys(qubit)

    def poly(t):
        return np.real(
            fwd(t) * bwd(t) * heuristic_bracket(bundle, _SZ @ t, t)
        )

    val = _gh_gaussian_integral_2d(poly, weight, n_nodes)
    return float(val / (2.0 * np.pi))


def _haar_quadrature(n_u: int = 48, n_phi: int = 48):
    u_nodes, u_w = np.polynomial.legendre.leggauss(n_u)
    u = 0.5 * (u_nodes + 1.0)
    uw = 0.5 * u_w
    phi_nodes, phi_w = np.polynomial.legendre.leggauss(n_phi)
    phi = np.pi * (phi_nodes + 1.0)
    pw = phi_w / 2.0
    return u, uw, phi, pw


def haar_average(fid_fn, n_u: int = 48, n_phi: int = 48) -> float:
    """Average fid_fn(QubitState) over the Bloch sphere by quadrature."""
    u, uw, phi, pw = _haar_quadrature(n_u, n_phi)
    total = 0.0
    for ui, wi in zip(u, uw):
        a = np.sqrt(1.0 - ui)
        for pj, wj in zip(phi, pw):
            total += wi * wj * fid_fn(QubitState(a, np.sqrt(ui) * np.exp(1j * pj)))
    return float(total)


def fidelity_qubit_cv_2ps_haar(resource, n_nodes: int = 14) -> float:
    """Haar-averaged 2PS qubit fidelity via exact moment substitution.

    <|b|^2> = 1/2, <|b|^4> = 1/3 and <y y^T> = -I/6 reduce the Bloch
    average of the two qubit CF factors to 1 - |t|^2/3 + |t|^4/12.
    """
    from .distillation import heuristic_bracket

    sig_a, sig_b, eps = _blocks(resource)
    bundle = ps_heuristic_bundle((sig_a, sig_b, eps))
    gam = gamma_matrix(sig_a, sig_b, eps)
    weight = 0.5 * np.eye(2) + 0.25 * _OM.T @ gam @ _OM

    def poly(t):
        t2 = t @ t
        avg_qubits = 1.0 - t2 / 3.0 + t2 * t2 / 12.0
        return avg_qubits * heuristic_bracket(bundle, _SZ @ t, t)

    return float(_gh_gaussian_integral_2d(poly, weight, n_nodes) / (2.0 * np.pi))


# -- hybrid (Bell-projection) teleportation ---------------------------------


def _hybrid_core(sig_a, sig_b, eps):
    one_a = I2 + sig_a
    one_a_inv = np.linalg.inv(one_a)
    x = 0.5 * _OM.T @ (I2 + sig_b - eps.T @ one_a_inv @ eps) @ _OM
    return one_a, one_a_inv, x


def fidelity_qubit_hybrid(resource, qubit: QubitState, basis: str = "phi"):
    """(conditional fidelity, projection probability) for a Bell projection.

    basis 'phi' projects onto (|00> +/- |11>)/sqrt2, 'psi' onto
    (|01> +/- |10>)/sqrt2; both signs give identical statistics here.
    """
    sig_a, sig_b, eps = _blocks(resource)
    one_a, one_a_inv, x = _hybrid_core(sig_a, sig_b, eps)
    x_inv = np.linalg.inv(x)
    det_pref = np.sqrt(np.linalg.det(one_a) * np.linalg.det(x))
    tr_a = np.trace(one_a_inv)
    tr_x = np.trace(x_inv)
    w_a = w_function(one_a, I2)
    tr_mix = np.trace(x_inv @ _OM.T @ eps.T @ w_a @ eps @ _OM)
    tr_small = np.trace(eps.T @ w_a @ eps)
    det_x = np.linalg.det(x)
    y = qubit.y_vec
    weight = abs(qubit.b) ** 2 if basis == "phi" else abs(qubit.a) ** 2
    y_term = np.real(y @ x_inv @ _OM.T @ eps.T @ one_a_inv @ _OM @ _SZ @ y)

    numer = (
        (1.0 - weight * tr_a) * (1.0 - 0.5 * weight * tr_x)
        + y_term
        - (weight**2 / (2.0 * det_x)) * tr_small
        - 0.5 * weight * tr_mix * (1.0 - 1.5 * weight * tr_x)
    )
    prob = (
        0.5 * (1.0 - weight * tr_a) * (4.0 - tr_x)
        - weight * tr_mix * (1.0 - 0.75 * tr_x)
        - (weight / (2.0 * det_x)) * tr_small
    ) / det_pref
    fid = numer / (prob * det_pref)
    return float(fid), float(prob)


def fidelity_qubit_hybrid_haar(
    resource, n_u: int = 48, n_phi: int = 4, weighted: bool = False
) -> float:
    """Haar-averaged hybrid fidelity.

    weighted=False conditions on one Bell projection (phi and psi give the
    same average); weighted=True averages the conditional fidelities of the
    two projection families with their success probabilities.
    """
    u, uw, phi, pw = _haar_quadrature(n_u, n_phi)
    total = 0.0
    for ui, wi in zip(u, uw):
        a = np.sqrt(1.0 - ui)
        for pj, wj in zip(phi, pw):
            q = QubitState(a, np.sqrt(ui) * np.exp(1j * pj))
            f_phi, p_phi = fidelity_qubit_hybrid(resource, q, "phi")
            if weighted:
                f_psi, p_psi = fidelity_qubit_hybrid(resource, q, "psi")
                f = (p_phi * f_phi + p_psi * f_psi) / (p_phi + p_psi)
            else:
                f = f_phi
            total += wi * wj * f
    return float(total)


def scissors_success(r: float, detector_eff: float = 1.0) -> float:
    """Probability of the scissors-based Bell projection on a TMSV state."""
    lam = np.tanh(r)
    return float(detector_eff * lam * lam / (2.0 * (1.0 + lam) ** 2))


# -- DV teleportation with a lossy Bell state --------------------------------


def _thermal_loss_qubit_elements(tau: float, n_th: float):
    """Qubit-block matrix elements of the thermal attenuation channel.

    Returns E[m][n] = E(|m><n|) restricted to the {0,1} block, derived from
    the channel action on characteristic functions.
    """
    t = (1.0 - tau) * n_th
    d = 1.0 + t
    e00 = np.array([[1.0 / d, 0.0], [0.0, t / d**2]])
    e11 = np.array(
        [
            [1.0 / d - tau / d**2, 0.0],
            [0.0, 1.0 / d - (1.0 + tau) / d**2 + 2.0 * tau / d**3],
        ]
    )
    e01 = np.array([[0.0, np.sqrt(tau) / d**2], [0.0, 0.0]])
    return {(0, 0): e00, (1, 1): e11, (0, 1): e01, (1, 0): e01.T}


def fidelity_qubit_dv_bell(qubit: QubitState, eta: float, n_th: float = 0.0) -> float:
    """DV teleportation fidelity using a Bell pair with one lossy arm."""
    elems = _thermal_loss_qubit_elements(1.0 - eta, n_th)
    a, b = qubit.a, qubit.b
    corrected = [
        np.array([a, b]),
        np.array([a, -b]),
        np.array([b, a]),
        np.array([-b, a]),
    ]
    fid = 0.0
    for c in corrected:
        rho = sum(
            c[m] * np.conj(c[n]) * elems[(m, n)] for m in (0, 1) for n in (0, 1)
        )
        fid += 0.25 * np.real(np.conj(c) @ rho @ c)
    return float(fid)


def fidelity_qubit_dv_bell_haar(eta: float, n_th: float = 0.0) -> float:
    return haar_average(lambda q: fidelity_qubit_dv_bell(q, eta, n_th), 24, 8)


# -- lossy-resource scenario curves ------------------------------------------

LINK_PRESETS = {
    "cryolink": {"mu": 1e-3, "n_th": 1e-2},
    "openair": {"mu": 1.44e-6, "n_th": 1250.0},
}


def lossy_tmsv_blocks(r: float, eta: float, n_th: float):
    c, s = np.cosh(2.0 * r), np.sinh(2.0 * r)
    alpha = c
    beta = (1.0 - eta) * c + eta * (1.0 + 2.0 * n_th)
    gamma = np.sqrt(1.0 - eta) * s
    return alpha * I2, beta * I2, gamma * SIGMA_Z


def lossy_resource_fidelity(protocol: str, eta: float, n_th: float, r: float = 1.0):
    """Haar fidelity of one protocol on a TMSV with one lossy arm."""
    blocks = lossy_tmsv_blocks(r, eta, n_th)
    if protocol == "cv":
        return fidelity_qubit_cv_haar(blocks)
    if protocol == "cv2ps":
        return fidelity_qubit_cv_2ps_haar(blocks)
    if protocol == "hybrid":
        return fidelity_qubit_hybrid_haar(blocks)
    if protocol == "hybrid_weighted":
        return fidelity_qubit_hybrid_haar(blocks, weighted=True)
    if protocol == "dv_bell":
        return fidelity_qubit_dv_bell_haar(eta, n_th)
    raise ValueError(f"unknown protocol {protocol!r}")


def lossy_resource_scenarios(kind: str, protocol: str, lengths, r: float = 1.0):
    """Fidelity curve over distance for a cryolink or open-air link."""
    preset = LINK_PRESETS[kind]
    out = []
    for length in np.atleast_1d(lengths):
        eta = 1.0 - np.exp(-preset["mu"] * length)
        out.append(lossy_resource_fidelity(protocol, eta, preset["n_th"], r))
    return np.array(out)


def classical_crossing_distance(kind: str, protocol: str, r: float = 1.0,
                                bound: float = 2.0 / 3.0, l_max: float = 1e5):
    """Distance where the Haar fidelity crosses the classical bound."""
    preset = LINK_PRESETS[kind]

    def f(length):
        eta = 1.0 - np.exp(-preset["mu"] * length)
        return lossy_resource_fidelity(protocol, eta, preset["n_th"], r) - bound

    return float(brentq(f, 1e-3, l_max, xtol=1e-3))


# -- two-qubit teleportation --------------------------------------------------


@dataclass(frozen=True)
class TwoQubitAngles:
    """Three-sphere parametrization of a pure two-qubit state."""

    theta1: float
    theta2: float
    chi: float
    phi1: float
    phi2: float
    xi1: float
    xi2: float

    def __post_init__(self):
        if not 0.0 <= self.chi <= np.pi / 2.0 + 1e-12:
            raise ValueError("chi must lie in [0, pi/2]")


def two_qubit_amplitudes(ang: TwoQubitAngles) -> np.ndarray:
    """(c00, c01, c10, c11) from the three-sphere angles."""
    c1, s1 = np.cos(ang.theta1 / 2.0), np.sin(ang.theta1 / 2.0)
    c2, s2 = np.cos(ang.theta2 / 2.0), np.sin(ang.theta2 / 2.0)
    inner = np.cos(ang.phi1) + 1j * np.sin(ang.phi1) * np.cos(ang.chi)
    tilt = 1j * np.sin(ang.phi1) * np.sin(ang.chi)
    e2 = np.exp(1j * ang.xi2)
    e21 = np.exp(1j * (ang.phi2 - ang.xi2))
    e12 = np.exp(1j * (ang.xi1 - ang.phi2))
    c00 = c1 * c2 * e2
    c01 = c1 * s2 * e21
    c10 = s1 * (inner * c2 + tilt * s2 * e12) * e2
    c11 = s1 * (inner * s2 - tilt * c2 * e12) * e21
    amps = np.array([c00, c01, c10, c11])
    return amps / np.linalg.norm(amps)


def sample_two_qubit_angles(rng) -> TwoQubitAngles:
    acos = lambda: np.arccos(1.0 - 2.0 * rng.uniform())
    ang = lambda: 2.0 * np.pi * rng.uniform()
    return TwoQubitAngles(acos(), acos(), acos() / 2.0, ang(), ang(), ang(), ang())


def bk_channel_qubit_elements(resource, n_max: int = 24, gh: int = 40):
    """{0,1}-block matrix elements of the teleportation noise channel.

    The Braunstein-Kimble protocol with a Gaussian resource is the additive
    classical-noise channel chi -> chi * exp(-v Gamma v / 4); elements are
    evaluated by exact Gauss-Hermite quadrature.
    """
    from .fock import displacement_matrix

    sig_a, sig_b, eps = _blocks(resource)
    gam = gamma_matrix(sig_a, sig_b, eps)
    w = 0.5 * I2 + 0.25 * _OM.T @ gam @ _OM  # total Gaussian weight in (x,p)
    evals, evecs = np.linalg.eigh(w)
    nodes, wts = np.polynomial.hermite.hermgauss(gh)
    elems = {}
    pts = []
    weights = []
    for i, ti in enumerate(nodes):
        for j, tj in enumerate(nodes):
            t = np.array([ti, tj]) / np.sqrt(evals)
            v = evecs @ t
            pts.append(v)
            weights.append(wts[i] * wts[j])
    pts = np.array(pts)
    weights = np.array(weights) / np.sqrt(np.prod(evals))
    # remaining integrand: polynomial part of chi_in and D(-alpha) elements
    for m in (0, 1):
        for n in (0, 1):
            vals = np.zeros((2, 2), dtype=complex)
            for v, wt in zip(pts, weights):
                alpha = (v[0] + 1j * v[1]) / np.sqrt(2.0)
                chi_poly = _fock_chi_poly(m, n, alpha)
                d_el = _d_elements_01(-alpha)
                vals += wt * chi_poly * d_el
            elems[(m, n)] = vals / (2.0 * np.pi)
    return elems


def _fock_chi_poly(m: int, n: int, alpha: complex) -> complex:
    """chi_{|m><n|}(alpha) with the Gaussian weight e^{-|a|^2/2} removed."""
    if m == 0 and n == 0:
        return 1.0
    if m == 1 and n == 1:
        return 1.0 - abs(alpha) ** 2
    if m == 0 and n == 1:  # tr[|0><1| D] = <1|D|0>
        return alpha
    return -np.conj(alpha)


def _d_elements_01(alpha: complex) -> np.ndarray:
    """<j|D(alpha)|k> for j,k in {0,1}, without the e^{-|a|^2/2} factor."""
    return np.array(
        [[1.0, -np.conj(alpha)], [alpha, 1.0 - abs(alpha) ** 2]]
    )


def fidelity_two_qubit(resource_pair, amps: np.ndarray, elems_cache=None) -> float:
    """Joint fidelity for one two-qubit state and two independent resources.

    F = sum c_ij conj(c_kl) conj(c_mn) c_pq <m|E1(|i><k|)|p> <n|E2(|j><l|)|q>.
    """
    if elems_cache is None:
        elems_cache = [bk_channel_qubit_elements(res) for res in resource_pair]
    e1, e2 = elems_cache
    c = np.asarray(amps).reshape(2, 2)
    fid = 0.0 + 0.0j
    rng01 = (0, 1)
    for i in rng01:
        for k in rng01:
            blk1 = e1[(i, k)]
            for j in rng01:
                for l in rng01:
                    blk2 = e2[(j, l)]
                    coeff = c[i, j] * np.conj(c[k, l])
                    inner = 0.0 + 0.0j
                    for m in rng01:
                        for p in rng01:
                            if blk1[m, p] == 0.0:
                                continue
                            for n in rng01:
                                for q in rng01:
                                    inner += (
                                        np.conj(c[m, n])
                                        * c[p, q]
                                        * blk1[m, p]
                                        * blk2[n, q]
                                    )
                    fid += coeff * inner
    return float(np.real(fid))


def fidelity_two_qubit_haar(resource_pair=None, single_haar: float | None = None):
    """Haar-averaged two-qubit fidelity: the square of the single-qubit one."""
    if single_haar is None:
        single_haar = fidelity_qubit_cv_haar(resource_pair[0])
    return float(single_haar**2)
