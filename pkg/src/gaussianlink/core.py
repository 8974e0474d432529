"""Gaussian-state representation and symplectic linear algebra.

Conventions: quadrature ordering (x1, p1, ..., xN, pN), hbar = 1, vacuum
variance 1 (covariance of the vacuum is the identity).  The symplectic form
is Omega = diag-block of [[0, 1], [-1, 0]].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

OMEGA_1 = np.array([[0.0, 1.0], [-1.0, 0.0]])
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]])
I2 = np.eye(2)

# Tolerances from the validity contract: small uncertainty violations are
# attributed to float accumulation and clamped, larger ones are errors.
VALIDITY_TOL = 1e-9
SYMMETRY_TOL = 1e-12


class InvalidStateError(ValueError):
    """Covariance matrix violates positivity or the uncertainty principle."""


class InvalidChannelError(ValueError):
    """Channel (X, Y) pair fails its complete-positivity certificate."""


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form for `n_modes` modes."""
    return np.kron(np.eye(n_modes), OMEGA_1)


@dataclass(frozen=True)
class GaussianState:
    """Displacement vector and covariance matrix of an N-mode Gaussian state."""

    n_modes: int
    displacement: np.ndarray
    covariance: np.ndarray
    clamped: bool = field(default=False, compare=False)

    def __post_init__(self):
        d = np.atleast_1d(np.asarray(self.displacement, dtype=float)).copy()
        cov = np.asarray(self.covariance, dtype=float).copy()
        n = int(self.n_modes)
        if n < 1 or d.shape != (2 * n,) or cov.shape != (2 * n, 2 * n):
            raise ValueError(f"shape mismatch for {n}-mode state")
        scale = max(1.0, float(np.max(np.abs(cov))))
        if np.max(np.abs(cov - cov.T)) > SYMMETRY_TOL * scale:
            raise InvalidStateError("covariance matrix is not symmetric")
        cov = 0.5 * (cov + cov.T)
        min_eig = float(np.linalg.eigvalsh(cov + 1j * omega(n)).min())
        clamped = False
        if min_eig < -VALIDITY_TOL * scale:
            raise InvalidStateError(
                f"uncertainty principle violated (min eig {min_eig:.3e})"
            )
        if min_eig < 0.0:
            clamped = True
            if min_eig < -1e-12 * scale:
                warnings.warn(
                    "covariance within clamp tolerance of the physical boundary",
                    stacklevel=2,
                )
        object.__setattr__(self, "displacement", d)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "n_modes", n)
        object.__setattr__(self, "clamped", clamped)

    # -- block access -------------------------------------------------
    def block(self, i: int, j: int) -> np.ndarray:
        """2x2 covariance block coupling modes i and j (0-based)."""
        return self.covariance[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]

    def mode_displacement(self, i: int) -> np.ndarray:
        return self.displacement[2 * i : 2 * i + 2]

    def reduced(self, modes) -> "GaussianState":
        """Partial trace down to the given mode indices (in the given order)."""
        modes = list(modes)
        idx = np.concatenate([[2 * m, 2 * m + 1] for m in modes]).astype(int)
        return GaussianState(
            len(modes), self.displacement[idx], self.covariance[np.ix_(idx, idx)]
        )

    def tensor(self, other: "GaussianState") -> "GaussianState":
        n = self.n_modes + other.n_modes
        d = np.concatenate([self.displacement, other.displacement])
        cov = np.zeros((2 * n, 2 * n))
        cov[: 2 * self.n_modes, : 2 * self.n_modes] = self.covariance
        cov[2 * self.n_modes :, 2 * self.n_modes :] = other.covariance
        return GaussianState(n, d, cov)

    def mean_photons(self, mode: int) -> float:
        """Mean photon number of one mode, (tr Sigma_mode - 2)/4 + |d|^2/2."""
        quad = float(np.trace(self.block(mode, mode)))
        d = self.mode_displacement(mode)
        return 0.25 * (quad - 2.0) + 0.5 * float(d @ d)

    def char_function(self, alpha_vec: np.ndarray) -> complex:
        """Characteristic function at phase-space point (x_1, p_1, ...)."""
        a = np.asarray(alpha_vec, dtype=float)
        om = omega(self.n_modes)
        quad = a @ om.T @ self.covariance @ om @ a
        lin = a @ om @ self.displacement
        return np.exp(-0.25 * quad - 1j * lin)


@dataclass(frozen=True)
class SymplecticMap:
    """Linear symplectic transformation S with S Omega S^T = Omega."""

    matrix: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.matrix, dtype=float)
        if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
            raise ValueError("symplectic matrix must be square of even size")
        om = omega(s.shape[0] // 2)
        if np.linalg.norm(s @ om @ s.T - om) > 1e-10 * max(
            1.0, np.linalg.norm(s) ** 2
        ):
            raise ValueError("matrix is not symplectic")
        object.__setattr__(self, "matrix", s)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.matrix @ other.matrix)

    def apply(self, state: GaussianState) -> GaussianState:
        if self.n_modes != state.n_modes:
            raise ValueError("mode-count mismatch")
        s = self.matrix
        return GaussianState(
            state.n_modes, s @ state.displacement, s @ state.covariance @ s.T
        )


# -- constructors -------------------------------------------------------


def vacuum_state(n_modes: int = 1) -> GaussianState:
    return GaussianState(n_modes, np.zeros(2 * n_modes), np.eye(2 * n_modes))


def thermal_state(n_photons: float) -> GaussianState:
    if n_photons < 0:
        raise ValueError("negative thermal occupation")
    return GaussianState(1, np.zeros(2), (1.0 + 2.0 * n_photons) * np.eye(2))


def coherent_state(alpha: complex) -> GaussianState:
    d = np.sqrt(2.0) * np.array([alpha.real, alpha.imag])
    return GaussianState(1, d, np.eye(2))


def make_tmsv(r: float) -> GaussianState:
    """Two-mode squeezed vacuum with squeezing parameter r >= 0."""
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    return make_tmst(r, 0.0)


def make_tmst(r: float, n: float) -> GaussianState:
    """Two-mode squeezed thermal state, n thermal photons in each mode."""
    if r < 0:
        raise ValueError("squeezing parameter must be non-negative")
    if n < 0:
        raise ValueError("thermal occupation must be non-negative")
    c = np.cosh(2.0 * r)
    s = np.sinh(2.0 * r)
    cov = (1.0 + 2.0 * n) * np.block(
        [[c * I2, s * SIGMA_Z], [s * SIGMA_Z, c * I2]]
    )
    return GaussianState(2, np.zeros(4), cov)


def two_mode_from_blocks(sig_a, sig_b, eps, displacement=None) -> GaussianState:
    cov = np.block([[np.asarray(sig_a), np.asarray(eps)],
                    [np.asarray(eps).T, np.asarray(sig_b)]])
    d = np.zeros(4) if displacement is None else displacement
    return GaussianState(2, d, cov)


def standard_form_state(alpha: float, beta: float, gamma: float) -> GaussianState:
    """State with Sigma_A = alpha I, Sigma_B = beta I, eps = gamma sigma_z."""
    return two_mode_from_blocks(alpha * I2, beta * I2, gamma * SIGMA_Z)


# -- spectra and entanglement measures ----------------------------------


def symplectic_spectrum(state: GaussianState) -> np.ndarray:
    """All N symplectic eigenvalues (positive eigenvalues of i Omega Sigma)."""
    eig = np.linalg.eigvals(1j * omega(state.n_modes) @ state.covariance)
    nu = np.sort(eig.real[eig.real > 0])[::-1]
    return nu


def symplectic_eigenvalues(state: GaussianState) -> tuple[float, float]:
    """(nu_plus, nu_minus) for a two-mode state, via the Delta invariant."""
    if state.n_modes != 2:
        raise ValueError("two-mode states only; use symplectic_spectrum otherwise")
    a, b = state.block(0, 0), state.block(1, 1)
    e = state.block(0, 1)
    delta = np.linalg.det(a) + np.linalg.det(b) + 2.0 * np.linalg.det(e)
    det = np.linalg.det(state.covariance)
    disc = max(delta * delta - 4.0 * det, 0.0)
    nu_p = np.sqrt(max((delta + np.sqrt(disc)) / 2.0, 0.0))
    nu_m = np.sqrt(max((delta - np.sqrt(disc)) / 2.0, 0.0))
    return float(nu_p), float(nu_m)


def pt_symplectic_eigenvalue(state: GaussianState) -> float:
    """Smaller symplectic eigenvalue of the partially transposed covariance."""
    if state.n_modes != 2:
        raise ValueError("partial transposition defined here for two modes")
    a, b = state.block(0, 0), state.block(1, 1)
    e = state.block(0, 1)
    delta = np.linalg.det(a) + np.linalg.det(b) - 2.0 * np.linalg.det(e)
    det = np.linalg.det(state.covariance)
    disc = max(delta * delta - 4.0 * det, 0.0)
    return float(np.sqrt(max((delta - np.sqrt(disc)) / 2.0, 0.0)))


def negativity(state: GaussianState) -> float:
    nu = pt_symplectic_eigenvalue(state)
    return max(0.0, (1.0 - nu) / (2.0 * nu))


def log_negativity(state: GaussianState) -> float:
    return float(np.log2(2.0 * negativity(state) + 1.0))


def is_separable(state: GaussianState) -> bool:
    return pt_symplectic_eigenvalue(state) >= 1.0


def purity(state: GaussianState) -> float:
    return float(1.0 / np.sqrt(np.linalg.det(state.covariance)))


def check_cm_validity(alpha: float, beta: float, gamma: float) -> float:
    """Positivity/uncertainty certificate for standard-form blocks.

    Returns theta = |sqrt(det Sigma) - 1| - |alpha - beta|; non-negative
    values certify a bona fide covariance matrix.
    """
    det = (alpha * beta - gamma * gamma) ** 2
    return float(abs(np.sqrt(det) - 1.0) - abs(alpha - beta))


def standard_form_blocks(state: GaussianState) -> tuple[float, float, float]:
    """(alpha, beta, gamma) for a state already in standard form.

    Rejects states whose blocks are not (alpha I, beta I, gamma sigma_z).
    """
    a, b, e = state.block(0, 0), state.block(1, 1), state.block(0, 1)
    alpha, beta = a[0, 0], b[0, 0]
    gamma = e[0, 0]
    if (
        np.max(np.abs(a - alpha * I2)) > 1e-9
        or np.max(np.abs(b - beta * I2)) > 1e-9
        or np.max(np.abs(e - gamma * SIGMA_Z)) > 1e-9
    ):
        raise ValueError("state is not in standard form")
    return float(alpha), float(beta), float(gamma)


# -- two-mode normal form ------------------------------------------------


@dataclass(frozen=True)
class NormalFormTwoMode:
    """Simon normal form (a, b, c1, c2) and the transform that reaches it."""

    a: float
    b: float
    c1: float
    c2: float
    transform: SymplecticMap

    def covariance(self) -> np.ndarray:
        return np.array(
            [
                [self.a, 0.0, self.c1, 0.0],
                [0.0, self.a, 0.0, self.c2],
                [self.c1, 0.0, self.b, 0.0],
                [0.0, self.c2, 0.0, self.b],
            ]
        )


def _local_block_transform(block: np.ndarray) -> tuple[np.ndarray, float]:
    a11, a12, a22 = block[0, 0], block[0, 1], block[1, 1]
    det = np.sqrt(max(a11 * a22 - a12 * a12, 0.0))
    norm = np.sqrt(det / (a11 + 2.0 * a12 + a22))
    s = norm * np.array(
        [[(a12 + a22) / det, -(a12 + a11) / det], [1.0, 1.0]]
    )
    return s, float(det)


def to_normal_form(state: GaussianState) -> NormalFormTwoMode:
    """Symplectic transform of a two-mode covariance into Simon normal form."""
    if state.n_modes != 2:
        raise ValueError("normal form defined for two-mode states")
    sig_a, sig_b = state.block(0, 0), state.block(1, 1)
    eps = state.block(0, 1)

    s_a, a = _local_block_transform(sig_a)
    s_b, b = _local_block_transform(sig_b)
    local = np.block([[s_a, np.zeros((2, 2))], [np.zeros((2, 2)), s_b]])
    l_mat = s_a @ eps @ s_b.T

    l11, l12, l21, l22 = l_mat[0, 0], l_mat[0, 1], l_mat[1, 0], l_mat[1, 1]
    if abs(l12) < 1e-12 and abs(l21) < 1e-12:
        full = local  # off-diagonal block already diagonal
    else:
        # Closed-form two-sided rotation diagonalizing a real 2x2 block;
        # reproduces the v, w construction and also covers its z = 0
        # degeneracy (equal singular values with l not yet diagonal).
        theta_minus = np.arctan2(l21 - l12, l11 + l22)
        theta_plus = np.arctan2(l21 + l12, l11 - l22)
        phi = 0.5 * (theta_plus + theta_minus)
        psi = 0.5 * (theta_plus - theta_minus)

        def rot(t):
            return np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])

        rot_a, rot_b = rot(-phi), rot(-psi)
        full = (
            np.block([[rot_a, np.zeros((2, 2))], [np.zeros((2, 2)), rot_b]]) @ local
        )

    nf_cov = full @ state.covariance @ full.T
    c1v, c2v = nf_cov[0, 2], nf_cov[1, 3]
    if c1v < c2v or -c2v > c1v:
        # quarter rotation on both modes swaps (c1, c2); a half rotation on
        # one mode flips both signs -- combine to set c1 >= max(c2, -c2)
        quarter = np.kron(np.eye(2), OMEGA_1)
        cands = [full, quarter @ full,
                 np.diag([1.0, 1.0, -1.0, -1.0]) @ full,
                 quarter @ np.diag([1.0, 1.0, -1.0, -1.0]) @ full]
        def score(mat):
            cov = mat @ state.covariance @ mat.T
            return (cov[0, 2], cov[0, 2] - abs(cov[1, 3]))
        full = max(cands, key=score)
        nf_cov = full @ state.covariance @ full.T
        c1v, c2v = nf_cov[0, 2], nf_cov[1, 3]
    return NormalFormTwoMode(
        a=float(nf_cov[0, 0]),
        b=float(nf_cov[2, 2]),
        c1=float(c1v),
        c2=float(c2v),
        transform=SymplecticMap(full),
    )


def symplectic_diagonalize(nf: NormalFormTwoMode, w1: float = 0.0, w2: float = 0.0):
    """Map taking the normal form to diag(nu+, nu+, nu-, nu-).

    Default is the w1 = w2 = 0 closed form; other values of the free
    parameters are accepted but only symplecticity is guaranteed for them.
    """
    a, b, c1, c2 = nf.a, nf.b, nf.c1, nf.c2
    disc = (a * a - b * b) ** 2 + 4.0 * (a * c1 + b * c2) * (a * c2 + b * c1)
    nu_p = np.sqrt((a * a + b * b + 2 * c1 * c2 + np.sqrt(max(disc, 0.0))) / 2.0)
    nu_m = np.sqrt((a * a + b * b + 2 * c1 * c2 - np.sqrt(max(disc, 0.0))) / 2.0)
    d1, d2 = a * b - c1 * c1, a * b - c2 * c2
    if d1 <= 0 or d2 <= 0:
        raise ValueError("singular construction: a*b - c_i^2 must be positive")

    def column(ci, di, wi):
        ui = np.sqrt(nu_p / nu_m) * np.sqrt(max(b * nu_m / di - wi * wi, 0.0))
        vi = (
            -np.sqrt(nu_p / nu_m)
            / b
            * (wi * np.sqrt(di) + ci * np.sqrt(max(b * nu_m / di - wi * wi, 0.0)))
        )
        zi = (-ci * wi + np.sqrt(di) * np.sqrt(max(b * nu_m / di - wi * wi, 0.0))) / b
        return ui, vi, zi

    u1, v1, z1 = column(c1, d1, w1)
    u2, v2, z2 = column(c2, d2, w2)
    s = np.array(
        [
            [u1, 0.0, v1, 0.0],
            [0.0, u2, 0.0, v2],
            [w1, 0.0, z1, 0.0],
            [0.0, w2, 0.0, z2],
        ]
    )
    return SymplecticMap(s)


# -- 2x2 Gaussian-integral helpers --------------------------------------


def w_function(x: np.ndarray, m: np.ndarray) -> np.ndarray:
    """W_{X,M} = X^-1 tr(X^-1 M) - Omega^T M Omega / det X (2x2, symmetric X)."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    det = np.linalg.det(x)
    if abs(det) < 1e-300:
        raise ValueError("X must be invertible")
    xinv = np.linalg.inv(x)
    return xinv * np.trace(xinv @ m) - OMEGA_1.T @ m @ OMEGA_1 / det


def gaussian_integral(x, j=None):
    """Closed form of Int d^2a exp(-a^T X a / 2 + a^T J), d^2a = dx dp / 2."""
    x = np.asarray(x, dtype=float)
    det = np.linalg.det(x)
    base = np.pi / np.sqrt(det)
    if j is None:
        return base
    j = np.asarray(j)
    return base * np.exp(0.5 * j @ np.linalg.inv(x) @ j)


def gaussian_integral_quadratic(x, m, j=None):
    """Int d^2a (a^T M a) exp(-a^T X a / 2 + a^T J)."""
    x = np.asarray(x, dtype=float)
    m = np.asarray(m, dtype=float)
    xinv = np.linalg.inv(x)
    if j is None:
        return gaussian_integral(x) * np.trace(xinv @ m)
    j = np.asarray(j)
    return gaussian_integral(x, j) * (np.trace(xinv @ m) + j @ w_function(x, m) @ j)


def gaussian_integral_quartic(x, m, p):
    """Int d^2a (a^T M a)(a^T P a) exp(-a^T X a / 2), source-free case."""
    x = np.asarray(x, dtype=float)
    xinv = np.linalg.inv(x)
    det = np.linalg.det(x)
    val = 3.0 * np.trace(xinv @ m) * np.trace(xinv @ p) - (2.0 / det) * np.trace(
        OMEGA_1.T @ p @ OMEGA_1 @ m
    )
    return gaussian_integral(x) * val


def gaussian_integral_sextic(x, m, p, q):
    """Int d^2a (a^T M a)(a^T P a)(a^T Q a) exp(-a^T X a / 2), source-free."""
    x = np.asarray(x, dtype=float)
    xinv = np.linalg.inv(x)
    det = np.linalg.det(x)

    def tr_om(u, v):
        return np.trace(OMEGA_1.T @ u @ OMEGA_1 @ v)

    tm, tp, tq = (np.trace(xinv @ u) for u in (m, p, q))
    val = 15.0 * tm * tp * tq - (6.0 / det) * (
        tq * tr_om(m, p) + tm * tr_om(q, p) + tp * tr_om(q, m)
    )
    return gaussian_integral(x) * val


def gaussian_integral_octic(x, m, p, q, r):
    """Int d^2a (a^T M a)(a^T P a)(a^T Q a)(a^T R a) exp(-a^T X a / 2)."""
    x = np.asarray(x, dtype=float)
    xinv = np.linalg.inv(x)
    det = np.linalg.det(x)

    def tr_om(u, v):
        return np.trace(OMEGA_1.T @ u @ OMEGA_1 @ v)

    tm, tp, tq, tr_ = (np.trace(xinv @ u) for u in (m, p, q, r))
    val = (
        105.0 * tm * tp * tq * tr_
        - (30.0 / det)
        * (
            tq * tr_ * tr_om(m, p)
            + tm * tr_ * tr_om(q, p)
            + tp * tr_ * tr_om(q, m)
            + tp * tq * tr_om(r, m)
            + tm * tq * tr_om(r, p)
            + tm * tp * tr_om(r, q)
        )
        + (12.0 / det**2)
        * (
            tr_om(r, q) * tr_om(m, p)
            + tr_om(r, m) * tr_om(q, p)
            + tr_om(r, p) * tr_om(q, m)
        )
    )
    return gaussian_integral(x) * val
