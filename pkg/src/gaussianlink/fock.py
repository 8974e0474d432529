"""Truncated Fock-space simulator, the independent numerical oracle.

Two-mode states are held as weighted ensembles of pure vectors over the
basis |n_A, n_B> (flattened row-major), which keeps thermal mixtures cheap:
a two-mode squeezed thermal state is the two-mode squeezer applied to a
pair of small thermal mixtures.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply


class TruncationError(RuntimeError):
    """Raised when the discarded tail mass exceeds the requested tolerance."""


def destroy(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), k=1)


def create(n_max: int) -> np.ndarray:
    return destroy(n_max).T


def displacement_matrix(alpha: complex, n_max: int) -> np.ndarray:
    a = destroy(n_max)
    return expm(alpha * a.conj().T - np.conj(alpha) * a)


def hermite_functions(n_max: int, y: np.ndarray) -> np.ndarray:
    """Oscillator eigenfunctions u_m(y), rows m = 0..n_max (vacuum var 1/2)."""
    y = np.asarray(y, dtype=float)
    u = np.zeros((n_max + 1, y.size))
    u[0] = np.pi ** (-0.25) * np.exp(-0.5 * y * y)
    if n_max >= 1:
        u[1] = np.sqrt(2.0) * y * u[0]
    for m in range(2, n_max + 1):
        u[m] = np.sqrt(2.0 / m) * y * u[m - 1] - np.sqrt((m - 1) / m) * u[m - 2]
    return u


@dataclass
class FockEnsemble:
    """Weighted ensemble of pure two-mode vectors on a truncated basis."""

    n_max: int
    weights: np.ndarray
    vectors: np.ndarray  # shape (k, (n_max+1)**2)
    tail_mass: float

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def norm_deficit(self) -> float:
        norms = np.sum(np.abs(self.vectors) ** 2, axis=1)
        return float(1.0 - np.dot(self.weights, norms))

    def require_tail(self, tol: float = 1e-8):
        deficit = max(self.tail_mass, self.norm_deficit())
        if deficit > tol:
            raise TruncationError(
                f"tail mass {deficit:.2e} exceeds {tol:.0e}; increase n_max"
            )
        return self


def _two_mode_squeezer_generator(n_max: int) -> sparse.csr_matrix:
    dim = n_max + 1
    a = sparse.csr_matrix(destroy(n_max))
    eye = sparse.identity(dim, format="csr")
    ab = sparse.kron(a, a, format="csr")
    del eye
    return (ab.T - ab).tocsc()


def two_mode_squeeze(r: float, vec: np.ndarray, n_max: int) -> np.ndarray:
    """Apply exp[r (a+ b+ - a b)] to a flattened two-mode vector."""
    gen = _two_mode_squeezer_generator(n_max)
    return expm_multiply(r * gen, vec)


def tmsv_fock(r: float, n_max: int) -> FockEnsemble:
    lam = np.tanh(r)
    dim = n_max + 1
    c = np.sqrt(1.0 - lam * lam) * lam ** np.arange(dim)
    vec = np.zeros(dim * dim)
    vec[np.arange(dim) * dim + np.arange(dim)] = c
    tail = 1.0 - float(np.sum(c * c))
    return FockEnsemble(n_max, np.array([1.0]), vec[None, :].astype(complex), tail)


def tmst_fock(r: float, n: float, n_max: int, weight_tol: float = 1e-10) -> FockEnsemble:
    """TMST as a two-mode squeezer acting on a pair of thermal mixtures."""
    if n == 0.0:
        return tmsv_fock(r, n_max)
    k_max = 0
    while (n / (1.0 + n)) ** (k_max + 1) > weight_tol and k_max < n_max:
        k_max += 1
    probs = np.array(
        [n**k / (1.0 + n) ** (k + 1) for k in range(k_max + 1)]
    )
    dim = n_max + 1
    weights, vectors = [], []
    gen = _two_mode_squeezer_generator(n_max)
    dropped = 1.0 - float(np.sum(probs)) ** 2
    for k1 in range(k_max + 1):
        for k2 in range(k_max + 1):
            w = probs[k1] * probs[k2]
            vec = np.zeros(dim * dim, dtype=complex)
            vec[k1 * dim + k2] = 1.0
            vectors.append(expm_multiply(r * gen, vec))
            weights.append(w)
    return FockEnsemble(
        n_max, np.array(weights), np.array(vectors), max(dropped, 0.0)
    )


def ps_fock(ens: FockEnsemble, k: int = 1) -> tuple[FockEnsemble, float]:
    """Heuristic k-photon subtraction per mode: (a x a)^k, renormalized.

    Returns the conditioned ensemble and the normalization <(a+ a)^k ...>.
    """
    dim = ens.dim
    a = destroy(ens.n_max)
    op = np.kron(np.linalg.matrix_power(a, k), np.linalg.matrix_power(a, k))
    new_vecs = ens.vectors @ op.T
    norms = np.sum(np.abs(new_vecs) ** 2, axis=1)
    total = float(np.dot(ens.weights, norms))
    if total <= 0.0:
        raise ValueError("cannot subtract photons: state annihilated")
    del dim
    return (
        FockEnsemble(ens.n_max, ens.weights * norms / total,
                     new_vecs / np.sqrt(norms)[:, None], ens.tail_mass),
        total,
    )


def pa_fock(ens: FockEnsemble, k: int = 1) -> tuple[FockEnsemble, float]:
    """Heuristic k-photon addition per mode: (a+ x a+)^k, renormalized."""
    adag = create(ens.n_max)
    op = np.kron(np.linalg.matrix_power(adag, k), np.linalg.matrix_power(adag, k))
    new_vecs = ens.vectors @ op.T
    norms = np.sum(np.abs(new_vecs) ** 2, axis=1)
    total = float(np.dot(ens.weights, norms))
    return (
        FockEnsemble(ens.n_max, ens.weights * norms / total,
                     new_vecs / np.sqrt(norms)[:, None], ens.tail_mass),
        total,
    )


def char_function_fock(ens: FockEnsemble, alpha_vec) -> complex:
    """tr[rho D_A(a1) D_B(a2)] at phase-space point (x1, p1, x2, p2)."""
    x1, p1, x2, p2 = np.asarray(alpha_vec, dtype=float)
    a1 = (x1 + 1j * p1) / np.sqrt(2.0)
    a2 = (x2 + 1j * p2) / np.sqrt(2.0)
    d1 = displacement_matrix(a1, ens.n_max)
    d2 = displacement_matrix(a2, ens.n_max)
    dim = ens.dim
    val = 0.0 + 0.0j
    for w, vec in zip(ens.weights, ens.vectors):
        psi = vec.reshape(dim, dim)
        val += w * np.vdot(psi, d1 @ psi @ d2.T)
    return complex(val)


def negativity_fock(ens: FockEnsemble) -> float:
    """Negativity via total-photon-number blocks of the partial transpose.

    Valid because every ensemble member conserves the photon-number
    difference n_A - n_B (checked), which makes rho^{T_B} block diagonal
    in n_A + n_B.
    """
    dim = ens.dim
    for vec in ens.vectors:
        psi = np.abs(vec.reshape(dim, dim)) ** 2
        rows, cols = np.nonzero(psi > 1e-30)
        if rows.size and np.unique(rows - cols).size > 1:
            raise ValueError("ensemble member mixes photon-number differences")
    neg_sum = 0.0
    for total in range(2 * ens.n_max + 1):
        lo = max(0, total - ens.n_max)
        hi = min(total, ens.n_max)
        ns = np.arange(lo, hi + 1)
        # <n, total-n|rho^{T_B}|m, total-m> = sum_j w_j c_{n,total-m} conj(c_{m,total-n})
        block = np.zeros((ns.size, ns.size), dtype=complex)
        for w, vec in zip(ens.weights, ens.vectors):
            psi = vec.reshape(dim, dim)
            sub = psi[np.ix_(ns, total - ns)]  # sub[i, j] = c_{n_i, total-m_j}
            block += w * sub * np.conj(sub).T
        eig = np.linalg.eigvalsh(block)
        neg_sum += float(np.sum(np.abs(eig[eig < 0.0])))
    return neg_sum


def _coherent_position_wavefunction(alpha0: complex, y: np.ndarray) -> np.ndarray:
    x0 = np.sqrt(2.0) * alpha0.real
    p0 = np.sqrt(2.0) * alpha0.imag
    return (
        np.pi ** (-0.25)
        * np.exp(-0.5 * (y - x0) ** 2 + 1j * p0 * y - 0.5j * x0 * p0)
    )


def teleport_numeric(
    ens: FockEnsemble,
    alpha0: complex = 0.0,
    gh_points: int = 61,
    outcome_scale: float = 1.8,
    y_points: int = 401,
) -> float:
    """Average Braunstein-Kimble fidelity for a coherent input, by quadrature.

    Outcome integral on a rescaled Gauss-Hermite tensor grid; this is the
    oracle's dominant error source.
    """
    dim = ens.dim
    nodes, gh_w = np.polynomial.hermite.hermgauss(gh_points)
    xs = outcome_scale * nodes
    wts = outcome_scale * gh_w * np.exp(nodes**2)

    span = 9.0 + 2.0 * abs(alpha0)
    y, wy = np.polynomial.legendre.leggauss(y_points)
    y = span * y
    wy = span * wy

    u = hermite_functions(ens.n_max, y)  # (m, y)
    phase = np.exp(-1j * np.outer(xs, y))  # (p, y)
    phi_in = _coherent_position_wavefunction(alpha0, y[None, :] + xs[:, None])

    # K[x, p, m] = 1/sqrt(2 pi) Int dy e^{-i p y} phi(x + y) u_m(y)
    kern = np.einsum("xy,py,my,y->xpm", phi_in, phase, u, wy) / np.sqrt(2.0 * np.pi)

    # receiver-side row vector <alpha0| D(xi) |n> on the grid
    ns = np.arange(dim)
    fact = np.cumsum(np.log(np.maximum(ns, 1)))
    xi = (xs[:, None] + 1j * xs[None, :]) / np.sqrt(2.0)
    beta = alpha0 - xi
    log_beta = np.log(np.where(np.abs(beta) > 0, np.conj(beta), 1.0))
    v = np.exp(
        1j * (xi * np.conj(alpha0)).imag[..., None]
        - 0.5 * np.abs(beta)[..., None] ** 2
        + ns[None, None, :] * log_beta[..., None]
        - 0.5 * fact[None, None, :]
    )
    zero_beta = np.abs(beta) == 0
    if np.any(zero_beta):
        v[zero_beta] = 0.0
        v[zero_beta, 0] = np.exp(1j * (xi[zero_beta] * np.conj(alpha0)).imag)

    fid = 0.0
    for w, vec in zip(ens.weights, ens.vectors):
        c = vec.reshape(dim, dim)
        b = np.einsum("xpm,mn->xpn", kern, c)
        amp = np.einsum("xpn,xpn->xp", v, b)
        fid += w * np.einsum("x,p,xp->", wts, wts, np.abs(amp) ** 2)
    return float(fid)


def _receiver_rows(input_coeffs: np.ndarray, xi: np.ndarray, n_max: int):
    """<phi|D(xi)|n> for phi = sum_k f_k |k>, via the k-recurrence."""
    dim = n_max + 1
    ns = np.arange(dim)
    fact = np.cumsum(np.log(np.maximum(ns, 1)))
    neg = -np.conj(xi)[..., None]
    log_neg = np.log(np.where(np.abs(neg) > 0, neg, 1.0))
    row = np.exp(
        -0.5 * np.abs(xi)[..., None] ** 2 + ns * log_neg - 0.5 * fact
    )
    row[np.abs(neg[..., 0]) == 0] = 0.0
    row[np.abs(neg[..., 0]) == 0, 0] = np.exp(
        -0.5 * np.abs(xi)[np.abs(neg[..., 0]) == 0] ** 2
    )
    total = np.conj(input_coeffs[0]) * row
    prev = row
    for k in range(1, len(input_coeffs)):
        nxt = np.zeros_like(prev)
        nxt[..., 1:] = np.sqrt(ns[1:]) * prev[..., :-1]
        nxt = (nxt + xi[..., None] * prev) / np.sqrt(k)
        total += np.conj(input_coeffs[k]) * nxt
        prev = nxt
    return total


def teleport_numeric_input(
    ens: FockEnsemble,
    input_coeffs,
    gh_points: int = 61,
    outcome_scale: float = 1.8,
    y_points: int = 401,
) -> float:
    """Braunstein-Kimble fidelity for an arbitrary pure Fock-basis input."""
    f_in = np.asarray(input_coeffs, dtype=complex)
    dim = ens.dim
    nodes, gh_w = np.polynomial.hermite.hermgauss(gh_points)
    xs = outcome_scale * nodes
    wts = outcome_scale * gh_w * np.exp(nodes**2)

    span = 9.0
    y, wy = np.polynomial.legendre.leggauss(y_points)
    y = span * y
    wy = span * wy

    u = hermite_functions(ens.n_max, y)
    phase = np.exp(-1j * np.outer(xs, y))
    shifted = np.add.outer(xs, y)
    u_in = hermite_functions(len(f_in) - 1, shifted.ravel()).reshape(
        len(f_in), *shifted.shape
    )
    phi_in = np.einsum("k,kxy->xy", f_in, u_in)

    kern = np.einsum("xy,py,my,y->xpm", phi_in, phase, u, wy) / np.sqrt(2.0 * np.pi)
    xi = (xs[:, None] + 1j * xs[None, :]) / np.sqrt(2.0)
    v = _receiver_rows(f_in, xi, ens.n_max)

    fid = 0.0
    for w, vec in zip(ens.weights, ens.vectors):
        c = vec.reshape(dim, dim)
        b = np.einsum("xpm,mn->xpn", kern, c)
        amp = np.einsum("xpn,xpn->xp", v, b)
        fid += w * np.einsum("x,p,xp->", wts, wts, np.abs(amp) ** 2)
    return float(fid)


def hybrid_bell_fidelity_fock(ens: FockEnsemble, a: complex, b: complex,
                              basis: str = "phi", sign: int = +1):
    """(conditional fidelity, projection probability) for the hybrid protocol.

    Projects (input qubit x mode A) onto a Bell state, applies the matching
    qubit correction on mode B and compares with the input qubit.
    """
    dim = ens.dim
    fid_num = 0.0
    prob = 0.0
    for w, vec in zip(ens.weights, ens.vectors):
        c = vec.reshape(dim, dim)
        if basis == "phi":
            u = (a * c[0] + sign * b * c[1]) / np.sqrt(2.0)
            corr = np.array([a, sign * b])
        else:
            u = (a * c[1] + sign * b * c[0]) / np.sqrt(2.0)
            corr = np.array([sign * b, a])
        prob += w * float(np.sum(np.abs(u) ** 2))
        overlap = np.conj(corr[0]) * u[0] + np.conj(corr[1]) * u[1]
        fid_num += w * abs(overlap) ** 2
    return fid_num / prob, prob


def attenuate_fock(ens: FockEnsemble, tau: float, n_th: float = 0.0,
                   env_kmax: int = 6, mode: int = 1) -> FockEnsemble:
    """Thermal attenuation of one mode via a beam-splitter dilation.

    Small n_th only (the environment is truncated at env_kmax photons).
    """
    dim = ens.dim
    theta = np.arccos(np.sqrt(tau))
    a = destroy(ens.n_max)
    gen = theta * (np.kron(a.T, a) - np.kron(a, a.T))
    bs = expm(gen)  # acts on (mode, env) pairs
    if n_th == 0.0:
        probs = np.array([1.0])
    else:
        ks = np.arange(env_kmax + 1)
        probs = n_th**ks / (1.0 + n_th) ** (ks + 1)
        probs = probs / np.sum(probs)
    weights, vectors = [], []
    for w, vec in zip(ens.weights, ens.vectors):
        psi = vec.reshape(dim, dim)
        for k, pk in enumerate(probs):
            env = np.zeros(dim)
            env[k] = 1.0
            if mode == 1:
                joint = np.einsum("ab,e->abe", psi, env).reshape(dim, dim * dim)
                joint = (joint @ bs.T).reshape(dim, dim, dim)
                for e_out in range(dim):
                    branch = joint[:, :, e_out]
                    nrm = np.linalg.norm(branch)
                    if nrm**2 * w * pk > 1e-14:
                        weights.append(w * pk * nrm**2)
                        vectors.append((branch / nrm).reshape(-1))
            else:
                raise NotImplementedError("only mode B attenuation is needed")
    return FockEnsemble(ens.n_max, np.array(weights), np.array(vectors),
                        ens.tail_mass)
