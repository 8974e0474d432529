"""Reflectivity optimization: coordinate-descent ladder and ansatz fitting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import backend
from .model import (
    FREQ_DEFAULT,
    V_IN_DEFAULT,
    Z_IN_DEFAULT,
    Z_OUT_DEFAULT,
    ImpedanceProfile,
    ansatz_profile,
    profile_reflectivity,
)


@dataclass(frozen=True)
class OptimizeResult:
    profile: ImpedanceProfile
    reflectivity: float
    sweeps: int
    converged: bool
    ladder: tuple


def optimize_profile(
    n_slices: int,
    length: float,
    freq: float = FREQ_DEFAULT,
    seed: int = 0,
    n_start: int = 10,
    max_sweeps: int = 200,
    sweep_tol: float = 1e-10,
    v_in: float = V_IN_DEFAULT,
    z_in: float = Z_IN_DEFAULT,
    z_out: float = Z_OUT_DEFAULT,
) -> OptimizeResult:
    """Backward coordinate-descent with interpolation doubling.

    Starts from a random impedance array at n_start slices and doubles the
    subdivision until n_slices is reached; deterministic for a given seed.
    """
    ladder = [n_start]
    while ladder[-1] < n_slices:
        ladder.append(2 * ladder[-1])
    if ladder[-1] != n_slices:
        ladder = [n_slices]
    rng = np.random.default_rng(seed)
    z = np.concatenate(
        [[z_in], rng.uniform(min(z_in, z_out), max(z_in, z_out), ladder[0] - 1),
         [z_out]]
    )
    k = 2.0 * np.pi * freq / v_in
    history = []
    sweeps = 0
    converged = True
    for n_cur in ladder:
        if z.size - 1 != n_cur:
            prof = ImpedanceProfile(z, length).interpolated()
            z = prof.z_nodes
        z, refl, swp, conv = backend.sweep_optimize(
            np.asarray(z, dtype=float), k * length / n_cur, max_sweeps, sweep_tol
        )
        history.append((n_cur, float(refl)))
        sweeps += swp
        converged = converged and conv
    profile = ImpedanceProfile(z, length)
    return OptimizeResult(
        profile, profile_reflectivity(profile, freq, v_in), sweeps, converged,
        tuple(history),
    )


def fit_ansatz(
    length: float,
    freq: float = FREQ_DEFAULT,
    n_slices: int = 160,
    start: tuple[float, float] = (10.0, 0.7),
    v_in: float = V_IN_DEFAULT,
) -> tuple[float, float, float]:
    """(alpha, beta, |r_R|) minimizing the sliced-ansatz reflectivity."""

    def objective(params):
        alpha, beta = params
        if alpha <= 0.0 or beta <= 0.0:
            return 1.0
        prof = ansatz_profile(n_slices, length, alpha, beta)
        return profile_reflectivity(prof, freq, v_in)

    res = minimize(
        objective,
        np.asarray(start, dtype=float),
        method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-14, "maxiter": 4000},
    )
    alpha, beta = res.x
    return float(alpha), float(beta), float(res.fun)


def ansatz_reflectivity_sweep(lengths, alpha_beta=None, n_slices: int = 160,
                              freq: float = FREQ_DEFAULT) -> np.ndarray:
    """|r_R| against the antenna size, refitting the ansatz per length."""
    out = np.empty(len(lengths))
    start = (10.0, 0.7)
    for i, d in enumerate(lengths):
        if alpha_beta is None:
            alpha, beta, refl = fit_ansatz(d, freq, n_slices, start)
            start = (alpha, beta)
            out[i] = refl
        else:
            prof = ansatz_profile(n_slices, d, *alpha_beta)
            out[i] = profile_reflectivity(prof, freq)
    return out
