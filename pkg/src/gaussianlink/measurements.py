"""Gaussian POVM conditioning: homodyne, heterodyne and finite-gain variants."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import GaussianState, I2

_PROJ_X = np.diag([1.0, 0.0])
_PROJ_P = np.diag([0.0, 1.0])


@dataclass(frozen=True)
class GaussianPovmElement:
    """Projection onto a displaced squeezed vacuum, or an ideal quadrature.

    `quadrature` marks the ideal-homodyne limit ('x' or 'p'), in which the
    covariance is handled through a pseudo-inverse instead of `upsilon`.
    """

    upsilon: np.ndarray | None
    offset: np.ndarray | None = None
    quadrature: str | None = None

    def __post_init__(self):
        if (self.upsilon is None) == (self.quadrature is None):
            raise ValueError("specify exactly one of upsilon / quadrature")
        if self.quadrature is not None and self.quadrature not in ("x", "p"):
            raise ValueError("quadrature must be 'x' or 'p'")
        if self.upsilon is not None:
            u = 0.5 * (np.asarray(self.upsilon, float) + np.asarray(self.upsilon, float).T)
            from .core import OMEGA_1

            if float(np.linalg.eigvalsh(u + 1j * OMEGA_1).min()) < -1e-9 * max(
                1.0, float(np.max(np.abs(u)))
            ):
                raise ValueError("POVM covariance violates the uncertainty bound")
            object.__setattr__(self, "upsilon", u)
        off = np.zeros(2) if self.offset is None else np.asarray(self.offset, float)
        object.__setattr__(self, "offset", off)

    def with_offset(self, offset) -> "GaussianPovmElement":
        return GaussianPovmElement(self.upsilon, np.asarray(offset, float), self.quadrature)


def general_gaussian_povm(xi: float, phi: float = 0.0) -> GaussianPovmElement:
    """Projection onto a squeezed vacuum with squeezing xi along phi."""
    ch, sh = np.cosh(2.0 * xi), np.sinh(2.0 * xi)
    ups = np.array(
        [
            [ch - sh * np.cos(phi), -sh * np.sin(phi)],
            [-sh * np.sin(phi), ch + sh * np.cos(phi)],
        ]
    )
    return GaussianPovmElement(ups)


def heterodyne() -> GaussianPovmElement:
    return GaussianPovmElement(np.eye(2))


def homodyne_x() -> GaussianPovmElement:
    return GaussianPovmElement(None, quadrature="x")


def homodyne_p() -> GaussianPovmElement:
    return GaussianPovmElement(None, quadrature="p")


def finite_gain_homodyne(gain: float) -> GaussianPovmElement:
    """Squashed-homodyne covariance diag(1/sqrt(G), sqrt(G)); G = 1 is heterodyne."""
    if gain < 1.0:
        raise ValueError("gain must be at least 1")
    g = np.sqrt(gain)
    return GaussianPovmElement(np.diag([1.0 / g, g]))


def double_homodyne() -> tuple[GaussianPovmElement, GaussianPovmElement]:
    """x-homodyne on the first measured mode, p-homodyne on the second."""
    return homodyne_x(), homodyne_p()


@dataclass(frozen=True)
class MeasurementRecord:
    conditioned: GaussianState
    probability_density: float
    outcome: np.ndarray


def _mp_pseudo_inverse(mat: np.ndarray) -> np.ndarray:
    return np.linalg.pinv(mat, rcond=1e-12, hermitian=True)


def condition_on_measurement(
    state: GaussianState,
    mode_index: int,
    povm: GaussianPovmElement,
    outcome=None,
) -> MeasurementRecord:
    """Condition an N-mode Gaussian state on a POVM applied to one mode.

    The measured mode is removed; the remaining modes keep their order.
    The returned probability density is normalized over the outcome
    variables (a 2-vector for finite POVMs, the measured quadrature for
    ideal homodyne).
    """
    n = state.n_modes
    keep = [m for m in range(n) if m != mode_index]
    idx_keep = np.concatenate([[2 * m, 2 * m + 1] for m in keep]).astype(int)
    idx_meas = np.array([2 * mode_index, 2 * mode_index + 1])

    sig_a = state.covariance[np.ix_(idx_keep, idx_keep)]
    sig_b = state.covariance[np.ix_(idx_meas, idx_meas)]
    eps = state.covariance[np.ix_(idx_keep, idx_meas)]
    d_a = state.displacement[idx_keep]
    d_b = state.displacement[idx_meas]

    if povm.quadrature is not None:
        proj = _PROJ_X if povm.quadrature == "x" else _PROJ_P
        kernel = _mp_pseudo_inverse(proj @ sig_b @ proj)
        out = np.asarray(povm.offset, float)
        var = sig_b[0, 0] if povm.quadrature == "x" else sig_b[1, 1]
        pos = 0 if povm.quadrature == "x" else 1
        dens = np.exp(-((out[pos] - d_b[pos]) ** 2) / var) / np.sqrt(np.pi * var)
        shift = proj @ (out - d_b)
    else:
        m = sig_b + povm.upsilon
        kernel = np.linalg.inv(m)
        out = np.asarray(povm.offset if outcome is None else outcome, float)
        v = out - d_b
        dens = np.exp(-v @ kernel @ v) / (np.pi * np.sqrt(np.linalg.det(m)))
        shift = out - d_b

    cov = sig_a - eps @ kernel @ eps.T
    disp = d_a + eps @ kernel @ shift
    new_state = GaussianState(len(keep), disp, cov)
    return MeasurementRecord(new_state, float(dens), out)


def condition_on_measurements(state: GaussianState, plan) -> GaussianState:
    """Sequentially condition on (mode_index, povm) pairs.

    Mode indices refer to the original state; product-POVM conditioning is
    order independent.
    """
    measured = sorted(m for m, _ in plan)
    current = state
    for mode, povm in sorted(plan, key=lambda mp: -mp[0]):
        current = condition_on_measurement(current, mode, povm).conditioned
    del measured
    return current


def sample_outcome(state: GaussianState, mode_index: int, povm, rng) -> np.ndarray:
    """Draw a measurement outcome; Gaussian with covariance (Sigma_B+Y)/2."""
    idx = np.array([2 * mode_index, 2 * mode_index + 1])
    sig_b = state.covariance[np.ix_(idx, idx)]
    d_b = state.displacement[idx]
    if povm.quadrature is not None:
        pos = 0 if povm.quadrature == "x" else 1
        out = np.zeros(2)
        out[pos] = rng.normal(d_b[pos], np.sqrt(sig_b[pos, pos] / 2.0))
        return out
    cov = (sig_b + povm.upsilon) / 2.0
    return rng.multivariate_normal(d_b, cov)
