"""Pure-Python antenna kernels (NumPy/SciPy); mirror of the compiled module.

The transfer matrix of one linearly-tapered slice follows from matching the
Bessel-basis solution u/Z and its derivative at the slice edges; a cascade
is the ordered product of the per-slice 2x2 real matrices.
"""

from __future__ import annotations

import numpy as np
from scipy.special import j0, j1, y0, y1

BACKEND_NAME = "python"
_DEGENERATE_DZ = 1e-9  # ohm; below this a slice propagates as a plane wave


def _basis(y: float) -> np.ndarray:
    """[[J1, Y1], [dJ1/dy, dY1/dy]] at y (odd continuation for y < 0)."""
    t = abs(y)
    s = 1.0 if y >= 0 else -1.0
    j1t, y1t = j1(t), y1(t)
    j1p = j0(t) - j1t / t
    y1p = y0(t) - y1t / t
    return np.array([[j1t, y1t], [s * j1p, s * y1p]])


def _basis_inv(y: float) -> np.ndarray:
    t = abs(y)
    s = 1.0 if y >= 0 else -1.0
    j1t, y1t = j1(t), y1(t)
    j1p = j0(t) - j1t / t
    y1p = y0(t) - y1t / t
    return (np.pi * y / 2.0) * np.array([[s * y1p, -y1t], [-s * j1p, j1t]])


def slice_matrix(z_a: float, z_b: float, k_eps: float) -> np.ndarray:
    """Real transfer matrix of one slice with impedance ramp z_a -> z_b."""
    dz = z_b - z_a
    if abs(dz) < _DEGENERATE_DZ:
        c, s = np.cos(k_eps), np.sin(k_eps)
        return np.array([[c, s], [-s, c]])
    y_l = k_eps * z_a / dz
    y_r = k_eps * z_b / dz
    return _basis(y_r) @ _basis_inv(y_l)


def cascade_matrix(z_nodes: np.ndarray, k_eps: float) -> np.ndarray:
    """Ordered product of slice matrices, last slice leftmost."""
    total = np.eye(2)
    for m in range(len(z_nodes) - 1):
        total = slice_matrix(z_nodes[m], z_nodes[m + 1], k_eps) @ total
    return total


def reflectivity_from_cascade(t_c: np.ndarray) -> float:
    """|r_R| of the unitarized scattering matrix, from the real cascade."""
    a, b = t_c[0, 0], t_c[0, 1]
    c, d = t_c[1, 0], t_c[1, 1]
    num = (a - d) ** 2 + (b + c) ** 2
    den = (a + d) ** 2 + (b - c) ** 2
    return float(np.sqrt(num / den))


def reflectivity(z_nodes: np.ndarray, k_eps: float) -> float:
    return reflectivity_from_cascade(cascade_matrix(z_nodes, k_eps))


def _golden_section(fun, lo: float, hi: float, tol: float) -> tuple[float, float]:
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    return (c, fc) if fc < fd else (d, fd)


def sweep_optimize(
    z_nodes: np.ndarray,
    k_eps: float,
    max_sweeps: int = 200,
    sweep_tol: float = 1e-10,
    node_tol: float = 1e-9,
) -> tuple[np.ndarray, float, int, bool]:
    """Backward coordinate-descent sweeps over the interior nodes.

    Returns (nodes, |r_R|, sweeps used, converged flag).  Prefix/suffix
    products are cached so a candidate impedance costs two slice matrices.
    """
    z = np.array(z_nodes, dtype=float)
    n_slices = len(z) - 1
    best = reflectivity(z, k_eps)
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        mats = [slice_matrix(z[m], z[m + 1], k_eps) for m in range(n_slices)]
        prefix = [np.eye(2)]
        for m in range(n_slices):
            prefix.append(mats[m] @ prefix[m])
        suffix = np.eye(2)
        for i in range(n_slices - 1, 0, -1):
            pre = prefix[i - 1]

            def objective(zi, _pre=pre, _suf=suffix, _i=i):
                left = slice_matrix(z[_i - 1], zi, k_eps)
                right = slice_matrix(zi, z[_i + 1], k_eps)
                return reflectivity_from_cascade(_suf @ right @ left @ _pre)

            lo, hi = max(1.0, 0.2 * z[i]), 5.0 * z[i]
            zi_best, _ = _golden_section(objective, lo, hi, node_tol)
            if objective(zi_best) < objective(z[i]):
                z[i] = zi_best
            suffix = suffix @ slice_matrix(z[i], z[i + 1], k_eps)
        current = reflectivity(z, k_eps)
        if abs(best - current) < sweep_tol:
            best = min(best, current)
            converged = True
            break
        best = current
    return z, float(reflectivity(z, k_eps)), sweeps, converged
