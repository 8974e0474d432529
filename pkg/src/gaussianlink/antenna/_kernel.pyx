# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled antenna kernels: slice cascade and coordinate-descent sweeps.

Same contract as _kernel_py; Bessel functions come from libm.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, sin, sqrt, fabs, pi

cdef extern from "math.h" nogil:
    double j0(double)
    double j1(double)
    double y0(double)
    double y1(double)

BACKEND_NAME = "cython"
cdef double DEGENERATE_DZ = 1e-9


cdef struct Mat2:
    double a
    double b
    double c
    double d


cdef inline Mat2 mat_mul(Mat2 l, Mat2 r) nogil:
    cdef Mat2 out
    out.a = l.a * r.a + l.b * r.c
    out.b = l.a * r.b + l.b * r.d
    out.c = l.c * r.a + l.d * r.c
    out.d = l.c * r.b + l.d * r.d
    return out


cdef inline Mat2 identity() nogil:
    cdef Mat2 out
    out.a = 1.0; out.b = 0.0; out.c = 0.0; out.d = 1.0
    return out


cdef Mat2 slice_mat(double z_a, double z_b, double k_eps) nogil:
    cdef Mat2 out
    cdef double dz = z_b - z_a
    cdef double ck, sk, y_l, y_r, t, s
    cdef double j1l, y1l, j1pl, y1pl, j1r, y1r, j1pr, y1pr, pref
    if fabs(dz) < DEGENERATE_DZ:
        ck = cos(k_eps); sk = sin(k_eps)
        out.a = ck; out.b = sk; out.c = -sk; out.d = ck
        return out
    y_l = k_eps * z_a / dz
    y_r = k_eps * z_b / dz
    t = fabs(y_l); s = 1.0 if y_l >= 0.0 else -1.0
    j1l = j1(t); y1l = y1(t)
    j1pl = s * (j0(t) - j1l / t)
    y1pl = s * (y0(t) - y1l / t)
    t = fabs(y_r)  # same sign as y_l within one slice
    j1r = j1(t); y1r = y1(t)
    j1pr = s * (j0(t) - j1r / t)
    y1pr = s * (y0(t) - y1r / t)
    # basis(y_r) @ basis_inv(y_l); basis_inv = (pi y_l / 2) [[y1p, -y1],[-j1p, j1]]
    pref = pi * y_l / 2.0
    out.a = pref * (j1r * y1pl - y1r * j1pl)
    out.b = pref * (-j1r * y1l + y1r * j1l)
    out.c = pref * (j1pr * y1pl - y1pr * j1pl)
    out.d = pref * (-j1pr * y1l + y1pr * j1l)
    return out


cdef inline double refl_from(Mat2 m) nogil:
    cdef double num = (m.a - m.d) * (m.a - m.d) + (m.b + m.c) * (m.b + m.c)
    cdef double den = (m.a + m.d) * (m.a + m.d) + (m.b - m.c) * (m.b - m.c)
    return sqrt(num / den)


def slice_matrix(double z_a, double z_b, double k_eps):
    cdef Mat2 m = slice_mat(z_a, z_b, k_eps)
    return np.array([[m.a, m.b], [m.c, m.d]])


def cascade_matrix(cnp.ndarray[cnp.float64_t, ndim=1] z_nodes, double k_eps):
    cdef Mat2 total = identity()
    cdef Py_ssize_t m
    for m in range(z_nodes.shape[0] - 1):
        total = mat_mul(slice_mat(z_nodes[m], z_nodes[m + 1], k_eps), total)
    return np.array([[total.a, total.b], [total.c, total.d]])


def reflectivity_from_cascade(cnp.ndarray[cnp.float64_t, ndim=2] t_c):
    cdef Mat2 m
    m.a = t_c[0, 0]; m.b = t_c[0, 1]; m.c = t_c[1, 0]; m.d = t_c[1, 1]
    return refl_from(m)


def reflectivity(cnp.ndarray[cnp.float64_t, ndim=1] z_nodes, double k_eps):
    cdef Mat2 total = identity()
    cdef Py_ssize_t m
    for m in range(z_nodes.shape[0] - 1):
        total = mat_mul(slice_mat(z_nodes[m], z_nodes[m + 1], k_eps), total)
    return refl_from(total)


cdef double node_objective(double zi, double z_prev, double z_next,
                           double k_eps, Mat2 pre, Mat2 suf) nogil:
    cdef Mat2 t = mat_mul(slice_mat(z_prev, zi, k_eps), pre)
    t = mat_mul(slice_mat(zi, z_next, k_eps), t)
    return refl_from(mat_mul(suf, t))


cdef double golden_node(double z_prev, double z_start, double z_next,
                        double k_eps, Mat2 pre, Mat2 suf, double tol) nogil:
    cdef double invphi = (sqrt(5.0) - 1.0) / 2.0
    cdef double a = 1.0 if 0.2 * z_start < 1.0 else 0.2 * z_start
    cdef double b = 5.0 * z_start
    cdef double c = b - invphi * (b - a)
    cdef double d = a + invphi * (b - a)
    cdef double fc = node_objective(c, z_prev, z_next, k_eps, pre, suf)
    cdef double fd = node_objective(d, z_prev, z_next, k_eps, pre, suf)
    while b - a > tol:
        if fc < fd:
            b = d; d = c; fd = fc
            c = b - invphi * (b - a)
            fc = node_objective(c, z_prev, z_next, k_eps, pre, suf)
        else:
            a = c; c = d; fc = fd
            d = a + invphi * (b - a)
            fd = node_objective(d, z_prev, z_next, k_eps, pre, suf)
    return c if fc < fd else d


def sweep_optimize(cnp.ndarray[cnp.float64_t, ndim=1] z_nodes, double k_eps,
                   int max_sweeps=200, double sweep_tol=1e-10,
                   double node_tol=1e-9):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] z = z_nodes.astype(np.float64).copy()
    cdef Py_ssize_t n_slices = z.shape[0] - 1
    cdef cnp.ndarray[cnp.float64_t, ndim=3] pref_buf = np.empty(
        (n_slices + 1, 2, 2)
    )
    cdef Mat2 suffix, pre, cur, cand_m
    cdef Py_ssize_t i, sweep
    cdef double best, current, zi_best, f_new, f_old
    cdef bint converged = False
    cdef int sweeps_used = 0

    best = reflectivity(z, k_eps)
    for sweep in range(1, max_sweeps + 1):
        sweeps_used = sweep
        cur = identity()
        pref_buf[0, 0, 0] = 1.0; pref_buf[0, 0, 1] = 0.0
        pref_buf[0, 1, 0] = 0.0; pref_buf[0, 1, 1] = 1.0
        for i in range(n_slices):
            cur = mat_mul(slice_mat(z[i], z[i + 1], k_eps), cur)
            pref_buf[i + 1, 0, 0] = cur.a; pref_buf[i + 1, 0, 1] = cur.b
            pref_buf[i + 1, 1, 0] = cur.c; pref_buf[i + 1, 1, 1] = cur.d
        suffix = identity()
        for i in range(n_slices - 1, 0, -1):
            pre.a = pref_buf[i - 1, 0, 0]; pre.b = pref_buf[i - 1, 0, 1]
            pre.c = pref_buf[i - 1, 1, 0]; pre.d = pref_buf[i - 1, 1, 1]
            zi_best = golden_node(z[i - 1], z[i], z[i + 1], k_eps, pre,
                                  suffix, node_tol)
            f_new = node_objective(zi_best, z[i - 1], z[i + 1], k_eps, pre, suffix)
            f_old = node_objective(z[i], z[i - 1], z[i + 1], k_eps, pre, suffix)
            if f_new < f_old:
                z[i] = zi_best
            suffix = mat_mul(suffix, slice_mat(z[i], z[i + 1], k_eps))
        current = reflectivity(z, k_eps)
        if fabs(best - current) < sweep_tol:
            if current < best:
                best = current
            converged = True
            break
        best = current
    return z, float(reflectivity(z, k_eps)), sweeps_used, bool(converged)
