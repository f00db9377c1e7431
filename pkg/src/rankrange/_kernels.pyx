# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled kernels: cyclic complex Jacobi sweeps and Bland-rule simplex pivots.

Same contracts as ``_kernels_py``; see that module for the argument layout.
"""

from libc.math cimport sqrt, fabs
import numpy as np

BACKEND = "cython"

cdef double _max_offdiag(double[:, :, ::1] a) noexcept nogil:
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double m = 0.0, x
    for i in range(n):
        for j in range(n):
            if i != j:
                x = a[i, j, 0] * a[i, j, 0] + a[i, j, 1] * a[i, j, 1]
                if x > m:
                    m = x
    return sqrt(m)


cdef inline void _rotate_cols(double[:, :, ::1] x, Py_ssize_t n, Py_ssize_t p, Py_ssize_t q,
                              double c, double s, double er, double ei) noexcept nogil:
    # [x_p, x_q] <- [x_p c - x_q s e, x_p s + x_q c e] with e = er + i ei
    cdef Py_ssize_t i
    cdef double pr, pi, qr, qi, wr, wi
    for i in range(n):
        pr = x[i, p, 0]
        pi = x[i, p, 1]
        qr = x[i, q, 0]
        qi = x[i, q, 1]
        wr = qr * er - qi * ei
        wi = qr * ei + qi * er
        x[i, p, 0] = c * pr - s * wr
        x[i, p, 1] = c * pi - s * wi
        x[i, q, 0] = s * pr + c * wr
        x[i, q, 1] = s * pi + c * wi


def jacobi_sweeps(a_c, v_c, const Py_ssize_t[:, :, ::1] schedule, double tol, int max_sweeps):
    # complex128 arrays viewed as (n, n, 2) float64: [..., 0] real, [..., 1] imag
    cdef double[:, :, ::1] a = a_c.view(np.float64).reshape(a_c.shape[0], a_c.shape[1], 2)
    cdef double[:, :, ::1] v = v_c.view(np.float64).reshape(v_c.shape[0], v_c.shape[1], 2)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t nrounds = schedule.shape[0], npairs = schedule.shape[1]
    cdef Py_ssize_t r, k, i, p, q
    cdef double b, app, aqq, tau, t, c, s, er, ei, pr, pi, qr, qi, wr, wi
    cdef int sweeps = 0
    cdef double off
    if n < 2:
        return 0, 0.0
    with nogil:
        off = _max_offdiag(a)
        while off > tol and sweeps < max_sweeps:
            for r in range(nrounds):
                for k in range(npairs):
                    p = schedule[r, k, 0]
                    q = schedule[r, k, 1]
                    b = sqrt(a[p, q, 0] * a[p, q, 0] + a[p, q, 1] * a[p, q, 1])
                    if b == 0.0:
                        continue
                    app = a[p, p, 0]
                    aqq = a[q, q, 0]
                    # e = conj(a_pq) / |a_pq|
                    er = a[p, q, 0] / b
                    ei = -a[p, q, 1] / b
                    tau = (aqq - app) / (2.0 * b)
                    if tau >= 0.0:
                        t = 1.0 / (fabs(tau) + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (fabs(tau) + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    _rotate_cols(a, n, p, q, c, s, er, ei)
                    # rows: [r_p, r_q] <- [c r_p - s conj(e) r_q, s r_p + c conj(e) r_q]
                    for i in range(n):
                        pr = a[p, i, 0]
                        pi = a[p, i, 1]
                        qr = a[q, i, 0]
                        qi = a[q, i, 1]
                        wr = qr * er + qi * ei
                        wi = qi * er - qr * ei
                        a[p, i, 0] = c * pr - s * wr
                        a[p, i, 1] = c * pi - s * wi
                        a[q, i, 0] = s * pr + c * wr
                        a[q, i, 1] = s * pi + c * wi
                    a[p, q, 0] = 0.0
                    a[p, q, 1] = 0.0
                    a[q, p, 0] = 0.0
                    a[q, p, 1] = 0.0
                    a[p, p, 0] = app - t * b
                    a[p, p, 1] = 0.0
                    a[q, q, 0] = aqq + t * b
                    a[q, q, 1] = 0.0
                    _rotate_cols(v, n, p, q, c, s, er, ei)
            sweeps += 1
            off = _max_offdiag(a)
    return sweeps, off


def simplex_pivots(double[:, ::1] tab, Py_ssize_t[::1] basis, Py_ssize_t ncols,
                   double tol, int max_iter):
    cdef Py_ssize_t m = tab.shape[0] - 1, w = tab.shape[1]
    cdef Py_ssize_t j, i, col, row, rhs = w - 1
    cdef int it = 0, status = 2
    cdef double best, ratio, piv, f, slack
    with nogil:
        while it < max_iter:
            col = -1
            for j in range(ncols):
                if tab[m, j] < -tol:
                    col = j
                    break
            if col < 0:
                status = 0
                break
            row = -1
            best = 0.0
            for i in range(m):
                if tab[i, col] > tol:
                    ratio = tab[i, rhs] / tab[i, col]
                    if row < 0 or ratio < best:
                        row = i
                        best = ratio
            if row < 0:
                status = 1
                break
            # Bland tie-break: lowest basic index among near-minimal ratios
            slack = tol * (fabs(best) if fabs(best) > 1.0 else 1.0)
            for i in range(m):
                if tab[i, col] > tol and basis[i] < basis[row]:
                    if tab[i, rhs] / tab[i, col] <= best + slack:
                        row = i
            piv = tab[row, col]
            for j in range(w):
                tab[row, j] /= piv
            for i in range(m + 1):
                if i != row:
                    f = tab[i, col]
                    if f != 0.0:
                        for j in range(w):
                            tab[i, j] -= f * tab[row, j]
            basis[row] = col
            it += 1
    return status, it
