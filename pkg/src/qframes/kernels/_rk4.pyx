# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fixed-step RK4 for x' = (sum_k t^k G_k) x.

The generator is stored row-compressed over the union sparsity pattern of
the G_k; each entry keeps its K polynomial coefficients.
"""
import numpy as np


cdef void _rhs(const Py_ssize_t[::1] indptr, const Py_ssize_t[::1] cols,
               const double complex[:, ::1] coef, double t,
               const double complex[::1] x, double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t n = indptr.shape[0] - 1, K = coef.shape[1]
    cdef Py_ssize_t i, e, k
    cdef double complex acc, c
    for i in range(n):
        acc = 0
        for e in range(indptr[i], indptr[i + 1]):
            c = coef[e, K - 1]
            for k in range(K - 2, -1, -1):
                c = c * t + coef[e, k]
            acc = acc + c * x[cols[e]]
        out[i] = acc


def _compress(G):
    K, n, _ = G.shape
    mask = np.any(G != 0, axis=0)
    rows, cols = np.nonzero(mask)
    indptr = np.zeros(n + 1, dtype=np.intp)
    np.add.at(indptr, rows + 1, 1)
    indptr = np.cumsum(indptr).astype(np.intp)
    coef = np.ascontiguousarray(G[:, rows, cols].T)
    if coef.shape[0] == 0:
        coef = np.zeros((0, K), dtype=np.complex128)
    return indptr, np.ascontiguousarray(cols, dtype=np.intp), coef


def rk4_poly(G, x0, double t0, double dt, Py_ssize_t nsteps, Py_ssize_t stride):
    G = np.ascontiguousarray(G, dtype=np.complex128)
    ip, cl, cf = _compress(G)
    cdef const Py_ssize_t[::1] indptr = ip
    cdef const Py_ssize_t[::1] cols = cl
    cdef const double complex[:, ::1] coef = cf
    cdef Py_ssize_t n = G.shape[1]
    cdef Py_ssize_t nsamp = nsteps // stride + 1
    out_arr = np.empty((nsamp, n), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    x_arr = np.array(x0, dtype=np.complex128, copy=True)
    cdef double complex[::1] x = x_arr
    cdef double complex[::1] k1 = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] k2 = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] k3 = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] k4 = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] tmp = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t step, i, s = 0
    cdef double t
    cdef double h2 = dt / 2, h6 = dt / 6
    with nogil:
        for i in range(n):
            out[0, i] = x[i]
        for step in range(nsteps):
            t = t0 + step * dt
            _rhs(indptr, cols, coef, t, x, k1)
            for i in range(n):
                tmp[i] = x[i] + h2 * k1[i]
            _rhs(indptr, cols, coef, t + h2, tmp, k2)
            for i in range(n):
                tmp[i] = x[i] + h2 * k2[i]
            _rhs(indptr, cols, coef, t + h2, tmp, k3)
            for i in range(n):
                tmp[i] = x[i] + dt * k3[i]
            _rhs(indptr, cols, coef, t + dt, tmp, k4)
            for i in range(n):
                x[i] = x[i] + h6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i])
            if (step + 1) % stride == 0:
                s += 1
                for i in range(n):
                    out[s, i] = x[i]
    return out_arr
