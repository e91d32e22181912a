# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel implementations.

Same contract as _pykernels: Householder tridiagonalization plus
implicit-shift QL, and compensated (Neumaier) checkpoint summation.
Behavior must stay interchangeable with the pure backend.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport copysign, fabs, hypot, log, pow, sqrt

cnp.import_array()

BACKEND = "compiled"

MAX_QL_SWEEPS = 50
QL_TOL = 1e-14

cdef double _TOL = 1e-14
cdef int _MAX_SWEEPS = 50


def eig_sym(a):
    """Eigen decomposition of a symmetric matrix; see _pykernels.eig_sym."""
    t_arr = np.array(a, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t n = t_arr.shape[0]
    if n == 1:
        return t_arr[0].copy(), np.ones((1, 1))
    z_arr = np.eye(n)
    d_arr = np.zeros(n)
    e_arr = np.zeros(n)
    cdef double[:, ::1] t = t_arr
    cdef double[:, ::1] z = z_arr
    cdef double[::1] d = d_arr
    cdef double[::1] e = e_arr
    cdef double[::1] u = np.zeros(n)
    cdef double[::1] q = np.zeros(n)
    _householder(t, z, u, q, n)
    cdef Py_ssize_t i
    for i in range(n):
        d[i] = t[i, i]
    for i in range(n - 1):
        e[i] = t[i + 1, i]
    if _ql(d, e, z, n) != 0:
        raise RuntimeError("ql-sweep-cap")
    return d_arr, z_arr


cdef void _householder(double[:, ::1] t, double[:, ::1] z,
                       double[::1] u, double[::1] q, Py_ssize_t n):
    cdef Py_ssize_t k, i, j
    cdef double nx2, nx, unorm2, beta, kappa, up, s
    for k in range(n - 2):
        nx2 = 0.0
        for i in range(k + 1, n):
            nx2 += t[i, k] * t[i, k]
        nx = sqrt(nx2)
        if nx == 0.0:
            continue
        for i in range(n):
            u[i] = 0.0
        for i in range(k + 1, n):
            u[i] = t[i, k]
        u[k + 1] += copysign(nx, t[k + 1, k])
        unorm2 = 0.0
        for i in range(k + 1, n):
            unorm2 += u[i] * u[i]
        if unorm2 == 0.0:
            continue
        beta = 2.0 / unorm2
        for i in range(n):
            s = 0.0
            for j in range(k + 1, n):
                s += t[i, j] * u[j]
            q[i] = beta * s
        up = 0.0
        for i in range(k + 1, n):
            up += u[i] * q[i]
        kappa = 0.5 * beta * up
        for i in range(n):
            q[i] -= kappa * u[i]
        for i in range(n):
            for j in range(n):
                t[i, j] -= q[i] * u[j] + u[i] * q[j]
        for i in range(n):
            s = 0.0
            for j in range(k + 1, n):
                s += z[i, j] * u[j]
            s *= beta
            for j in range(k + 1, n):
                z[i, j] -= s * u[j]


cdef int _ql(double[::1] d, double[::1] e, double[:, ::1] z, Py_ssize_t n):
    cdef Py_ssize_t l, m, i, row
    cdef int sweeps, underflow
    cdef double dd, g, r, s, c, p, f, b, col
    for l in range(n):
        sweeps = 0
        while True:
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= _TOL * dd:
                    break
                m += 1
            if m == l:
                break
            sweeps += 1
            if sweeps > _MAX_SWEEPS:
                return 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = 0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = 1
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for row in range(n):
                    col = z[row, i + 1]
                    z[row, i + 1] = s * z[row, i] + c * col
                    z[row, i] = c * z[row, i] - s * col
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return 0


def checkpoint_sums(values, checkpoints):
    """Neumaier-compensated partial sums at 1-based checkpoint counts."""
    cdef double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.int64_t[::1] cps = np.ascontiguousarray(checkpoints, dtype=np.int64)
    out_arr = np.empty(cps.shape[0])
    cdef double[::1] out = out_arr
    cdef double s = 0.0, comp = 0.0, t, x
    cdef Py_ssize_t idx = 0, j
    for j in range(cps.shape[0]):
        while idx < cps[j]:
            x = v[idx]
            t = s + x
            if fabs(s) >= fabs(x):
                comp += (s - t) + x
            else:
                comp += (x - t) + s
            s = t
            idx += 1
        out[j] = s + comp
    return out_arr


def power_checkpoint_sums(double p, long q, long start, checkpoints):
    """Compensated sums of n^p * ln(n)^q from n=start at each checkpoint."""
    cdef cnp.int64_t[::1] cps = np.ascontiguousarray(checkpoints, dtype=np.int64)
    out_arr = np.empty(cps.shape[0])
    cdef double[::1] out = out_arr
    cdef double s = 0.0, comp = 0.0, t, x, dn
    cdef cnp.int64_t n = start
    cdef Py_ssize_t j
    for j in range(cps.shape[0]):
        while n <= cps[j]:
            dn = <double> n
            x = pow(dn, p)
            if q != 0:
                x *= pow(log(dn), <double> q)
            t = s + x
            if fabs(s) >= fabs(x):
                comp += (s - t) + x
            else:
                comp += (x - t) + s
            s = t
            n += 1
        out[j] = s + comp
    return out_arr
