# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels for the replicator and density-operator loops.

Same API and results (to rounding) as ``_pykernels``.
"""
import numpy as np

from libc.math cimport sqrt, isfinite

from .errors import IntegrationError


cdef void _field(const double[:, ::1] a, const double[::1] x,
                 double[::1] f, double[::1] out) noexcept nogil:
    cdef Py_ssize_t n = x.shape[0], i, j
    cdef double s, mean = 0.0
    for i in range(n):
        s = 0.0
        for j in range(n):
            s += a[i, j] * x[j]
        f[i] = s
        mean += x[i] * s
    for i in range(n):
        out[i] = (f[i] - mean) * x[i]


cdef int _rk4(const double[:, ::1] a, const double[::1] x, double dt,
              double[::1] y, double[:, ::1] work) noexcept nogil:
    # work rows: f, k1, k2, k3, k4, tmp
    cdef Py_ssize_t n = x.shape[0], i
    cdef double[::1] f = work[0], k1 = work[1], k2 = work[2]
    cdef double[::1] k3 = work[3], k4 = work[4], tmp = work[5]
    cdef double s = 0.0, h = 0.5 * dt
    _field(a, x, f, k1)
    for i in range(n):
        tmp[i] = x[i] + h * k1[i]
    _field(a, tmp, f, k2)
    for i in range(n):
        tmp[i] = x[i] + h * k2[i]
    _field(a, tmp, f, k3)
    for i in range(n):
        tmp[i] = x[i] + dt * k3[i]
    _field(a, tmp, f, k4)
    for i in range(n):
        y[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])
        if not isfinite(y[i]):
            return 1
        if y[i] < 0.0:
            y[i] = 0.0
        s += y[i]
    if not s > 0.0:
        return 2
    for i in range(n):
        y[i] /= s
    return 0


def replicator_field(a, x):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty(xv.shape[0])
    f = np.empty(xv.shape[0])
    _field(av, xv, f, out)
    return out


def theta_elements(a, x):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0], i, j, k, l
    out = np.empty((n, n))
    cdef double[:, ::1] th = out
    cdef double[::1] f = np.empty(n)
    cdef double mean = 0.0, xij, xji
    for i in range(n):
        f[i] = 0.0
        for k in range(n):
            f[i] += av[i, k] * xv[k]
    for l in range(n):
        for k in range(n):
            mean += av[l, k] * xv[k] * xv[l]
    for i in range(n):
        for j in range(n):
            xij = sqrt(xv[i] * xv[j])
            xji = sqrt(xv[j] * xv[i])
            th[i, j] = 0.5 * f[i] * xij + 0.5 * f[j] * xji - mean * xij
    return out


def rk4_step(a, x, double dt):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef Py_ssize_t n = xv.shape[0]
    y = np.empty(n)
    cdef double[:, ::1] work = np.empty((6, n))
    cdef int status = _rk4(av, xv, dt, y, work)
    if status == 1:
        raise IntegrationError("replicator state became non-finite")
    if status == 2:
        raise IntegrationError("replicator state collapsed to zero mass")
    return y


def integrate(a, x0, double dt, Py_ssize_t nsteps):
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t n = len(x0), k
    out = np.empty((nsteps + 1, n))
    cdef double[:, ::1] ov = out
    cdef double[:, ::1] work = np.empty((6, n))
    cdef int status = 0
    out[0] = x0
    with nogil:
        for k in range(nsteps):
            status = _rk4(av, ov[k], dt, ov[k + 1], work)
            if status:
                break
    if status:
        raise IntegrationError("replicator state became non-finite", step=k)
    return out


def propagate(rho0, u, damp, Py_ssize_t nsteps):
    cdef const double complex[:, ::1] uv = np.ascontiguousarray(u, dtype=np.complex128)
    cdef Py_ssize_t n = uv.shape[0], k, i, j, m
    cdef bint dephase = damp is not None
    cdef const double[:, ::1] dv = np.ascontiguousarray(damp if dephase else np.ones((n, n)), dtype=np.float64)
    out = np.empty((nsteps + 1, n, n), dtype=np.complex128)
    cdef double complex[:, :, ::1] ov = out
    cdef double complex[:, ::1] cur = np.ascontiguousarray(rho0, dtype=np.complex128).copy()
    cdef double complex[:, ::1] tmp = np.empty((n, n), dtype=np.complex128)
    cdef double complex s, a, b
    ov[0, :, :] = cur
    with nogil:
        for k in range(nsteps):
            if dephase:
                for i in range(n):
                    for j in range(n):
                        cur[i, j] = cur[i, j] * dv[i, j]
            # tmp = U rho
            for i in range(n):
                for j in range(n):
                    s = 0.0
                    for m in range(n):
                        s = s + uv[i, m] * cur[m, j]
                    tmp[i, j] = s
            # rho = tmp U^dagger
            for i in range(n):
                for j in range(n):
                    s = 0.0
                    for m in range(n):
                        s = s + tmp[i, m] * uv[j, m].conjugate()
                    cur[i, j] = s
            if dephase:
                for i in range(n):
                    for j in range(n):
                        cur[i, j] = cur[i, j] * dv[i, j]
            for i in range(n):
                for j in range(i, n):
                    a = cur[i, j]
                    b = cur[j, i].conjugate()
                    cur[i, j] = 0.5 * (a + b)
                    cur[j, i] = cur[i, j].conjugate()
                    ov[k + 1, i, j] = cur[i, j]
                    ov[k + 1, j, i] = cur[j, i]
    return out
