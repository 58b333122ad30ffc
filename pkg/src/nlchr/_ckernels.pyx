# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Mirrors ``_pykernels`` operation for operation."""

import numpy as np
cimport numpy as cnp
from libc.math cimport atanh, fabs, log

cnp.import_array()


cdef inline double _mob(double s, double a, double eps) nogil:
    if eps == 0.0:
        return s * (1.0 - s)
    if s < 0.0 or s > 1.0:
        return eps
    return (a + s) * (a + (1.0 - s))


def mobility_eps(s, double a, double eps):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(s, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(flat)
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef double v
    for i in range(n):
        v = flat[i]
        if v < 0.0 or v > 1.0:
            out[i] = eps
        else:
            out[i] = (a + v) * (a + (1.0 - v))
    return out.reshape(np.shape(s))


def f_prime_eps(s, double a, double eps):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(s, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(flat)
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef double v
    cdef double slope = (1.0 + 2.0 * a) / eps
    cdef double at_zero = log(a / (1.0 + a))
    for i in range(n):
        v = flat[i]
        if v < 0.0:
            out[i] = at_zero + slope * v
        elif v > 1.0:
            out[i] = -at_zero + slope * (v - 1.0)
        elif fabs(v - 0.5) <= 0.25:
            out[i] = 2.0 * atanh((v - 0.5) / (a + 0.5))
        else:
            out[i] = log(a + v) - log(a + (1.0 - v))
    return out.reshape(np.shape(s))


cdef void _div1d(const double[:] m, const double[:] w, double h, bint periodic,
                 double[:] out) nogil:
    cdef Py_ssize_t i, n = m.shape[0]
    cdef double left, right
    left = 0.0
    if periodic:
        left = 0.5 * (m[0] + m[n - 1]) * (w[0] - w[n - 1]) / h
    cdef double first = left
    for i in range(n):
        if i < n - 1:
            right = 0.5 * (m[i + 1] + m[i]) * (w[i + 1] - w[i]) / h
        elif periodic:
            right = first
        else:
            right = 0.0
        out[i] = out[i] + (right - left) / h
        left = right


cdef void _div2d(const double[:, :] m, const double[:, :] w, double hx, double hy,
                 bint periodic, double[:, :] out) nogil:
    cdef Py_ssize_t i, j, nx = m.shape[0], ny = m.shape[1]
    cdef double left, right, first
    for j in range(ny):
        left = 0.0
        if periodic:
            left = 0.5 * (m[0, j] + m[nx - 1, j]) * (w[0, j] - w[nx - 1, j]) / hx
        first = left
        for i in range(nx):
            if i < nx - 1:
                right = 0.5 * (m[i + 1, j] + m[i, j]) * (w[i + 1, j] - w[i, j]) / hx
            elif periodic:
                right = first
            else:
                right = 0.0
            out[i, j] = out[i, j] + (right - left) / hx
            left = right
    for i in range(nx):
        left = 0.0
        if periodic:
            left = 0.5 * (m[i, 0] + m[i, ny - 1]) * (w[i, 0] - w[i, ny - 1]) / hy
        first = left
        for j in range(ny):
            if j < ny - 1:
                right = 0.5 * (m[i, j + 1] + m[i, j]) * (w[i, j + 1] - w[i, j]) / hy
            elif periodic:
                right = first
            else:
                right = 0.0
            out[i, j] = out[i, j] + (right - left) / hy
            left = right


def flux_divergence(m, w, spacing, bint periodic):
    m = np.ascontiguousarray(m, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    out = np.zeros_like(m)
    if m.ndim == 1:
        _div1d(m, w, spacing[0], periodic, out)
    else:
        _div2d(m, w, spacing[0], spacing[1], periodic, out)
    return out


def laplacian(v, spacing, bint periodic):
    v = np.ascontiguousarray(v, dtype=np.float64)
    out = np.zeros_like(v)
    cdef double[:] v1, o1
    cdef double[:, :] v2, o2
    cdef Py_ssize_t i, j, n, nx, ny, im, ip, jm, jp
    cdef double hx, hy, ax, ay
    if v.ndim == 1:
        v1 = v
        o1 = out
        n = v1.shape[0]
        hx = spacing[0]
        ax = 1.0 / (hx * hx)
        for i in range(n):
            im = i - 1
            ip = i + 1
            if im < 0:
                im = n - 1 if periodic else 0
            if ip == n:
                ip = 0 if periodic else n - 1
            o1[i] = (v1[im] - 2.0 * v1[i] + v1[ip]) * ax
        return out
    v2 = v
    o2 = out
    nx = v2.shape[0]
    ny = v2.shape[1]
    hx = spacing[0]
    hy = spacing[1]
    ax = 1.0 / (hx * hx)
    ay = 1.0 / (hy * hy)
    for i in range(nx):
        im = i - 1
        ip = i + 1
        if im < 0:
            im = nx - 1 if periodic else 0
        if ip == nx:
            ip = 0 if periodic else nx - 1
        for j in range(ny):
            jm = j - 1
            jp = j + 1
            if jm < 0:
                jm = ny - 1 if periodic else 0
            if jp == ny:
                jp = 0 if periodic else ny - 1
            o2[i, j] = (v2[im, j] - 2.0 * v2[i, j] + v2[ip, j]) * ax + (v2[i, jm] - 2.0 * v2[i, j] + v2[i, jp]) * ay
    return out


def explicit_update(u, w, g, double a, double eps, double dt, spacing, bint periodic):
    u = np.ascontiguousarray(u, dtype=np.float64)
    w = np.ascontiguousarray(w, dtype=np.float64)
    g = np.broadcast_to(np.asarray(g, dtype=np.float64), u.shape)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] uf = u.ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] mf = np.empty_like(uf)
    cdef Py_ssize_t i, n = uf.shape[0]
    for i in range(n):
        mf[i] = _mob(uf[i], a, eps)
    m = mf.reshape(u.shape)
    div = np.zeros_like(u)
    if u.ndim == 1:
        _div1d(m, w, spacing[0], periodic, div)
    else:
        _div2d(m, w, spacing[0], spacing[1], periodic, div)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] df = div.ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gf = np.ascontiguousarray(g).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty_like(uf)
    for i in range(n):
        out[i] = uf[i] + dt * (df[i] + gf[i])
    return out.reshape(u.shape)
