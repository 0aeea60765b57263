# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: distance transforms on cell grids and chaos-game orbits.

Every routine here has a twin in ``_pykernels`` that performs the same
floating-point operations in the same order.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


def edt_1d(const unsigned char[::1] mask, double h):
    cdef Py_ssize_t n = mask.shape[0], i
    cdef Py_ssize_t last
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double d
    last = -1
    for i in range(n):
        if mask[i]:
            last = i
        out[i] = (i - last) * h if last >= 0 else INFINITY
    last = -1
    for i in range(n - 1, -1, -1):
        if mask[i]:
            last = i
        if last >= 0:
            d = (last - i) * h
            if d < out[i]:
                out[i] = d
    return out_arr


cdef void _lower_envelope(double* f, Py_ssize_t n, double w2, double* d,
                          Py_ssize_t* v, double* z) noexcept nogil:
    # d[q] = min_p f[p] + w2 * (q - p)^2, skipping infinite samples.
    cdef Py_ssize_t k = -1, q, p
    cdef double s
    for q in range(n):
        if f[q] == INFINITY:
            continue
        while k >= 0:
            p = v[k]
            s = ((f[q] + w2 * q * q) - (f[p] + w2 * p * p)) / (2.0 * w2 * (q - p))
            if s <= z[k]:
                k -= 1
            else:
                break
        k += 1
        v[k] = q
        if k == 0:
            z[k] = -INFINITY
        else:
            p = v[k - 1]
            z[k] = ((f[q] + w2 * q * q) - (f[p] + w2 * p * p)) / (2.0 * w2 * (q - p))
    if k < 0:
        for q in range(n):
            d[q] = INFINITY
        return
    z[k + 1] = INFINITY
    p = 0
    for q in range(n):
        while z[p + 1] < q:
            p += 1
        d[q] = f[v[p]] + w2 * (q - v[p]) * (q - v[p])


def edt_2d(const unsigned char[:, ::1] mask, double hx, double hy):
    cdef Py_ssize_t nx = mask.shape[0], ny = mask.shape[1], i, j, last
    g_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] g = g_arr
    cdef double t
    # pass along axis 0: squared distance within each column
    for j in range(ny):
        last = -1
        for i in range(nx):
            if mask[i, j]:
                last = i
            if last >= 0:
                t = (i - last) * hx
                g[i, j] = t * t
            else:
                g[i, j] = INFINITY
        last = -1
        for i in range(nx - 1, -1, -1):
            if mask[i, j]:
                last = i
            if last >= 0:
                t = (last - i) * hx
                if t * t < g[i, j]:
                    g[i, j] = t * t
    out_arr = np.empty((nx, ny), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double[::1] frow = np.empty(ny, dtype=np.float64)
    cdef double[::1] drow = np.empty(ny, dtype=np.float64)
    cdef double[::1] z = np.empty(ny + 1, dtype=np.float64)
    cdef Py_ssize_t[::1] v = np.empty(ny, dtype=np.intp)
    cdef double w2 = hy * hy
    for i in range(nx):
        for j in range(ny):
            frow[j] = g[i, j]
        _lower_envelope(&frow[0], ny, w2, &drow[0], &v[0], &z[0])
        for j in range(ny):
            out[i, j] = sqrt(drow[j])
    return out_arr


cdef inline double _clip(double x, double lo, double hi) noexcept nogil:
    if x < lo:
        return lo
    if x > hi:
        return hi
    return x


def run_orbit(double[::1] x0, const long long[::1] symbols,
              const long long[::1] codes, const long long[::1] pstart,
              const long long[::1] nvert, const double[::1] params,
              const long long[::1] mstart, const long long[::1] mend,
              double[::1] lower, double[::1] upper):
    cdef Py_ssize_t d = x0.shape[0], n = symbols.shape[0]
    out_arr = np.empty((n + 1, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef double x, y, nx_, ny_
    cdef Py_ssize_t step, op, s, base, m, lo_i, hi_i, mid, j
    x = x0[0]
    y = x0[1] if d == 2 else 0.0
    out[0, 0] = x
    if d == 2:
        out[0, 1] = y
    for step in range(n):
        s = symbols[step]
        for op in range(mstart[s], mend[s]):
            base = pstart[op]
            if codes[op] == 0:
                if d == 1:
                    x = params[base] * x + params[base + 1]
                else:
                    nx_ = params[base] * x + params[base + 1] * y + params[base + 4]
                    ny_ = params[base + 2] * x + params[base + 3] * y + params[base + 5]
                    x = nx_
                    y = ny_
            elif codes[op] == 1:
                m = nvert[op] - 1
                # largest j with xs[j] <= x
                lo_i = 0
                hi_i = m + 1
                while lo_i < hi_i:
                    mid = (lo_i + hi_i) // 2
                    if x < params[base + mid]:
                        hi_i = mid
                    else:
                        lo_i = mid + 1
                j = lo_i - 1
                if j >= m:
                    x = params[base + m + 1 + m]
                elif j < 0:
                    x = params[base + m + 1]
                else:
                    x = params[base + m + 1 + j] + (x - params[base + j]) * params[base + 2 * (m + 1) + j]
            else:
                x = params[base] * x * x + params[base + 1] * x + params[base + 2]
            x = _clip(x, lower[0], upper[0])
            if d == 2:
                y = _clip(y, lower[1], upper[1])
        out[step + 1, 0] = x
        if d == 2:
            out[step + 1, 1] = y
    return out_arr
