# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernel core: same contracts as _core_py (basis, synth, coherent).

Per-point C loops replace the vectorized numpy chains; formulas are identical
so both backends agree to elementwise rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, cos, sin, log, exp, lgamma

cnp.import_array()


cdef void _chain_tables(int lmax, double[:, ::1] ca, double[:, ::1] cb):
    cdef int l, m
    for m in range(lmax + 1):
        for l in range(m + 2, lmax + 1):
            ca[l, m] = sqrt((4.0 * l * l - 1.0) / (<double>l * l - <double>m * m))
            cb[l, m] = sqrt(((l - 1.0) * (l - 1.0) - <double>m * m)
                            / (4.0 * (l - 1.0) * (l - 1.0) - 1.0))


def basis(int lmax, theta, phi):
    """Real orthonormal harmonic matrix, shape (npts, (lmax+1)**2)."""
    cdef cnp.ndarray[double, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ph = np.ascontiguousarray(phi, dtype=np.float64).ravel()
    if th.shape[0] != ph.shape[0]:
        raise ValueError("theta and phi must have matching shapes")
    cdef Py_ssize_t n = th.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((n, (lmax + 1) ** 2))
    cdef cnp.ndarray[double, ndim=2] ca_arr = np.zeros((lmax + 1, lmax + 1))
    cdef cnp.ndarray[double, ndim=2] cb_arr = np.zeros((lmax + 1, lmax + 1))
    cdef double[:, ::1] ca = ca_arr
    cdef double[:, ::1] cb = cb_arr
    _chain_tables(lmax, ca, cb)
    cdef double[:, ::1] o = out
    cdef double[::1] tv = th
    cdef double[::1] pv = ph
    cdef Py_ssize_t q
    cdef int l, m, base
    cdef double t, u, sect, prev, prev2, val, cm, sm
    for q in range(n):
        t = cos(tv[q])
        u = sin(tv[q])
        sect = 1.0
        for m in range(lmax + 1):
            if m == 1:
                sect = sqrt(3.0) * u * sect
            elif m > 1:
                sect = sqrt((2.0 * m + 1.0) / (2.0 * m)) * u * sect
            if m > 0:
                cm = cos(m * pv[q])
                sm = sin(m * pv[q])
            prev2 = 0.0
            prev = sect
            for l in range(m, lmax + 1):
                if l == m:
                    val = sect
                elif l == m + 1:
                    val = sqrt(2.0 * m + 3.0) * t * prev
                else:
                    val = ca[l, m] * (t * prev - cb[l, m] * prev2)
                if l > m:
                    prev2 = prev
                    prev = val
                base = l * l + l
                if m == 0:
                    o[q, base] = val
                else:
                    o[q, base + m] = val * cm
                    o[q, base - m] = val * sm
    return out


def synth(coeffs, int lmax, theta, phi):
    """Evaluate sum_lm coeffs[lm] Y_lm at scattered points."""
    cdef cnp.ndarray[double, ndim=1] cf = np.asarray(coeffs, dtype=np.float64).ravel()
    if cf.shape[0] != (lmax + 1) ** 2:
        raise ValueError("coefficient vector does not match lmax")
    cdef cnp.ndarray[double, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ph = np.ascontiguousarray(phi, dtype=np.float64).ravel()
    if th.shape[0] != ph.shape[0]:
        raise ValueError("theta and phi must have matching shapes")
    cdef Py_ssize_t n = th.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(n)
    cdef cnp.ndarray[double, ndim=2] ca_arr = np.zeros((lmax + 1, lmax + 1))
    cdef cnp.ndarray[double, ndim=2] cb_arr = np.zeros((lmax + 1, lmax + 1))
    cdef double[:, ::1] ca = ca_arr
    cdef double[:, ::1] cb = cb_arr
    _chain_tables(lmax, ca, cb)
    # mark m chains that carry at least one nonzero coefficient
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] live_arr = np.zeros(lmax + 1, dtype=np.uint8)
    cdef cnp.uint8_t[::1] live = live_arr
    cdef int l, m, base
    for m in range(lmax + 1):
        for l in range(m, lmax + 1):
            base = l * l + l
            if cf[base + m] != 0.0 or cf[base - m] != 0.0:
                live[m] = 1
                break
    cdef double[::1] o = out
    cdef double[::1] c = cf
    cdef double[::1] tv = th
    cdef double[::1] pv = ph
    cdef Py_ssize_t q
    cdef double t, u, sect, prev, prev2, val, cm, sm, acc
    for q in range(n):
        t = cos(tv[q])
        u = sin(tv[q])
        sect = 1.0
        acc = 0.0
        for m in range(lmax + 1):
            if m == 1:
                sect = sqrt(3.0) * u * sect
            elif m > 1:
                sect = sqrt((2.0 * m + 1.0) / (2.0 * m)) * u * sect
            if not live[m]:
                continue
            if m > 0:
                cm = cos(m * pv[q])
                sm = sin(m * pv[q])
            prev2 = 0.0
            prev = sect
            for l in range(m, lmax + 1):
                if l == m:
                    val = sect
                elif l == m + 1:
                    val = sqrt(2.0 * m + 3.0) * t * prev
                else:
                    val = ca[l, m] * (t * prev - cb[l, m] * prev2)
                if l > m:
                    prev2 = prev
                    prev = val
                base = l * l + l
                if m == 0:
                    if c[base] != 0.0:
                        acc += c[base] * val
                else:
                    if c[base + m] != 0.0:
                        acc += c[base + m] * val * cm
                    if c[base - m] != 0.0:
                        acc += c[base - m] * val * sm
        o[q] = acc
    return out


def coherent(int k, theta, phi):
    """Coherent amplitude matrix, shape (npts, k+1), complex128."""
    cdef cnp.ndarray[double, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    cdef cnp.ndarray[double, ndim=1] ph = np.ascontiguousarray(phi, dtype=np.float64).ravel()
    if th.shape[0] != ph.shape[0]:
        raise ValueError("theta and phi must have matching shapes")
    cdef Py_ssize_t n = th.shape[0]
    cdef cnp.ndarray[complex, ndim=2] out = np.zeros((n, k + 1), dtype=np.complex128)
    cdef cnp.ndarray[double, ndim=1] logbin_arr = np.empty(k + 1)
    cdef double[::1] logbin = logbin_arr
    cdef int m
    for m in range(k + 1):
        logbin[m] = 0.5 * (lgamma(k + 1.0) - lgamma(m + 1.0) - lgamma(k - m + 1.0))
    cdef complex[:, ::1] o = out
    cdef double[::1] tv = th
    cdef double[::1] pv = ph
    cdef Py_ssize_t q
    cdef double c, s, lc, ls, mag, ang
    for q in range(n):
        c = cos(0.5 * tv[q])
        s = sin(0.5 * tv[q])
        if s == 0.0:
            o[q, 0] = 1.0
            continue
        if c == 0.0:
            ang = k * pv[q]
            o[q, k] = cos(ang) + 1j * sin(ang)
            continue
        lc = log(c)
        ls = log(s)
        for m in range(k + 1):
            mag = exp(logbin[m] + (k - m) * lc + m * ls)
            ang = m * pv[q]
            o[q, m] = mag * (cos(ang) + 1j * sin(ang))
    return out
