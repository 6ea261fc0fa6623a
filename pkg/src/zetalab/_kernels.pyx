# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Dirichlet-type sums evaluated over many heights.

These two kernels carry essentially all of the floating-point work of the
package (Euler-Maclaurin partial sums of zeta, mollifier sums, prime sums
over t-grids).  Both accumulate with Kahan compensation; per-output sums run
in a fixed sequential order so results do not depend on how callers chunk
the work.
"""

import numpy as np

from libc.math cimport cos, sin


def dirichlet_sum_batch(const double[::1] logx, const double[::1] coef,
                        const double[::1] t, const long long[::1] nterms):
    """out[j] = sum_{n < nterms[j]} coef[n] * exp(-1j * t[j] * logx[n])."""
    cdef Py_ssize_t j, n, nj, nmax = logx.shape[0], m = t.shape[0]
    if coef.shape[0] != nmax or nterms.shape[0] != m:
        raise ValueError("shape mismatch in dirichlet_sum_batch")
    out_re = np.empty(m, dtype=np.float64)
    out_im = np.empty(m, dtype=np.float64)
    cdef double[::1] vre = out_re
    cdef double[::1] vim = out_im
    cdef double tj, x, w, term, y, tmp
    cdef double are, aim, cre, cim
    with nogil:
        for j in range(m):
            tj = t[j]
            nj = nterms[j]
            if nj > nmax:
                nj = nmax
            are = 0.0
            aim = 0.0
            cre = 0.0
            cim = 0.0
            for n in range(nj):
                x = tj * logx[n]
                w = coef[n]
                term = w * cos(x)
                y = term - cre
                tmp = are + y
                cre = (tmp - are) - y
                are = tmp
                term = -w * sin(x)
                y = term - cim
                tmp = aim + y
                cim = (tmp - aim) - y
                aim = tmp
            vre[j] = are
            vim[j] = aim
    return out_re + 1j * out_im


def cosine_sum_batch(const double[::1] logx, const double[::1] coef,
                     const double[::1] t):
    """out[j] = sum_n coef[n] * cos(t[j] * logx[n])."""
    cdef Py_ssize_t j, n, nmax = logx.shape[0], m = t.shape[0]
    if coef.shape[0] != nmax:
        raise ValueError("shape mismatch in cosine_sum_batch")
    out = np.empty(m, dtype=np.float64)
    cdef double[::1] v = out
    cdef double tj, term, y, tmp, acc, comp
    with nogil:
        for j in range(m):
            tj = t[j]
            acc = 0.0
            comp = 0.0
            for n in range(nmax):
                term = coef[n] * cos(tj * logx[n])
                y = term - comp
                tmp = acc + y
                comp = (tmp - acc) - y
                acc = tmp
            v[j] = acc
    return out
