"""Pure-numpy fallback for the compiled kernels in ``_kernels.pyx``.

Same contracts as the compiled versions: fixed per-output summation order
(so results are independent of caller-side chunking) and compensated
accumulation.  Sums over long coefficient axes use pairwise block sums
combined with Kahan carries; short coefficient axes use an exact Kahan
update vectorised over the evaluation points.
"""

import numpy as np

_BLOCK = 1 << 16
_SHORT_AXIS = 512


def _kahan_add(acc, comp, term):
    y = term - comp
    tmp = acc + y
    comp = (tmp - acc) - y
    return tmp, comp


def dirichlet_sum_batch(logx, coef, t, nterms):
    """out[j] = sum_{n < nterms[j]} coef[n] * exp(-1j * t[j] * logx[n])."""
    logx = np.ascontiguousarray(logx, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    t = np.ascontiguousarray(t, dtype=np.float64)
    nterms = np.minimum(np.asarray(nterms, dtype=np.int64), logx.shape[0])
    if coef.shape != logx.shape or nterms.shape != t.shape:
        raise ValueError("shape mismatch in dirichlet_sum_batch")
    out = np.empty(t.shape[0], dtype=np.complex128)
    if logx.shape[0] <= _SHORT_AXIS and nterms.size and nterms.min() == nterms.max():
        # short fixed-length sums: Kahan over the coefficient axis, vectorised in t
        n = int(nterms[0])
        acc_re = np.zeros_like(t)
        acc_im = np.zeros_like(t)
        comp_re = np.zeros_like(t)
        comp_im = np.zeros_like(t)
        for k in range(n):
            x = t * logx[k]
            acc_re, comp_re = _kahan_add(acc_re, comp_re, coef[k] * np.cos(x))
            acc_im, comp_im = _kahan_add(acc_im, comp_im, -coef[k] * np.sin(x))
        out[:] = acc_re + 1j * acc_im
        return out
    for j in range(t.shape[0]):
        nj = int(nterms[j])
        acc = 0.0 + 0.0j
        comp = 0.0 + 0.0j
        for lo in range(0, nj, _BLOCK):
            hi = min(lo + _BLOCK, nj)
            x = t[j] * logx[lo:hi]
            block = np.dot(coef[lo:hi], np.cos(x)) - 1j * np.dot(coef[lo:hi], np.sin(x))
            acc, comp = _kahan_add(acc, comp, block)
        out[j] = acc
    return out


def cosine_sum_batch(logx, coef, t):
    """out[j] = sum_n coef[n] * cos(t[j] * logx[n])."""
    logx = np.ascontiguousarray(logx, dtype=np.float64)
    coef = np.ascontiguousarray(coef, dtype=np.float64)
    t = np.ascontiguousarray(t, dtype=np.float64)
    if coef.shape != logx.shape:
        raise ValueError("shape mismatch in cosine_sum_batch")
    n = logx.shape[0]
    if n <= _SHORT_AXIS or t.shape[0] >= 4 * n:
        acc = np.zeros_like(t)
        comp = np.zeros_like(t)
        for k in range(n):
            acc, comp = _kahan_add(acc, comp, coef[k] * np.cos(t * logx[k]))
        return acc
    out = np.empty(t.shape[0], dtype=np.float64)
    for j in range(t.shape[0]):
        acc = 0.0
        comp = 0.0
        for lo in range(0, n, _BLOCK):
            hi = min(lo + _BLOCK, n)
            block = float(np.dot(coef[lo:hi], np.cos(t[j] * logx[lo:hi])))
            acc, comp = _kahan_add(acc, comp, block)
        out[j] = acc
    return out
