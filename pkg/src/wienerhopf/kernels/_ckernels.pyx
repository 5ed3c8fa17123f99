# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the Riccati fixed-point sweep and block-Toeplitz assembly.

Semantics match ``_pykernels`` exactly; the Riccati sweep avoids the
per-iteration numpy call overhead that dominates at desk-scale dimensions.
"""

import numpy as np
from libc.math cimport isfinite

ctypedef double complex cplx

cdef int CONVERGED = 0
cdef int MAX_ITER = 1
cdef int SINGULAR = 2
cdef int DIVERGED = 3


cdef inline double cabs1(cplx z) nogil:
    return (z.real * z.real + z.imag * z.imag) ** 0.5


cdef void matmul(const cplx[:, :] a, const cplx[:, :] b, cplx[:, :] out) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t n = a.shape[0], p = a.shape[1], q = b.shape[1]
    cdef cplx s
    for i in range(n):
        for j in range(q):
            s = 0
            for k in range(p):
                s = s + a[i, k] * b[k, j]
            out[i, j] = s


cdef int lu_solve_inplace(cplx[:, :] a, cplx[:, :] b) noexcept nogil:
    """Overwrite ``b`` with ``a^{-1} b`` (``a`` destroyed); returns 1 on a zero pivot."""
    cdef Py_ssize_t n = a.shape[0], nr = b.shape[1]
    cdef Py_ssize_t i, j, k, piv
    cdef double best, v
    cdef cplx t, f
    for k in range(n):
        piv = k
        best = cabs1(a[k, k])
        for i in range(k + 1, n):
            v = cabs1(a[i, k])
            if v > best:
                best = v
                piv = i
        if best == 0.0:
            return 1
        if piv != k:
            for j in range(n):
                t = a[k, j]; a[k, j] = a[piv, j]; a[piv, j] = t
            for j in range(nr):
                t = b[k, j]; b[k, j] = b[piv, j]; b[piv, j] = t
        for i in range(k + 1, n):
            f = a[i, k] / a[k, k]
            if f != 0:
                for j in range(k + 1, n):
                    a[i, j] = a[i, j] - f * a[k, j]
                for j in range(nr):
                    b[i, j] = b[i, j] - f * b[k, j]
    for k in range(n - 1, -1, -1):
        for j in range(nr):
            t = b[k, j]
            for i in range(k + 1, n):
                t = t - a[k, i] * b[i, j]
            b[k, j] = t / a[k, k]
    return 0


def riccati_iterate(delta, gamma_plus, alpha_plus, beta_plus, gamma_minus, alpha_minus, beta_minus,
                    Q0, int max_iter, double step_tol):
    cdef cplx[:, :] d = np.ascontiguousarray(delta, dtype=np.complex128)
    cdef cplx[:, :] gp = np.ascontiguousarray(gamma_plus, dtype=np.complex128)
    cdef cplx[:, :] ap = np.ascontiguousarray(alpha_plus, dtype=np.complex128)
    cdef cplx[:, :] bp = np.ascontiguousarray(beta_plus, dtype=np.complex128)
    cdef cplx[:, :] gm = np.ascontiguousarray(gamma_minus, dtype=np.complex128)
    cdef cplx[:, :] am = np.ascontiguousarray(alpha_minus, dtype=np.complex128)
    cdef cplx[:, :] bm = np.ascontiguousarray(beta_minus, dtype=np.complex128)
    Q_arr = np.array(Q0, dtype=np.complex128, order="C", copy=True)
    cdef cplx[:, :] Q = Q_arr
    cdef Py_ssize_t m = d.shape[0], pm = am.shape[0], pp = ap.shape[0]
    cdef Py_ssize_t i, j

    # workspaces
    cdef cplx[:, :] gmQ = np.empty((m, pp), dtype=np.complex128)
    cdef cplx[:, :] K = np.empty((m, m), dtype=np.complex128)
    cdef cplx[:, :] rhs = np.empty((m, pp), dtype=np.complex128)
    cdef cplx[:, :] amQ = np.empty((pm, pp), dtype=np.complex128)
    cdef cplx[:, :] left = np.empty((pm, m), dtype=np.complex128)
    cdef cplx[:, :] tmp_mm = np.empty((m, m), dtype=np.complex128)
    cdef cplx[:, :] tmp_pp = np.empty((pm, pp), dtype=np.complex128)
    Qn_arr = np.empty((pm, pp), dtype=np.complex128)
    cdef cplx[:, :] Qn = Qn_arr
    cdef double step = np.inf, scale, diff, mag
    cdef int it, status = MAX_ITER, bad

    it = 0
    with nogil:
        while it < max_iter:
            it += 1
            matmul(gm, Q, gmQ)
            matmul(gmQ, bp, tmp_mm)
            for i in range(m):
                for j in range(m):
                    K[i, j] = d[i, j] - tmp_mm[i, j]
            matmul(gmQ, ap, rhs)
            for i in range(m):
                for j in range(pp):
                    rhs[i, j] = gp[i, j] - rhs[i, j]
            if lu_solve_inplace(K, rhs):
                status = SINGULAR
                break
            matmul(am, Q, amQ)
            matmul(amQ, bp, left)
            for i in range(pm):
                for j in range(m):
                    left[i, j] = bm[i, j] - left[i, j]
            matmul(amQ, ap, Qn)
            matmul(left, rhs, tmp_pp)
            scale = 1.0
            diff = 0.0
            bad = 0
            for i in range(pm):
                for j in range(pp):
                    Qn[i, j] = Qn[i, j] + tmp_pp[i, j]
                    if not (isfinite(Qn[i, j].real) and isfinite(Qn[i, j].imag)):
                        bad = 1
                    mag = cabs1(Qn[i, j])
                    if mag > scale:
                        scale = mag
                    mag = cabs1(Qn[i, j] - Q[i, j])
                    if mag > diff:
                        diff = mag
            if bad:
                status = DIVERGED
                break
            step = diff
            Q[:, :] = Qn
            if scale > 1e150:
                status = DIVERGED
                break
            if step <= step_tol * scale:
                status = CONVERGED
                break
    return Q_arr, it, status, step


def block_toeplitz(coeffs, Py_ssize_t N):
    cdef cplx[:, :, :] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef Py_ssize_t m = c.shape[1]
    out_arr = np.empty((N * m, N * m), dtype=np.complex128)
    cdef cplx[:, :] out = out_arr
    cdef Py_ssize_t bi, bj, r, s, k
    with nogil:
        for bi in range(N):
            for bj in range(N):
                k = bi - bj + N - 1
                for r in range(m):
                    for s in range(m):
                        out[bi * m + r, bj * m + s] = c[k, r, s]
    return out_arr
