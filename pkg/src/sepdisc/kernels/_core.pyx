# cython: language_level=3
# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled alternating product-vector sweep kernels.

Same contract as kernels._pure: min_sweep minimizes <e|A|e> and
overlap_sweep maximizes |<e|psi>|^2 over product vectors, one party at a
time. The per-party contraction matrices are diagonalized with LAPACK's
zheev; everything else runs as straight C loops.
"""

import numpy as np

from libc.math cimport INFINITY, sqrt
from libc.string cimport memset
from scipy.linalg.cython_lapack cimport zheev

ctypedef double complex dc


cdef int _min_eigvec(dc* cc, int n, dc* a, double* wev, dc* work, int lwork,
                     double* rwork, dc* out) nogil:
    """Write the minimum eigenvector of the row-major Hermitian cc to out.

    Returns LAPACK's info (0 on success). The row-major buffer looks
    transposed, i.e. conjugated, to column-major LAPACK, so the returned
    eigenvector is conjugated once on the way out.
    """
    cdef char jobz = b'V'
    cdef char uplo = b'L'
    cdef int info = 0
    cdef int lda = n
    cdef int i
    for i in range(n * n):
        a[i] = cc[i]
    zheev(&jobz, &uplo, &n, a, &lda, wev, work, &lwork, rwork, &info)
    if info != 0:
        return info
    for i in range(n):
        out[i] = a[i].conjugate()
    return 0


cdef void _digits(int[::1] dig, int[::1] dd, int N, int m) noexcept nogil:
    cdef int c, l, rem
    for c in range(N):
        rem = c
        for l in range(m - 1, -1, -1):
            dig[c * m + l] = rem % dd[l]
            rem //= dd[l]


def min_sweep(op, dims, locs, int max_iters, double conv_tol):
    """Alternating minimization of <e|A|e>. Returns (value, locals, sweeps, trace)."""
    # const views: callers hand in frozen (read-only) arrays
    op_arr = np.ascontiguousarray(op, dtype=np.complex128)
    cdef const dc[:, ::1] E = op_arr
    cdef int[::1] dd = np.asarray(dims, dtype=np.int32)
    cdef int m = dd.shape[0]
    cdef int N = E.shape[0]
    cdef int maxd = int(max(dims))
    cdef int L = 0
    cdef int i, k, l, c, r, b, dk, off_k, sweeps, info
    cdef int[::1] off = np.zeros(m + 1, dtype=np.int32)
    for i in range(m):
        off[i + 1] = off[i] + dd[i]
    L = off[m]

    ev_arr = np.empty(L, dtype=np.complex128)
    pos = 0
    for v in locs:
        vv = np.asarray(v, dtype=np.complex128).reshape(-1)
        ev_arr[pos:pos + vv.shape[0]] = vv
        pos += vv.shape[0]
    cdef dc[::1] ev = ev_arr

    cdef int[::1] dig = np.empty(N * m, dtype=np.int32)
    cdef dc[::1] q = np.empty(N, dtype=np.complex128)
    cdef dc[::1] wbuf = np.empty(N * maxd, dtype=np.complex128)
    cdef dc[::1] cc = np.empty(maxd * maxd, dtype=np.complex128)
    cdef dc[::1] abuf = np.empty(maxd * maxd, dtype=np.complex128)
    cdef double[::1] wev = np.empty(maxd, dtype=np.float64)
    cdef int lwork = 4 * maxd if maxd > 1 else 4
    cdef dc[::1] work = np.empty(lwork, dtype=np.complex128)
    cdef double[::1] rwork = np.empty(3 * maxd if maxd > 1 else 3, dtype=np.float64)
    cdef dc[::1] enew = np.empty(maxd, dtype=np.complex128)
    trace_arr = np.empty(max_iters, dtype=np.float64)
    cdef double[::1] trace = trace_arr

    cdef double value = INFINITY
    cdef double prev
    cdef dc qc, cq, avg
    cdef int it
    cdef int failed = 0
    sweeps = 0

    with nogil:
        _digits(dig, dd, N, m)
        for it in range(max_iters):
            prev = value
            for k in range(m):
                dk = dd[k]
                off_k = off[k]
                for c in range(N):
                    qc = 1.0
                    for l in range(m):
                        if l != k:
                            qc = qc * ev[off[l] + dig[c * m + l]]
                    q[c] = qc
                memset(&wbuf[0], 0, N * dk * sizeof(dc))
                for r in range(N):
                    for c in range(N):
                        wbuf[r * dk + dig[c * m + k]] += E[r, c] * q[c]
                memset(&cc[0], 0, dk * dk * sizeof(dc))
                for r in range(N):
                    cq = q[r].conjugate()
                    b = dig[r * m + k] * dk
                    for i in range(dk):
                        cc[b + i] += cq * wbuf[r * dk + i]
                for i in range(dk):
                    for b in range(i + 1, dk):
                        avg = (cc[i * dk + b] + cc[b * dk + i].conjugate()) * 0.5
                        cc[i * dk + b] = avg
                        cc[b * dk + i] = avg.conjugate()
                    cc[i * dk + i] = cc[i * dk + i].real
                if dk == 1:
                    ev[off_k] = 1.0
                    value = cc[0].real
                else:
                    info = _min_eigvec(&cc[0], dk, &abuf[0], &wev[0], &work[0],
                                       lwork, &rwork[0], &enew[0])
                    if info != 0:
                        failed = 1
                        break
                    for i in range(dk):
                        ev[off_k + i] = enew[i]
                    value = wev[0]
            if failed:
                break
            trace[it] = value
            sweeps = it + 1
            if prev - value < conv_tol:
                break

    if failed:
        raise RuntimeError("zheev failed to converge on a contraction matrix")

    out = [ev_arr[off[k]:off[k + 1]].copy() for k in range(m)]
    return float(value), out, sweeps, trace_arr[:sweeps].copy()


def overlap_sweep(psi, dims, locs, int max_iters, double conv_tol):
    """Alternating maximization of |<e|psi>|^2. Returns (value, locals, sweeps, trace)."""
    psi_arr = np.ascontiguousarray(psi, dtype=np.complex128).reshape(-1)
    cdef const dc[::1] P = psi_arr
    cdef int[::1] dd = np.asarray(dims, dtype=np.int32)
    cdef int m = dd.shape[0]
    cdef int N = P.shape[0]
    cdef int maxd = int(max(dims))
    cdef int i, k, l, r, dk, off_k, sweeps, it
    cdef int[::1] off = np.zeros(m + 1, dtype=np.int32)
    for i in range(m):
        off[i + 1] = off[i] + dd[i]

    ev_arr = np.empty(off[m], dtype=np.complex128)
    pos = 0
    for v in locs:
        vv = np.asarray(v, dtype=np.complex128).reshape(-1)
        ev_arr[pos:pos + vv.shape[0]] = vv
        pos += vv.shape[0]
    cdef dc[::1] ev = ev_arr

    cdef int[::1] dig = np.empty(N * m, dtype=np.int32)
    cdef dc[::1] g = np.empty(maxd, dtype=np.complex128)
    trace_arr = np.empty(max_iters, dtype=np.float64)
    cdef double[::1] trace = trace_arr

    cdef double value = 0.0
    cdef double prev, nrm2, nrm
    cdef dc qc
    sweeps = 0

    with nogil:
        _digits(dig, dd, N, m)
        for it in range(max_iters):
            prev = value
            for k in range(m):
                dk = dd[k]
                off_k = off[k]
                memset(&g[0], 0, dk * sizeof(dc))
                for r in range(N):
                    qc = 1.0
                    for l in range(m):
                        if l != k:
                            qc = qc * ev[off[l] + dig[r * m + l]].conjugate()
                    g[dig[r * m + k]] += qc * P[r]
                nrm2 = 0.0
                for i in range(dk):
                    nrm2 += g[i].real * g[i].real + g[i].imag * g[i].imag
                if nrm2 > 0.0:
                    nrm = sqrt(nrm2)
                    for i in range(dk):
                        ev[off_k + i] = g[i] / nrm
                    value = nrm2
            trace[it] = value
            sweeps = it + 1
            if value - prev < conv_tol:
                break

    out = [ev_arr[off[k]:off[k + 1]].copy() for k in range(m)]
    return float(value), out, sweeps, trace_arr[:sweeps].copy()
