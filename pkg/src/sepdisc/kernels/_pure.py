"""Numpy fallback for the alternating product-vector sweep kernels.

Both kernels sweep over parties, re-optimizing one local vector at a time
while holding the others fixed, which makes the objective monotone. The
compiled module in _core.pyx implements the same contract.
"""

from __future__ import annotations

import numpy as np


def _frame(locs, k: int, dims) -> np.ndarray:
    """Isometry kron(e_1, ..., I_{d_k}, ..., e_m) of shape (total, d_k)."""
    a = np.ones((1, 1), dtype=np.complex128)
    for l, d in enumerate(dims):
        block = np.eye(d, dtype=np.complex128) if l == k else locs[l].reshape(d, 1)
        a = np.kron(a, block)
    return a


def min_sweep(op, dims, locs, max_iters: int, conv_tol: float):
    """Alternating minimization of <e|A|e> over product vectors.

    Returns (value, locals, sweeps, trace) where trace holds the value
    after each full sweep. Updating party k replaces its vector with the
    minimum eigenvector of the contraction of A against the other parties,
    so the value never increases.
    """
    dims = tuple(int(d) for d in dims)
    m = len(dims)
    locs = [np.asarray(v, dtype=np.complex128).copy() for v in locs]
    trace = np.empty(max_iters, dtype=np.float64)
    value = np.inf
    sweeps = 0
    for it in range(max_iters):
        prev = value
        for k in range(m):
            a = _frame(locs, k, dims)
            c = a.conj().T @ op @ a
            c = (c + c.conj().T) / 2.0
            if dims[k] == 1:
                locs[k] = np.ones(1, dtype=np.complex128)
                value = float(c[0, 0].real)
            else:
                w, v = np.linalg.eigh(c)
                locs[k] = np.ascontiguousarray(v[:, 0])
                value = float(w[0])
        trace[it] = value
        sweeps = it + 1
        if prev - value < conv_tol:
            break
    return value, locs, sweeps, trace[:sweeps].copy()


def overlap_sweep(psi, dims, locs, max_iters: int, conv_tol: float):
    """Alternating maximization of |<e|psi>|^2 over product vectors.

    The contraction of |psi><psi| against the other parties is rank one,
    so the optimal update is the normalized contraction itself.
    """
    dims = tuple(int(d) for d in dims)
    m = len(dims)
    psi = np.asarray(psi, dtype=np.complex128).reshape(-1)
    locs = [np.asarray(v, dtype=np.complex128).copy() for v in locs]
    trace = np.empty(max_iters, dtype=np.float64)
    value = 0.0
    sweeps = 0
    for it in range(max_iters):
        prev = value
        for k in range(m):
            a = _frame(locs, k, dims)
            g = a.conj().T @ psi
            nrm = float(np.linalg.norm(g))
            if nrm > 0.0:
                locs[k] = g / nrm
                value = nrm * nrm
            # zero contraction: any unit vector is optimal, keep the current one
        trace[it] = value
        sweeps = it + 1
        if value - prev < conv_tol:
            break
    return value, locs, sweeps, trace[:sweeps].copy()
