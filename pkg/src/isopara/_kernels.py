"""Hot numeric kernels.

The kernels are written in the numba-compatible numpy subset and compiled
with ``@njit`` on import.  Setting the environment variable
``ISOPARA_NO_NUMBA`` to a non-empty value selects the plain numpy/python
fallback path instead (same code, uncompiled).  ``benchmarks/bench_kernels.py``
compares the two.
"""
import os

import numpy as np

USE_NUMBA = not os.environ.get("ISOPARA_NO_NUMBA")


def _jit(fn):
    if not USE_NUMBA:
        return fn
    from numba import njit

    return njit(cache=True)(fn)


@_jit
def jacobi_eigh(A, max_sweeps, tol):
    """Cyclic Jacobi eigensolver for a dense symmetric matrix.

    Deterministic row-major sweep order.  Returns ``(w, V, sweeps, converged)``
    with unsorted eigenvalues ``w`` and eigenvector columns ``V`` such that
    ``A = V @ diag(w) @ V.T``.
    """
    n = A.shape[0]
    a = A.copy()
    v = np.eye(n)
    nrm = 0.0
    for i in range(n):
        for j in range(n):
            nrm += a[i, j] * a[i, j]
    nrm = np.sqrt(nrm)
    w = np.empty(n)
    if nrm == 0.0:
        for i in range(n):
            w[i] = 0.0
        return w, v, 0, True

    thresh = tol * nrm
    sweeps = 0
    converged = False
    while sweeps <= max_sweeps:
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        if np.sqrt(off) <= thresh:
            converged = True
            break
        if sweeps == max_sweeps:
            break
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    if k != p and k != q:
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[p, k] = a[k, p]
                        a[k, q] = s * akp + c * akq
                        a[q, k] = a[k, q]
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    for i in range(n):
        w[i] = a[i, i]
    return w, v, sweeps, converged
