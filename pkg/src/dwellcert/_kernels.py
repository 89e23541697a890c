"""Hot numeric loops, compiled with numba when available.

Every kernel has two implementations with identical signatures: a numba
``@njit`` version and a pure-numpy version.  The numpy path is selected when
numba cannot be imported or when the environment variable
``DWELLCERT_PURE_NUMPY`` is set to a non-empty value other than ``0``.
``benchmarks/bench_kernels.py`` compares the two.

Barrier blocks use a padded layout so one call covers every LMI of a given
size::

    C   (nb, m, m)      constant part
    idx (nb, k)         variable indices, -1 for padding
    D   (nb, k, m, m)   coefficient of each variable

and the block value is ``S_b(x) = C_b + sum_j x[idx[b, j]] * D[b, j]``.
"""

import math
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

PURE_NUMPY = os.environ.get("DWELLCERT_PURE_NUMPY", "") not in ("", "0")
USE_NUMBA = numba is not None and not PURE_NUMPY


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def _assemble_np(x, C, idx, D):
    mask = idx >= 0
    coef = np.where(mask, x[np.where(mask, idx, 0)], 0.0)
    return C + np.einsum("bk,bkij->bij", coef, D)


def barrier_value_np(x, C, idx, D):
    """Return ``(ok, -sum log det S_b(x))``; ``ok`` is False outside the domain."""
    if C.shape[0] == 0:
        return True, 0.0
    S = _assemble_np(x, C, idx, D)
    try:
        L = np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return False, np.inf
    diag = np.diagonal(L, axis1=1, axis2=2)
    if not np.all(diag > 0.0) or not np.all(np.isfinite(diag)):
        return False, np.inf
    return True, -2.0 * float(np.sum(np.log(diag)))


def barrier_derivs_np(x, C, idx, D, grad, hess):
    """Accumulate gradient and Hessian of ``-sum log det S_b`` in place."""
    if C.shape[0] == 0:
        return True
    S = _assemble_np(x, C, idx, D)
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError:
        return False
    Sinv = np.linalg.inv(S)
    Y = np.einsum("bpq,bkqr->bkpr", Sinv, D)
    g_loc = -np.einsum("bkpp->bk", Y)
    h_loc = np.einsum("bjpq,blqp->bjl", Y, Y)
    mask = idx >= 0
    safe = np.where(mask, idx, 0)
    g_loc = np.where(mask, g_loc, 0.0)
    pair = mask[:, :, None] & mask[:, None, :]
    h_loc = np.where(pair, h_loc, 0.0)
    np.add.at(grad, safe, g_loc)
    np.add.at(hess, (safe[:, :, None], safe[:, None, :]), h_loc)
    return True


def jacobi_eigvalsh_np(S, tol, max_sweeps):
    """Cyclic Jacobi eigenvalues of a symmetric matrix.

    Returns ``(eigenvalues, converged)``; eigenvalues are unsorted.
    """
    a = np.array(S, dtype=np.float64, copy=True)
    n = a.shape[0]
    scale = np.sqrt(np.sum(a * a))
    target = max(tol, 4.0 * np.finfo(np.float64).eps * scale)
    # sum the off-diagonal directly; total minus diagonal cancels
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(a[offdiag] ** 2)) <= target:
            return np.diag(a).copy(), True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 if theta == 0.0 else np.sign(theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
    return np.diag(a).copy(), bool(np.sqrt(np.sum(a[offdiag] ** 2)) <= target)


def propagate_np(mats, modes, x0):
    """States ``x(0..K)`` of ``x(k+1) = mats[modes[k]] x(k)`` (0-based modes)."""
    K = modes.shape[0]
    out = np.empty((K + 1, x0.shape[0]))
    out[0] = x0
    for k in range(K):
        out[k + 1] = mats[modes[k]] @ out[k]
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _chol_inplace(S, m):
        for j in range(m):
            d = S[j, j]
            for p in range(j):
                d -= S[j, p] * S[j, p]
            if not d > 0.0:
                return False
            d = np.sqrt(d)
            S[j, j] = d
            for i in range(j + 1, m):
                v = S[i, j]
                for p in range(j):
                    v -= S[i, p] * S[j, p]
                S[i, j] = v / d
        return True

    @numba.njit(cache=True)
    def _assemble_nb(x, C, idx, D, b, S):
        m = C.shape[1]
        for i in range(m):
            for j in range(m):
                S[i, j] = C[b, i, j]
        for j in range(idx.shape[1]):
            v = idx[b, j]
            if v < 0:
                continue
            xv = x[v]
            if xv == 0.0:
                continue
            for p in range(m):
                for q in range(m):
                    S[p, q] += xv * D[b, j, p, q]

    @numba.njit(cache=True)
    def barrier_value_nb(x, C, idx, D):
        nb_, m = C.shape[0], C.shape[1]
        S = np.empty((m, m))
        total = 0.0
        for b in range(nb_):
            _assemble_nb(x, C, idx, D, b, S)
            if not _chol_inplace(S, m):
                return False, np.inf
            for i in range(m):
                total -= 2.0 * np.log(S[i, i])
        return True, total

    @numba.njit(cache=True)
    def barrier_derivs_nb(x, C, idx, D, grad, hess):
        nb_, m, k = C.shape[0], C.shape[1], idx.shape[1]
        S = np.empty((m, m))
        Linv = np.empty((m, m))
        Sinv = np.empty((m, m))
        Y = np.empty((k, m, m))
        for b in range(nb_):
            _assemble_nb(x, C, idx, D, b, S)
            if not _chol_inplace(S, m):
                return False
            # inverse of the lower Cholesky factor by forward substitution
            for c in range(m):
                for i in range(m):
                    v = 1.0 if i == c else 0.0
                    for p in range(i):
                        v -= S[i, p] * Linv[p, c]
                    Linv[i, c] = v / S[i, i]
            for i in range(m):
                for j in range(m):
                    v = 0.0
                    for p in range(max(i, j), m):
                        v += Linv[p, i] * Linv[p, j]
                    Sinv[i, j] = v
            for j in range(k):
                if idx[b, j] < 0:
                    continue
                for p in range(m):
                    for r in range(m):
                        v = 0.0
                        for q in range(m):
                            v += Sinv[p, q] * D[b, j, q, r]
                        Y[j, p, r] = v
                tr = 0.0
                for p in range(m):
                    tr += Y[j, p, p]
                grad[idx[b, j]] -= tr
            for j in range(k):
                vj = idx[b, j]
                if vj < 0:
                    continue
                for l in range(j + 1):
                    vl = idx[b, l]
                    if vl < 0:
                        continue
                    h = 0.0
                    for p in range(m):
                        for q in range(m):
                            h += Y[j, p, q] * Y[l, q, p]
                    hess[vj, vl] += h
                    if l != j:
                        hess[vl, vj] += h
        return True

    @numba.njit(cache=True)
    def jacobi_eigvalsh_nb(S, tol, max_sweeps):
        n = S.shape[0]
        a = S.astype(np.float64).copy()
        scale = 0.0
        for i in range(n):
            for j in range(n):
                scale += a[i, j] * a[i, j]
        scale = np.sqrt(scale)
        target = max(tol, 4.0 * 2.220446049250313e-16 * scale)
        for _ in range(max_sweeps + 1):
            off = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off += a[i, j] * a[i, j]
            if np.sqrt(off) <= target:
                return np.diag(a).copy(), True
            if _ == max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if theta == 0.0:
                        t = 1.0
                    else:
                        t = np.sign(theta) / (abs(theta) + math.hypot(theta, 1.0))
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    for r in range(n):
                        rp = a[p, r]
                        rq = a[q, r]
                        a[p, r] = c * rp - s * rq
                        a[q, r] = s * rp + c * rq
                    for r in range(n):
                        cp = a[r, p]
                        cq = a[r, q]
                        a[r, p] = c * cp - s * cq
                        a[r, q] = s * cp + c * cq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
        return np.diag(a).copy(), False

    @numba.njit(cache=True)
    def propagate_nb(mats, modes, x0):
        K = modes.shape[0]
        n = x0.shape[0]
        out = np.empty((K + 1, n))
        for i in range(n):
            out[0, i] = x0[i]
        for k in range(K):
            A = mats[modes[k]]
            for i in range(n):
                v = 0.0
                for j in range(n):
                    v += A[i, j] * out[k, j]
                out[k + 1, i] = v
        return out


if USE_NUMBA:
    barrier_value = barrier_value_nb
    barrier_derivs = barrier_derivs_nb
    jacobi_eigvalsh = jacobi_eigvalsh_nb
    propagate = propagate_nb
else:
    barrier_value = barrier_value_np
    barrier_derivs = barrier_derivs_np
    jacobi_eigvalsh = jacobi_eigvalsh_np
    propagate = propagate_np
