# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``.

Dot products go through numpy's BLAS; the compiled loops fuse the norm
scaling with the threshold scan, so marking never builds the cosine or
boolean matrices the numpy versions allocate.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.string cimport memcpy
from scipy.linalg.cython_blas cimport dgemm

cnp.import_array()

cdef double ZERO_NORM = 1e-12


cdef void _recip_norms(const double[:, ::1] S, double[::1] out) noexcept nogil:
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(S.shape[0]):
        acc = 0.0
        for k in range(S.shape[1]):
            acc += S[i, k] * S[i, k]
        acc = sqrt(acc)
        out[i] = 1.0 / acc if acc >= ZERO_NORM else 0.0


def row_norm_reciprocals(S):
    cdef const double[:, ::1] s = np.ascontiguousarray(S, dtype=np.float64)
    out = np.empty(s.shape[0], dtype=np.float64)
    _recip_norms(s, out)
    return out


def cross_cosine(P, Q):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    if p.shape[1] != q.shape[1]:
        raise ValueError("width mismatch")
    cdef Py_ssize_t v = p.shape[0], w = q.shape[0]
    cdef double[::1] up = np.empty(v), uq = np.empty(w)
    out = np.ascontiguousarray(np.dot(P, np.transpose(Q)), dtype=np.float64).reshape(v, w)
    cdef double[:, ::1] m = out
    cdef Py_ssize_t i, j
    with nogil:
        _recip_norms(p, up)
        _recip_norms(q, uq)
        for i in range(v):
            for j in range(w):
                m[i, j] = m[i, j] * (up[i] * uq[j])
    return out


def mark_above(P, Q, double tau):
    rows = np.zeros(len(P), dtype=np.bool_)
    cols = np.zeros(len(Q), dtype=np.bool_)
    if len(P) == 0 or len(Q) == 0:
        return rows, cols
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    if p.shape[1] != q.shape[1]:
        raise ValueError("width mismatch")
    cdef Py_ssize_t v = p.shape[0], w = q.shape[0], i, j
    cdef const double[:, ::1] m = np.ascontiguousarray(np.dot(p, np.transpose(q)))
    cdef cnp.npy_bool[::1] r = rows
    cdef cnp.npy_bool[::1] c = cols
    cdef double[::1] up = np.empty(v), uq = np.empty(w)
    cdef double ui
    with nogil:
        _recip_norms(p, up)
        _recip_norms(q, uq)
        # fused scale + threshold: no cosine or boolean matrix is materialised
        for i in range(v):
            ui = up[i]
            for j in range(w):
                if m[i, j] * (ui * uq[j]) > tau:
                    r[i] = 1
                    c[j] = 1
    return rows, cols


def normalized_adjacency(Py_ssize_t n, edges):
    cdef const cnp.int64_t[:, ::1] e = np.ascontiguousarray(edges, dtype=np.int64).reshape(-1, 2)
    out = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] a = out
    cdef double[::1] d = np.ones(n)
    cdef Py_ssize_t t, i, u, v
    with nogil:
        for t in range(e.shape[0]):
            u = e[t, 0]
            v = e[t, 1]
            d[u] += 1.0
            d[v] += 1.0
        for i in range(n):
            d[i] = 1.0 / sqrt(d[i])
            a[i, i] = d[i] * d[i]
        for t in range(e.shape[0]):
            u = e[t, 0]
            v = e[t, 1]
            a[u, v] = d[u] * d[v]
            a[v, u] = d[u] * d[v]
    return out


def similarity_edges(X, double threshold):
    cdef const double[:, ::1] x = np.ascontiguousarray(X, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], i, j, t = 0
    cdef double[::1] ux = np.empty(n)
    cdef const double[:, ::1] m = np.ascontiguousarray(np.dot(x, np.transpose(x)))
    out = np.empty((n * (n - 1) // 2, 2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] o = out
    with nogil:
        _recip_norms(x, ux)
        for i in range(n):
            for j in range(i + 1, n):
                if m[i, j] * (ux[i] * ux[j]) > threshold:
                    o[t, 0] = i
                    o[t, 1] = j
                    t += 1
    return out[:t].copy()


cdef enum:
    CHUNK = 64


cdef inline double _dot(const double* a, const double* b, Py_ssize_t h) noexcept nogil:
    cdef Py_ssize_t k
    cdef double acc = 0.0
    for k in range(h):
        acc = acc + a[k] * b[k]
    return acc


cdef void _mark_block(const double[:, ::1] P, const cnp.int64_t[::1] prow, Py_ssize_t p0, Py_ssize_t p1,
                      const double[:, ::1] W, const cnp.int64_t[::1] wrow, Py_ssize_t w0, Py_ssize_t w1,
                      double tau, cnp.npy_bool[::1] out,
                      double* U, Py_ssize_t* uidx, char* live, double* S) noexcept nogil:
    # A pair only matters while one of its endpoints is unmarked. Per chunk
    # of W rows: one GEMM against the still-unmarked P rows, then each chunk
    # row that is still unmarked scans the marked P rows until its first hit.
    cdef Py_ssize_t h = P.shape[1], cs, ce, nc, nu, i, j, r
    cdef int M, N, K = <int>h, ldc
    cdef double one = 1.0, zero = 0.0
    cdef char ta = b'T', tb = b'N'
    cs = w0
    while cs < w1:
        ce = min(cs + CHUNK, w1)
        nc = ce - cs
        nu = 0
        for i in range(p0, p1):
            live[i - p0] = not out[prow[i]]
            if live[i - p0]:
                memcpy(&U[nu * h], &P[i, 0], h * sizeof(double))
                uidx[nu] = i
                nu += 1
        if nu:
            # row-major S (nu x nc) = U @ W[cs:ce].T, i.e. column-major S.T = W @ U.T
            M, N, ldc = <int>nc, <int>nu, <int>nc
            dgemm(&ta, &tb, &M, &N, &K, &one, <double*>&W[cs, 0], &K, U, &K, &zero, S, &ldc)
            for r in range(nu):
                for j in range(nc):
                    if S[r * nc + j] > tau:
                        out[prow[uidx[r]]] = 1
                        out[wrow[cs + j]] = 1
        if nu < p1 - p0:
            for j in range(cs, ce):
                if out[wrow[j]]:
                    continue
                for i in range(p0, p1):
                    if not live[i - p0] and _dot(&P[i, 0], &W[j, 0], h) > tau:
                        out[wrow[j]] = 1
                        break
        cs = ce


def _by_class(rows, cls, Py_ssize_t ncls):
    order = rows[np.argsort(cls[rows], kind="stable")]
    return order, np.searchsorted(cls[order], np.arange(ncls + 1)).astype(np.int64)


def mark_batch(R, row_true, row_pred, double tau):
    """Anchor and deceptive row masks for one stacked batch.

    Row r belongs to a graph with true class ``row_true[r]`` and predicted
    class ``row_pred[r]``. Each misclassified row is compared with the
    correctly classified rows of its true class (anchor pairs) and of its
    predicted class (deceptive pairs).
    """
    X = np.ascontiguousarray(R, dtype=np.float64)
    yt = np.asarray(row_true, dtype=np.int64)
    yp = np.asarray(row_pred, dtype=np.int64)
    cdef Py_ssize_t n = X.shape[0]
    anchor = np.zeros(n, dtype=np.bool_)
    decept = np.zeros(n, dtype=np.bool_)
    if n == 0 or X.shape[1] == 0:
        return anchor, decept
    cdef const double[:, ::1] xv = X
    cdef double[::1] u = np.empty(n)
    with nogil:
        _recip_norms(xv, u)
    Xn = X * np.asarray(u)[:, None]
    correct = yt == yp
    cdef Py_ssize_t ncls = int(max(yt.max(), yp.max())) + 1
    # class-contiguous copies: plus rows by class, wrong rows by true / predicted class
    pr, ps = _by_class(np.flatnonzero(correct), yt, ncls)
    wrong = np.flatnonzero(~correct)
    ar, as_ = _by_class(wrong, yt, ncls)
    dr, ds = _by_class(wrong, yp, ncls)
    cdef const double[:, ::1] P = np.ascontiguousarray(Xn[pr])
    cdef const double[:, ::1] A = np.ascontiguousarray(Xn[ar])
    cdef const double[:, ::1] D = np.ascontiguousarray(Xn[dr])
    cdef const cnp.int64_t[::1] prow = pr, arow = ar, drow = dr
    cdef const cnp.int64_t[::1] pst = ps, ast = as_, dst = ds
    cdef Py_ssize_t c, mmax = max(int(np.max(np.diff(ps))), 1), h = X.shape[1]
    cdef double[::1] U = np.empty(mmax * h)
    cdef double[::1] S = np.empty(mmax * CHUNK)
    cdef Py_ssize_t[::1] uidx = np.empty(mmax, dtype=np.intp)
    cdef char[::1] live = np.empty(mmax, dtype=np.int8)
    cdef cnp.npy_bool[::1] an = anchor
    cdef cnp.npy_bool[::1] de = decept
    with nogil:
        for c in range(ncls):
            if pst[c + 1] == pst[c]:
                continue
            _mark_block(P, prow, pst[c], pst[c + 1], A, arow, ast[c], ast[c + 1], tau, an,
                        &U[0], &uidx[0], &live[0], &S[0])
            _mark_block(P, prow, pst[c], pst[c + 1], D, drow, dst[c], dst[c + 1], tau, de,
                        &U[0], &uidx[0], &live[0], &S[0])
    return anchor, decept
