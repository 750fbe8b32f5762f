"""Reference numpy implementations of the hot kernels.

Used when the compiled ``_ckernels`` extension is unavailable, and as the
baseline in ``benchmarks/bench_kernels.py``.
"""

import numpy as np

ZERO_NORM = 1e-12


def row_norm_reciprocals(S):
    S = np.asarray(S, dtype=np.float64)
    norms = np.sqrt(np.einsum("ij,ij->i", S, S))
    out = np.zeros_like(norms)
    ok = norms >= ZERO_NORM
    out[ok] = 1.0 / norms[ok]
    return out


def cross_cosine(P, Q):
    P = np.asarray(P, dtype=np.float64)
    Q = np.asarray(Q, dtype=np.float64)
    if P.shape[0] == 0 or Q.shape[0] == 0:
        return np.zeros((P.shape[0], Q.shape[0]))
    M = P @ Q.T
    M *= np.outer(row_norm_reciprocals(P), row_norm_reciprocals(Q))
    return M


def mark_above(P, Q, tau):
    """Boolean masks of rows of P / rows of Q taking part in a pair with cosine > tau."""
    M = cross_cosine(P, Q)
    hit = M > tau
    return hit.any(axis=1), hit.any(axis=0)


def normalized_adjacency(n, edges):
    A = np.eye(n)
    if len(edges):
        A[edges[:, 0], edges[:, 1]] = 1.0
        A[edges[:, 1], edges[:, 0]] = 1.0
    d = 1.0 / np.sqrt(A.sum(axis=1))
    return A * d[:, None] * d[None, :]


def similarity_edges(X, threshold):
    X = np.asarray(X, dtype=np.float64)
    M = cross_cosine(X, X)
    iu, ju = np.triu_indices(X.shape[0], k=1)
    keep = M[iu, ju] > threshold
    return np.stack([iu[keep], ju[keep]], axis=1).astype(np.int64)


def mark_batch(R, row_true, row_pred, tau):
    """Anchor / deceptive row masks of a stacked batch (see the compiled twin)."""
    R = np.asarray(R, dtype=np.float64)
    yt = np.asarray(row_true)
    yp = np.asarray(row_pred)
    anchor = np.zeros(len(R), dtype=bool)
    decept = np.zeros(len(R), dtype=bool)
    correct = yt == yp
    for c in np.unique(np.concatenate([yt, yp])):
        plus = np.flatnonzero(correct & (yt == c))
        for minus, out in ((np.flatnonzero(~correct & (yt == c)), anchor), (np.flatnonzero(~correct & (yp == c)), decept)):
            if plus.size and minus.size:
                rows, cols = mark_above(R[plus], R[minus], tau)
                out[plus[rows]] = True
                out[minus[cols]] = True
    return anchor, decept
