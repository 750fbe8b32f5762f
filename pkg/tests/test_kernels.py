import os
import subprocess
import sys

import numpy as np
import pytest

from crcg import _kernels_py, kernels

BACKENDS = kernels.available_backends()
needs_c = pytest.mark.skipif("cython" not in BACKENDS, reason="compiled kernels not built")


@pytest.fixture(params=BACKENDS)
def backend(request):
    before = kernels.BACKEND
    kernels.use_backend(request.param)
    yield request.param
    kernels.use_backend(before)


def naive_cosine(P, Q):
    out = np.zeros((len(P), len(Q)))
    for t, p in enumerate(P):
        for r, q in enumerate(Q):
            np_, nq = np.sqrt(sum(x * x for x in p)), np.sqrt(sum(x * x for x in q))
            if np_ >= 1e-12 and nq >= 1e-12:
                out[t, r] = sum(a * b for a, b in zip(p, q)) / (np_ * nq)
    return out


def random_rows(rng, n, h, zero_rows=1):
    X = rng.normal(size=(n, h))
    X[rng.choice(n, size=min(zero_rows, n), replace=False)] = 0.0
    return X


def test_compiled_backend_is_default_when_built():
    assert kernels.BACKEND == ("cython" if "cython" in BACKENDS else "python")


def test_env_var_forces_fallback():
    env = dict(os.environ, CRCG_KERNELS="python")
    out = subprocess.run([sys.executable, "-c", "from crcg import kernels; print(kernels.BACKEND)"], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.use_backend("fortran")


def test_cross_cosine_matches_naive_oracle(backend):
    rng = np.random.default_rng(0)
    for v, w in [(1, 1), (7, 3), (50, 50)]:
        P, Q = random_rows(rng, v, 6), random_rows(rng, w, 6)
        M = kernels.cross_cosine(P, Q)
        np.testing.assert_allclose(M, naive_cosine(P, Q), atol=1e-9, rtol=0)
        assert M.min() >= -1 - 1e-12 and M.max() <= 1 + 1e-12


def test_row_norm_reciprocals(backend):
    assert kernels.row_norm_reciprocals(np.array([[3.0, 4.0], [0.0, 5.0]])).tolist() == [0.2, 0.2]
    assert kernels.row_norm_reciprocals(np.zeros((1, 2))).tolist() == [0.0]


@needs_c
@pytest.mark.parametrize("seed", range(5))
def test_backends_agree(seed):
    from crcg import _ckernels

    rng = np.random.default_rng(seed)
    P, Q = random_rows(rng, 40, 8), random_rows(rng, 25, 8)
    Q[:5] = P[:5] + 0.01 * rng.normal(size=(5, 8))
    for name, args in [
        ("row_norm_reciprocals", (P,)),
        ("cross_cosine", (P, Q)),
        ("mark_above", (P, Q, 0.7)),
        ("similarity_edges", (P, 0.4)),
    ]:
        a, b = getattr(_kernels_py, name)(*args), getattr(_ckernels, name)(*args)
        if isinstance(a, tuple):
            for x, y in zip(a, b):
                assert np.array_equal(np.asarray(x), np.asarray(y)), name
        else:
            np.testing.assert_allclose(np.asarray(a), np.asarray(b), atol=1e-12, rtol=0, err_msg=name)
    n = 30
    edges = np.array([(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.2], dtype=np.int64).reshape(-1, 2)
    np.testing.assert_allclose(_kernels_py.normalized_adjacency(n, edges), _ckernels.normalized_adjacency(n, edges), atol=1e-15)


def mark_batch_oracle(R, yt, yp, tau):
    """Pair-by-pair definition: every (correct, misclassified) row pair sharing a class."""
    C = naive_cosine(R, R)
    anchor = np.zeros(len(R), dtype=bool)
    decept = np.zeros(len(R), dtype=bool)
    for i in range(len(R)):
        if yt[i] != yp[i]:
            continue
        for j in range(len(R)):
            if yt[j] == yp[j] or C[i, j] <= tau:
                continue
            if yt[j] == yt[i]:
                anchor[i] = anchor[j] = True
            if yp[j] == yt[i]:
                decept[i] = decept[j] = True
    return anchor, decept


@pytest.mark.parametrize("seed", range(8))
def test_mark_batch_matches_oracle(backend, seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 90))  # spans more than one 64-row chunk
    R = random_rows(rng, n, 5, zero_rows=2)
    if seed % 2:
        R = np.abs(R)  # dense marks
    yt = rng.integers(0, 4, n)
    yp = np.where(rng.random(n) < 0.5, yt, rng.integers(0, 4, n))
    tau = float(rng.choice([-0.5, 0.0, 0.5, 0.8]))
    got = kernels.mark_batch(R, yt, yp, tau)
    want = mark_batch_oracle(R, yt, yp, tau)
    assert np.array_equal(got[0], want[0]) and np.array_equal(got[1], want[1])


def test_mark_batch_empty(backend):
    a, d = kernels.mark_batch(np.zeros((0, 3)), np.zeros(0, int), np.zeros(0, int), 0.5)
    assert a.shape == d.shape == (0,)
