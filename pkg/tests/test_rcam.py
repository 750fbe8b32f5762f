import json
import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crcg import autograd as ag
from crcg import kernels
from crcg.rcam import (
    MarkSet,
    RcamConfig,
    RepBatch,
    causal_loss,
    compute_marks,
    compute_marks_reference,
    cross_cosine_matrix,
    emphasis_loss,
    ignoring_loss,
    mark_above_threshold,
    partition_representations,
    row_norm_reciprocals,
)

FIXTURE = json.loads((Path(__file__).parent / "fixtures" / "hand_lc.json").read_text())


def hand_batch():
    return RepBatch([np.array(r, dtype=float) for r in FIXTURE["reps"]], FIXTURE["labels"], FIXTURE["preds"])


def as_sets(m: MarkSet):
    return {k: sorted(v) for k, v in m.anchors.items() if v}, {k: sorted(v) for k, v in m.deceptive.items() if v}


# ---------------------------------------------------------------- kernels

def test_row_norm_examples():
    assert row_norm_reciprocals([[3, 4], [0, 5]]).tolist() == [0.2, 0.2]
    assert row_norm_reciprocals([[0, 0]]).tolist() == [0.0]
    assert row_norm_reciprocals([[1, 0]]).tolist() == [1.0]


def test_cross_cosine_examples():
    np.testing.assert_allclose(cross_cosine_matrix([[1, 0], [1, 1]], [[0, 2]]), [[0.0], [0.70710678]], atol=1e-8)
    P = np.array([[0.3, -2.0, 1.0], [0, 0, 0]])
    M = cross_cosine_matrix(P, np.vstack([P[0], [1, 1, 1]]))
    assert abs(M[0, 0] - 1.0) < 1e-15
    assert M[1].tolist() == [0.0, 0.0]
    with pytest.raises(ValueError, match="width"):
        cross_cosine_matrix([[1, 0]], [[1, 0, 0]])


# ---------------------------------------------------------------- partition / marking

def test_partition_example():
    parts = partition_representations(hand_batch())
    graphs = lambda block: sorted({g for g, _ in block.origins})
    assert graphs(parts[0].s_plus) == [0] and graphs(parts[0].s_minus) == [1]
    assert graphs(parts[1].i_plus) == [2] and graphs(parts[1].i_minus) == [1]
    assert graphs(parts[0].i_minus) == [] and graphs(parts[1].s_minus) == []
    assert parts[0].s_plus.origins == [(0, 0), (0, 1)]


def test_partition_all_correct_and_all_wrong():
    reps = [np.ones((2, 3))] * 3
    for p in partition_representations(RepBatch(reps, [0, 1, 2], [0, 1, 2])).values():
        assert not p.s_minus.origins and not p.i_minus.origins
    for p in partition_representations(RepBatch(reps, [0, 1, 2], [1, 2, 0])).values():
        assert not p.s_plus.origins and not p.i_plus.origins


def test_mark_above_threshold_examples():
    rows, cols = ["r0", "r1"], ["c0", "c1"]
    assert mark_above_threshold([[0.9, 0.2], [0.5, 0.95]], 0.8, rows, cols) == {"r0", "r1", "c0", "c1"}
    rng = np.random.default_rng(0)
    M = cross_cosine_matrix(rng.normal(size=(4, 3)), rng.normal(size=(5, 3)))
    assert mark_above_threshold(M, 1.0, list(range(4)), list(range(4, 9))) == set()
    assert mark_above_threshold(M, -1.0, list(range(4)), list(range(4, 9))) == set(range(9))


def test_hand_marks():
    a, d = as_sets(compute_marks(hand_batch(), FIXTURE["tau"]))
    want = FIXTURE["derivation"]
    assert a == {int(k): v for k, v in want["anchors"].items()}
    assert d == {int(k): v for k, v in want["deceptive"].items()}


def naive_marks(batch, tau):
    """Double loop over graph pairs and node pairs, straight from the definitions."""
    anchors, deceptive = set(), set()
    y, yhat = batch.labels, batch.preds
    for i in range(len(y)):
        if y[i] != yhat[i]:
            continue
        for j in range(len(y)):
            if y[j] == yhat[j]:
                continue
            for a, za in enumerate(batch.values(i)):
                for b, zb in enumerate(batch.values(j)):
                    na, nb = np.linalg.norm(za), np.linalg.norm(zb)
                    cos = 0.0 if na < 1e-12 or nb < 1e-12 else float(za @ zb) / (na * nb)
                    if cos <= tau:
                        continue
                    if y[j] == y[i]:
                        anchors |= {(i, a), (j, b)}
                    if yhat[j] == y[i]:
                        deceptive |= {(i, a), (j, b)}
    group = lambda s: {g: sorted(n for gg, n in s if gg == g) for g in {g for g, _ in s}}
    return group(anchors), group(deceptive)


@st.composite
def batches(draw):
    n = draw(st.integers(1, 7))
    h = draw(st.integers(1, 4))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    reps = [rng.normal(size=(int(rng.integers(1, 5)), h)) for _ in range(n)]
    if draw(st.booleans()):
        reps = [np.abs(r) for r in reps]
    labels = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    preds = draw(st.lists(st.integers(0, 2), min_size=n, max_size=n))
    return RepBatch(reps, labels, preds)


@pytest.mark.parametrize("backend", kernels.available_backends())
@settings(max_examples=80, deadline=None)
@given(batch=batches(), tau=st.floats(-0.9, 0.95))
def test_marks_match_naive_and_reference(backend, batch, tau):
    before = kernels.BACKEND
    kernels.use_backend(backend)
    try:
        want = naive_marks(batch, tau)
        assert as_sets(compute_marks(batch, tau)) == want
        assert as_sets(compute_marks_reference(batch, tau)) == want
        assert as_sets(causal_loss(batch, RcamConfig(tau=tau)).marks) == want
    finally:
        kernels.use_backend(before)


@settings(max_examples=60, deadline=None)
@given(batch=batches(), t1=st.floats(-0.9, 0.95), t2=st.floats(-0.9, 0.95))
def test_marks_monotone_in_tau(batch, t1, t2):
    lo, hi = sorted((t1, t2))
    a_lo, d_lo = compute_marks(batch, lo).anchors, compute_marks(batch, lo).deceptive
    m_hi = compute_marks(batch, hi)
    for small, big in ((m_hi.anchors, a_lo), (m_hi.deceptive, d_lo)):
        for g, nodes in small.items():
            assert set(nodes) <= set(big.get(g, []))


# ---------------------------------------------------------------- losses

def _cos_graph(c):
    """Rows (1,0) and (0, y) so that cos((1,0), mean) = c for c > 0."""
    return np.array([[1.0, 0.0], [0.0, math.sqrt(1 / c**2 - 1)]])


def test_emphasis_examples():
    one = RepBatch([np.array([[1.0, 2.0], [3.0, -1.0]])], [0], [0])
    assert emphasis_loss(one, MarkSet({0: [0, 1]})).value == pytest.approx(-1.0, abs=1e-15)
    assert float(emphasis_loss(one, MarkSet()).value) == 0.0
    two = RepBatch([_cos_graph(0.5), _cos_graph(0.25)], [0, 0], [0, 0])
    assert float(emphasis_loss(two, MarkSet({0: [0], 1: [0]})).value) == pytest.approx(-0.75, abs=1e-12)


def test_ignoring_examples():
    one = RepBatch([np.array([[1.0, 2.0], [3.0, -1.0]])], [0], [1])
    assert ignoring_loss(one, MarkSet(deceptive={0: [0, 1]})).value == pytest.approx(1.0, abs=1e-15)
    assert float(ignoring_loss(one, MarkSet()).value) == 0.0
    # mean of (1,0) and (x,y) with (1+x)/|.| = 0.4 and -0.1
    g1 = np.array([[1.0, 0.0], [1.0, math.sqrt(21)]])
    g2 = np.array([[1.0, 0.0], [-2.0, math.sqrt(99)]])
    two = RepBatch([g1, g2], [0, 1], [1, 0])
    assert float(ignoring_loss(two, MarkSet(deceptive={0: [0], 1: [0]})).value) == pytest.approx(0.3, abs=1e-12)


def test_hand_worked_causal_loss():
    r2 = math.sqrt(2)
    oracle = {"L_a": -(1 + 1 / r2), "L_i": 1 / r2 + 7 / (5 * r2), "L_c": 7 / (5 * r2) - 1}
    for k, v in oracle.items():
        assert abs(FIXTURE[k] - v) < 1e-12
    lc = causal_loss(hand_batch(), RcamConfig(tau=FIXTURE["tau"]))
    assert abs(float(lc.emphasis.value) - oracle["L_a"]) < 1e-9
    assert abs(float(lc.ignoring.value) - oracle["L_i"]) < 1e-9
    assert abs(float(lc.total.value) - oracle["L_c"]) < 1e-9


def test_causal_loss_sum_and_all_correct():
    batch = RepBatch([np.eye(2), np.ones((3, 2))], [0, 1], [0, 1])
    lc = causal_loss(batch, RcamConfig(tau=0.0))
    assert lc.marks.is_empty() and float(lc.total.value) == 0.0
    lc = causal_loss(hand_batch(), RcamConfig(tau=0.6))
    assert float(lc.total.value) == pytest.approx(float(lc.emphasis.value) + float(lc.ignoring.value), abs=1e-15)


def test_empty_batch_rejected():
    with pytest.raises(ValueError):
        causal_loss(RepBatch([], [], []), RcamConfig())


def test_config_validation():
    for bad in (dict(tau=-1.0), dict(tau=1.5), dict(lam=-0.1), dict(scope="weekly")):
        with pytest.raises(ValueError):
            RcamConfig(**bad)


def test_detach_contract():
    rng = np.random.default_rng(3)
    reps = [ag.Tensor(rng.normal(size=(4, 3)), requires_grad=True) for _ in range(4)]
    batch = RepBatch(reps, [0, 0, 1, 1], [0, 1, 1, 0])
    cfg = RcamConfig(tau=0.3)  # partial marks; with every node marked each cosine is 1 and flat
    # live path cut: pooled vectors become independent leaves
    pooled = [ag.Tensor(r.value.mean(axis=0), requires_grad=True) for r in reps]
    lc = causal_loss(batch, cfg, pooled=pooled)
    assert not lc.marks.is_empty()
    ag.backward(lc.total)
    assert all(not np.any(r.grad) for r in reps)
    assert any(np.any(p.grad) for p in pooled)
    # with the live path connected, gradients reach the representations
    for r in reps:
        r.zero_grad()
    ag.backward(causal_loss(batch, cfg).total)
    assert any(np.any(r.grad) for r in reps)


def _loss(batch, tau=0.3):
    return float(causal_loss(batch, RcamConfig(tau=tau)).total.value)


@settings(max_examples=50, deadline=None)
@given(batch=batches(), perm=st.permutations([0, 1, 2]))
def test_class_permutation_invariance(batch, perm):
    relabeled = RepBatch(batch.reps, [perm[c] for c in batch.labels], [perm[c] for c in batch.preds])
    assert _loss(relabeled) == pytest.approx(_loss(batch), abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(batch=batches(), seed=st.integers(0, 1000))
def test_stacking_order_invariance(batch, seed):
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(batch.reps))
    rows = [r[rng.permutation(len(r))] for r in batch.reps]
    shuffled = RepBatch([rows[i] for i in order], [batch.labels[i] for i in order], [batch.preds[i] for i in order])
    assert _loss(shuffled) == pytest.approx(_loss(batch), abs=1e-12)
