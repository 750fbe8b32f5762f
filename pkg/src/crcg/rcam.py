"""Representation-based causality augmentation (R-CAM).

Node representations of a batch are split per class by ground truth and
prediction. Pairs of rows across the correct/incorrect blocks whose cosine
similarity is strictly above ``tau`` mark both of their nodes:

* anchors    -- from the (true = c, predicted = c) vs (true = c, predicted != c) blocks
* deceptive  -- from the (predicted = c, true = c) vs (predicted = c, true != c) blocks

The emphasis loss pulls each graph's pooled representation toward the
(detached) mean of its anchors; the ignoring loss pushes it away from the
mean of its deceptive nodes. Their sum is the causal loss added to the
training objective; nothing here runs at evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import autograd as ag
from . import kernels


@dataclass(frozen=True)
class RcamConfig:
    tau: float = 0.8
    lam: float = 1.0
    scope: str = "per_batch"  # or "per_epoch"

    def __post_init__(self):
        if not -1.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (-1, 1]")
        if self.lam < 0:
            raise ValueError("lambda must be non-negative")
        if self.scope not in ("per_batch", "per_epoch"):
            raise ValueError("scope must be per_batch or per_epoch")


@dataclass
class RepBatch:
    """Per-graph representation matrices with true and predicted labels.

    ``reps`` may hold numpy arrays or autograd tensors; partitioning only ever
    reads their values.
    """

    reps: list
    labels: list[int]
    preds: list[int]
    graph_ids: list[int] | None = None

    def __post_init__(self):
        if not (len(self.reps) == len(self.labels) == len(self.preds)):
            raise ValueError("reps, labels and preds must have equal length")
        if self.graph_ids is None:
            self.graph_ids = list(range(len(self.reps)))
        widths = {_values(r).shape[1] for r in self.reps}
        if len(widths) > 1:
            raise ValueError("all representation matrices must share one width")

    def values(self, i: int) -> np.ndarray:
        return _values(self.reps[i])

    @property
    def width(self) -> int:
        return self.values(0).shape[1] if self.reps else 0


def _values(r) -> np.ndarray:
    return r.value if isinstance(r, ag.Tensor) else np.asarray(r, dtype=np.float64)


@dataclass
class MarkSet:
    """Anchor / deceptive node indices keyed by batch position."""

    anchors: dict[int, list[int]] = field(default_factory=dict)
    deceptive: dict[int, list[int]] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return not any(self.anchors.values()) and not any(self.deceptive.values())

    def to_records(self, graph_ids) -> list[dict]:
        keys = sorted(set(self.anchors) | set(self.deceptive))
        return [
            {"graph": int(graph_ids[i]), "anchors": self.anchors.get(i, []), "deceptive": self.deceptive.get(i, [])}
            for i in keys
        ]


# --------------------------------------------------------------------------
# similarity kernels
# --------------------------------------------------------------------------

def row_norm_reciprocals(S) -> np.ndarray:
    """1 / ||row|| per row, 0 for rows with norm below 1e-12."""
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    return np.asarray(kernels.row_norm_reciprocals(S))


def cross_cosine_matrix(P, Q) -> np.ndarray:
    """(P Q^T) * (u(P) u(Q)^T): every row of P against every row of Q."""
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    Q = np.atleast_2d(np.asarray(Q, dtype=np.float64))
    if P.shape[1] != Q.shape[1]:
        raise ValueError(f"width mismatch: {P.shape[1]} vs {Q.shape[1]}")
    return np.asarray(kernels.cross_cosine(P, Q))


# --------------------------------------------------------------------------
# partitioning and marking
# --------------------------------------------------------------------------

@dataclass
class Block:
    rows: np.ndarray  # stacked representations
    origins: list[tuple[int, int]]  # (batch position, node index) per row


@dataclass
class ClassPartition:
    s_plus: Block
    s_minus: Block
    i_plus: Block
    i_minus: Block


def _stack(batch: RepBatch, members) -> Block:
    mats, origins = [], []
    for i in members:
        v = batch.values(i)
        mats.append(v)
        origins.extend((i, j) for j in range(v.shape[0]))
    rows = np.vstack(mats) if mats else np.zeros((0, batch.width))
    return Block(rows, origins)


def partition_representations(batch: RepBatch) -> dict[int, ClassPartition]:
    """Per class: correct / misclassified blocks by truth (S) and by prediction (I)."""
    classes = sorted(set(batch.labels) | set(batch.preds))
    y, yhat = list(batch.labels), list(batch.preds)
    n = len(y)
    out = {}
    for c in classes:
        correct = [i for i in range(n) if y[i] == c and yhat[i] == c]
        s_minus = [i for i in range(n) if y[i] == c and yhat[i] != c]
        i_minus = [i for i in range(n) if yhat[i] == c and y[i] != c]
        plus = _stack(batch, correct)
        out[c] = ClassPartition(plus, _stack(batch, s_minus), plus, _stack(batch, i_minus))
    return out


def mark_above_threshold(M, tau: float, row_origins, col_origins) -> set:
    """Origins of both endpoints of every entry strictly greater than ``tau``."""
    M = np.asarray(M)
    if M.shape != (len(row_origins), len(col_origins)):
        raise ValueError("origins do not match the matrix shape")
    hit = M > tau
    marked = {row_origins[i] for i in np.flatnonzero(hit.any(axis=1))}
    marked |= {col_origins[j] for j in np.flatnonzero(hit.any(axis=0))}
    return marked


def _mark_blocks(a: Block, b: Block, tau: float) -> set:
    if not a.origins or not b.origins:
        return set()
    rows, cols = kernels.mark_above(a.rows, b.rows, float(tau))
    marked = {a.origins[i] for i in np.flatnonzero(rows)}
    marked |= {b.origins[j] for j in np.flatnonzero(cols)}
    return marked


def compute_marks_reference(batch: RepBatch, tau: float) -> MarkSet:
    """Marks via explicit partition blocks and origin tuples (slow, readable)."""
    anchors, deceptive = set(), set()
    for c, part in sorted(partition_representations(batch).items()):
        anchors |= _mark_blocks(part.s_plus, part.s_minus, tau)
        deceptive |= _mark_blocks(part.i_plus, part.i_minus, tau)
    group = lambda marked: {i: [j for (k, j) in sorted(marked) if k == i] for i in sorted({k for k, _ in marked})}
    return MarkSet(group(anchors), group(deceptive))


class _Stacked:
    """All node rows of a batch in one matrix, with segment bookkeeping."""

    __slots__ = ("R", "sizes", "offsets", "owner")

    def __init__(self, batch: RepBatch):
        mats = [batch.values(i) for i in range(len(batch.reps))]
        self.sizes = np.fromiter((m.shape[0] for m in mats), dtype=np.int64, count=len(mats))
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)])
        self.R = np.vstack(mats)
        self.owner = np.repeat(np.arange(len(mats)), self.sizes)

    def group(self, mask) -> dict[int, list[int]]:
        rows = np.flatnonzero(mask)
        if rows.size == 0:
            return {}
        owners = self.owner[rows]
        local = rows - self.offsets[owners]
        keys, starts = np.unique(owners, return_index=True)
        return {int(k): part.tolist() for k, part in zip(keys, np.split(local, starts[1:]))}

    def mask(self, marked: dict) -> np.ndarray:
        out = np.zeros(self.R.shape[0], dtype=bool)
        for i, nodes in marked.items():
            if nodes:
                out[self.offsets[i] + np.asarray(nodes, dtype=np.int64)] = True
        return out

    def masked_means(self, mask):
        """Graph positions with at least one marked row, and the mean of those rows."""
        counts = np.bincount(self.owner[mask], minlength=len(self.sizes))
        keys = np.flatnonzero(counts)
        if keys.size == 0:
            return keys, np.zeros((0, self.R.shape[1]))
        sums = np.add.reduceat(self.R * mask[:, None], self.offsets[:-1], axis=0)
        # reduceat misreads empty segments; only non-empty keys are used
        return keys, sums[keys] / counts[keys, None]


def _mark_masks(st: _Stacked, labels, preds, tau: float):
    y = np.asarray(labels, dtype=np.int64)
    yhat = np.asarray(preds, dtype=np.int64)
    return kernels.mark_batch(st.R, y[st.owner], yhat[st.owner], float(tau))


def compute_marks(batch: RepBatch, tau: float) -> MarkSet:
    """Anchor and deceptive marks for every graph in ``batch``.

    Works on one stacked matrix of all node rows; graph membership is a
    row mask, so no per-node origin bookkeeping is needed.
    """
    st = _Stacked(batch)
    anchor, decept = _mark_masks(st, batch.labels, batch.preds, tau)
    return MarkSet(st.group(anchor), st.group(decept))


# --------------------------------------------------------------------------
# losses
# --------------------------------------------------------------------------

def _pooled(batch: RepBatch, i: int, pooled=None):
    if pooled is not None and pooled[i] is not None:
        return pooled[i]
    r = batch.reps[i]
    return ag.mean_rows(r) if isinstance(r, ag.Tensor) else ag.Tensor(np.asarray(r, dtype=np.float64).mean(axis=0))


def _similarity_sum(batch: RepBatch, keys, targets, pooled=None) -> ag.Tensor:
    if len(keys) == 0:
        return ag.Tensor(0.0)
    # targets are plain arrays: detached from the autograd graph
    return ag.cosine_sum(targets, [_pooled(batch, int(i), pooled) for i in keys])


def emphasis_loss(batch: RepBatch, marks: MarkSet, pooled=None) -> ag.Tensor:
    """``-sum_i cos(mean(anchors_i), mean(Z_i))`` with the anchor mean detached.

    ``pooled`` optionally supplies already-built ``mean(Z_i)`` tensors so the
    loss shares the classifier's readout node.
    """
    st = _Stacked(batch)
    return ag.scale(_similarity_sum(batch, *st.masked_means(st.mask(marks.anchors)), pooled), -1.0)


def ignoring_loss(batch: RepBatch, marks: MarkSet, pooled=None) -> ag.Tensor:
    """``+sum_i cos(mean(deceptive_i), mean(Z_i))``, deceptive mean detached."""
    st = _Stacked(batch)
    return _similarity_sum(batch, *st.masked_means(st.mask(marks.deceptive)), pooled)


@dataclass
class Targets:
    """Detached per-graph means of the marked rows: ``(batch positions, rows)``."""

    anchor: tuple
    deceptive: tuple


class CausalLoss:
    """``total = ignoring + emphasis``; ``marks`` is grouped per graph on first access."""

    __slots__ = ("total", "emphasis", "ignoring", "targets", "_marks", "_pending")

    def __init__(self, total, emphasis, ignoring, marks=None, targets=None, pending=None):
        self.total, self.emphasis, self.ignoring, self.targets = total, emphasis, ignoring, targets
        self._marks, self._pending = marks, pending

    @property
    def marks(self) -> MarkSet:
        if self._marks is None:
            st, anchor, decept = self._pending
            self._marks = MarkSet(st.group(anchor), st.group(decept))
            self._pending = None
        return self._marks


def causal_loss(batch: RepBatch, cfg: RcamConfig, marks: MarkSet | None = None, pooled=None, targets: Targets | None = None) -> CausalLoss:
    """L_c = L_i + L_a; marks come from ``batch`` unless given (per-epoch scope).

    ``targets`` replays the detached means of an earlier call, which freezes
    everything outside the live ``pool(Z_i)`` path (finite-difference checks).
    """
    if not batch.reps:
        raise ValueError("empty batch")
    pending = None
    if targets is None:
        st = _Stacked(batch)
        if marks is None:
            anchor, decept = _mark_masks(st, batch.labels, batch.preds, cfg.tau)
            pending = (st, anchor, decept)
        else:
            anchor, decept = st.mask(marks.anchors), st.mask(marks.deceptive)
        targets = Targets(st.masked_means(anchor), st.masked_means(decept))
    elif marks is None:
        marks = MarkSet()
    la = ag.scale(_similarity_sum(batch, *targets.anchor, pooled), -1.0)
    li = _similarity_sum(batch, *targets.deceptive, pooled)
    return CausalLoss(ag.add(li, la), la, li, marks, targets, pending)
