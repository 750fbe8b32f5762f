"""ERM and ERM + R-CAM training loops, Adam, evaluation."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import autograd as ag
from .model import ModelParams, PreparedGraph, forward, init_params, predict, prepare
from .rcam import CausalLoss, MarkSet, RcamConfig, RepBatch, Targets, causal_loss, compute_marks

METHODS = ("erm", "erm+rcam")
LOG_FIELDS = ("epoch", "train_loss", "train_acc", "l_ce", "l_a", "l_i", "l_c", "cpu_seconds")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    method: str = "erm"
    hidden: int = 32
    layers: int = 2
    rcam: RcamConfig = field(default_factory=RcamConfig)

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.batch_size < 1 or self.learning_rate <= 0:
            raise ValueError("batch_size and learning_rate must be positive")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {', '.join(METHODS)}")


class Adam:
    """Adam with bias correction over a fixed list of tensors."""

    def __init__(self, tensors, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.tensors = list(tensors)
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = [np.zeros_like(t.value) for t in self.tensors]
        self.v = [np.zeros_like(t.value) for t in self.tensors]
        self.t = 0

    def step(self, grads=None):
        grads = [t.grad for t in self.tensors] if grads is None else grads
        self.t += 1
        c1 = 1.0 - self.beta1**self.t
        c2 = 1.0 - self.beta2**self.t
        for t, g, m, v in zip(self.tensors, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            t.value -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


def adam_step(params, grads, state: Adam):
    """Functional wrapper: one Adam update of ``params`` using ``grads``."""
    state.step(grads)
    return params


@dataclass
class BatchLoss:
    total: ag.Tensor
    ce: float
    l_a: float = 0.0
    l_i: float = 0.0
    preds: list[int] = field(default_factory=list)
    causal: CausalLoss | None = None

    @property
    def marks(self) -> MarkSet | None:
        return None if self.causal is None else self.causal.marks

    @property
    def targets(self) -> Targets | None:
        return None if self.causal is None else self.causal.targets


def batch_loss(graphs, params: ModelParams, cfg: TrainConfig, marks: MarkSet | None = None, targets: Targets | None = None) -> BatchLoss:
    """Mean cross-entropy over ``graphs`` plus ``lam * L_c`` for erm+rcam.

    ``targets`` (from an earlier call) holds the detached anchor/deceptive
    means fixed, so the loss becomes a function of the live path only.
    """
    reps, pooled, ces, preds = [], [], [], []
    for g in graphs:
        z, p, logits = forward(g, params)
        reps.append(z)
        pooled.append(p)
        ces.append(ag.cross_entropy(logits, g.label))
        preds.append(int(np.argmax(logits.value)))
    ce = ag.scale(ag.total(ces), 1.0 / len(graphs))
    out = BatchLoss(ce, float(ce.value), preds=preds)
    if cfg.method == "erm+rcam":
        batch = RepBatch(reps, [g.label for g in graphs], preds)
        lc = causal_loss(batch, cfg.rcam, marks=marks, pooled=pooled, targets=targets)
        out.total = ag.add(ce, ag.scale(lc.total, cfg.rcam.lam))
        out.l_a, out.l_i, out.causal = float(lc.emphasis.value), float(lc.ignoring.value), lc
    return out


def _epoch_marks(prepared, params, cfg) -> MarkSet:
    """Marks over the whole training set from one frozen forward pass."""
    reps, preds = [], []
    for g in prepared:
        z, _, logits = forward(g, params)
        reps.append(z.value)
        preds.append(int(np.argmax(logits.value)))
    return compute_marks(RepBatch(reps, [g.label for g in prepared], preds), cfg.rcam.tau)


def _subset_marks(marks: MarkSet, idx) -> MarkSet:
    pos = {int(g): k for k, g in enumerate(idx)}
    pick = lambda d: {pos[g]: v for g, v in d.items() if g in pos}
    return MarkSet(pick(marks.anchors), pick(marks.deceptive))


@dataclass
class TrainResult:
    params: ModelParams
    log: list[dict]
    cpu_seconds: float
    marks_log: list[list[dict]] = field(default_factory=list)


def train(dataset, cfg: TrainConfig, record_marks: bool = False) -> TrainResult:
    """Mini-batch training with a seeded shuffle; CPU time is process time."""
    graphs = list(dataset)
    if not graphs:
        raise ValueError("cannot train on an empty dataset")
    start = time.process_time()
    rng = np.random.default_rng(cfg.seed)
    num_classes = getattr(dataset, "num_classes", None) or (max(g.label for g in graphs) + 1)
    params = init_params(graphs[0].feature_dim, num_classes, rng, cfg.hidden, cfg.layers)
    prepared = [g if isinstance(g, PreparedGraph) else PreparedGraph(g) for g in graphs]
    opt = Adam(params.tensors, cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.eps)
    log, marks_log = [], []
    n = len(prepared)
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        epoch_marks = None
        if cfg.method == "erm+rcam" and cfg.rcam.scope == "per_epoch":
            epoch_marks = _epoch_marks(prepared, params, cfg)
        sums = dict(loss=0.0, ce=0.0, l_a=0.0, l_i=0.0)
        correct = 0
        records = []
        for s in range(0, n, cfg.batch_size):
            idx = order[s : s + cfg.batch_size]
            batch = [prepared[i] for i in idx]
            marks = _subset_marks(epoch_marks, idx) if epoch_marks is not None else None
            bl = batch_loss(batch, params, cfg, marks)
            params.zero_grad()
            ag.backward(bl.total)
            opt.step()
            w = len(idx)
            sums["loss"] += float(bl.total.value) * w
            sums["ce"] += bl.ce * w
            sums["l_a"] += bl.l_a
            sums["l_i"] += bl.l_i
            correct += sum(int(p == g.label) for p, g in zip(bl.preds, batch))
            if record_marks and bl.marks is not None:
                records.extend(bl.marks.to_records([int(i) for i in idx]))
        log.append(
            {
                "epoch": epoch,
                "train_loss": sums["loss"] / n,
                "train_acc": correct / n,
                "l_ce": sums["ce"] / n,
                "l_a": sums["l_a"],
                "l_i": sums["l_i"],
                "l_c": sums["l_a"] + sums["l_i"],
                "cpu_seconds": time.process_time() - start,
            }
        )
        if record_marks:
            marks_log.append(records)
    return TrainResult(params, log, time.process_time() - start, marks_log)


def evaluate(dataset, params: ModelParams) -> float:
    graphs = list(dataset)
    if not graphs:
        return 0.0
    preds = predict(graphs, params)
    labels = np.array([g.label for g in graphs])
    return float(np.mean(preds == labels))


def write_log_csv(log: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=LOG_FIELDS, lineterminator="\n")
        w.writeheader()
        for row in log:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def write_marks_jsonl(marks_log, path) -> None:
    with open(path, "w") as fh:
        for epoch, records in enumerate(marks_log, 1):
            for rec in records:
                fh.write(json.dumps({"epoch": epoch, **rec}, separators=(",", ":")) + "\n")
