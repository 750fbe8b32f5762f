"""Message-passing backbone with mean readout and a linear classifier."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import autograd as ag
from .graph import Graph, normalized_adjacency


@dataclass
class ModelParams:
    weights: list[ag.Tensor]  # one (in, out) matrix per message-passing layer
    cls_weight: ag.Tensor  # (hidden, num_classes)
    cls_bias: ag.Tensor  # (num_classes,)

    @property
    def tensors(self) -> list[ag.Tensor]:
        return [*self.weights, self.cls_weight, self.cls_bias]

    @property
    def feature_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def num_classes(self) -> int:
        return self.cls_bias.shape[0]

    def zero_grad(self):
        for t in self.tensors:
            t.zero_grad()

    def copy(self) -> "ModelParams":
        fresh = lambda t: ag.Tensor(t.value.copy(), requires_grad=True)
        return ModelParams([fresh(w) for w in self.weights], fresh(self.cls_weight), fresh(self.cls_bias))

    def to_dict(self) -> dict:
        return {
            "weights": [w.value.tolist() for w in self.weights],
            "cls_weight": self.cls_weight.value.tolist(),
            "cls_bias": self.cls_bias.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelParams":
        t = lambda v: ag.Tensor(np.asarray(v, dtype=np.float64), requires_grad=True)
        return cls([t(w) for w in d["weights"]], t(d["cls_weight"]), t(d["cls_bias"]))


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_params(feature_dim: int, num_classes: int, rng: np.random.Generator, hidden: int = 32, layers: int = 2) -> ModelParams:
    """Glorot-uniform weights, zero bias."""
    widths = [feature_dim] + [hidden] * layers
    weights = []
    for fin, fout in zip(widths[:-1], widths[1:]):
        b = glorot_bound(fin, fout)
        weights.append(ag.Tensor(rng.uniform(-b, b, size=(fin, fout)), requires_grad=True))
    b = glorot_bound(hidden, num_classes)
    cls_w = ag.Tensor(rng.uniform(-b, b, size=(hidden, num_classes)), requires_grad=True)
    return ModelParams(weights, cls_w, ag.Tensor(np.zeros(num_classes), requires_grad=True))


class PreparedGraph:
    """Graph plus the cached propagation matrix and first aggregation."""

    __slots__ = ("graph", "adj", "agg_features")

    def __init__(self, g: Graph):
        self.graph = g
        self.adj = normalized_adjacency(g)
        self.agg_features = self.adj @ g.features

    @property
    def label(self):
        return self.graph.label

    @property
    def feature_dim(self):
        return self.graph.feature_dim


def prepare(graphs) -> list[PreparedGraph]:
    return [PreparedGraph(g) for g in graphs]


def forward(g, params: ModelParams) -> tuple[ag.Tensor, ag.Tensor, ag.Tensor]:
    """Node representations ``Z``, their mean ``pooled`` and class ``logits``.

    Layer l computes ``ReLU(A_hat @ H @ W_l)``.
    """
    pg = g if isinstance(g, PreparedGraph) else PreparedGraph(g)
    if pg.graph.feature_dim != params.feature_dim:
        raise ValueError(f"graph has {pg.graph.feature_dim} features, model expects {params.feature_dim}")
    h = ag.relu(ag.matmul(pg.agg_features, params.weights[0]))
    for w in params.weights[1:]:
        h = ag.relu(ag.matmul(ag.matmul(pg.adj, h), w))
    pooled = ag.mean_rows(h)
    logits = ag.add(ag.matmul(pooled, params.cls_weight), params.cls_bias)
    return h, pooled, logits


def predict(graphs, params: ModelParams) -> np.ndarray:
    """Argmax class per graph (ties go to the lowest index), no autograd."""
    W = [w.value for w in params.weights]
    out = np.empty(len(graphs), dtype=np.int64)
    for i, g in enumerate(graphs):
        pg = g if isinstance(g, PreparedGraph) else PreparedGraph(g)
        h = np.maximum(pg.agg_features @ W[0], 0.0)
        for w in W[1:]:
            h = np.maximum(pg.adj @ h @ w, 0.0)
        logits = h.mean(axis=0) @ params.cls_weight.value + params.cls_bias.value
        out[i] = int(np.argmax(logits))
    return out
