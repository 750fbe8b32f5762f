"""Graph data model, validation, JSONL serialization and adjacency helpers."""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from typing import IO, Iterable

import numpy as np

from . import kernels

ROLES = ("causal", "confounder", "irrelevant")
SPLITS = ("train", "test")
NOISE_KEYS = ("edges_deleted", "edges_added", "nodes_deleted", "nodes_added")


class GraphFormatError(ValueError):
    """Raised when a JSONL record cannot be turned into a valid graph."""


@dataclass(frozen=True)
class Segment:
    motif_kind: str
    node_ids: tuple[int, ...]
    role: str = "irrelevant"

    def remap(self, mapping) -> "Segment":
        ids = tuple(int(mapping[i]) for i in self.node_ids if mapping[i] >= 0)
        return Segment(self.motif_kind, ids, self.role)


@dataclass(frozen=True)
class Provenance:
    segments: tuple[Segment, ...] = ()
    noise: tuple[int, int, int, int] = (0, 0, 0, 0)
    seed: int | None = None

    @property
    def noise_dict(self) -> dict:
        return dict(zip(NOISE_KEYS, self.noise))

    def with_role(self, role: str) -> "Provenance":
        segs = tuple(Segment(s.motif_kind, s.node_ids, role) for s in self.segments)
        return Provenance(segs, self.noise, self.seed)

    def count(self, role: str) -> int:
        return sum(1 for s in self.segments if s.role == role)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph with dense node features.

    ``edges`` is an ``(E, 2)`` int array with ``u < v`` in each row, sorted
    lexicographically; use :func:`make_graph` to normalise arbitrary input.
    """

    node_count: int
    edges: np.ndarray
    features: np.ndarray
    label: int | None = None
    provenance: Provenance = field(default_factory=Provenance)

    @property
    def num_edges(self) -> int:
        return int(self.edges.shape[0])

    @property
    def feature_dim(self) -> int:
        return int(self.features.shape[1]) if self.features.ndim == 2 else 0

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def replace(self, **changes) -> "Graph":
        kw = dict(
            node_count=self.node_count,
            edges=self.edges,
            features=self.features,
            label=self.label,
            provenance=self.provenance,
        )
        kw.update(changes)
        return Graph(**kw)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.node_count == other.node_count
            and self.label == other.label
            and self.provenance == other.provenance
            and np.array_equal(self.edges, other.edges)
            and self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features)
        )

    __hash__ = None


def canonical_edges(edges: Iterable, node_count: int | None = None) -> np.ndarray:
    """Sort endpoints within each pair, drop duplicates, sort rows."""
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    arr = arr.reshape(-1, 2)
    arr = np.sort(arr, axis=1)
    arr = np.unique(arr, axis=0)
    return arr


def make_graph(node_count, edges, features, label=None, provenance=None) -> Graph:
    feats = np.asarray(features, dtype=np.float64)
    if feats.ndim == 1:
        feats = feats.reshape(node_count, -1) if node_count else feats.reshape(0, 1)
    return Graph(
        node_count=int(node_count),
        edges=canonical_edges(edges),
        features=feats,
        label=None if label is None else int(label),
        provenance=provenance if provenance is not None else Provenance(),
    )


@dataclass
class Dataset:
    graphs: list[Graph]
    split: str = "train"
    num_classes: int = 5
    master_seed: int = 0
    scenario: object = None

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self):
        return iter(self.graphs)

    def __getitem__(self, i):
        return self.graphs[i]

    @property
    def labels(self) -> np.ndarray:
        return np.array([g.label for g in self.graphs], dtype=np.int64)

    @property
    def feature_dim(self) -> int:
        return self.graphs[0].feature_dim if self.graphs else 0


# --------------------------------------------------------------------------
# validation
# --------------------------------------------------------------------------

def validate(g: Graph, num_classes: int | None = None) -> list[str]:
    """Return every violated invariant of ``g``; an empty list means ok."""
    problems: list[str] = []
    n = g.node_count
    if n < 0:
        problems.append("negative node count")
    edges = np.asarray(g.edges)
    if edges.size:
        if edges.ndim != 2 or edges.shape[1] != 2:
            problems.append("edges must be pairs")
        else:
            if np.any(edges < 0) or np.any(edges >= n):
                problems.append("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                problems.append("self-loop")
            canon = np.sort(edges, axis=1)
            if len(np.unique(canon, axis=0)) != len(canon):
                problems.append("duplicate edge")
    feats = np.asarray(g.features)
    if feats.ndim != 2:
        problems.append("features must be a matrix")
    elif feats.shape[0] != n:
        problems.append(f"features has {feats.shape[0]} rows, expected {n}")
    elif not np.all(np.isfinite(feats)):
        problems.append("non-finite feature value")
    if g.label is not None and num_classes is not None and not 0 <= g.label < num_classes:
        problems.append("label out of range")
    for seg in g.provenance.segments:
        if any(i < 0 or i >= n for i in seg.node_ids):
            problems.append(f"provenance segment {seg.motif_kind} has node out of range")
        if seg.role not in ROLES:
            problems.append(f"unknown role {seg.role!r}")
    if any(c < 0 for c in g.provenance.noise):
        problems.append("negative noise count")
    return problems


def normalized_adjacency(g: Graph) -> np.ndarray:
    """Dense ``D^-1/2 (A + I) D^-1/2`` for graph ``g``."""
    return kernels.normalized_adjacency(g.node_count, np.ascontiguousarray(g.edges, dtype=np.int64))


# --------------------------------------------------------------------------
# JSONL
# --------------------------------------------------------------------------

def _float_token(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite feature values cannot be serialized")
    return format(x, ".17g")


def graph_to_json(g: Graph, gid: int) -> str:
    prov = g.provenance
    segs = ",".join(
        '{"motif_kind":%s,"node_ids":[%s],"role":%s}'
        % (json.dumps(s.motif_kind), ",".join(map(str, s.node_ids)), json.dumps(s.role))
        for s in prov.segments
    )
    noise = ",".join(f'"{k}":{v}' for k, v in zip(NOISE_KEYS, prov.noise))
    seed = "" if prov.seed is None else f',"seed":{int(prov.seed)}'
    edges = ",".join(f"[{int(u)},{int(v)}]" for u, v in g.edges)
    feats = ",".join("[" + ",".join(_float_token(x) for x in row) + "]" for row in g.features)
    label = "null" if g.label is None else str(int(g.label))
    return (
        f'{{"id":{int(gid)},"label":{label},"num_nodes":{g.node_count},'
        f'"edges":[{edges}],"features":[{feats}],'
        f'"provenance":{{"segments":[{segs}],"noise":{{{noise}}}{seed}}}}}'
    )


def serialize(d: Dataset, sink: IO[str] | str) -> None:
    """Write one JSON object per graph; byte output is deterministic."""
    if isinstance(sink, str):
        with open(sink, "w", encoding="utf-8", newline="\n") as fh:
            serialize(d, fh)
        return
    for i, g in enumerate(d.graphs):
        sink.write(graph_to_json(g, i))
        sink.write("\n")


def dumps(d: Dataset) -> str:
    buf = io.StringIO()
    serialize(d, buf)
    return buf.getvalue()


_REQUIRED = ("id", "label", "num_nodes", "edges", "features", "provenance")


def graph_from_record(rec: dict) -> Graph:
    missing = [k for k in _REQUIRED if k not in rec]
    if missing:
        raise GraphFormatError(f"missing key(s): {', '.join(missing)}")
    n = rec["num_nodes"]
    if not isinstance(n, int):
        raise GraphFormatError("num_nodes must be an integer")
    prov_rec = rec["provenance"]
    try:
        segs = tuple(
            Segment(s["motif_kind"], tuple(int(i) for i in s["node_ids"]), s["role"])
            for s in prov_rec.get("segments", [])
        )
        noise_rec = prov_rec.get("noise", {})
        noise = tuple(int(noise_rec.get(k, 0)) for k in NOISE_KEYS)
    except (KeyError, TypeError, AttributeError) as exc:
        raise GraphFormatError(f"bad provenance: {exc}") from exc
    feats = np.asarray(rec["features"], dtype=np.float64)
    if feats.size == 0:
        feats = feats.reshape(n, 0) if n == 0 else feats
    edges = np.asarray(rec["edges"], dtype=np.int64).reshape(-1, 2)
    g = Graph(
        node_count=n,
        edges=edges,
        features=feats,
        label=rec["label"],
        provenance=Provenance(segs, noise, prov_rec.get("seed")),
    )
    problems = validate(g)
    if problems:
        raise GraphFormatError("; ".join(problems))
    return g.replace(edges=canonical_edges(edges))


def deserialize(source: IO[str] | str, split: str = "train", num_classes: int | None = None) -> Dataset:
    """Parse a JSONL stream; any bad line aborts the whole load."""
    if isinstance(source, str):
        with open(source, encoding="utf-8") as fh:
            return deserialize(fh, split=split, num_classes=num_classes)
    text = source.read()
    graphs: list[Graph] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"line {lineno}: {exc.msg}") from exc
        if not isinstance(rec, dict):
            raise GraphFormatError(f"line {lineno}: expected a JSON object")
        try:
            graphs.append(graph_from_record(rec))
        except (GraphFormatError, ValueError, TypeError) as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from exc
    labels = [g.label for g in graphs if g.label is not None]
    if num_classes is None:
        num_classes = max(labels) + 1 if labels else 0
    for i, g in enumerate(graphs):
        if g.label is None or not 0 <= g.label < num_classes:
            raise GraphFormatError(f"line {i + 1}: label out of range")
    return Dataset(graphs, split=split, num_classes=num_classes)
