"""The 25 motif shapes.

Kinds 1-10 are the branched family, 11-25 the unbranched one; the 1-based
position in :class:`MotifKind` is the "method index" used by the composer.
Every builder returns exactly ``node_count`` nodes and a connected edge set.
Shapes with a fixed core (diamond, hourglass, single triangle, ...) reach the
requested size through a pendant path hung off node 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .features import FeatureSpec, generate_features
from .graph import Graph, Provenance, Segment, canonical_edges


class MotifKind(str, Enum):
    STAR_SHAPED = "star_shaped"
    PATH_SHAPED = "path_shaped"
    FAN_SHAPED = "fan_shaped"
    ACUTE_POLYGON = "acute_polygon"
    RANDOM_BIPARTITE = "random_bipartite"
    TREE_SHAPED = "tree_shaped"
    TRIDENT_SHAPED = "trident_shaped"
    CONE_CONNECTED = "cone_connected"
    CHAIN_WITH_BYPASS = "chain_with_bypass"
    PARTIAL_POLYGON = "partial_polygon"
    COMPLETE = "complete"
    CYCLE_GRAPH = "cycle_graph"
    DOUBLE_CYCLE = "double_cycle"
    TRIANGLE_CHAIN = "triangle_chain"
    RING_SHAPED = "ring_shaped"
    DIAMOND = "diamond"
    H_SHAPED = "h_shaped"
    WHEEL = "wheel"
    HOURGLASS = "hourglass"
    DCD_TRIDENT = "dcd_trident"
    CIRCULAR_CROSS = "circular_cross"
    LADDER = "ladder"
    STAR_GRAPH = "star_graph"
    SINGLE_TRIANGLE = "single_triangle"
    CROSS_ARM = "cross_arm"

    @property
    def index(self) -> int:
        return _INDEX[self]

    @classmethod
    def from_index(cls, i: int) -> "MotifKind":
        return _KINDS[i - 1]

    @property
    def branched(self) -> bool:
        return self.index <= 10


_KINDS = list(MotifKind)
_INDEX = {k: i + 1 for i, k in enumerate(_KINDS)}


class MotifParamError(ValueError):
    pass


@dataclass(frozen=True)
class MotifParams:
    node_count: int
    branch_count: int = 3
    extra: dict = field(default_factory=dict, hash=False)
    feature_spec: FeatureSpec = field(default_factory=FeatureSpec)


def structural_minimum(kind: MotifKind, branch_count: int = 3) -> int:
    if kind is MotifKind.STAR_SHAPED:
        return branch_count + 1
    if kind is MotifKind.TRIDENT_SHAPED:
        return branch_count + 2
    return _MINIMUM[kind]


_MINIMUM = {
    MotifKind.PATH_SHAPED: 2,
    MotifKind.FAN_SHAPED: 3,
    MotifKind.ACUTE_POLYGON: 4,
    MotifKind.RANDOM_BIPARTITE: 2,
    MotifKind.TREE_SHAPED: 3,
    MotifKind.CONE_CONNECTED: 5,
    MotifKind.CHAIN_WITH_BYPASS: 4,
    MotifKind.PARTIAL_POLYGON: 4,
    MotifKind.COMPLETE: 2,
    MotifKind.CYCLE_GRAPH: 3,
    MotifKind.DOUBLE_CYCLE: 5,
    MotifKind.TRIANGLE_CHAIN: 3,
    MotifKind.RING_SHAPED: 4,
    MotifKind.DIAMOND: 4,
    MotifKind.H_SHAPED: 6,
    MotifKind.WHEEL: 4,
    MotifKind.HOURGLASS: 5,
    MotifKind.DCD_TRIDENT: 8,
    MotifKind.CIRCULAR_CROSS: 5,
    MotifKind.LADDER: 4,
    MotifKind.STAR_GRAPH: 2,
    MotifKind.SINGLE_TRIANGLE: 3,
    MotifKind.CROSS_ARM: 5,
}


# --------------------------------------------------------------------------
# small edge-list helpers
# --------------------------------------------------------------------------

def _path(nodes):
    return [(nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1)]


def _cycle(nodes):
    return _path(nodes) + [(nodes[-1], nodes[0])]


def _split_even(total, parts):
    """Lengths of ``parts`` pieces summing to ``total``, longest first."""
    base, rem = divmod(total, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _arms(hub, first, lengths):
    """Paths hanging off ``hub``; node ids allocated from ``first``."""
    edges, nxt = [], first
    for length in lengths:
        prev = hub
        for _ in range(length):
            edges.append((prev, nxt))
            prev = nxt
            nxt += 1
    return edges, nxt


def _pad(edges, core_size, n, anchor=0):
    """Pendant path from ``anchor`` through nodes core_size..n-1."""
    chain = [anchor] + list(range(core_size, n))
    return edges + _path(chain) if len(chain) > 1 else edges


# --------------------------------------------------------------------------
# builders: (n, branch_count, extra, rng) -> edge list
# --------------------------------------------------------------------------

def _star_shaped(n, b, extra, rng):
    edges, _ = _arms(0, 1, _split_even(n - 1, b))
    return edges


def _path_shaped(n, b, extra, rng):
    return _path(list(range(n)))


def _fan_shaped(n, b, extra, rng):
    rim = list(range(1, n))
    return _path(rim) + [(0, v) for v in rim]


def _acute_polygon(n, b, extra, rng):
    return _cycle(list(range(n))) + [(0, 2)]


def _random_bipartite(n, b, extra, rng):
    left = list(range((n + 1) // 2))
    right = list(range((n + 1) // 2, n))
    p = float(extra.get("p", 0.5))
    mask = rng.random((len(left), len(right))) < p
    edges = [(left[i], right[j]) for i, j in zip(*np.nonzero(mask))]
    return _repair_connected(n, edges, left, right)


def _repair_connected(n, edges, left, right):
    """Add left/right edges until the bipartite graph is connected."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edges:
        parent[find(u)] = find(v)
    edges = list(edges)
    # spanning matching first, then bridge the remaining components
    for i, u in enumerate(left):
        v = right[min(i, len(right) - 1)] if right else None
        if v is not None and find(u) != find(v):
            edges.append((u, v))
            parent[find(u)] = find(v)
    for i in range(1, len(right)):
        u = left[0]
        v = right[i]
        if find(u) != find(v):
            edges.append((u, v))
            parent[find(u)] = find(v)
    return edges


def _tree_shaped(n, b, extra, rng):
    arity = max(2, int(extra.get("arity", b)))
    return [((t - 1) // arity, t) for t in range(1, n)]


def _trident_shaped(n, b, extra, rng):
    # handle 0-1, junction at 1, b prongs sharing the remaining n-2 nodes
    edges, _ = _arms(1, 2, _split_even(n - 2, b))
    return [(0, 1)] + edges


def _cone_connected(n, b, extra, rng):
    base = list(range(2, n))
    apex, center = 0, 1
    return _cycle(base) + [(center, v) for v in base] + [(apex, v) for v in base] + [(apex, center)]


def _chain_with_bypass(n, b, extra, rng):
    return _path(list(range(n))) + [(0, n - 2)]


def _partial_polygon(n, b, extra, rng):
    ring = list(range(n - 1))
    edges = _path(ring)  # cycle with the closing edge removed
    return edges + [((n - 1) // 2, n - 1)]


def _complete(n, b, extra, rng):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def _cycle_graph(n, b, extra, rng):
    return _cycle(list(range(n)))


def _double_cycle(n, b, extra, rng):
    a = (n + 2) // 2
    c = n + 1 - a
    first = list(range(a))
    second = [0] + list(range(a, n))
    assert len(second) == c
    return _cycle(first) + _cycle(second)


def _triangle_chain(n, b, extra, rng):
    return [(t, t + 1) for t in range(n - 1)] + [(t, t + 2) for t in range(n - 2)]


def _ring_shaped(n, b, extra, rng):
    k = n // 2
    edges = [(2 * i, 2 * i + 1) for i in range(k)]
    edges += [(2 * i + 1, 2 * ((i + 1) % k)) for i in range(k)]
    return _pad(edges, 2 * k, n)


def _diamond(n, b, extra, rng):
    core = [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)]
    return _pad(core, 4, n)


def _h_shaped(n, b, extra, rng):
    L = n // 2
    left = list(range(L))
    right = list(range(L, 2 * L))
    mid = (L - 1) // 2
    edges = _path(left) + _path(right) + [(left[mid], right[mid])]
    return _pad(edges, 2 * L, n)


def _wheel(n, b, extra, rng):
    rim = list(range(1, n))
    return _cycle(rim) + [(0, v) for v in rim]


def _hourglass(n, b, extra, rng):
    core = [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]
    return _pad(core, 5, n)


def _dcd_trident(n, b, extra, rng):
    c = n - 6
    spine = list(range(c))
    tips = list(range(c, n))
    ends = [spine[0]] * 3 + [spine[-1]] * 3
    return _path(spine) + list(zip(ends, tips))


def _circular_cross(n, b, extra, rng):
    h = n // 2
    q = max(1, n // 4)
    return _cycle(list(range(n))) + [(0, h), (q, q + h)]


def _ladder(n, b, extra, rng):
    k = n // 2
    left = list(range(k))
    right = list(range(k, 2 * k))
    edges = _path(left) + _path(right) + list(zip(left, right))
    return _pad(edges, 2 * k, n)


def _star_graph(n, b, extra, rng):
    return [(0, v) for v in range(1, n)]


def _single_triangle(n, b, extra, rng):
    return _pad([(0, 1), (1, 2), (0, 2)], 3, n)


def _cross_arm(n, b, extra, rng):
    edges, _ = _arms(0, 1, _split_even(n - 1, 4))
    return edges


_BUILDERS = {
    MotifKind.STAR_SHAPED: _star_shaped,
    MotifKind.PATH_SHAPED: _path_shaped,
    MotifKind.FAN_SHAPED: _fan_shaped,
    MotifKind.ACUTE_POLYGON: _acute_polygon,
    MotifKind.RANDOM_BIPARTITE: _random_bipartite,
    MotifKind.TREE_SHAPED: _tree_shaped,
    MotifKind.TRIDENT_SHAPED: _trident_shaped,
    MotifKind.CONE_CONNECTED: _cone_connected,
    MotifKind.CHAIN_WITH_BYPASS: _chain_with_bypass,
    MotifKind.PARTIAL_POLYGON: _partial_polygon,
    MotifKind.COMPLETE: _complete,
    MotifKind.CYCLE_GRAPH: _cycle_graph,
    MotifKind.DOUBLE_CYCLE: _double_cycle,
    MotifKind.TRIANGLE_CHAIN: _triangle_chain,
    MotifKind.RING_SHAPED: _ring_shaped,
    MotifKind.DIAMOND: _diamond,
    MotifKind.H_SHAPED: _h_shaped,
    MotifKind.WHEEL: _wheel,
    MotifKind.HOURGLASS: _hourglass,
    MotifKind.DCD_TRIDENT: _dcd_trident,
    MotifKind.CIRCULAR_CROSS: _circular_cross,
    MotifKind.LADDER: _ladder,
    MotifKind.STAR_GRAPH: _star_graph,
    MotifKind.SINGLE_TRIANGLE: _single_triangle,
    MotifKind.CROSS_ARM: _cross_arm,
}


def motif_edges(kind: MotifKind, node_count: int, branch_count: int = 3, extra=None, rng=None) -> np.ndarray:
    kind = MotifKind(kind)
    if branch_count < 1:
        raise MotifParamError("branch_count must be positive")
    minimum = structural_minimum(kind, branch_count)
    if node_count < minimum:
        raise MotifParamError(f"{kind.value} needs node_count >= {minimum}, got {node_count}")
    if rng is None:
        rng = np.random.default_rng(0)
    edges = _BUILDERS[kind](node_count, branch_count, extra or {}, rng)
    return canonical_edges(edges)


def generate_motif(kind: MotifKind, params: MotifParams, rng: np.random.Generator, role: str = "irrelevant") -> Graph:
    """Build one motif with features; provenance holds a single segment."""
    kind = MotifKind(kind)
    n = params.node_count
    edges = motif_edges(kind, n, params.branch_count, params.extra, rng)
    feats = generate_features(params.feature_spec, n, rng)
    prov = Provenance((Segment(kind.value, tuple(range(n)), role),))
    return Graph(node_count=n, edges=edges, features=feats, provenance=prov)
