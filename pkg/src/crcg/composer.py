"""Whole-graph assembly: motif connections, noise, confounders and scenarios."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from . import kernels
from .features import FeatureMethod, FeatureSpec
from .graph import Dataset, Graph, Provenance, Segment, canonical_edges
from .motifs import MotifKind, MotifParams, generate_motif, structural_minimum
from .rng import derive_seed, stream


class CompositionError(ValueError):
    pass


# --------------------------------------------------------------------------
# connections
# --------------------------------------------------------------------------

CONNECTION_KINDS = ("adjacent", "cross", "entangled", "containment")


@dataclass(frozen=True)
class Connection:
    kind: str = "adjacent"
    shared: int = 1
    edge_count: int = 2

    def __post_init__(self):
        if self.kind not in CONNECTION_KINDS:
            raise CompositionError(f"unknown connection kind {self.kind!r}")
        if self.kind == "cross" and self.shared < 1:
            raise CompositionError("cross connection needs shared >= 1")
        if self.kind == "entangled" and self.edge_count < 2:
            raise CompositionError("entangled connection needs edge_count >= 2")

    def __str__(self):
        if self.kind == "cross":
            return f"cross{{{self.shared}}}"
        if self.kind == "entangled":
            return f"entangled{{{self.edge_count}}}"
        return self.kind


ADJACENT = Connection("adjacent")
CROSS1 = Connection("cross", shared=1)
ENTANGLED2 = Connection("entangled", edge_count=2)
CONTAINMENT = Connection("containment")


def _merge(g1: Graph, g2: Graph, mapping: np.ndarray, n: int, extra_edges=()) -> Graph:
    """Union of g1 and g2 where g2's node t becomes ``mapping[t]``."""
    e2 = mapping[g2.edges] if g2.num_edges else np.zeros((0, 2), dtype=np.int64)
    parts = [g1.edges, e2]
    if len(extra_edges):
        parts.append(np.asarray(extra_edges, dtype=np.int64).reshape(-1, 2))
    edges = canonical_edges(np.concatenate(parts, axis=0))
    feats = np.zeros((n, g1.feature_dim))
    feats[: g1.node_count] = g1.features
    fresh = mapping >= g1.node_count
    feats[mapping[fresh]] = g2.features[fresh]
    segs = g1.provenance.segments + tuple(s.remap(mapping) for s in g2.provenance.segments)
    noise = tuple(a + b for a, b in zip(g1.provenance.noise, g2.provenance.noise))
    return Graph(n, edges, feats, g1.label, Provenance(segs, noise, g1.provenance.seed))


def connect(g1: Graph, g2: Graph, kind: Connection, rng: np.random.Generator) -> Graph:
    """Fuse two graphs; node ids of ``g1`` are kept, ``g2`` is remapped."""
    n1, n2 = g1.node_count, g2.node_count
    if g1.feature_dim != g2.feature_dim:
        raise CompositionError("feature widths differ")
    if n1 == 0 or n2 == 0:
        raise CompositionError("cannot connect an empty graph")
    if kind.kind == "adjacent":
        mapping = np.arange(n2) + n1
        u, v = int(rng.integers(n1)), int(rng.integers(n2)) + n1
        return _merge(g1, g2, mapping, n1 + n2, [(u, v)])
    if kind.kind == "cross":
        s = kind.shared
        if s > min(n1, n2):
            raise CompositionError(f"cross shares {s} nodes but the smaller part has {min(n1, n2)}")
        keep = rng.choice(n1, size=s, replace=False)
        merged = rng.choice(n2, size=s, replace=False)
        mapping = np.full(n2, -1, dtype=np.int64)
        mapping[merged] = keep
        rest = mapping < 0
        mapping[rest] = n1 + np.arange(int(rest.sum()))
        return _merge(g1, g2, mapping, n1 + n2 - s)
    if kind.kind == "entangled":
        k = kind.edge_count
        if k > n1 * n2:
            raise CompositionError(f"entangled needs {k} cross pairs, only {n1 * n2} exist")
        flat = rng.choice(n1 * n2, size=k, replace=False)
        pairs = np.stack([flat // n2, flat % n2 + n1], axis=1)
        return _merge(g1, g2, np.arange(n2) + n1, n1 + n2, pairs)
    # containment
    if n2 > n1:
        raise CompositionError("containment needs the inner graph to be no larger than the outer one")
    mapping = rng.permutation(n1)[:n2].astype(np.int64)
    out = _merge(g1, g2, mapping, n1)
    return out.replace(features=g1.features.copy())


def connect_either(g1: Graph, g2: Graph, kind: Connection, rng) -> Graph:
    """Like :func:`connect` but puts the smaller graph inside for containment."""
    if kind.kind == "containment" and g2.node_count > g1.node_count:
        return connect(g2, g1, kind, rng)
    return connect(g1, g2, kind, rng)


# --------------------------------------------------------------------------
# similarity edges (node-classification family)
# --------------------------------------------------------------------------

def edges_by_similarity(features, threshold: float, dims=None) -> np.ndarray:
    """Edges between rows whose cosine similarity exceeds ``threshold``.

    With ``dims`` only those feature columns are compared ("partially
    similar" edges).
    """
    X = np.asarray(features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise CompositionError("need at least two feature rows")
    if dims is not None:
        dims = list(dims)
        if not dims:
            raise CompositionError("dims must not be empty")
        if min(dims) < 0 or max(dims) >= X.shape[1]:
            raise CompositionError("dims index out of range")
        X = X[:, dims]
    return kernels.similarity_edges(np.ascontiguousarray(X), float(threshold))


def similarity_graph(spec: FeatureSpec, n: int, threshold: float, rng, dims=None) -> Graph:
    from .features import generate_features

    X = generate_features(spec, n, rng)
    return Graph(n, edges_by_similarity(X, threshold, dims), X)


# --------------------------------------------------------------------------
# noise
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NoiseConfig:
    edge_del: int = 0
    edge_add: int = 0
    node_del: int = 0
    node_add: int = 0


def _non_edges(n, edge_set, pool):
    pool = sorted(pool)
    return [(u, v) for i, u in enumerate(pool) for v in pool[i + 1 :] if (u, v) not in edge_set]


def inject_noise(g: Graph, cfg: NoiseConfig, rng: np.random.Generator, restrict_to=None) -> Graph:
    """Apply exactly the requested edge/node deletions and additions.

    Order: edge deletions, node deletions, edge additions, node additions.
    ``restrict_to`` limits every operation to that node set (plus the nodes
    added here); without it the whole graph is eligible.
    """
    pool = set(range(g.node_count)) if restrict_to is None else {int(i) for i in restrict_to}
    edges = [tuple(map(int, e)) for e in g.edges]
    eligible = [i for i, (u, v) in enumerate(edges) if u in pool and v in pool]
    if cfg.edge_del > len(eligible):
        raise CompositionError(f"cannot delete {cfg.edge_del} edges, only {len(eligible)} eligible")
    if cfg.node_del > 0 and cfg.node_del >= g.node_count:
        raise CompositionError("node deletions must leave at least one node")
    if cfg.node_del > len(pool):
        raise CompositionError(f"cannot delete {cfg.node_del} nodes, only {len(pool)} eligible")
    if min(cfg.edge_del, cfg.edge_add, cfg.node_del, cfg.node_add) < 0:
        raise CompositionError("noise counts must be non-negative")

    if cfg.edge_del:
        drop = set(rng.choice(eligible, size=cfg.edge_del, replace=False).tolist())
        edges = [e for i, e in enumerate(edges) if i not in drop]

    n = g.node_count
    feats = g.features
    segments = g.provenance.segments
    if cfg.node_del:
        gone = rng.choice(sorted(pool), size=cfg.node_del, replace=False)
        mapping = np.arange(n, dtype=np.int64)
        mapping[gone] = -1
        alive = mapping >= 0
        mapping[alive] = np.arange(int(alive.sum()))
        edges = [(int(mapping[u]), int(mapping[v])) for u, v in edges if mapping[u] >= 0 and mapping[v] >= 0]
        feats = feats[alive]
        segments = tuple(s.remap(mapping) for s in segments)
        pool = {int(mapping[i]) for i in pool if mapping[i] >= 0}
        n = int(alive.sum())

    if cfg.edge_add:
        present = set(edges)
        candidates = _non_edges(n, present, pool)
        if cfg.edge_add > len(candidates):
            raise CompositionError(f"cannot add {cfg.edge_add} edges, only {len(candidates)} free pairs")
        pick = rng.choice(len(candidates), size=cfg.edge_add, replace=False)
        edges += [candidates[i] for i in sorted(pick.tolist())]

    if cfg.node_add:
        if not pool:
            raise CompositionError("no node to attach added nodes to")
        dim = feats.shape[1]
        new_rows = []
        for _ in range(cfg.node_add):
            targets = sorted(pool)
            k = int(rng.integers(1, min(3, len(targets)) + 1))
            for t in rng.choice(targets, size=k, replace=False):
                edges.append((int(t), n))
            new_rows.append(rng.standard_normal(dim))
            pool.add(n)
            n += 1
        feats = np.vstack([feats] + [r[None, :] for r in new_rows])

    p = g.provenance
    noise = (
        p.noise[0] + cfg.edge_del,
        p.noise[1] + cfg.edge_add,
        p.noise[2] + cfg.node_del,
        p.noise[3] + cfg.node_add,
    )
    return Graph(n, canonical_edges(edges), feats, g.label, Provenance(segments, noise, p.seed))


# --------------------------------------------------------------------------
# generic composition instance
# --------------------------------------------------------------------------

CAUSAL_KINDS = tuple(MotifKind.from_index(i) for i in range(1, 6))
CONFOUNDER_KINDS = tuple(MotifKind.from_index(i) for i in range(6, 11))
IRRELEVANT_KINDS = tuple(MotifKind.from_index(i) for i in range(11, 26))

PARAM_MAPS = {
    "identity": lambda a: a,
    "increment": lambda a: a + 1,
    "double": lambda a: 2 * a,
}


def _label_class_of_m(m, a, size_range):
    return m - 1


def _label_class_of_m_and_a(m, a, size_range):
    # two size bins per causal kind
    lo, hi = size_range
    return 2 * (m - 1) + int(a > (lo + hi) / 2)


LABEL_MAPS = {
    "class_of_m": (_label_class_of_m, 5),
    "class_of_m_and_a": (_label_class_of_m_and_a, 10),
}


def _sized(kind: MotifKind, n: int, spec: FeatureSpec) -> MotifParams:
    return MotifParams(node_count=max(int(n), structural_minimum(kind)), feature_spec=spec)


@dataclass(frozen=True)
class CompositionInstance:
    """One dataset-composition recipe over method lists of motifs and connections."""

    causal_pool: tuple = CAUSAL_KINDS
    confounder_pool: tuple = CONFOUNDER_KINDS
    irrelevant_pool: tuple = IRRELEVANT_KINDS
    pair_prob: float = 0.8
    param_map: str = "increment"
    label_map: str = "class_of_m"
    connection_pool: tuple = (ADJACENT, CROSS1, ENTANGLED2, CONTAINMENT)
    size_range: tuple = (5, 8)
    feature_spec: FeatureSpec = FeatureSpec(FeatureMethod.NORMAL, 0.0, 1.0, 4)

    def __post_init__(self):
        object.__setattr__(self, "causal_pool", tuple(MotifKind(k) for k in self.causal_pool))
        object.__setattr__(self, "confounder_pool", tuple(MotifKind(k) for k in self.confounder_pool))
        object.__setattr__(self, "irrelevant_pool", tuple(MotifKind(k) for k in self.irrelevant_pool))
        if len(self.causal_pool) != 5 or len(self.confounder_pool) != 5:
            raise CompositionError("causal and confounder pools must have five kinds each")
        if set(self.causal_pool) & set(self.confounder_pool):
            raise CompositionError("causal and confounder pools must be disjoint")
        if not 0.0 <= self.pair_prob <= 1.0:
            raise CompositionError("pair_prob must lie in [0, 1]")
        if self.param_map not in PARAM_MAPS or self.label_map not in LABEL_MAPS:
            raise CompositionError("unknown param_map or label_map preset")

    @property
    def num_classes(self) -> int:
        return LABEL_MAPS[self.label_map][1]


def compose_sample(inst: CompositionInstance, rng: np.random.Generator) -> Graph:
    m = int(rng.integers(1, 6))
    if rng.random() < inst.pair_prob:
        k = m
    else:
        k = int(rng.choice([j for j in range(1, 6) if j != m]))
    lo, hi = inst.size_range
    a = int(rng.integers(lo, hi + 1))
    causal_kind = inst.causal_pool[m - 1]
    conf_kind = inst.confounder_pool[k - 1]
    g = generate_motif(causal_kind, _sized(causal_kind, a, inst.feature_spec), rng, role="causal")
    c = generate_motif(conf_kind, _sized(conf_kind, PARAM_MAPS[inst.param_map](a), inst.feature_spec), rng, role="confounder")
    pool = inst.connection_pool
    g = connect_either(g, c, pool[int(rng.integers(len(pool)))], rng)
    for _ in range(2):
        kind = inst.irrelevant_pool[int(rng.integers(len(inst.irrelevant_pool)))]
        size = int(rng.integers(lo, hi + 1))
        extra = generate_motif(kind, _sized(kind, size, inst.feature_spec), rng, role="irrelevant")
        g = connect_either(g, extra, pool[int(rng.integers(len(pool)))], rng)
    label_fn = LABEL_MAPS[inst.label_map][0]
    return g.replace(label=int(label_fn(m, a, inst.size_range)))


def compose_dataset(inst: CompositionInstance, n: int, master_seed: int, split: str = "train") -> Dataset:
    graphs = []
    for i in range(n):
        seed = derive_seed(master_seed, split, i)
        g = compose_sample(inst, stream(seed))
        graphs.append(g.replace(provenance=replace(g.provenance, seed=seed)))
    return Dataset(graphs, split=split, num_classes=inst.num_classes, master_seed=master_seed, scenario=inst)


# --------------------------------------------------------------------------
# scenarios
# --------------------------------------------------------------------------

VARIANTS = ("no_confounder", "probability", "size_scaled", "complexity")

# confounder feature std per prominence level; larger std = weaker spurious signal
STD_LEVELS = {
    "very_low": 4.0,
    "low": 2.0,
    "medium": 1.0,
    "high": 0.5,
    "very_high": 0.25,
    "extremely_high": 0.1,
}

DEFAULT_P = {"size_scaled": 0.5, "complexity": 0.5}

PROBABILITY_GRID = (0.05, 0.20, 0.40, 0.60, 0.80, 1.00)
SIZE_GRID = (1, 3, 8, 15, 20, 30)


@dataclass(frozen=True)
class ScenarioConfig:
    """One experimental regime plus dataset sizes and generator knobs.

    ``p`` is the train-split probability that the label's paired confounder is
    attached. Left unset it is 0.2, or 0.5 for ``size_scaled`` and
    ``complexity``, where the swept quantity is size or prominence. Causal kind j has
    node features with mean ``causal_means[j]`` and std ``base_std``; the
    closely spaced means keep the causal signal learnable but weaker than the
    confounder's. Confounder kind j carries node features with mean ``confounder_means[j]``; its std is
    ``confounder_std`` except under ``complexity``, where ``std_level`` decides.
    """

    variant: str = "probability"
    p: float | None = None
    noise_sets: int = 0
    multiplier: int = 1
    std_level: str = "medium"
    num_classes: int = 5
    n_train: int = 2000
    n_test: int = 500
    noise_edge_frac: float = 0.10
    noise_node_frac: float = 0.10
    size_range: tuple = (5, 8)
    irrelevant_size_range: tuple = (8, 12)
    feature_dim: int = 4
    base_mean: float = 1.0
    base_std: float = 1.0
    causal_means: tuple = (0.4, 0.7, 1.0, 1.3, 1.6)
    confounder_means: tuple = (-2.0, -1.0, 2.0, 3.0, 4.0)
    confounder_std: float = 1.0
    causal_kinds: tuple = CAUSAL_KINDS
    confounder_kinds: tuple = CONFOUNDER_KINDS
    irrelevant_kinds: tuple = IRRELEVANT_KINDS

    def __post_init__(self):
        if self.p is None:
            object.__setattr__(self, "p", DEFAULT_P.get(self.variant, 0.2))
        fix = lambda name: object.__setattr__(self, name, tuple(MotifKind(k) for k in getattr(self, name)))
        for name in ("causal_kinds", "confounder_kinds", "irrelevant_kinds"):
            fix(name)
        for name in ("size_range", "irrelevant_size_range", "causal_means", "confounder_means"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        problems = self.problems()
        if problems:
            raise CompositionError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if self.variant not in VARIANTS:
            out.append(f"variant must be one of {', '.join(VARIANTS)}")
        if not 0.0 <= self.p <= 1.0:
            out.append("p must lie in [0, 1]")
        if self.noise_sets < 0:
            out.append("noise_sets must be non-negative")
        if self.multiplier < 1:
            out.append("multiplier must be a positive integer")
        if self.std_level not in STD_LEVELS:
            out.append(f"std_level must be one of {', '.join(STD_LEVELS)}")
        if self.num_classes != 5:
            out.append("the label rules define exactly 5 classes")
        if self.n_train < 0 or self.n_test < 0:
            out.append("dataset sizes must be non-negative")
        if len(self.causal_kinds) != 5 or len(self.confounder_kinds) != 5:
            out.append("need five causal and five confounder kinds")
        elif set(self.causal_kinds) & set(self.confounder_kinds):
            out.append("causal and confounder kinds must be disjoint")
        for name in ("causal_means", "confounder_means"):
            if len(getattr(self, name)) != 5:
                out.append(f"{name} needs five entries")
        if not self.irrelevant_kinds:
            out.append("irrelevant_kinds must not be empty")
        return out

    @property
    def attach_count(self) -> int:
        return self.multiplier if self.variant == "size_scaled" else 1

    def confounder_spec(self, j: int) -> FeatureSpec:
        std = STD_LEVELS[self.std_level] if self.variant == "complexity" else self.confounder_std
        return FeatureSpec(FeatureMethod.NORMAL, self.confounder_means[j], std, self.feature_dim)

    @property
    def base_spec(self) -> FeatureSpec:
        return FeatureSpec(FeatureMethod.NORMAL, self.base_mean, self.base_std, self.feature_dim)

    def causal_spec(self, j: int) -> FeatureSpec:
        return FeatureSpec(FeatureMethod.NORMAL, self.causal_means[j], self.base_std, self.feature_dim)

    def spec_for(self, kind: MotifKind) -> FeatureSpec:
        if kind in self.causal_kinds:
            return self.causal_spec(self.causal_kinds.index(kind))
        if kind in self.confounder_kinds:
            return self.confounder_spec(self.confounder_kinds.index(kind))
        return self.base_spec


def _motif(cfg: ScenarioConfig, kind, size_range, rng, role):
    lo, hi = size_range
    n = int(rng.integers(lo, hi + 1))
    return generate_motif(kind, _sized(kind, n, cfg.spec_for(kind)), rng, role=role)


def causal_graph(cfg: ScenarioConfig, y: int, rng) -> Graph:
    """Label-defining structure for class ``y`` (motif indices are 1-based)."""
    mk = lambda i: _motif(cfg, cfg.causal_kinds[i - 1], cfg.size_range, rng, "causal")
    if y == 0:
        g = connect(mk(1), mk(2), ADJACENT, rng)
    elif y == 1:
        g = connect(connect(mk(1), mk(3), ADJACENT, rng), mk(5), CROSS1, rng)
    elif y == 2:
        g = connect(connect(mk(1), mk(2), ENTANGLED2, rng), mk(5), CROSS1, rng)
    elif y == 3:
        g = mk(5)
    elif y == 4:
        g = connect(mk(3), mk(4), CROSS1, rng)
    else:
        raise CompositionError(f"no label rule for class {y}")
    return g.replace(label=y)


def paired_confounder_present(g: Graph, cfg: ScenarioConfig) -> bool:
    want = cfg.confounder_kinds[g.label].value
    return any(s.role == "confounder" and s.motif_kind == want for s in g.provenance.segments)


def _causal_index(g: Graph, cfg: ScenarioConfig) -> int:
    causal = [s for s in g.provenance.segments if s.role == "causal"]
    if len(causal) != 1:
        raise CompositionError(f"expected exactly one causal segment, found {len(causal)}")
    kind = MotifKind(causal[0].motif_kind)
    if kind not in cfg.causal_kinds:
        raise CompositionError(f"{kind.value} is not a causal kind")
    return cfg.causal_kinds.index(kind) + 1


def attach_confounder(g: Graph, cfg: ScenarioConfig, split: str, rng, causal_index: int | None = None) -> Graph:
    """Attach the confounder content of one sample.

    ``causal_index`` (1..5) names the causal factor the confounder depends on;
    by default it is read from the graph's single causal segment. Train split:
    with probability ``cfg.p`` the paired confounder kind is attached,
    otherwise an irrelevant kind of matched size. Test split: kinds are drawn
    uniformly from the confounder and irrelevant pools together.
    """
    m = _causal_index(g, cfg) if causal_index is None else int(causal_index)
    if not 1 <= m <= 5:
        raise CompositionError("causal index must lie in 1..5")
    count = cfg.attach_count
    if split == "train":
        if rng.random() < cfg.p:
            kinds = [cfg.confounder_kinds[m - 1]] * count
        else:
            kinds = [cfg.irrelevant_kinds[int(rng.integers(len(cfg.irrelevant_kinds)))] for _ in range(count)]
    elif split == "test":
        pool = cfg.confounder_kinds + cfg.irrelevant_kinds
        kinds = [pool[int(rng.integers(len(pool)))] for _ in range(count)]
    else:
        raise CompositionError(f"unknown split {split!r}")
    for kind in kinds:
        role = "confounder" if kind in cfg.confounder_kinds else "irrelevant"
        g = connect(g, _motif(cfg, kind, cfg.size_range, rng, role), ADJACENT, rng)
    return g


NOISE_CONNECTIONS = (ADJACENT, CROSS1, ENTANGLED2)


def _noise_counts(total: int, frac: float) -> tuple[int, int]:
    k = int(round(frac * total))
    return k // 2, k - k // 2


def add_irrelevant_noise(g: Graph, cfg: ScenarioConfig, rng) -> Graph:
    """Edge/node noise on irrelevant content only; causal structure is untouched."""
    irr = sorted({i for s in g.provenance.segments if s.role == "irrelevant" for i in s.node_ids})
    other = {i for s in g.provenance.segments if s.role != "irrelevant" for i in s.node_ids}
    pool = [i for i in irr if i not in other]
    if not pool:
        return g
    pset = set(pool)
    n_edges = sum(1 for u, v in g.edges if u in pset and v in pset)
    e_del, e_add = _noise_counts(n_edges, cfg.noise_edge_frac)
    n_del, n_add = _noise_counts(len(pool), cfg.noise_node_frac)
    n_del = min(n_del, len(pool) - 1)
    remaining = len(pool) - n_del
    # guaranteed free pairs after the deletions
    e_add = min(e_add, max(0, remaining * (remaining - 1) // 2 - (n_edges - e_del)))
    return inject_noise(g, NoiseConfig(e_del, e_add, n_del, n_add), rng, restrict_to=pool)


def _build(cfg: ScenarioConfig, split: str, index: int, seed: int) -> Graph:
    rng = stream(seed)
    y = index % cfg.num_classes
    g = causal_graph(cfg, y, rng)
    if cfg.variant == "no_confounder":
        for _ in range(cfg.noise_sets):
            kind = cfg.irrelevant_kinds[int(rng.integers(len(cfg.irrelevant_kinds)))]
            extra = _motif(cfg, kind, cfg.irrelevant_size_range, rng, "irrelevant")
            g = connect(g, extra, NOISE_CONNECTIONS[int(rng.integers(len(NOISE_CONNECTIONS)))], rng)
    else:
        g = attach_confounder(g, cfg, split, rng, causal_index=y + 1)
    g = add_irrelevant_noise(g, cfg, rng)
    return g.replace(provenance=replace(g.provenance, seed=seed))


def generate_sample(cfg: ScenarioConfig, split: str, index: int, master_seed: int) -> Graph:
    return _build(cfg, split, index, derive_seed(master_seed, split, index))


def _generate_split(cfg, split, n, master_seed, workers):
    job = lambda i: generate_sample(cfg, split, i, master_seed)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            graphs = list(ex.map(job, range(n)))
    else:
        graphs = [job(i) for i in range(n)]
    return Dataset(graphs, split=split, num_classes=cfg.num_classes, master_seed=master_seed, scenario=cfg)


def generate_scenario(cfg: ScenarioConfig, master_seed: int, workers: int = 1) -> tuple[Dataset, Dataset]:
    """Train and test datasets; output is independent of ``workers``."""
    train = _generate_split(cfg, "train", cfg.n_train, master_seed, workers)
    test = _generate_split(cfg, "test", cfg.n_test, master_seed, workers)
    return train, test


def replay_sample(cfg: ScenarioConfig, g: Graph, split: str, index: int) -> Graph:
    """Regenerate one sample from the seed recorded in its provenance."""
    return _build(cfg, split, index, g.provenance.seed)
