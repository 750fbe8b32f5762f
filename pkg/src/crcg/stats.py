"""Run aggregation, baseline deltas, the Friedman test and chi-square tails."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


class StatsError(ValueError):
    pass


@dataclass(frozen=True)
class RunResult:
    method: str
    scenario: str
    seed: int
    accuracy: float
    cpu_seconds: float

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise StatsError(f"accuracy {self.accuracy} outside [0, 1]")
        if self.cpu_seconds < 0:
            raise StatsError("cpu_seconds must be non-negative")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunResult":
        try:
            return cls(str(d["method"]), str(d["scenario"]), int(d["seed"]), float(d["accuracy"]), float(d["cpu_seconds"]))
        except KeyError as exc:
            raise StatsError(f"run result missing key: {exc.args[0]}") from None


def load_results(path) -> list[RunResult]:
    """RunResults from a JSON file holding one object or a list of objects."""
    with open(path) as fh:
        data = json.load(fh)
    items = data if isinstance(data, list) else [data]
    return [RunResult.from_dict(d) for d in items]


@dataclass(frozen=True)
class Cell:
    mean: float
    std: float
    n: int
    delta: float
    cpu_mean: float


@dataclass
class ComparisonTable:
    baseline: str
    methods: list[str]
    scenarios: list[str]
    cells: dict  # (method, scenario) -> Cell

    def cell(self, method: str, scenario: str) -> Cell:
        return self.cells[(method, scenario)]

    def rows(self) -> list[dict]:
        out = []
        for m in self.methods:
            for s in self.scenarios:
                c = self.cells.get((m, s))
                if c is not None:
                    out.append(dict(method=m, scenario=s, mean=c.mean, std=c.std, n=c.n, delta=c.delta, cpu_mean=c.cpu_mean))
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["method", "scenario", "mean", "std", "n", "delta", "cpu_mean"], lineterminator="\n")
        w.writeheader()
        for row in self.rows():
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()

    def to_text(self, scale: float = 100.0, digits: int = 2) -> str:
        """Methods as rows, scenarios as columns; ``mean±std (+delta)``."""
        header = ["method", *self.scenarios]
        body = []
        for m in self.methods:
            row = [m]
            for s in self.scenarios:
                c = self.cells.get((m, s))
                if c is None:
                    row.append("-")
                    continue
                text = f"{c.mean * scale:.{digits}f}±{c.std * scale:.{digits}f}"
                if m != self.baseline:
                    text += f" ({format_delta(c.delta * scale, digits)})"
                row.append(text)
            body.append(row)
        widths = [max(len(r[i]) for r in [header, *body]) for i in range(len(header))]
        fmt = lambda r: "  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip()
        return "\n".join([fmt(header), fmt(["-" * w for w in widths]), *map(fmt, body)]) + "\n"


def format_delta(d: float, digits: int = 2) -> str:
    if d > 0:
        return f"+{d:.{digits}f}"
    if d < 0:
        return f"−{-d:.{digits}f}"
    return f"{0.0:.{digits}f}"


def mean_std(values) -> tuple[float, float]:
    """Sample mean and sample standard deviation (n-1); std is 0 for one value."""
    a = np.asarray(values, dtype=np.float64)
    if a.size == 0:
        raise StatsError("no values")
    return float(a.mean()), float(a.std(ddof=1)) if a.size > 1 else 0.0


def summarize(results, baseline: str) -> ComparisonTable:
    """Mean and std per (method, scenario) plus the delta against ``baseline``."""
    results = list(results)
    groups: dict = {}
    for r in results:
        groups.setdefault((r.method, r.scenario), []).append(r)
    methods = list(dict.fromkeys(r.method for r in results))
    scenarios = list(dict.fromkeys(r.scenario for r in results))
    if baseline not in methods:
        raise StatsError(f"missing baseline: {baseline}")
    stats = {k: (*mean_std([r.accuracy for r in v]), len(v), float(np.mean([r.cpu_seconds for r in v]))) for k, v in groups.items()}
    cells = {}
    for (m, s), (mu, sd, n, cpu) in stats.items():
        if (baseline, s) not in stats:
            raise StatsError(f"missing baseline: {baseline} for scenario {s}")
        delta = 0.0 if m == baseline else mu - stats[(baseline, s)][0]
        cells[(m, s)] = Cell(mu, sd, n, delta, cpu)
    methods.sort(key=lambda m: m != baseline)
    return ComparisonTable(baseline, methods, scenarios, cells)


def cpu_overhead(results, method: str, baseline: str) -> float:
    """Total CPU of ``method`` over total CPU of ``baseline`` on shared (scenario, seed) pairs."""
    by = {(r.method, r.scenario, r.seed): r.cpu_seconds for r in results}
    keys = [(s, sd) for (m, s, sd) in by if m == baseline and (method, s, sd) in by]
    if not keys:
        raise StatsError("no paired runs")
    return sum(by[(method, s, sd)] for s, sd in keys) / sum(by[(baseline, s, sd)] for s, sd in keys)


# --------------------------------------------------------------------------
# Friedman test
# --------------------------------------------------------------------------

def average_ranks(row) -> np.ndarray:
    """Ranks 1..k, highest value ranked 1, ties sharing their average rank."""
    v = np.asarray(row, dtype=np.float64)
    order = np.argsort(-v, kind="stable")
    ranks = np.empty(v.size)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def friedman(matrix) -> tuple[float, int, float]:
    """Friedman chi-square for ``k`` methods (rows) over ``n`` blocks (columns).

    Returns ``(statistic, df, p_value)`` with ``df = k - 1``.
    """
    rows = [list(r) for r in matrix]
    if len({len(r) for r in rows}) > 1:
        raise StatsError("ragged matrix: every method needs one value per block")
    k = len(rows)
    n = len(rows[0]) if rows else 0
    if k < 2 or n < 2:
        raise StatsError("need at least 2 methods and 2 blocks")
    A = np.asarray(rows, dtype=np.float64)
    ranks = np.stack([average_ranks(A[:, b]) for b in range(n)], axis=1)
    R = ranks.sum(axis=1)
    stat = 12.0 / (n * k * (k + 1)) * float(R @ R) - 3.0 * n * (k + 1)
    if abs(stat) < 1e-12:  # full ties leave rounding residue
        stat = 0.0
    return stat, k - 1, chi_square_sf(stat, k - 1)


def friedman_csv(stat: float, df: int, p: float) -> str:
    return f"statistic,df,p_value\n{stat!r},{df},{p!r}\n"


# --------------------------------------------------------------------------
# chi-square survival function
# --------------------------------------------------------------------------

def _lower_series(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) by its power series."""
    term = 1.0 / a
    acc = term
    for k in range(1, _MAX_ITER):
        term *= x / (a + k)
        acc += term
        if abs(term) < abs(acc) * _EPS:
            break
    return acc * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _upper_fraction(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) by Lentz's continued fraction."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = _TINY if abs(d) < _TINY else d
        c = b + an / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def chi_square_sf(x: float, df: float) -> float:
    """P(X > x) for a chi-square variable with ``df`` degrees of freedom."""
    if df <= 0:
        raise StatsError("df must be positive")
    if x <= 0:
        return 1.0
    a, h = df / 2.0, x / 2.0
    if x < df + 1:
        return min(1.0, max(0.0, 1.0 - _lower_series(a, h)))
    return min(1.0, max(0.0, _upper_fraction(a, h)))
