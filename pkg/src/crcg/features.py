"""Node-feature generators: 15 distribution-based and 10 sequence-based methods.

Distribution methods draw raw variates from uniforms with explicit
transforms (inverse CDF where it has a closed form, Box-Muller, Marsaglia-
Tsang, gamma ratios, Poisson-gamma mixing) and then move them to the
requested location/scale. When the raw law has finite variance the raw
variates are standardised with its *theoretical* mean and std, so the output
has exactly the requested mean and std in expectation. Laws without a
variance (Cauchy, Pareto with shape <= 2) are shifted so their median lands on
``mean`` and scaled by ``std``.

Sequence methods are deterministic; the t-th node (t = 0, 1, ...) gets the
t-th term broadcast across every feature dimension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import integrate, special


class FeatureMethod(str, Enum):
    NORMAL = "normal"
    UNIFORM = "uniform"
    EXPONENTIAL = "exponential"
    LOG_NORMAL = "log_normal"
    GAMMA = "gamma"
    BETA = "beta"
    WEIBULL = "weibull"
    LAPLACE = "laplace"
    LOGISTIC = "logistic"
    RAYLEIGH = "rayleigh"
    PARETO = "pareto"
    CAUCHY = "cauchy"
    NEGATIVE_BINOMIAL = "negative_binomial"
    GUMBEL = "gumbel"
    GOMPERTZ = "gompertz"
    ARITHMETIC = "arithmetic"
    GEOMETRIC = "geometric"
    FIBONACCI = "fibonacci"
    SQUARE = "square"
    CUBIC = "cubic"
    PRIME = "prime"
    TRIANGULAR = "triangular"
    RECTANGULAR = "rectangular"
    BINOMIAL_COEFFICIENT = "binomial_coefficient"
    HAMILTONIAN = "hamiltonian"

    @property
    def is_sequence(self) -> bool:
        return self in SEQUENCE_METHODS


DISTRIBUTION_METHODS = tuple(list(FeatureMethod)[:15])
SEQUENCE_METHODS = tuple(list(FeatureMethod)[15:])

# default shape parameters of the raw laws
DEFAULT_SHAPES = {
    FeatureMethod.LOG_NORMAL: {"sigma": 0.5},
    FeatureMethod.GAMMA: {"shape": 2.0},
    FeatureMethod.BETA: {"a": 2.0, "b": 5.0},
    FeatureMethod.WEIBULL: {"shape": 1.5},
    FeatureMethod.PARETO: {"shape": 3.0},
    FeatureMethod.NEGATIVE_BINOMIAL: {"r": 5.0, "p": 0.5},
    FeatureMethod.GOMPERTZ: {"eta": 1.0, "b": 1.0},
}

DEFAULT_SEQ = {
    FeatureMethod.ARITHMETIC: {"start": 1.0, "step": 1.0},
    FeatureMethod.GEOMETRIC: {"start": 1.0, "ratio": 2.0},
}


class FeatureParamError(ValueError):
    pass


@dataclass(frozen=True)
class FeatureSpec:
    """Recipe for a block of node features.

    ``params`` carries the shape parameters of distribution methods (e.g.
    ``{"shape": 3.0}`` for Pareto) or the sequence parameters (``start``,
    ``step``, ``ratio``, ``offset``).
    """

    method: FeatureMethod = FeatureMethod.NORMAL
    mean: float = 0.0
    std: float = 1.0
    dim: int = 1
    params: dict = field(default_factory=dict, hash=False, compare=True)

    def __post_init__(self):
        object.__setattr__(self, "method", FeatureMethod(self.method))
        if self.dim < 1:
            raise FeatureParamError("dim must be >= 1")
        if self.std < 0:
            raise FeatureParamError("std must be non-negative")

    def param(self, key):
        if key in self.params:
            return float(self.params[key])
        table = DEFAULT_SHAPES.get(self.method) or DEFAULT_SEQ.get(self.method) or {}
        return float(table.get(key, 0.0))


# --------------------------------------------------------------------------
# raw samplers (uniforms in, variates out)
# --------------------------------------------------------------------------

def _open_uniform(rng, size):
    # (0, 1): keeps log/inverse-CDF transforms finite
    u = rng.random(size)
    u[u == 0.0] = 0.5
    return u


def box_muller(rng, size: int) -> np.ndarray:
    half = (size + 1) // 2
    u1 = 1.0 - rng.random(half)  # (0, 1]
    u2 = rng.random(half)
    r = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([r * np.cos(2 * np.pi * u2), r * np.sin(2 * np.pi * u2)])
    return z[:size]


def marsaglia_tsang(rng, shape_k: float, size: int) -> np.ndarray:
    """Gamma(k, 1) variates."""
    if shape_k <= 0:
        raise FeatureParamError("gamma shape must be positive")
    if shape_k < 1.0:
        boost = _open_uniform(rng, size) ** (1.0 / shape_k)
        return marsaglia_tsang(rng, shape_k + 1.0, size) * boost
    d = shape_k - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    todo = np.arange(size)
    while todo.size:
        m = todo.size
        x = box_muller(rng, m)
        v = (1.0 + c * x) ** 3
        u = _open_uniform(rng, m)
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * x * x + d - d * v + d * np.log(np.where(ok, v, 1.0)))
        out[todo[accept]] = d * v[accept]
        todo = todo[~accept]
    return out


@lru_cache(maxsize=None)
def _gompertz_moments(eta: float, b: float) -> tuple[float, float]:
    q = lambda u: math.log1p(-math.log1p(-u) / eta) / b
    m1 = integrate.quad(q, 0.0, 1.0, limit=200)[0]
    m2 = integrate.quad(lambda u: q(u) ** 2, 0.0, 1.0, limit=200)[0]
    return m1, math.sqrt(max(m2 - m1 * m1, 0.0))


def raw_moments(spec: FeatureSpec) -> tuple[float, float] | None:
    """Theoretical (mean, std) of the raw law, or None when the variance is infinite."""
    m = spec.method
    p = spec.param
    if m is FeatureMethod.NORMAL:
        return 0.0, 1.0
    if m is FeatureMethod.UNIFORM:
        return 0.5, math.sqrt(1.0 / 12.0)
    if m is FeatureMethod.EXPONENTIAL:
        return 1.0, 1.0
    if m is FeatureMethod.LOG_NORMAL:
        s2 = p("sigma") ** 2
        return math.exp(s2 / 2), math.sqrt((math.exp(s2) - 1) * math.exp(s2))
    if m is FeatureMethod.GAMMA:
        k = p("shape")
        return k, math.sqrt(k)
    if m is FeatureMethod.BETA:
        a, b = p("a"), p("b")
        return a / (a + b), math.sqrt(a * b / ((a + b) ** 2 * (a + b + 1)))
    if m is FeatureMethod.WEIBULL:
        k = p("shape")
        g1 = special.gamma(1 + 1 / k)
        return g1, math.sqrt(special.gamma(1 + 2 / k) - g1 * g1)
    if m is FeatureMethod.LAPLACE:
        return 0.0, math.sqrt(2.0)
    if m is FeatureMethod.LOGISTIC:
        return 0.0, math.pi / math.sqrt(3.0)
    if m is FeatureMethod.RAYLEIGH:
        return math.sqrt(math.pi / 2), math.sqrt((4 - math.pi) / 2)
    if m is FeatureMethod.PARETO:
        a = p("shape")
        if a <= 2:
            return None
        return a / (a - 1), math.sqrt(a / ((a - 1) ** 2 * (a - 2)))
    if m is FeatureMethod.CAUCHY:
        return None
    if m is FeatureMethod.NEGATIVE_BINOMIAL:
        r, q = p("r"), p("p")
        return r * (1 - q) / q, math.sqrt(r * (1 - q)) / q
    if m is FeatureMethod.GUMBEL:
        return float(np.euler_gamma), math.pi / math.sqrt(6.0)
    if m is FeatureMethod.GOMPERTZ:
        return _gompertz_moments(p("eta"), p("b"))
    raise FeatureParamError(f"{m.value} is not a distribution method")


def raw_median(spec: FeatureSpec) -> float:
    if spec.method is FeatureMethod.PARETO:
        return 2.0 ** (1.0 / spec.param("shape"))
    return 0.0  # Cauchy


def raw_sample(spec: FeatureSpec, rng, size: int) -> np.ndarray:
    m = spec.method
    p = spec.param
    if m is FeatureMethod.NORMAL:
        return box_muller(rng, size)
    if m is FeatureMethod.UNIFORM:
        return rng.random(size)
    if m is FeatureMethod.LOG_NORMAL:
        return np.exp(p("sigma") * box_muller(rng, size))
    if m is FeatureMethod.GAMMA:
        return marsaglia_tsang(rng, p("shape"), size)
    if m is FeatureMethod.BETA:
        x = marsaglia_tsang(rng, p("a"), size)
        y = marsaglia_tsang(rng, p("b"), size)
        return x / (x + y)
    if m is FeatureMethod.NEGATIVE_BINOMIAL:
        r, q = p("r"), p("p")
        if not 0 < q <= 1:
            raise FeatureParamError("negative binomial p must lie in (0, 1]")
        lam = marsaglia_tsang(rng, r, size) * ((1 - q) / q)
        return rng.poisson(lam).astype(np.float64)

    u = _open_uniform(rng, size)
    if m is FeatureMethod.EXPONENTIAL:
        return -np.log1p(-u)
    if m is FeatureMethod.WEIBULL:
        return (-np.log1p(-u)) ** (1.0 / p("shape"))
    if m is FeatureMethod.LAPLACE:
        d = u - 0.5
        return -np.sign(d) * np.log1p(-2.0 * np.abs(d))
    if m is FeatureMethod.LOGISTIC:
        return np.log(u) - np.log1p(-u)
    if m is FeatureMethod.RAYLEIGH:
        return np.sqrt(-2.0 * np.log1p(-u))
    if m is FeatureMethod.PARETO:
        a = p("shape")
        if a <= 0:
            raise FeatureParamError("pareto shape must be positive")
        return (1.0 - u) ** (-1.0 / a)
    if m is FeatureMethod.CAUCHY:
        return np.tan(np.pi * (u - 0.5))
    if m is FeatureMethod.GUMBEL:
        return -np.log(-np.log(u))
    if m is FeatureMethod.GOMPERTZ:
        eta, b = p("eta"), p("b")
        if eta <= 0 or b <= 0:
            raise FeatureParamError("gompertz eta and b must be positive")
        return np.log1p(-np.log1p(-u) / eta) / b
    raise FeatureParamError(f"{m.value} is not a distribution method")


# --------------------------------------------------------------------------
# sequences
# --------------------------------------------------------------------------

def _primes(count: int) -> list[int]:
    if count <= 0:
        return []
    limit = max(15, int(count * (math.log(count + 1) + math.log(math.log(count + 3)) + 2)))
    while True:
        sieve = np.ones(limit + 1, dtype=bool)
        sieve[:2] = False
        for i in range(2, int(limit**0.5) + 1):
            if sieve[i]:
                sieve[i * i :: i] = False
        found = np.flatnonzero(sieve)
        if found.size >= count:
            return [int(x) for x in found[:count]]
        limit *= 2


def sequence_terms(spec: FeatureSpec, n: int) -> np.ndarray:
    m = spec.method
    off = int(spec.params.get("offset", 0))
    k = np.arange(off, off + n, dtype=np.float64)  # zero-based term index
    if m is FeatureMethod.ARITHMETIC:
        return spec.param("start") + k * spec.param("step")
    if m is FeatureMethod.GEOMETRIC:
        a, r = spec.param("start"), spec.param("ratio")
        if r == 0 and a != 0 and off + n > 1:
            raise FeatureParamError("geometric ratio 0 only defines the first term")
        return np.array([a * r ** int(t) for t in k])
    if m is FeatureMethod.FIBONACCI:
        fib = [1.0, 1.0]
        while len(fib) < off + n:
            fib.append(fib[-1] + fib[-2])
        return np.array(fib[off : off + n])
    if m is FeatureMethod.SQUARE:
        return (k + 1) ** 2
    if m is FeatureMethod.CUBIC:
        return (k + 1) ** 3
    if m is FeatureMethod.PRIME:
        return np.array(_primes(off + n)[off:], dtype=np.float64)
    if m is FeatureMethod.TRIANGULAR:
        return (k + 1) * (k + 2) / 2
    if m is FeatureMethod.RECTANGULAR:
        return (k + 1) * (k + 2)
    if m is FeatureMethod.BINOMIAL_COEFFICIENT:
        # central binomial coefficients C(2t, t)
        return np.array([float(math.comb(2 * int(t), int(t))) for t in k])
    if m is FeatureMethod.HAMILTONIAN:
        # harmonic numbers H_t = sum_{j<=t} 1/j
        out, acc = [], 0.0
        for j in range(1, off + n + 1):
            acc += 1.0 / j
            out.append(acc)
        return np.array(out[off:])
    raise FeatureParamError(f"{m.value} is not a sequence method")


def generate_features(spec: FeatureSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n x spec.dim`` feature matrix."""
    if n < 1:
        raise FeatureParamError("n must be >= 1")
    if spec.method.is_sequence:
        terms = sequence_terms(spec, n)
        return np.repeat(terms[:, None], spec.dim, axis=1).astype(np.float64)
    if spec.std == 0:
        return np.full((n, spec.dim), float(spec.mean))
    raw = raw_sample(spec, rng, n * spec.dim)
    moments = raw_moments(spec)
    if moments is None:
        z = raw - raw_median(spec)
    else:
        mu, sd = moments
        z = (raw - mu) / sd
    return (spec.mean + spec.std * z).reshape(n, spec.dim)
