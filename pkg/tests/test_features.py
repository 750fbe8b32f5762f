import math
from fractions import Fraction

import numpy as np
import pytest

from crcg.features import (
    DISTRIBUTION_METHODS,
    SEQUENCE_METHODS,
    FeatureMethod,
    FeatureParamError,
    FeatureSpec,
    generate_features,
    sequence_terms,
)

N_TERMS = 50
M = FeatureMethod


# ---------------------------------------------------------------- sequence oracles

def is_prime(k):
    return k >= 2 and all(k % d for d in range(2, int(math.isqrt(k)) + 1))


def oracle(method, n):
    """First ``n`` terms from closed forms / recurrences written independently."""
    if method is M.ARITHMETIC:
        return [1 + t for t in range(n)]
    if method is M.GEOMETRIC:
        return [2**t for t in range(n)]
    if method is M.FIBONACCI:
        phi = (1 + 5**0.5) / 2
        # Binet is exact after rounding well past 50 terms
        return [round(phi ** (t + 1) / 5**0.5) for t in range(n)]
    if method is M.SQUARE:
        return [t * t for t in range(1, n + 1)]
    if method is M.CUBIC:
        return [t * t * t for t in range(1, n + 1)]
    if method is M.PRIME:
        out, k = [], 1
        while len(out) < n:
            k += 1
            if is_prime(k):
                out.append(k)
        return out
    if method is M.TRIANGULAR:
        return [sum(range(1, t + 1)) for t in range(1, n + 1)]
    if method is M.RECTANGULAR:
        return [t * (t + 1) for t in range(1, n + 1)]
    if method is M.BINOMIAL_COEFFICIENT:
        out = [1]
        for t in range(1, n):
            out.append(out[-1] * 2 * (2 * t - 1) // t)
        return out
    if method is M.HAMILTONIAN:
        acc, out = Fraction(0), []
        for j in range(1, n + 1):
            acc += Fraction(1, j)
            out.append(float(acc))
        return out
    raise AssertionError(method)


@pytest.mark.parametrize("method", SEQUENCE_METHODS, ids=lambda m: m.value)
def test_sequence_matches_oracle(method):
    got = sequence_terms(FeatureSpec(method), N_TERMS)
    want = np.array(oracle(method, N_TERMS), dtype=np.float64)
    if method is M.HAMILTONIAN:
        np.testing.assert_allclose(got, want, rtol=1e-14)
    else:
        assert got.tolist() == want.tolist()


def test_arithmetic_example():
    spec = FeatureSpec(M.ARITHMETIC, dim=1, params={"start": 1, "step": 2})
    assert generate_features(spec, 4, None).tolist() == [[1], [3], [5], [7]]


def test_fibonacci_example():
    assert generate_features(FeatureSpec(M.FIBONACCI), 5, None).tolist() == [[1], [1], [2], [3], [5]]


def test_sequence_broadcast_across_dim():
    X = generate_features(FeatureSpec(M.SQUARE, dim=3), 4, None)
    assert X.tolist() == [[1] * 3, [4] * 3, [9] * 3, [16] * 3]


def test_sequence_offset():
    spec = FeatureSpec(M.PRIME, params={"offset": 3})
    assert sequence_terms(spec, 3).tolist() == [7, 11, 13]


def test_geometric_ratio_zero_rejected():
    spec = FeatureSpec(M.GEOMETRIC, params={"start": 1, "ratio": 0})
    assert sequence_terms(spec, 1).tolist() == [1.0]
    with pytest.raises(FeatureParamError):
        sequence_terms(spec, 2)


# ---------------------------------------------------------------- distributions

def test_zero_std_is_constant():
    X = generate_features(FeatureSpec(M.NORMAL, mean=3.0, std=0.0), 10, np.random.default_rng(0))
    assert np.all(X == 3.0)


def test_normal_example_tolerance():
    X = generate_features(FeatureSpec(M.NORMAL, 0.0, 1.0), 100_000, np.random.default_rng(1)).ravel()
    assert abs(X.mean()) < 0.02 and abs(X.std(ddof=1) - 1.0) < 0.02


MOMENT_CASES = [m for m in DISTRIBUTION_METHODS if m is not M.CAUCHY]


@pytest.mark.parametrize("method", MOMENT_CASES, ids=lambda m: m.value)
def test_two_moments_within_three_standard_errors(method):
    mean, std, n = 2.5, 1.5, 100_000
    x = generate_features(FeatureSpec(method, mean, std), n, np.random.default_rng(7)).ravel()
    m, s = x.mean(), x.std(ddof=1)
    se_mean = s / math.sqrt(n)
    m4 = np.mean((x - m) ** 4)
    se_std = math.sqrt(max(m4 - s**4, 0.0) / n) / (2 * s)
    assert abs(m - mean) < 3 * se_mean, (m, se_mean)
    assert abs(s - std) < 3 * se_std, (s, se_std)


def test_cauchy_median_and_quartiles():
    mean, scale, n = -1.0, 2.0, 100_000
    x = generate_features(FeatureSpec(M.CAUCHY, mean, scale), n, np.random.default_rng(3)).ravel()
    # median SE for Cauchy(loc, s): pi*s / (2 sqrt(n))
    assert abs(np.median(x) - mean) < 3 * math.pi * scale / (2 * math.sqrt(n))
    q1, q3 = np.quantile(x, [0.25, 0.75])
    assert abs((q3 - q1) - 2 * scale) < 0.05 * 2 * scale


@pytest.mark.parametrize("alpha", [1.0, 1.5, 2.0])
def test_heavy_pareto_median_and_quartile(alpha):
    mean, scale, n = 1.0, 1.0, 100_000
    spec = FeatureSpec(M.PARETO, mean, scale, params={"shape": alpha})
    x = generate_features(spec, n, np.random.default_rng(11)).ravel()
    med_raw = 2 ** (1 / alpha)
    dens = alpha * med_raw ** (-alpha - 1)
    assert abs(np.median(x) - mean) < 3 / (2 * dens * math.sqrt(n))
    q75_raw = 4 ** (1 / alpha)
    assert abs(np.quantile(x, 0.75) - (mean + scale * (q75_raw - med_raw))) < 0.02 * q75_raw


def test_distribution_determinism():
    spec = FeatureSpec(M.GOMPERTZ, 0.0, 1.0, dim=3)
    a = generate_features(spec, 20, np.random.default_rng(5))
    b = generate_features(spec, 20, np.random.default_rng(5))
    assert np.array_equal(a, b) and a.shape == (20, 3)


def test_bad_parameters():
    with pytest.raises(FeatureParamError):
        FeatureSpec(M.NORMAL, std=-1.0)
    with pytest.raises(FeatureParamError):
        FeatureSpec(M.NORMAL, dim=0)
    with pytest.raises(FeatureParamError):
        generate_features(FeatureSpec(M.NORMAL), 0, np.random.default_rng(0))
