import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import chi2

from crcg.stats import (
    RunResult,
    StatsError,
    average_ranks,
    chi_square_sf,
    cpu_overhead,
    format_delta,
    friedman,
    load_results,
    mean_std,
    summarize,
)


def runs(method, scenario, accs, cpu=1.0):
    return [RunResult(method, scenario, s, a, cpu) for s, a in enumerate(accs)]


# ---------------------------------------------------------------- summarize

def test_mean_std_example():
    mu, sd = mean_std([0.30, 0.32, 0.28])
    assert mu == pytest.approx(0.30, abs=1e-15) and sd == pytest.approx(0.02, abs=1e-15)
    assert mean_std([0.4]) == (0.4, 0.0)


def test_summarize_deltas():
    res = runs("erm", "P=20%", [0.30, 0.32, 0.28]) + runs("erm+rcam", "P=20%", [0.33, 0.35, 0.31])
    t = summarize(res, "erm")
    assert t.cell("erm", "P=20%").delta == 0.0
    assert t.cell("erm+rcam", "P=20%").delta == pytest.approx(0.03, abs=1e-12)
    assert t.methods == ["erm", "erm+rcam"]
    text = t.to_text()
    assert "30.00±2.00" in text and "(+3.00)" in text
    assert t.to_csv().splitlines()[0] == "method,scenario,mean,std,n,delta,cpu_mean"


def test_summarize_missing_baseline():
    with pytest.raises(StatsError, match="missing baseline: erm"):
        summarize(runs("erm+rcam", "P=5%", [0.3]), "erm")


def test_summarize_translation_equivariance():
    rng = np.random.default_rng(0)
    a, b = rng.uniform(0.2, 0.6, 5), rng.uniform(0.2, 0.6, 5)
    t1 = summarize(runs("erm", "s", a) + runs("x", "s", b), "erm")
    t2 = summarize(runs("erm", "s", a + 0.1) + runs("x", "s", b + 0.1), "erm")
    assert t2.cell("x", "s").delta == pytest.approx(t1.cell("x", "s").delta, abs=1e-12)
    assert t2.cell("x", "s").mean == pytest.approx(t1.cell("x", "s").mean + 0.1, abs=1e-12)


def test_format_delta_signs():
    assert format_delta(1.5) == "+1.50" and format_delta(-0.25) == "−0.25" and format_delta(0.0) == "0.00"


def test_run_result_validation_and_load(tmp_path):
    with pytest.raises(StatsError):
        RunResult("erm", "s", 0, 1.2, 1.0)
    p = tmp_path / "r.json"
    p.write_text(json.dumps([RunResult("erm", "s", 1, 0.5, 2.0).to_dict()]))
    assert load_results(p) == [RunResult("erm", "s", 1, 0.5, 2.0)]
    p.write_text(json.dumps({"method": "erm"}))
    with pytest.raises(StatsError, match="missing key"):
        load_results(p)


def test_cpu_overhead():
    res = runs("erm", "s", [0.3, 0.3], cpu=10.0) + runs("erm+rcam", "s", [0.3, 0.3], cpu=11.0)
    assert cpu_overhead(res, "erm+rcam", "erm") == pytest.approx(1.1)


# ---------------------------------------------------------------- Friedman

def test_friedman_hand_example():
    stat, df, p = friedman([[0.9] * 4, [0.8] * 4, [0.7] * 4])
    assert stat == pytest.approx(8.0, abs=1e-12) and df == 2
    assert abs(p - math.exp(-4)) < 1e-6


def test_friedman_full_ties():
    assert friedman([[0.5, 0.6, 0.7]] * 3) == (0.0, 2, 1.0)


def test_friedman_errors():
    with pytest.raises(StatsError, match="ragged"):
        friedman([[1, 2], [1]])
    with pytest.raises(StatsError):
        friedman([[1, 2, 3]])


def test_average_ranks_ties():
    assert average_ranks([0.3, 0.9, 0.3, 0.1]).tolist() == [2.5, 1.0, 2.5, 4.0]


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(0, 5), min_size=5, max_size=5), min_size=2, max_size=5))
def test_friedman_matches_scipy_and_is_rank_based(rows):
    from scipy.stats import friedmanchisquare

    A = np.asarray(rows, dtype=float)
    stat, df, p = friedman(A)
    assert 0.0 <= p <= 1.0 and df == len(rows) - 1
    # monotone transform inside each block keeps the ranks
    assert friedman(np.exp(A) * 3 + 1)[0] == pytest.approx(stat, abs=1e-9)
    assert friedman(A[::-1])[0] == pytest.approx(stat, abs=1e-9)
    if len(rows) >= 3 and not np.all(A == A[0]):
        # scipy applies a tie correction; without ties the two coincide
        if all(len(set(A[:, b])) == len(rows) for b in range(A.shape[1])):
            assert stat == pytest.approx(friedmanchisquare(*A)[0], abs=1e-9)


def test_two_methods_swap_symmetry():
    a = [[0.3, 0.5, 0.4, 0.6], [0.4, 0.2, 0.5, 0.1]]
    assert friedman(a)[0] == pytest.approx(friedman(a[::-1])[0], abs=1e-12)


# ---------------------------------------------------------------- chi-square

def test_chi_square_examples():
    assert chi_square_sf(0.0, 3) == 1.0
    assert abs(chi_square_sf(8.0, 2) - math.exp(-4)) < 1e-10
    assert abs(chi_square_sf(1e-6, 4) - 1.0) < 1e-9


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 2.0, 5.0, 8.0, 20.0, 60.0])
def test_chi_square_df2_closed_form(x):
    assert abs(chi_square_sf(x, 2) - math.exp(-x / 2)) < 1e-10


def test_chi_square_against_scipy():
    for df in (1, 2, 3, 4, 7, 10, 25):
        for x in np.linspace(0.0, 80.0, 161):
            assert abs(chi_square_sf(float(x), df) - chi2.sf(x, df)) < 1e-10, (df, x)


@pytest.mark.parametrize("df", [1, 2, 5, 12])
def test_chi_square_monotone(df):
    xs = np.linspace(0, 50, 400)
    vals = [chi_square_sf(float(x), df) for x in xs]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
