import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpplab import stats
from lpplab.errors import ParameterError


def test_ks_identical():
    a = np.arange(50.0)
    assert stats.ks_two_sample(a, a) == (0.0, 1.0)


def test_ks_disjoint():
    d, p = stats.ks_two_sample(np.zeros(30), np.ones(40))
    assert d == 1.0 and p < 1e-6


def test_ks_empty():
    with pytest.raises(ParameterError):
        stats.ks_two_sample([], [1.0])


def test_ks_ties():
    # discrete samples: the sup is taken over all pooled values
    a = np.array([0, 0, 1, 1, 2])
    b = np.array([0, 1, 2, 2, 2])
    assert stats.ks_statistic(a, b) == pytest.approx(0.4)


def test_ks_calibration():
    ok = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        ok += stats.ks_two_sample(rng.random(10000), rng.random(10000))[1] >= 0.01
    assert ok >= 98


def test_ks_one_sample():
    x = np.random.default_rng(3).exponential(0.5, size=5000)
    assert stats.ks_exponential(x, 2.0)[1] >= 0.01
    assert stats.ks_exponential(x, 1.0)[1] < 1e-6


def test_tail_fit_exact():
    s = np.linspace(0.3, 0.8, 6)
    p = np.exp(-2 * s ** 3)
    f = stats.tail_fit(s, p, 0.01 * p, lo=0.0, hi=1.0)
    assert f.slope == pytest.approx(2.0, abs=1e-12) and f.r2 == pytest.approx(1.0, abs=1e-12)


def test_tail_fit_noisy(rng):
    s = np.linspace(0.5, 1.0, 8)
    reps = 10 ** 6
    p = np.exp(-1.5 * s ** 3)
    ph = rng.binomial(reps, p) / reps
    se = stats.binomial_se(ph, reps)
    f = stats.tail_fit(s, ph, se, reps=reps, hi=1.0)
    assert abs(f.slope - 1.5) <= 0.15


def test_tail_fit_absent():
    s = np.array([1.0, 2.0, 3.0, 4.0])
    assert stats.tail_fit(s, np.zeros(4), np.zeros(4), reps=1000) is None
    assert stats.tail_fit(s, np.full(4, 0.9), np.full(4, 0.01), reps=1000) is None


def test_wilson():
    lo, hi = stats.wilson(0, 100)
    assert lo == 0.0 and 0 < hi < 0.1
    lo, hi = stats.wilson(50, 100)
    assert lo < 0.5 < hi
    assert hi - 0.5 == pytest.approx(0.5 - lo)


@settings(max_examples=100)
@given(st.integers(0, 1000), st.integers(1, 1000))
def test_wilson_contains(k, n):
    k = min(k, n)
    lo, hi = stats.wilson(k, n)
    assert 0 <= lo <= k / n <= hi <= 1


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=200), st.integers(1, 7))
def test_accumulator_merge_exact(xs, parts):
    x = np.array(xs)
    whole = stats.Accumulator.of(x)
    pieces = [stats.Accumulator.of(c) for c in np.array_split(x, parts)]
    merged = pieces[0]
    for p in pieces[1:]:
        merged = merged + p
    assert merged.count == whole.count
    assert merged.total == whole.total and merged.squares == whole.squares
    assert merged.mean == whole.mean


def test_exact_sum_value():
    x = [1e16, 1.0, -1e16]
    assert float(stats.ExactSum.of(x)) == 1.0


def test_mean_se():
    m, se = stats.mean_se([1.0, 2.0, 3.0, 4.0])
    assert m == 2.5 and se == pytest.approx(math.sqrt(5 / 3 / 4))


def test_isotonic():
    y = stats.isotonic_decreasing([0.5, 0.6, 0.3, 0.31, 0.1])
    assert all(a >= b for a, b in zip(y, y[1:]))


def test_loglog_slope():
    n = np.array([10.0, 100.0, 1000.0])
    assert stats.loglog_slope(n, 3 * n ** -0.5) == pytest.approx(-0.5)


def test_corr_matrix_diagonal(rng):
    c = stats.corr_matrix(rng.normal(size=(500, 4)))
    assert (np.diag(c) == 1.0).all()
