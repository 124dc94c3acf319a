"""Statistics kernel: KS tests, Wilson intervals, tail fits and exact accumulators."""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import optimize, special, stats

from .errors import ParameterError, require

ALPHA = 0.01
CI_SIGMAS = 3.0


class ExactSum:
    """Exact sum of doubles kept as an integer multiple of 2**-1074.

    Addition of two ExactSums is exact, so any grouping of partial results
    gives the same total bit for bit.
    """
    __slots__ = ("units",)
    SHIFT = 1074

    def __init__(self, units=0):
        self.units = int(units)

    @classmethod
    def of(cls, x):
        x = np.asarray(x, dtype=np.float64).ravel()
        require(np.isfinite(x).all(), "exact sums need finite values")
        x = x[x != 0]
        if x.size == 0:
            return cls(0)
        mant, ex = np.frexp(x)
        m = np.round(np.ldexp(mant, 53)).astype(np.int64)
        sh = ex.astype(np.int64) - 53 + cls.SHIFT
        total = 0
        for e in np.unique(sh):
            mm = m[sh == e]
            pad = (-mm.size) % 512
            part = np.concatenate([mm, np.zeros(pad, np.int64)]).reshape(-1, 512).sum(axis=1)
            s = sum(int(v) for v in part)
            total += s << int(e) if e >= 0 else s >> int(-e)
        return cls(total)

    def __add__(self, other):
        return ExactSum(self.units + other.units)

    def fraction(self):
        return Fraction(self.units, 1 << self.SHIFT)

    def __float__(self):
        return float(self.fraction())

    def __eq__(self, other):
        return isinstance(other, ExactSum) and self.units == other.units


@dataclass
class Accumulator:
    """Count, sum and sum of squares with an associative, exact merge."""
    count: int = 0
    total: ExactSum = field(default_factory=ExactSum)
    squares: ExactSum = field(default_factory=ExactSum)

    @classmethod
    def of(cls, x):
        x = np.asarray(x, dtype=np.float64).ravel()
        return cls(x.size, ExactSum.of(x), ExactSum.of(x * x))

    def merge(self, other):
        return Accumulator(self.count + other.count, self.total + other.total,
                           self.squares + other.squares)

    def __add__(self, other):
        return self.merge(other)

    @property
    def mean(self):
        require(self.count > 0, "empty accumulator")
        return float(self.total.fraction() / self.count)

    @property
    def var(self):
        require(self.count > 1, "variance needs two samples")
        n = self.count
        s, q = self.total.fraction(), self.squares.fraction()
        return float((q - s * s / n) / (n - 1))

    @property
    def stderr(self):
        return math.sqrt(max(self.var, 0.0) / self.count)


def mean_se(x):
    x = np.asarray(x, dtype=np.float64)
    require(x.size > 1, "need at least two samples")
    acc = Accumulator.of(x)
    return acc.mean, acc.stderr


def ks_one_sample(x, cdf):
    """(D, p) against a continuous cdf (callable)."""
    x = np.asarray(x, dtype=np.float64)
    require(x.size > 0, "empty sample")
    r = stats.kstest(x, cdf)
    return float(r.statistic), float(r.pvalue)


def ks_exponential(x, rate):
    return ks_one_sample(x, lambda t: stats.expon.cdf(t, scale=1.0 / rate))


def ks_statistic(a, b):
    """Sup distance of the two empirical CDFs, evaluated at every pooled value
    (correct for samples with ties)."""
    a = np.sort(np.asarray(a, dtype=np.float64).ravel())
    b = np.sort(np.asarray(b, dtype=np.float64).ravel())
    if a.size == 0 or b.size == 0:
        raise ParameterError("two-sample KS needs two nonempty samples")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.abs(fa - fb).max())


def ks_two_sample(a, b):
    """(D, p) with p from the asymptotic Kolmogorov law at n m / (n + m)."""
    d = ks_statistic(a, b)
    n, m = np.size(a), np.size(b)
    ne = n * m / (n + m)
    return d, float(special.kolmogorov(math.sqrt(ne) * d))


def wilson(k, n, zc=CI_SIGMAS):
    """Wilson score interval for k successes in n trials (vectorized)."""
    k = np.asarray(k, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    require(np.all(n > 0), "Wilson interval needs n > 0")
    p = k / n
    z2 = zc * zc
    den = 1.0 + z2 / n
    mid = (p + z2 / (2 * n)) / den
    half = zc * np.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / den
    # the exact interval always holds p; clamp away rounding at k = 0 or k = n
    return np.clip(np.minimum(mid - half, p), 0.0, 1.0), np.clip(np.maximum(mid + half, p), 0.0, 1.0)


def binomial_se(p, n):
    p = np.asarray(p, dtype=np.float64)
    return np.sqrt(p * (1.0 - p) / n)


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r2: float
    npoints: int


def tail_fit(s, p_hat, stderr, reps=None, lo=None, hi=0.5):
    """Weighted least squares of -ln p on s^3 over usable points.

    Points with p in (lo, hi) enter, lo defaulting to 10 / reps; the weight
    of a point is 1 / var(-ln p) = p^2 / stderr^2.  Returns None when fewer
    than three points remain.
    """
    s = np.asarray(s, dtype=np.float64)
    p = np.asarray(p_hat, dtype=np.float64)
    se = np.asarray(stderr, dtype=np.float64)
    if lo is None:
        lo = 10.0 / reps if reps else 0.0
    use = (p > lo) & (p < hi) & (se > 0)
    if use.sum() < 3:
        return None
    xs = s[use] ** 3
    ys = -np.log(p[use])
    wts = (p[use] / se[use]) ** 2
    W = wts.sum()
    xm, ym = (wts * xs).sum() / W, (wts * ys).sum() / W
    sxx = (wts * (xs - xm) ** 2).sum()
    require(sxx > 0, "tail fit needs distinct s values")
    slope = (wts * (xs - xm) * (ys - ym)).sum() / sxx
    icpt = ym - slope * xm
    res = ys - (icpt + slope * xs)
    stot = (wts * (ys - ym) ** 2).sum()
    r2 = 1.0 - (wts * res ** 2).sum() / stot if stot > 0 else 1.0
    return TailFit(float(slope), float(icpt), float(r2), int(use.sum()))


def isotonic_decreasing(y, weights=None):
    res = optimize.isotonic_regression(np.asarray(y, dtype=np.float64), weights=weights,
                                       increasing=False)
    return res.x


def loglog_slope(xs, ys):
    """Ordinary least-squares slope of log y on log x."""
    xs, ys = np.log(np.asarray(xs, dtype=np.float64)), np.log(np.asarray(ys, dtype=np.float64))
    return float(np.polyfit(xs, ys, 1)[0])


def corr_matrix(samples):
    """Pearson correlations of the columns of a (reps, k) array."""
    x = np.asarray(samples, dtype=np.float64)
    if x.shape[1] == 1:
        return np.ones((1, 1))
    c = np.corrcoef(x, rowvar=False)
    np.fill_diagonal(c, 1.0)
    return c
