"""Wilcoxon signed-rank test with exact p-values, fold statistics and the
least-squares fit used for the timing experiment."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

EXACT_LIMIT = 25


@dataclass(frozen=True)
class WilcoxonReport:
    w_plus: float
    w_minus: float
    statistic: float
    n_effective: int
    p_value: float
    alternative: str = "two-sided"
    alpha: float = 0.05

    @property
    def significant_at_05(self) -> bool:
        return self.p_value < 0.05

    def to_dict(self) -> dict:
        out = asdict(self)
        out["significant_at_05"] = self.significant_at_05
        return out


def _signed_rank_counts(doubled_ranks) -> np.ndarray:
    """counts[s] = number of sign assignments whose doubled W+ equals s.

    A subset-sum DP over the 2^n assignments; exact for mid-ranks because
    doubling makes every rank an integer.
    """
    total = int(sum(doubled_ranks))
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in doubled_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    return counts


def wilcoxon_signed_rank(pairs, alternative: str = "two-sided") -> WilcoxonReport:
    """Signed-rank test on (a, b) pairs, differences a - b.

    Zero differences are dropped, |d| is ranked with mid-ranks for ties.
    ``alternative`` is "two-sided", "greater" (a tends to exceed b) or
    "less".  The two-sided p-value is the share of sign assignments whose
    min(W+, W-) is at most the observed statistic.
    """
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError("pairs must be a sequence of (a, b)")
    if len(pairs) < 5:
        raise ValueError(f"need at least 5 pairs, got {len(pairs)}")
    if alternative not in ("two-sided", "greater", "less"):
        raise ValueError(f"unknown alternative {alternative!r}")
    d = pairs[:, 0] - pairs[:, 1]
    d = d[d != 0]
    n = len(d)
    if n == 0:
        raise ValueError("all differences zero")
    if n > EXACT_LIMIT:
        raise ValueError(f"exact enumeration supports at most {EXACT_LIMIT} non-zero pairs, got {n}")
    ranks = rankdata(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    stat = min(w_plus, w_minus)

    doubled = [int(round(2 * r)) for r in ranks]
    counts = _signed_rank_counts(doubled)
    total = len(counts) - 1
    support = np.arange(total + 1)
    n_assign = 2**n
    if alternative == "two-sided":
        tail = np.minimum(support, total - support) <= round(2 * stat)
    elif alternative == "greater":
        tail = support >= round(2 * w_plus)
    else:
        tail = support <= round(2 * w_plus)
    p = float(sum(counts[tail]) / n_assign)
    return WilcoxonReport(w_plus, w_minus, stat, n, min(p, 1.0), alternative)


def mean_std(values) -> tuple[float, float]:
    """Arithmetic mean and sample standard deviation (k - 1 divisor)."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        raise ValueError("mean_std needs at least 2 values")
    return float(values.mean()), float(values.std(ddof=1))


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def predict(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept


def linear_regression(x, y) -> RegressionFit:
    """Ordinary least squares.  r^2 is reported as 0 when y is constant."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y):
        raise ValueError("x and y lengths differ")
    if len(x) < 3:
        raise ValueError("linear regression needs at least 3 points")
    xc = x - x.mean()
    sxx = float(np.dot(xc, xc))
    if sxx == 0 or np.ptp(x) == 0:
        raise ValueError("degenerate x: all values equal")
    slope = float(np.dot(xc, y - y.mean()) / sxx)
    intercept = float(y.mean() - slope * x.mean())
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 0.0 if ss_tot == 0 else max(0.0, 1.0 - float(np.sum(resid**2)) / ss_tot)
    if math.isclose(r2, 1.0, abs_tol=1e-15):
        r2 = 1.0
    return RegressionFit(slope, intercept, r2, len(x))
