import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import rankdata

from tpso.stats import linear_regression, mean_std, wilcoxon_signed_rank

# accuracy table used for the matched-pairs example: TPSO, GA+ADT, PSO+ADT
TEN_DATASETS = {
    "AUS": (87.54, 85.51, 84.49),
    "CON": (87.89, 77.78, 80.78),
    "GER": (74.4, 69.8, 70.4),
    "HRT": (83.33, 83.7, 76.67),
    "ION": (94.86, 89.75, 92.01),
    "LAR": (86.86, 79.81, 79.83),
    "RDS": (90.56, 90.56, 89.31),
    "SNR": (86.95, 81.19, 81.12),
    "WBD": (97.19, 95.26, 95.25),
    "WEA": (87.42, 84.78, 82.76),
}


def enumerate_signs(d):
    """Brute-force oracle: rank sums and exact p over all 2^n sign flips."""
    d = np.asarray([x for x in d if x != 0], dtype=float)
    ranks = rankdata(np.abs(d))
    w_plus = ranks[d > 0].sum()
    stat = min(w_plus, ranks.sum() - w_plus)
    hits_two = hits_greater = hits_less = 0
    for signs in itertools.product([False, True], repeat=len(d)):
        wp = ranks[list(signs)].sum()
        wm = ranks.sum() - wp
        hits_two += min(wp, wm) <= stat + 1e-9
        hits_greater += wp >= w_plus - 1e-9
        hits_less += wp <= w_plus + 1e-9
    total = 2 ** len(d)
    return w_plus, stat, hits_two / total, hits_greater / total, hits_less / total


def test_all_positive_ten_pairs():
    rep = wilcoxon_signed_rank([(i + 1.0, 0.0) for i in range(10)])
    assert (rep.w_plus, rep.w_minus, rep.statistic) == (55.0, 0.0, 0.0)
    assert rep.p_value == pytest.approx(2 / 1024)
    assert rep.significant_at_05


def test_worked_five_pairs():
    rep = wilcoxon_signed_rank([(d, 0.0) for d in (1, -2, 3, -4, 5)])
    assert (rep.w_plus, rep.w_minus, rep.statistic) == (9.0, 6.0, 6.0)
    assert rep.p_value == pytest.approx(enumerate_signs([1, -2, 3, -4, 5])[2])


def test_tpso_against_pso_table():
    pairs = [(t, p) for t, _, p in TEN_DATASETS.values()]
    rep = wilcoxon_signed_rank(pairs)
    assert (rep.w_plus, rep.w_minus) == (55.0, 0.0)


def test_tpso_against_ga_table_drops_tie():
    # one dataset is an exact tie, so nine pairs are ranked
    pairs = [(t, g) for t, g, _ in TEN_DATASETS.values()]
    rep = wilcoxon_signed_rank(pairs)
    assert rep.n_effective == 9
    assert rep.statistic == 1.0
    assert (rep.w_plus, rep.w_minus) == (44.0, 1.0)
    assert rep.p_value == pytest.approx(4 / 512)
    assert wilcoxon_signed_rank(pairs, "greater").p_value == pytest.approx(2 / 512)


def test_errors():
    with pytest.raises(ValueError, match="at least 5"):
        wilcoxon_signed_rank([(1, 0)] * 4)
    with pytest.raises(ValueError, match="all differences zero"):
        wilcoxon_signed_rank([(1, 1)] * 6)
    with pytest.raises(ValueError):
        wilcoxon_signed_rank([(1, 0)] * 6, alternative="sideways")


pair_values = st.integers(-6, 6).map(float)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(pair_values, pair_values), min_size=5, max_size=12))
def test_matches_sign_enumeration(pairs):
    d = [a - b for a, b in pairs]
    if not any(d):
        return
    w_plus, stat, p_two, p_greater, p_less = enumerate_signs(d)
    rep = wilcoxon_signed_rank(pairs)
    n = rep.n_effective
    assert rep.w_plus == w_plus and rep.statistic == stat
    assert rep.w_plus + rep.w_minus == n * (n + 1) / 2
    assert abs(rep.p_value - p_two) <= 1e-12
    assert abs(wilcoxon_signed_rank(pairs, "greater").p_value - p_greater) <= 1e-12
    assert abs(wilcoxon_signed_rank(pairs, "less").p_value - p_less) <= 1e-12
    assert 0 < rep.p_value <= 1


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=5, max_size=15))
def test_antisymmetry(pairs):
    if all(a == b for a, b in pairs):
        return
    fwd = wilcoxon_signed_rank(pairs)
    back = wilcoxon_signed_rank([(b, a) for a, b in pairs])
    assert (fwd.w_plus, fwd.w_minus) == (back.w_minus, back.w_plus)
    assert fwd.p_value == back.p_value


def test_mean_std():
    m, s = mean_std([2, 4])
    assert m == 3 and s == pytest.approx(np.sqrt(2))
    assert mean_std([7, 7, 7])[1] == 0
    m, s = mean_std([1, 2, 3, 4, 5])
    assert m == 3 and s == pytest.approx(1.5811388300841898)
    with pytest.raises(ValueError):
        mean_std([1.0])


def test_regression_examples():
    fit = linear_regression([1, 2, 3, 4], [3, 5, 7, 9])
    assert (fit.slope, fit.intercept, fit.r_squared) == (pytest.approx(2), pytest.approx(1), 1.0)
    flat = linear_regression([1, 2, 3], [4, 4, 4])
    assert flat.slope == 0 and flat.r_squared == 0
    with pytest.raises(ValueError, match="degenerate"):
        linear_regression([5, 5, 5], [1, 2, 3])
    with pytest.raises(ValueError):
        linear_regression([1, 2], [1, 2])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3)), min_size=3, max_size=30))
def test_regression_residuals_sum_to_zero(points):
    x, y = map(np.array, zip(*points))
    if np.ptp(x) < 1e-3:
        return
    fit = linear_regression(x, y)
    assert abs(np.sum(y - fit.predict(x))) <= 1e-9 * max(1.0, np.abs(y).sum())
    assert 0 <= fit.r_squared <= 1
