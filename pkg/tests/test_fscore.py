import statistics

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_dataset
from tpso.dataset import Dataset
from tpso.fscore import FeatureScoreVector, feature_score, median, score_all, subset_ratio


def oracle_score(pos, neg):
    """Direct transcription of the median score using the stdlib."""
    everything = list(pos) + list(neg)
    m, mp, mn = statistics.median(everything), statistics.median(pos), statistics.median(neg)
    v1 = (mp - m) ** 2 + (mn - m) ** 2
    v2 = sum((x - mp) ** 2 for x in pos) / (len(pos) - 1) + sum((x - mn) ** 2 for x in neg) / (len(neg) - 1)
    return 0.0 if v2 == 0 else v1 / v2


def two_class(pos, neg, name="f"):
    return make_dataset({name: list(pos) + list(neg)}, ["p"] * len(pos) + ["n"] * len(neg))


@pytest.mark.parametrize("values, expected", [([3, 1, 2], 2), ([1, 2, 3, 7, 8, 9], 5), ([5], 5)])
def test_median(values, expected):
    assert median(values) == expected


def test_median_empty():
    with pytest.raises(ValueError):
        median([])


def test_worked_example():
    # class medians 2 and 8, overall 5: V1 = 18, V2 = 2
    assert feature_score(two_class([1, 2, 3], [7, 8, 9]), 0) == pytest.approx(9.0)


def test_equal_medians_score_zero():
    assert feature_score(two_class([1, 5, 9], [4, 5, 6]), 0) == 0.0


def test_constant_feature_zero():
    assert feature_score(two_class([4, 4, 4], [4, 4, 4]), 0) == 0.0


def test_too_few_per_class():
    d = make_dataset({"a": [1.0, 2.0, 3.0]}, ["p", "n", "n"])
    with pytest.raises(ValueError):
        feature_score(d, 0)


def test_score_all_composition():
    d = make_dataset({"a": [1, 2, 3, 7, 8, 9], "b": [4] * 6}, ["p"] * 3 + ["n"] * 3)
    s = score_all(d)
    np.testing.assert_allclose(s.scores, [9.0, 0.0])
    assert s.total == pytest.approx(9.0)
    assert subset_ratio(s, [True, False]) == pytest.approx(1.0)


def test_single_feature_total():
    d = two_class([1, 2, 4], [0, 7, 9])
    assert score_all(d).total == pytest.approx(feature_score(d, 0))


def test_subset_ratio_edges():
    s = FeatureScoreVector(np.array([1.0, 2.0, 3.0]))
    assert subset_ratio(s, [True] * 3) == 1.0
    assert subset_ratio(s, [False] * 3) == 0.0
    with pytest.raises(ValueError):
        subset_ratio(FeatureScoreVector(np.zeros(2)), [True, False])
    with pytest.raises(ValueError):
        subset_ratio(s, [True, False])


finite = st.floats(-1e3, 1e3, allow_nan=False).map(lambda v: round(v, 3))


@settings(max_examples=200, deadline=None)
@given(pos=st.lists(finite, min_size=2, max_size=4), neg=st.lists(finite, min_size=2, max_size=4))
def test_matches_oracle_small(pos, neg):
    got = feature_score(two_class(pos, neg), 0)
    want = oracle_score(pos, neg)
    assert got >= 0
    assert got == pytest.approx(want, rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(
    pos=st.lists(finite, min_size=2, max_size=10),
    neg=st.lists(finite, min_size=2, max_size=10),
    c=st.floats(0.1, 50).map(lambda v: round(v, 2)) | st.floats(-50, -0.1).map(lambda v: round(v, 2)),
    b=st.floats(-100, 100).map(lambda v: round(v, 2)),
)
def test_affine_invariance(pos, neg, c, b):
    base = feature_score(two_class(pos, neg), 0)
    moved = feature_score(two_class([c * x + b for x in pos], [c * x + b for x in neg]), 0)
    if base == 0.0:
        assert moved == pytest.approx(0.0, abs=1e-9)
    else:
        assert moved == pytest.approx(base, rel=1e-6)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 10_000), d=st.integers(2, 6))
def test_permuting_features_permutes_scores(seed, d):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((12, d))
    labels = np.array(["p", "n"] * 6)
    perm = rng.permutation(d)
    a = score_all(Dataset.from_arrays(X, labels)).scores
    b = score_all(Dataset.from_arrays(X[:, perm], labels)).scores
    np.testing.assert_allclose(b, a[perm])


@settings(max_examples=100, deadline=None)
@given(
    scores=st.lists(st.floats(0, 100), min_size=1, max_size=12).filter(lambda s: sum(s) > 0),
    data=st.data(),
)
def test_subset_ratio_monotone(scores, data):
    s = FeatureScoreVector(np.array(scores))
    mask = np.array(data.draw(st.lists(st.booleans(), min_size=len(scores), max_size=len(scores))))
    r = subset_ratio(s, mask)
    assert 0.0 <= r <= 1.0 + 1e-12
    for j in np.flatnonzero(~mask):
        bigger = mask.copy()
        bigger[j] = True
        assert subset_ratio(s, bigger) >= r
