"""Median-based feature discrimination score and the subset score ratio.

For feature i with class medians m+, m- and overall median m::

    V1 = (m+ - m)^2 + (m- - m)^2
    V2 = sum_k (x+_k - m+)^2 / (n+ - 1) + sum_k (x-_k - m-)^2 / (n- - 1)
    F  = V1 / V2            (0 when V2 == 0)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


def median(values) -> float:
    values = np.sort(np.asarray(values, dtype=float))
    n = len(values)
    if n == 0:
        raise ValueError("median of an empty vector")
    mid = n // 2
    if n % 2:
        return float(values[mid])
    return float((values[mid - 1] + values[mid]) / 2.0)


def score_column(values, positive) -> float:
    """Score one column given a boolean positive-class indicator."""
    values = np.asarray(values, dtype=float)
    positive = np.asarray(positive, dtype=bool)
    pos, neg = values[positive], values[~positive]
    if len(pos) < 2 or len(neg) < 2:
        raise ValueError("feature score needs at least 2 records per class")
    med_pos, med_neg, med_all = median(pos), median(neg), median(values)
    v1 = (med_pos - med_all) ** 2 + (med_neg - med_all) ** 2
    v2 = np.sum((pos - med_pos) ** 2) / (len(pos) - 1) + np.sum((neg - med_neg) ** 2) / (len(neg) - 1)
    if v2 == 0:
        return 0.0
    return float(v1 / v2)


def feature_score(dataset, i: int) -> float:
    return score_column(dataset.X[:, i], dataset.y > 0)


@dataclass(frozen=True)
class FeatureScoreVector:
    scores: np.ndarray
    names: tuple = ()

    @property
    def total(self) -> float:
        return math.fsum(self.scores)

    def __len__(self):
        return len(self.scores)


def score_all(dataset) -> FeatureScoreVector:
    positive = dataset.y > 0
    X = dataset.X
    scores = np.array([score_column(X[:, j], positive) for j in range(X.shape[1])])
    return FeatureScoreVector(scores, tuple(dataset.feature_names))


def subset_sum(scores: FeatureScoreVector, mask) -> float:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != scores.scores.shape:
        raise ValueError(f"mask length {mask.size} != score count {len(scores)}")
    # correctly rounded sums keep M1 monotone in the mask and M1 == M2 for a full mask
    return math.fsum(scores.scores[mask])


def subset_ratio(scores: FeatureScoreVector, mask) -> float:
    """M1/M2: share of the total discrimination score carried by ``mask``."""
    total = scores.total
    if total <= 0:
        raise ValueError("total feature score must be positive (M2 > 0)")
    return subset_sum(scores, mask) / total
