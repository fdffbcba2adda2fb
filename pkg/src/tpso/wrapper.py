"""ADT-backed subset evaluation for wrapper search."""
from __future__ import annotations

import numpy as np

from .adt import DEFAULT_ROUNDS, accuracy, fit_arrays, margins_from_arrays, sort_order, train_adt
from .dataset import Dataset, project, stratified_kfold


class WrapperEvaluator:
    """Mean ADT accuracy over a stratified inner cross-validation.

    Splits, label vectors and per-feature sort orders are prepared once, so
    scoring a mask costs only the ADT fits on the selected columns.
    """

    def __init__(self, train: Dataset, folds: int = 5, rounds: int = DEFAULT_ROUNDS, seed=0):
        self.n_features = train.n_features
        self.rounds = rounds
        self.categorical = train.categorical
        plan = stratified_kfold(train, folds, seed)
        X, y = train.X, train.y
        self._splits = []
        for tr, te in plan:
            Xtr = np.ascontiguousarray(X[tr])
            self._splits.append((Xtr, y[tr], sort_order(Xtr), np.ascontiguousarray(X[te]), y[te]))

    def __call__(self, mask) -> float:
        cols = np.flatnonzero(np.asarray(mask, dtype=bool))
        if cols.size == 0:
            raise ValueError("empty feature mask")
        cat = self.categorical[cols]
        scores = []
        for Xtr, ytr, order, Xte, yte in self._splits:
            fitted = fit_arrays(Xtr[:, cols], ytr, cat, self.rounds, order[cols])
            pred = np.where(margins_from_arrays(fitted, Xte[:, cols]) > 0, 1.0, -1.0)
            scores.append(np.mean(pred == yte))
        return float(np.mean(scores))


def holdout_accuracy(train: Dataset, test: Dataset, mask=None, rounds: int = DEFAULT_ROUNDS) -> float:
    """Train on ``train`` (projected to ``mask``), score on ``test``."""
    if mask is not None:
        train, test = project(train, mask), project(test, mask)
    return accuracy(train_adt(train, rounds), test)
