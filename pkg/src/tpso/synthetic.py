"""Synthetic binary-class datasets for tests and the timing benchmark."""
from __future__ import annotations

import csv

import numpy as np

from .dataset import Dataset


def planted_feature(n_records: int = 200, n_features: int = 10, planted: int = 0, seed=0, name="planted") -> Dataset:
    """One feature separates the classes perfectly, the rest are N(0, 1) noise.

    The planted column is U(1, 2) for positives and U(-2, -1) for negatives,
    so it also has within-class spread and a clearly positive score.
    """
    rng = np.random.default_rng(seed)
    y = np.arange(n_records) % 2
    rng.shuffle(y)
    X = rng.standard_normal((n_records, n_features))
    X[:, planted] = np.where(y == 1, rng.uniform(1, 2, n_records), rng.uniform(-2, -1, n_records))
    return Dataset.from_arrays(X, np.where(y == 1, "pos", "neg"), name=name)


def majority_of_three(n_records: int, n_features: int = 15, seed=0, name=None) -> Dataset:
    """Benchmark generator: the label is the majority vote of three
    thresholded N(0, 1) features; the other columns are pure noise.  Classes
    are balanced in expectation by symmetry."""
    if n_features < 3:
        raise ValueError("need at least 3 features")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n_records, n_features))
    votes = (X[:, :3] > 0).sum(axis=1)
    labels = np.where(votes >= 2, "pos", "neg")
    return Dataset.from_arrays(X, labels, name=name or f"majority3_{n_records}")


def xor_clusters(per_cluster: int = 10, spread: float = 0.3, seed=0) -> Dataset:
    """Four Gaussian blobs at (+-1, +-1) labelled by the sign of x * y."""
    rng = np.random.default_rng(seed)
    centers = [(-1, -1), (-1, 1), (1, -1), (1, 1)]
    X, labels = [], []
    for cx, cy in centers:
        X.append(rng.normal((cx, cy), spread, size=(per_cluster, 2)))
        labels += ["pos" if cx * cy > 0 else "neg"] * per_cluster
    return Dataset.from_arrays(np.vstack(X), np.array(labels), name="xor")


def write_csv(dataset: Dataset, path, label_column: str = "class"):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(dataset.feature_names + [label_column])
        for row, lab in zip(dataset.X, dataset.labels):
            writer.writerow([repr(float(v)) for v in row] + [lab])
