"""Binary-class tabular datasets: CSV ingestion, imputation, projection and
stratified k-fold splitting."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path

import numpy as np

from .fscore import median

MISSING_TOKENS = frozenset({"", "?"})
NUMERIC = "numeric"
CATEGORICAL = "categorical"


class DatasetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FeatureColumn:
    name: str
    kind: str
    values: np.ndarray
    missing_mask: np.ndarray
    categories: tuple = ()

    def __post_init__(self):
        if self.kind not in (NUMERIC, CATEGORICAL):
            raise DatasetError(f"unknown column kind {self.kind!r}")
        if len(self.values) != len(self.missing_mask):
            raise DatasetError(f"column {self.name!r}: values/missing_mask length differ")


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature columns plus a two-class label vector.

    ``classes`` is sorted, so ``classes[0]`` is the negative class and
    ``classes[1]`` the positive one.
    """

    name: str
    columns: tuple
    labels: np.ndarray
    classes: tuple = field(default=())

    def __post_init__(self):
        labels = np.asarray(self.labels).astype(str)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "columns", tuple(self.columns))
        classes = tuple(sorted(set(labels.tolist())))
        if not self.classes:
            object.__setattr__(self, "classes", classes)
        if len(self.classes) != 2:
            raise DatasetError(f"expected exactly 2 classes, found {len(self.classes)}: {list(self.classes)[:5]}")
        if not set(classes) <= set(self.classes):
            raise DatasetError(f"labels {classes} outside declared classes {self.classes}")
        n = len(labels)
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DatasetError("column names must be unique")
        for col in self.columns:
            if len(col.values) != n:
                raise DatasetError(f"column {col.name!r} has {len(col.values)} values, expected {n}")

    @property
    def n_records(self) -> int:
        return len(self.labels)

    @property
    def n_features(self) -> int:
        return len(self.columns)

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @cached_property
    def X(self) -> np.ndarray:
        """(n_records, n_features) float matrix; categorical columns as codes."""
        if not self.columns:
            return np.empty((self.n_records, 0))
        return np.column_stack([np.asarray(c.values, dtype=float) for c in self.columns])

    @cached_property
    def y(self) -> np.ndarray:
        """Labels as +1 (positive class) / -1 (negative class)."""
        return np.where(self.labels == self.classes[1], 1.0, -1.0)

    @cached_property
    def categorical(self) -> np.ndarray:
        return np.array([c.kind == CATEGORICAL for c in self.columns], dtype=bool)

    @property
    def has_missing(self) -> bool:
        return any(c.missing_mask.any() for c in self.columns)

    def class_counts(self) -> dict:
        return {c: int(np.sum(self.labels == c)) for c in self.classes}

    def subset(self, indices) -> "Dataset":
        """Row subset, keeping the column schema and class tags."""
        idx = np.asarray(indices, dtype=int)
        cols = tuple(replace(c, values=c.values[idx], missing_mask=c.missing_mask[idx]) for c in self.columns)
        return Dataset(self.name, cols, self.labels[idx], classes=self.classes)

    @classmethod
    def from_arrays(cls, X, labels, name="data", feature_names=None, categorical=None) -> "Dataset":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2:
            raise DatasetError("X must be two-dimensional")
        d = X.shape[1]
        names = feature_names or [f"f{j}" for j in range(d)]
        cat = np.zeros(d, dtype=bool) if categorical is None else np.asarray(categorical, dtype=bool)
        cols = []
        for j in range(d):
            values = X[:, j].copy()
            kind = CATEGORICAL if cat[j] else NUMERIC
            if kind == CATEGORICAL:
                values = values.astype(int)
            cols.append(FeatureColumn(names[j], kind, values, np.zeros(len(values), dtype=bool)))
        return cls(name, tuple(cols), np.asarray(labels).astype(str))


def _parse_float(cell):
    try:
        return float(cell)
    except ValueError:
        return None


def _build_column(name, cells, kind):
    missing = np.array([c in MISSING_TOKENS for c in cells], dtype=bool)
    present = [c for c, m in zip(cells, missing) if not m]
    if kind is None:
        kind = NUMERIC if all(_parse_float(c) is not None for c in present) else CATEGORICAL
    if kind == NUMERIC:
        values = np.full(len(cells), np.nan)
        for i, c in enumerate(cells):
            if missing[i]:
                continue
            v = _parse_float(c)
            if v is None:
                raise DatasetError(f"column {name!r}: cannot parse {c!r} as a number")
            values[i] = v
        return FeatureColumn(name, NUMERIC, values, missing)
    codes = {}
    values = np.full(len(cells), -1, dtype=int)
    for i, c in enumerate(cells):
        if not missing[i]:
            values[i] = codes.setdefault(c, len(codes))
    return FeatureColumn(name, CATEGORICAL, values, missing, categories=tuple(codes))


def load_schema(path) -> dict:
    """Read a sidecar schema file: JSON object of column name -> kind."""
    with open(path) as fh:
        schema = json.load(fh)
    bad = {k: v for k, v in schema.items() if v not in (NUMERIC, CATEGORICAL)}
    if bad:
        raise DatasetError(f"invalid schema kinds: {bad}")
    return schema


def load_csv(path, label_column: str, schema_hints: dict | None = None, name: str | None = None) -> Dataset:
    """Load a header-first CSV file.

    ``"?"`` and empty cells are missing.  Columns whose non-missing cells all
    parse as floats are numeric, anything else is categorical (codes in
    first-appearance order); ``schema_hints`` overrides the inference.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"dataset not found: {path}")
    with open(path, newline="") as fh:
        rows = [[cell.strip() for cell in row] for row in csv.reader(fh) if row]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header, body = rows[0], rows[1:]
    if not body:
        raise DatasetError(f"{path}: no records")
    if label_column not in header:
        raise DatasetError(f"{path}: label column {label_column!r} not in header")
    width = len(header)
    for lineno, row in enumerate(body, start=2):
        if len(row) != width:
            raise DatasetError(f"{path}:{lineno}: expected {width} cells, got {len(row)}")
    schema_hints = schema_hints or {}
    unknown = set(schema_hints) - set(header)
    if unknown:
        raise DatasetError(f"schema names unknown columns: {sorted(unknown)}")

    label_idx = header.index(label_column)
    labels = [row[label_idx] for row in body]
    if any(lab in MISSING_TOKENS for lab in labels):
        raise DatasetError(f"{path}: missing values in label column {label_column!r}")
    n_classes = len(set(labels))
    if n_classes != 2:
        raise DatasetError(f"{path}: label column {label_column!r} has {n_classes} classes, expected 2")
    small = sorted(c for c in set(labels) if labels.count(c) < 2)
    if small:
        raise DatasetError(f"{path}: class {small[0]!r} has fewer than 2 records")

    cols = []
    for j, col_name in enumerate(header):
        if j == label_idx:
            continue
        cells = [row[j] for row in body]
        cols.append(_build_column(col_name, cells, schema_hints.get(col_name)))
    return Dataset(name or path.stem, tuple(cols), np.array(labels))


def impute(dataset: Dataset) -> Dataset:
    """Fill numeric gaps with the column median, categorical gaps with the mode."""
    if not dataset.has_missing:
        return dataset
    cols = []
    for col in dataset.columns:
        miss = col.missing_mask
        if not miss.any():
            cols.append(col)
            continue
        if miss.all():
            raise DatasetError(f"column {col.name!r} is entirely missing")
        values = col.values.copy()
        present = values[~miss]
        if col.kind == NUMERIC:
            values[miss] = median(present)
        else:
            counts = np.bincount(present)
            values[miss] = int(np.argmax(counts))  # lowest code wins ties
        cols.append(replace(col, values=values, missing_mask=np.zeros_like(miss)))
    return Dataset(dataset.name, tuple(cols), dataset.labels, classes=dataset.classes)


def project(dataset: Dataset, mask) -> Dataset:
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (dataset.n_features,):
        raise DatasetError(f"mask length {mask.size} != feature count {dataset.n_features}")
    if not mask.any():
        raise DatasetError("cannot project onto an empty feature mask")
    cols = tuple(c for c, keep in zip(dataset.columns, mask) if keep)
    return Dataset(dataset.name, cols, dataset.labels, classes=dataset.classes)


@dataclass(frozen=True)
class FoldPlan:
    k: int
    folds: tuple
    seed: int | None

    def __iter__(self):
        return iter(self.folds)

    def __len__(self):
        return len(self.folds)


def stratified_kfold_indices(labels, k: int, seed) -> FoldPlan:
    labels = np.asarray(labels)
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = np.random.default_rng(seed)
    n = len(labels)
    assignment = np.empty(n, dtype=int)
    position = 0
    # one running counter across strata, so fold sizes also balance overall
    for cls in sorted(set(labels.tolist())):
        members = np.flatnonzero(labels == cls)
        if len(members) < k:
            raise DatasetError(f"class {cls!r} has {len(members)} records, fewer than k={k}")
        members = rng.permutation(members)
        assignment[members] = (position + np.arange(len(members))) % k
        position += len(members)
    all_idx = np.arange(n)
    folds = tuple(
        (all_idx[assignment != f], all_idx[assignment == f]) for f in range(k)
    )
    return FoldPlan(k, folds, seed)


def stratified_kfold(dataset: Dataset, k: int = 10, seed=0) -> FoldPlan:
    return stratified_kfold_indices(dataset.labels, k, seed)
