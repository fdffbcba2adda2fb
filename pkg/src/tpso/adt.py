"""Alternating decision tree (ADT) classifier.

Trained by the boosting construction of Freund & Mason: the root prediction
is half the log-odds of the class weights, and every round adds one decision
node (under an existing prediction node, the *precondition*) with two
prediction children, choosing the (precondition, condition) pair that
minimises

    Z = 2 (sqrt(W+(c1 & c2) W-(c1 & c2)) + sqrt(W+(c1 & ~c2) W-(c1 & ~c2))) + W(~c1)

Records are classified by the sign of the sum of prediction values along
every root path whose decision nodes are all satisfied.

Prediction nodes live in an arena: id 0 is the root and decision ``j``
owns prediction nodes ``2j + 1`` (condition true) and ``2j + 2`` (false).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numba import njit

DEFAULT_ROUNDS = 10


class ADTError(ValueError):
    pass


@dataclass(frozen=True)
class PredictionNode:
    value: float
    parent: int | None = None  # owning decision id; None for the root


@dataclass(frozen=True)
class DecisionNode:
    parent: int  # precondition prediction-node id
    feature: int
    threshold: float
    categorical: bool = False  # equality test instead of <=
    yes: int = -1
    no: int = -1

    def test(self, value) -> bool:
        return value == self.threshold if self.categorical else value <= self.threshold


@dataclass(frozen=True, eq=False)
class ADTModel:
    predictions: tuple
    decisions: tuple
    positive_class: str = "1"
    negative_class: str = "0"
    n_features: int = 0
    feature_names: tuple = ()
    losses: tuple = field(default=())

    def __post_init__(self):
        preds, decs = tuple(self.predictions), tuple(self.decisions)
        object.__setattr__(self, "predictions", preds)
        object.__setattr__(self, "decisions", decs)
        if not preds or preds[0].parent is not None:
            raise ADTError("the root must be a prediction node")
        if len(preds) != 1 + 2 * len(decs):
            raise ADTError("each decision node needs exactly two prediction children")
        for j, dec in enumerate(decs):
            if not 0 <= dec.parent < 2 * j + 1:
                raise ADTError(f"decision {j} hangs off unknown prediction node {dec.parent}")
            if (dec.yes, dec.no) != (2 * j + 1, 2 * j + 2):
                raise ADTError(f"decision {j} children must be prediction nodes {2 * j + 1}, {2 * j + 2}")
            if preds[dec.yes].parent != j or preds[dec.no].parent != j:
                raise ADTError(f"prediction children of decision {j} point at the wrong parent")
            if self.n_features and not 0 <= dec.feature < self.n_features:
                raise ADTError(f"decision {j} tests feature {dec.feature} outside the schema")
        if not all(math.isfinite(p.value) for p in preds):
            raise ADTError("prediction values must be finite")

    @classmethod
    def build(cls, root: float, rules=(), **kwargs) -> "ADTModel":
        """Assemble a model from ``(parent, feature, threshold, yes_value,
        no_value[, categorical])`` tuples, in creation order."""
        preds = [PredictionNode(float(root))]
        decs = []
        for j, rule in enumerate(rules):
            parent, feature, threshold, a, b = rule[:5]
            categorical = bool(rule[5]) if len(rule) > 5 else False
            decs.append(DecisionNode(int(parent), int(feature), float(threshold), categorical, 2 * j + 1, 2 * j + 2))
            preds += [PredictionNode(float(a), j), PredictionNode(float(b), j)]
        return cls(tuple(preds), tuple(decs), **kwargs)

    @property
    def root_prediction(self) -> float:
        return self.predictions[0].value

    @property
    def boosting_rounds(self) -> int:
        return len(self.decisions)

    @cached_property
    def _arrays(self):
        decs = self.decisions
        return (
            float(self.root_prediction),
            np.array([d.parent for d in decs], dtype=np.int64),
            np.array([d.feature for d in decs], dtype=np.int64),
            np.array([d.threshold for d in decs], dtype=np.float64),
            np.array([d.categorical for d in decs], dtype=np.bool_),
            np.array([self.predictions[d.yes].value for d in decs], dtype=np.float64),
            np.array([self.predictions[d.no].value for d in decs], dtype=np.float64),
        )

    def _check_width(self, width):
        if self.n_features and width != self.n_features:
            raise ADTError(f"record has {width} features, model expects {self.n_features}")

    def margins(self, X) -> np.ndarray:
        X = np.ascontiguousarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ADTError("expected a 2-D record matrix")
        self._check_width(X.shape[1])
        return _margins(X, *self._arrays)

    def predict(self, X) -> np.ndarray:
        m = self.margins(X)
        return np.where(m > 0, self.positive_class, self.negative_class)

    def to_dict(self) -> dict:
        return {
            "format": "adt/1",
            "positive_class": self.positive_class,
            "negative_class": self.negative_class,
            "n_features": self.n_features,
            "feature_names": list(self.feature_names),
            "predictions": [
                {"id": i, "value": p.value, "parent": p.parent} for i, p in enumerate(self.predictions)
            ],
            "decisions": [
                {
                    "id": j,
                    "parent": d.parent,
                    "feature": d.feature,
                    "test": "eq" if d.categorical else "le",
                    "value": d.threshold,
                    "yes": d.yes,
                    "no": d.no,
                }
                for j, d in enumerate(self.decisions)
            ],
            "losses": list(self.losses),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, doc: dict) -> "ADTModel":
        preds = tuple(PredictionNode(p["value"], p["parent"]) for p in doc["predictions"])
        decs = tuple(
            DecisionNode(d["parent"], d["feature"], d["value"], d["test"] == "eq", d["yes"], d["no"])
            for d in doc["decisions"]
        )
        return cls(
            preds,
            decs,
            positive_class=doc["positive_class"],
            negative_class=doc["negative_class"],
            n_features=doc["n_features"],
            feature_names=tuple(doc["feature_names"]),
            losses=tuple(doc.get("losses", ())),
        )

    @classmethod
    def from_json(cls, text: str) -> "ADTModel":
        return cls.from_dict(json.loads(text))


@njit(cache=True)
def _margins(X, root, parent, feature, threshold, categorical, yes_value, no_value):
    n = X.shape[0]
    n_dec = parent.shape[0]
    reach = np.zeros((1 + 2 * n_dec, n), dtype=np.bool_)
    margin = np.full(n, root)
    reach[0, :] = True
    for j in range(n_dec):
        p, f, t = parent[j], feature[j], threshold[j]
        for i in range(n):
            if not reach[p, i]:
                continue
            if categorical[j]:
                ok = X[i, f] == t
            else:
                ok = X[i, f] <= t
            if ok:
                reach[2 * j + 1, i] = True
                margin[i] += yes_value[j]
            else:
                reach[2 * j + 2, i] = True
                margin[i] += no_value[j]
    return margin


@njit(cache=True)
def _fit(X, y, categorical, n_codes, rounds, eps, order):
    """Boosting loop.

    Every prediction node keeps its members sorted by each feature, built
    once when the node is created, so a round scans node members only.
    Candidates are visited in (precondition, feature, threshold) order and
    only a strictly smaller Z replaces the incumbent: ties go to the lowest
    precondition id, then feature, then threshold.
    """
    n, d = X.shape
    n_nodes = 1 + 2 * rounds
    Xt = np.ascontiguousarray(X.T)
    node_ord = np.empty((n_nodes, d, n), dtype=np.int32)
    size = np.zeros(n_nodes, dtype=np.int64)
    node_ord[0] = order
    size[0] = n

    w = np.full(n, 1.0 / n)
    wp_all = 0.0
    wn_all = 0.0
    for i in range(n):
        if y[i] > 0:
            wp_all += w[i]
        else:
            wn_all += w[i]
    root = 0.5 * np.log(wp_all / wn_all)
    for i in range(n):
        w[i] *= np.exp(-y[i] * root)

    parent = np.zeros(rounds, dtype=np.int64)
    feat = np.zeros(rounds, dtype=np.int64)
    thr = np.zeros(rounds, dtype=np.float64)
    iscat = np.zeros(rounds, dtype=np.bool_)
    a_val = np.zeros(rounds, dtype=np.float64)
    b_val = np.zeros(rounds, dtype=np.float64)
    losses = np.zeros(rounds + 1, dtype=np.float64)
    losses[0] = w.sum()

    max_codes = 1
    for f in range(d):
        if n_codes[f] > max_codes:
            max_codes = n_codes[f]
    cp = np.zeros(max_codes)
    cn = np.zeros(max_codes)
    seen = np.zeros(max_codes, dtype=np.bool_)
    wpos = np.zeros(n)
    wneg = np.zeros(n)
    cond = np.zeros(n, dtype=np.int64)

    n_pred = 1
    n_dec = 0
    for r in range(rounds):
        for i in range(n):
            if y[i] > 0:
                wpos[i] = w[i]
                wneg[i] = 0.0
            else:
                wpos[i] = 0.0
                wneg[i] = w[i]
        w_total = w.sum()
        best_z = np.inf
        best_q = -1
        best_f = -1
        best_t = 0.0
        for q in range(n_pred):
            m = size[q]
            if m < 2:
                continue
            wp_q = 0.0
            wn_q = 0.0
            for k in range(m):
                i = node_ord[q, 0, k]
                wp_q += wpos[i]
                wn_q += wneg[i]
            w_out = max(w_total - wp_q - wn_q, 0.0)
            if w_out >= best_z:
                continue  # z >= w_out, so nothing here can win
            for f in range(d):
                members = node_ord[q, f]
                if categorical[f]:
                    nc = n_codes[f]
                    cp[:nc] = 0.0
                    cn[:nc] = 0.0
                    seen[:nc] = False
                    for k in range(m):
                        i = members[k]
                        c = int(Xt[f, i])
                        cp[c] += wpos[i]
                        cn[c] += wneg[i]
                        seen[c] = True
                    distinct = 0
                    for c in range(nc):
                        if seen[c]:
                            distinct += 1
                    if distinct < 2:
                        continue
                    for c in range(nc):
                        if not seen[c]:
                            continue
                        rp = max(wp_q - cp[c], 0.0)
                        rn = max(wn_q - cn[c], 0.0)
                        z = 2.0 * (np.sqrt(cp[c] * cn[c]) + np.sqrt(rp * rn)) + w_out
                        if z < best_z:
                            best_z = z
                            best_q = q
                            best_f = f
                            best_t = float(c)
                else:
                    # (sqrt(p1) + sqrt(p2))^2 = p1 + p2 + 2 sqrt(p1 p2): one sqrt
                    # screens out candidates that cannot beat best_z
                    half = 0.5 * (best_z - w_out)
                    bound = half * half * (1.0 + 1e-9)
                    acc_p = 0.0
                    acc_n = 0.0
                    prev = Xt[f, members[0]]
                    for k in range(m):
                        i = members[k]
                        v = Xt[f, i]
                        if v > prev:
                            p1 = acc_p * acc_n
                            p2 = max(wp_q - acc_p, 0.0) * max(wn_q - acc_n, 0.0)
                            if p1 + p2 + 2.0 * np.sqrt(p1 * p2) < bound:
                                z = 2.0 * (np.sqrt(p1) + np.sqrt(p2)) + w_out
                                if z < best_z:
                                    t = 0.5 * (prev + v)
                                    if t >= v:
                                        t = prev
                                    best_z = z
                                    best_q = q
                                    best_f = f
                                    best_t = t
                                    half = 0.5 * (best_z - w_out)
                                    bound = half * half * (1.0 + 1e-9)
                        acc_p += wpos[i]
                        acc_n += wneg[i]
                        prev = v
        if best_q < 0:
            break

        cat = categorical[best_f]
        yp = 0.0
        yn = 0.0
        np_ = 0.0
        nn = 0.0
        m = size[best_q]
        for k in range(m):
            i = node_ord[best_q, 0, k]
            v = Xt[best_f, i]
            ok = (v == best_t) if cat else (v <= best_t)
            cond[i] = 1 if ok else 0
            if ok:
                yp += wpos[i]
                yn += wneg[i]
            else:
                np_ += wpos[i]
                nn += wneg[i]
        yes_node = 2 * r + 1
        no_node = 2 * r + 2
        for f in range(d):
            src = node_ord[best_q, f]
            dst_yes = node_ord[yes_node, f]
            dst_no = node_ord[no_node, f]
            cy = 0
            cno = 0
            for k in range(m):
                i = src[k]
                c = cond[i]
                dst_yes[cy] = i
                dst_no[cno] = i
                cy += c
                cno += 1 - c
            size[yes_node] = cy
            size[no_node] = cno
        a = 0.5 * np.log((yp + eps) / (yn + eps))
        b = 0.5 * np.log((np_ + eps) / (nn + eps))
        for k in range(m):
            i = node_ord[best_q, 0, k]
            if cond[i]:
                w[i] *= np.exp(-y[i] * a)
            else:
                w[i] *= np.exp(-y[i] * b)
        parent[r] = best_q
        feat[r] = best_f
        thr[r] = best_t
        iscat[r] = cat
        a_val[r] = a
        b_val[r] = b
        losses[r + 1] = w.sum()
        n_pred += 2
        n_dec += 1
    return root, parent[:n_dec], feat[:n_dec], thr[:n_dec], iscat[:n_dec], a_val[:n_dec], b_val[:n_dec], losses[: n_dec + 1]


def _code_counts(X, categorical):
    n_codes = np.zeros(X.shape[1], dtype=np.int64)
    for f in np.flatnonzero(categorical):
        col = X[:, f]
        if len(col) and col.min() < 0:
            raise ADTError(f"feature {f}: negative category code (impute missing values first)")
        n_codes[f] = int(col.max()) + 1 if len(col) else 0
    return n_codes


def sort_order(X) -> np.ndarray:
    """Per-feature stable argsort, shape (n_features, n_records)."""
    X = np.asarray(X, dtype=np.float64)
    return np.ascontiguousarray(np.argsort(X, axis=0, kind="stable").T.astype(np.int32))


def fit_arrays(X, y, categorical=None, rounds: int = DEFAULT_ROUNDS, order=None):
    """Train on raw arrays (``y`` in {-1, +1}); returns the kernel outputs.

    This is the fast path used by wrapper evaluation; ``train_adt`` wraps it.
    ``order`` may carry a precomputed ``sort_order(X)``.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if rounds < 1:
        raise ADTError("rounds must be >= 1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ADTError("training data must contain both classes")
    if np.isnan(X).any():
        raise ADTError("training data contains missing values; impute first")
    if categorical is None:
        categorical = np.zeros(X.shape[1], dtype=np.bool_)
    categorical = np.ascontiguousarray(categorical, dtype=np.bool_)
    if order is None:
        order = sort_order(X)
    elif order.shape != (X.shape[1], X.shape[0]):
        raise ADTError("sort order does not match the training matrix")
    eps = 1.0 / (2.0 * len(y))
    return _fit(X, y, categorical, _code_counts(X, categorical), int(rounds), eps, np.ascontiguousarray(order, dtype=np.int32))


def margins_from_arrays(fitted, X) -> np.ndarray:
    root, parent, feat, thr, iscat, a, b, _ = fitted
    return _margins(np.ascontiguousarray(X, dtype=np.float64), root, parent, feat, thr, iscat, a, b)


def train_adt(train, rounds: int = DEFAULT_ROUNDS, seed=None) -> ADTModel:
    """Fit an ADT on a ``Dataset``.

    The learner is deterministic; ``seed`` is accepted so every search and
    evaluation entry point shares one signature, and is otherwise unused.
    """
    fitted = fit_arrays(train.X, train.y, train.categorical, rounds)
    root, parent, feat, thr, iscat, a, b, losses = fitted
    rules = [
        (int(parent[j]), int(feat[j]), float(thr[j]), float(a[j]), float(b[j]), bool(iscat[j]))
        for j in range(len(parent))
    ]
    return ADTModel.build(
        float(root),
        rules,
        positive_class=train.classes[1],
        negative_class=train.classes[0],
        n_features=train.n_features,
        feature_names=tuple(train.feature_names),
        losses=tuple(float(v) for v in losses),
    )


def classify(model: ADTModel, record) -> tuple[str, float]:
    """Class tag and margin for one record; a zero margin goes negative."""
    record = np.asarray(record, dtype=np.float64).reshape(1, -1)
    m = float(model.margins(record)[0])
    return (model.positive_class if m > 0 else model.negative_class), m


def accuracy(model: ADTModel, test) -> float:
    if test.n_records == 0:
        raise ADTError("empty test set")
    predicted = model.predict(test.X)
    return float(np.mean(predicted == test.labels))
