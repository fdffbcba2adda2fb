"""Swarm-size tuning loop around wrapper PSO.

Per outer fold, PSO runs with N = 5, 6, 7, ... particles.  Each run's subset
is scored with

    V = 0.5 * holdout ADT accuracy + 0.5 * (M1 / M2)

(M1, M2: discrimination-score sums over the subset and over all features),
and the loop stops once the fitness gains shrink three times in a row, or
at ``max_swarm``.  The fold keeps the subset with the highest V.
"""
from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .adt import DEFAULT_ROUNDS
from .dataset import Dataset, project, stratified_kfold
from .fscore import score_all, subset_sum
from .search import SwarmConfig, pso_search
from .stats import mean_std
from .wrapper import WrapperEvaluator, holdout_accuracy

log = logging.getLogger(__name__)

STOP_RULES = ("gains", "literal")


def derive_seed(*keys) -> int:
    """Stable 32-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def fitness(accuracy: float, m1: float, m2: float) -> float:
    if m2 <= 0:
        raise ValueError("M2 must be positive")
    if not 0 <= m1 <= m2 * (1 + 1e-12):
        raise ValueError(f"M1={m1} outside [0, M2={m2}]")
    return 0.5 * accuracy + 0.5 * min(m1 / m2, 1.0)


@dataclass
class TraceEntry:
    swarm_size: int
    fitness: float
    mask: np.ndarray
    test_accuracy: float
    m1_over_m2: float


@dataclass
class TuneTrace:
    entries: list = field(default_factory=list)

    def append(self, entry: TraceEntry):
        if self.entries and entry.swarm_size != self.entries[-1].swarm_size + 1:
            raise ValueError("swarm sizes must grow by exactly one")
        self.entries.append(entry)

    @property
    def fitness(self) -> list[float]:
        return [e.fitness for e in self.entries]

    @property
    def swarm_sizes(self) -> list[int]:
        return [e.swarm_size for e in self.entries]

    def best(self) -> TraceEntry:
        """Entry with the highest fitness; the earliest wins ties."""
        return max(self.entries, key=lambda e: e.fitness)  # max keeps the first maximum

    def __len__(self):
        return len(self.entries)

    @classmethod
    def from_fitness(cls, values, start: int = 5) -> "TuneTrace":
        trace = cls()
        for i, v in enumerate(values):
            trace.append(TraceEntry(start + i, float(v), np.ones(1, dtype=bool), float(v), float(v)))
        return trace


def local_max_reached(trace, rule: str = "gains") -> bool:
    """Stopping test over the last four trace entries.

    ``gains``: with dV_j = V_j - V_{j-1}, stop when dV_{i-2} > dV_{i-1} > dV_i
    and dV_i - dV_{i-1} < 0 (diminishing returns in fitness per particle).
    ``literal``: the same three conditions on the slope of swarm size against
    fitness, 1 / dV_j; a zero fitness change makes that slope diverge and
    stops immediately.
    """
    values = trace.fitness if isinstance(trace, TuneTrace) else list(trace)
    if len(values) < 4:
        return False
    v = np.asarray(values[-4:], dtype=float)
    dv = np.diff(v)
    if rule == "gains":
        g = dv
    elif rule == "literal":
        if np.any(dv == 0):
            return True
        g = 1.0 / dv
    else:
        raise ValueError(f"unknown stop rule {rule!r}")
    return bool(g[0] > g[1] and g[1] > g[2] and (g[2] - g[1]) < 0)


@dataclass
class TpsoConfig:
    initial_swarm: int = 5
    max_swarm: int = 50
    inner: SwarmConfig = field(default_factory=SwarmConfig)
    k_folds: int = 10
    inner_folds: int = 5
    boosting_rounds: int = DEFAULT_ROUNDS
    stop_rule: str = "gains"
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.inner, dict):
            self.inner = SwarmConfig(**self.inner)
        if self.initial_swarm < 1:
            raise ValueError("initial_swarm must be >= 1")
        if self.max_swarm <= self.initial_swarm + 3:
            raise ValueError("max_swarm must exceed initial_swarm + 3 (the stop rule needs 4 points)")
        if self.stop_rule not in STOP_RULES:
            raise ValueError(f"stop_rule must be one of {STOP_RULES}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FoldResult:
    fold: int
    mask: np.ndarray | None
    n_features: int
    accuracy: float
    trace: TuneTrace
    ok: bool = True
    reason: str = ""
    evaluations: int = 0

    def to_dict(self) -> dict:
        return {
            "fold": self.fold,
            "ok": self.ok,
            "reason": self.reason,
            "mask": mask_to_bits(self.mask) if self.mask is not None else None,
            "n_features": self.n_features,
            "accuracy": self.accuracy,
            "evaluations": self.evaluations,
            "trace": [
                {
                    "swarm_size": e.swarm_size,
                    "fitness": e.fitness,
                    "mask": mask_to_bits(e.mask),
                    "test_accuracy": e.test_accuracy,
                    "m1_over_m2": e.m1_over_m2,
                }
                for e in self.trace.entries
            ],
        }


def mask_to_bits(mask) -> str:
    return "".join("1" if b else "0" for b in np.asarray(mask, dtype=bool))


def bits_to_mask(bits: str) -> np.ndarray:
    return np.array([c == "1" for c in bits], dtype=bool)


def _failed(fold, reason, trace=None):
    return FoldResult(fold, None, 0, float("nan"), trace or TuneTrace(), ok=False, reason=reason)


def tune_fold(train: Dataset, test: Dataset, config: TpsoConfig, fold_seed: int, fold: int = 0) -> FoldResult:
    if len(set(train.labels.tolist())) < 2:
        return _failed(fold, "training fold holds a single class")
    try:
        scores = score_all(train)
        evaluator = WrapperEvaluator(train, config.inner_folds, config.boosting_rounds, derive_seed(fold_seed, 0))
    except ValueError as exc:
        return _failed(fold, str(exc))
    m2 = scores.total
    if m2 <= 0:
        return _failed(fold, "all feature scores are zero (M2 = 0)")

    d = train.n_features
    cache = {}
    trace = TuneTrace()
    evaluations = 0
    n = config.initial_swarm
    while n <= config.max_swarm:
        swarm = replace(config.inner, n_particles=n, seed=derive_seed(fold_seed, 1, n))
        result = pso_search(d, swarm, evaluator, cache=cache)
        evaluations += result.evaluations
        mask = result.best_mask
        b = holdout_accuracy(train, test, mask, config.boosting_rounds)
        m1 = subset_sum(scores, mask)
        v = fitness(b, m1, m2)
        trace.append(TraceEntry(n, v, mask, b, m1 / m2))
        log.debug("fold %d N=%d V=%.4f B=%.4f |mask|=%d", fold, n, v, b, mask.sum())
        n += 1
        if local_max_reached(trace, config.stop_rule):
            break

    best = trace.best()
    acc = holdout_accuracy(train, test, best.mask, config.boosting_rounds)
    return FoldResult(fold, best.mask, int(best.mask.sum()), acc, trace, evaluations=evaluations)


@dataclass
class TpsoResult:
    per_fold: list
    FM: float
    FS: float
    AM: float
    AS: float

    @property
    def successful(self) -> list:
        return [f for f in self.per_fold if f.ok]

    def to_dict(self) -> dict:
        return {
            "FM": self.FM,
            "FS": self.FS,
            "AM": self.AM,
            "AS": self.AS,
            "folds": [f.to_dict() for f in self.per_fold],
        }


def aggregate(values) -> tuple[float, float]:
    values = list(values)
    if len(values) >= 2:
        return mean_std(values)
    if len(values) == 1:
        return float(values[0]), float("nan")
    return float("nan"), float("nan")


def summarize(per_fold) -> TpsoResult:
    ok = [f for f in per_fold if f.ok]
    if not ok:
        reasons = "; ".join(sorted({f.reason for f in per_fold}))
        raise RuntimeError(f"all folds failed: {reasons}")
    fm, fs = aggregate(f.n_features for f in ok)
    am, as_ = aggregate(f.accuracy for f in ok)
    return TpsoResult(list(per_fold), fm, fs, am, as_)


def _fold_job(args):
    dataset, train_idx, test_idx, config, fold = args
    seed = derive_seed(config.seed, fold)
    return tune_fold(dataset.subset(train_idx), dataset.subset(test_idx), config, seed, fold)


def run_tpso(dataset: Dataset, config: TpsoConfig, jobs: int = 1) -> TpsoResult:
    """Stratified k-fold TPSO; FM/FS/AM/AS over the successful folds."""
    plan = stratified_kfold(dataset, config.k_folds, config.seed)
    tasks = [(dataset, tr, te, config, k) for k, (tr, te) in enumerate(plan)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_fold = list(pool.map(_fold_job, tasks))
    else:
        per_fold = [_fold_job(t) for t in tasks]
    return summarize(per_fold)
