"""Dataset x method experiment protocol behind ``tpso run`` / ``compare`` /
``bench``: stratified k-fold runs of TPSO and its baselines, JSON and
Markdown reports, Wilcoxon comparisons and the timing sweep."""
from __future__ import annotations

import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .adt import DEFAULT_ROUNDS
from .dataset import Dataset, impute, load_csv, load_schema, stratified_kfold
from .search import GAConfig, SwarmConfig, ga_search, pso_search
from .stats import linear_regression, wilcoxon_signed_rank
from .synthetic import majority_of_three
from .tpso import TpsoConfig, aggregate, derive_seed, mask_to_bits, run_tpso, tune_fold
from .wrapper import WrapperEvaluator, holdout_accuracy

log = logging.getLogger(__name__)

METHODS = ("tpso", "pso_adt", "ga_adt", "adt_only")
METHOD_LABELS = {"tpso": "TPSO", "pso_adt": "Standard PSO+ADT", "ga_adt": "GA+ADT", "adt_only": "ADT"}
VOLATILE_KEYS = ("wall_time", "created")


@dataclass
class DatasetSpec:
    path: str
    label: str = "class"
    name: str | None = None
    schema: str | None = None

    def load(self) -> Dataset:
        hints = load_schema(self.schema) if self.schema else None
        return impute(load_csv(self.path, self.label, hints, name=self.name))


@dataclass
class ExperimentConfig:
    datasets: list
    methods: list = field(default_factory=lambda: ["tpso", "adt_only"])
    seed: int | None = None
    k_folds: int = 10
    inner_folds: int = 5
    boosting_rounds: int = DEFAULT_ROUNDS
    tpso: TpsoConfig = field(default_factory=TpsoConfig)
    pso: SwarmConfig = field(default_factory=SwarmConfig)
    ga: GAConfig = field(default_factory=GAConfig)
    out: str = "results"
    jobs: int = 1

    def __post_init__(self):
        self.datasets = [d if isinstance(d, DatasetSpec) else DatasetSpec(**d) for d in self.datasets]
        if isinstance(self.tpso, dict):
            self.tpso = TpsoConfig(**self.tpso)
        if isinstance(self.pso, dict):
            self.pso = SwarmConfig(**self.pso)
        if isinstance(self.ga, dict):
            self.ga = GAConfig(**self.ga)
        if not self.datasets:
            raise ValueError("at least one dataset is required")
        if not self.methods:
            raise ValueError("at least one method is required")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {list(METHODS)}")
        if self.seed is None:
            raise ValueError("a seed is required")
        if self.k_folds < 2:
            raise ValueError("k_folds must be >= 2")

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        return cls(**doc)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["tpso"] = asdict(self.tpso_config())  # the values actually used
        return doc

    def tpso_config(self) -> TpsoConfig:
        t = self.tpso
        return TpsoConfig(
            initial_swarm=t.initial_swarm,
            max_swarm=t.max_swarm,
            inner=t.inner,
            k_folds=self.k_folds,
            inner_folds=self.inner_folds,
            boosting_rounds=self.boosting_rounds,
            stop_rule=t.stop_rule,
            seed=self.seed,
        )


def _fold_record(fold, mask, accuracy, ok=True, reason="", extra=None):
    rec = {
        "fold": fold,
        "ok": ok,
        "reason": reason,
        "mask": mask_to_bits(mask) if mask is not None else None,
        "n_features": int(np.sum(mask)) if mask is not None else 0,
        "accuracy": accuracy,
    }
    if extra:
        rec.update(extra)
    return rec


def run_fold(dataset: Dataset, method: str, config: ExperimentConfig, fold: int, train_idx, test_idx) -> dict:
    train, test = dataset.subset(train_idx), dataset.subset(test_idx)
    fold_seed = derive_seed(config.seed, fold)
    rounds = config.boosting_rounds
    if method == "tpso":
        res = tune_fold(train, test, config.tpso_config(), fold_seed, fold)
        return res.to_dict()
    if method == "adt_only":
        mask = np.ones(dataset.n_features, dtype=bool)
        return _fold_record(fold, mask, holdout_accuracy(train, test, None, rounds))
    evaluator = WrapperEvaluator(train, config.inner_folds, rounds, derive_seed(fold_seed, 0))
    if method == "pso_adt":
        search_cfg = SwarmConfig(**{**asdict(config.pso), "seed": derive_seed(fold_seed, 2)})
        result = pso_search(dataset.n_features, search_cfg, evaluator)
    elif method == "ga_adt":
        search_cfg = GAConfig(**{**asdict(config.ga), "seed": derive_seed(fold_seed, 3)})
        result = ga_search(dataset.n_features, search_cfg, evaluator)
    else:
        raise ValueError(f"unknown method {method!r}")
    acc = holdout_accuracy(train, test, result.best_mask, rounds)
    return _fold_record(
        fold, result.best_mask, acc, extra={"search_fitness": result.best_fitness, "evaluations": result.evaluations}
    )


def summarize_folds(folds: list) -> dict:
    ok = [f for f in folds if f["ok"]]
    am, as_ = aggregate(f["accuracy"] for f in ok)
    fm, fs = aggregate(f["n_features"] for f in ok)
    return {"accuracy": {"mean": am, "std": as_}, "features": {"mean": fm, "std": fs}, "n_ok": len(ok)}


def run_job(dataset: Dataset, method: str, config: ExperimentConfig) -> dict:
    start = time.perf_counter()
    plan = stratified_kfold(dataset, config.k_folds, config.seed)
    folds = [run_fold(dataset, method, config, k, tr, te) for k, (tr, te) in enumerate(plan)]
    entry = {
        "dataset": dataset.name,
        "method": method,
        "n_records": dataset.n_records,
        "n_features_total": dataset.n_features,
        **summarize_folds(folds),
        "folds": folds,
    }
    if entry["n_ok"] == 0:
        raise RuntimeError("all folds failed: " + "; ".join(sorted({f["reason"] for f in folds})))
    entry["wall_time"] = time.perf_counter() - start
    log.info("%s/%s: accuracy %.4f, features %.2f", dataset.name, method, entry["accuracy"]["mean"], entry["features"]["mean"])
    return entry


def _job(args):
    dataset, method, config = args
    try:
        return run_job(dataset, method, config)
    except Exception as exc:  # reported per job; other jobs keep going
        return {"dataset": dataset.name, "method": method, "error": f"{type(exc).__name__}: {exc}"}


def compare_results(results: list, candidate: str, baselines) -> list:
    """Wilcoxon rows pairing per-dataset mean accuracies."""
    by_key = {}
    for r in results:
        key = (r["dataset"], r["method"])
        if key in by_key:
            raise ValueError(f"duplicate result for dataset {r['dataset']!r}, method {r['method']!r}")
        by_key[key] = r["accuracy"]["mean"]
    rows = []
    for base in baselines:
        names = sorted({d for d, m in by_key if m == candidate} & {d for d, m in by_key if m == base})
        if len(names) < 5:
            raise ValueError(f"{candidate} vs {base}: only {len(names)} common datasets, need at least 5")
        pairs = [(by_key[(n, candidate)], by_key[(n, base)]) for n in names]
        report = wilcoxon_signed_rank(pairs)
        rows.append({"candidate": candidate, "baseline": base, "datasets": names, **report.to_dict()})
    return rows


def run_experiment(config: ExperimentConfig, datasets: list | None = None) -> dict:
    """Run every dataset x method job and assemble the report document.

    Jobs run in a process pool when ``config.jobs > 1``; results are merged
    in (dataset, method) order either way.
    """
    errors = []
    if datasets is None:
        datasets = []
        for spec in config.datasets:
            try:
                datasets.append(spec.load())
            except Exception as exc:
                errors.append({"dataset": spec.name or spec.path, "method": None, "error": f"{type(exc).__name__}: {exc}"})
    jobs = [(d, m, config) for d in datasets for m in config.methods]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            outputs = list(pool.map(_job, jobs))
    else:
        outputs = [_job(j) for j in jobs]
    results = []
    for out in outputs:
        if "error" in out:
            errors.append(out)
        else:
            results.append(out)

    comparisons, notes = [], []
    if "tpso" in config.methods:
        baselines = [m for m in config.methods if m != "tpso"]
        n_data = len({r["dataset"] for r in results})
        if baselines and n_data >= 5:
            try:
                comparisons = compare_results(results, "tpso", baselines)
            except ValueError as exc:
                notes.append(f"comparison skipped: {exc}")
    return {
        "tool": "tpso",
        "version": __version__,
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": config.to_dict(),
        "results": results,
        "comparisons": comparisons,
        "errors": errors,
        "notes": notes,
    }


def strip_volatile(doc):
    """Copy of a report without timing fields, for determinism checks."""
    if isinstance(doc, dict):
        return {k: strip_volatile(v) for k, v in doc.items() if k not in VOLATILE_KEYS}
    if isinstance(doc, list):
        return [strip_volatile(v) for v in doc]
    return doc


def _pct(mean, std):
    if mean is None or np.isnan(mean):
        return "-"
    return f"{100 * mean:.2f} ± {100 * std:.2f}"


def _count(mean, std):
    if mean is None or np.isnan(mean):
        return "-"
    return f"{mean:.1f} ± {std:.2f}"


def _where(error: dict) -> str:
    parts = [str(error[k]) for k in ("dataset", "method") if error.get(k)]
    return "/".join(parts) or "experiment"


def markdown_summary(report: dict) -> str:
    results = report["results"]
    requested = set(report.get("config", {}).get("methods", ()))
    methods = [m for m in METHODS if m in requested or any(r["method"] == m for r in results)]
    datasets = list(dict.fromkeys(r["dataset"] for r in results))
    cell = {(r["dataset"], r["method"]): r for r in results}
    head = "| Dataset | " + " | ".join(METHOD_LABELS[m] for m in methods) + " |"
    rule = "|---" * (len(methods) + 1) + "|"
    lines = ["## Accuracy (%)", "", head, rule]
    for d in datasets:
        row = [_pct(cell[(d, m)]["accuracy"]["mean"], cell[(d, m)]["accuracy"]["std"]) if (d, m) in cell else "-" for m in methods]
        lines.append(f"| {d} | " + " | ".join(row) + " |")
    lines += ["", "## Selected features", "", "| Dataset | Original | " + " | ".join(METHOD_LABELS[m] for m in methods) + " |"]
    lines.append("|---" * (len(methods) + 2) + "|")
    for d in datasets:
        total = next(r["n_features_total"] for r in results if r["dataset"] == d)
        row = [_count(cell[(d, m)]["features"]["mean"], cell[(d, m)]["features"]["std"]) if (d, m) in cell else "-" for m in methods]
        lines.append(f"| {d} | {total} | " + " | ".join(row) + " |")
    if report.get("comparisons"):
        lines += ["", wilcoxon_markdown(report["comparisons"])]
    if report.get("notes"):
        lines += ["", "## Notes", ""] + [f"- {n}" for n in report["notes"]]
    if report.get("errors"):
        lines += ["", "## Errors", ""] + [f"- {_where(e)}: {e['error']}" for e in report["errors"]]
    return "\n".join(lines) + "\n"


def wilcoxon_markdown(rows: list) -> str:
    lines = [
        "## Wilcoxon signed-rank (paired mean accuracies)",
        "",
        "| Candidate | Baseline | Rank sums (+, -) | Statistic | n | p-value |",
        "|---|---|---|---|---|---|",
    ]
    for r in rows:
        lines.append(
            f"| {METHOD_LABELS.get(r['candidate'], r['candidate'])} | {METHOD_LABELS.get(r['baseline'], r['baseline'])} "
            f"| {r['w_plus']:.1f}, {r['w_minus']:.1f} | {r['statistic']:.1f} | {r['n_effective']} | {r['p_value']:.4f} |"
        )
    return "\n".join(lines)


def write_report(report: dict, out_dir) -> tuple[Path, Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    json_path, md_path = out / "report.json", out / "summary.md"
    json_path.write_text(json.dumps(report, indent=1, allow_nan=True) + "\n")
    md_path.write_text(markdown_summary(report))
    return json_path, md_path


def bench_config(folds: int = 2, iterations: int = 20, max_swarm: int = 9, seed: int = 0) -> TpsoConfig:
    """Fixed TPSO configuration for the timing sweep."""
    return TpsoConfig(initial_swarm=5, max_swarm=max_swarm, inner=SwarmConfig(iterations=iterations), k_folds=folds, seed=seed)


def run_bench(sizes, n_features: int = 15, seed: int = 0, config: TpsoConfig | None = None, repeats: int = 1):
    """Time TPSO on synthetic datasets of increasing size.

    Returns ``(rows, fit)`` where rows are ``(size, seconds)`` (the minimum
    over ``repeats``) and ``fit`` is the least-squares line through them.
    """
    sizes = [int(s) for s in sizes]
    if len(sizes) < 3:
        raise ValueError("bench needs at least 3 sizes")
    if len(set(sizes)) < 2:
        raise ValueError("degenerate x: all bench sizes are equal")
    config = config or bench_config(seed=seed)
    rows = []
    for size in sizes:
        data = majority_of_three(size, n_features, seed=derive_seed(seed, size))
        best = float("inf")
        for _ in range(repeats):
            start = time.perf_counter()
            run_tpso(data, config)
            best = min(best, time.perf_counter() - start)
        log.info("bench size %d: %.2fs", size, best)
        rows.append((size, best))
    fit = linear_regression([r[0] for r in rows], [r[1] for r in rows])
    return rows, fit
