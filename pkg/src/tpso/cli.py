"""Command-line front end.

    tpso run     --data a.csv --data b.csv --label class --methods tpso,adt_only --seed 1
    tpso compare --report out/report.json --candidate tpso --baseline ga_adt
    tpso bench   --sizes 500 1000 2000 4000 --seed 1
    tpso score   --data wdbc.csv --label class

Exit codes: 0 success, 1 partial failure, 2 invalid invocation.  Failures
print one JSON line on stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict, replace
from pathlib import Path

from .dataset import impute, load_csv, load_schema
from .experiment import (
    METHODS,
    DatasetSpec,
    ExperimentConfig,
    bench_config,
    compare_results,
    markdown_summary,
    run_bench,
    run_experiment,
    wilcoxon_markdown,
    write_report,
)
from .fscore import score_all
from .search import SwarmConfig

EXIT_OK, EXIT_PARTIAL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": " ".join(str(message).split())}), file=sys.stderr)
    return code


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tpso", description="Tunable swarm-size PSO feature selection with ADT evaluation")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run the k-fold protocol for datasets x methods")
    run.add_argument("--data", action="append", help="CSV dataset path (repeatable)")
    run.add_argument("--label", help="label column name (default: class)")
    run.add_argument("--schema", help="JSON schema sidecar applied to every --data file")
    run.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    run.add_argument("--folds", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--jobs", type=int)
    run.add_argument("--out")
    run.add_argument("--config", help="JSON experiment config; flags override it")
    run.add_argument("--iterations", type=int, help="PSO iterations for tpso and pso_adt")
    run.add_argument("--max-swarm", type=int)
    run.add_argument("--rounds", type=int, help="ADT boosting rounds")
    run.add_argument("--stop-rule", choices=["gains", "literal"])

    cmp_ = sub.add_parser("compare", help="Wilcoxon tests between methods across reports")
    cmp_.add_argument("--report", action="append", required=True, help="report.json path (repeatable)")
    cmp_.add_argument("--candidate", default="tpso")
    cmp_.add_argument("--baseline", action="append", required=True)
    cmp_.add_argument("--json", action="store_true", help="emit JSON instead of Markdown")

    bench = sub.add_parser("bench", help="time TPSO against dataset size")
    bench.add_argument("--sizes", type=int, nargs="+", required=True)
    bench.add_argument("--features", type=int, default=15)
    bench.add_argument("--seed", type=int, required=True)
    bench.add_argument("--folds", type=int, default=2)
    bench.add_argument("--iterations", type=int, default=20)
    bench.add_argument("--max-swarm", type=int, default=9)
    bench.add_argument("--repeats", type=int, default=1)
    bench.add_argument("--out", help="CSV path for (size, seconds); stdout if omitted")

    score = sub.add_parser("score", help="per-feature discrimination scores as CSV")
    score.add_argument("--data", required=True)
    score.add_argument("--label", default="class")
    score.add_argument("--schema")
    return parser


def _experiment_config(args) -> ExperimentConfig:
    doc = {}
    if args.config:
        with open(args.config) as fh:
            doc = json.load(fh)
    if args.data:
        label = args.label or "class"
        doc["datasets"] = [{"path": p, "label": label, "schema": args.schema} for p in args.data]
    elif args.label and "datasets" in doc:
        doc["datasets"] = [{**d, "label": args.label} for d in doc["datasets"]]
    if args.methods:
        doc["methods"] = [m.strip() for m in args.methods.split(",") if m.strip()]
    for flag, key in (("folds", "k_folds"), ("seed", "seed"), ("jobs", "jobs"), ("out", "out"), ("rounds", "boosting_rounds")):
        value = getattr(args, flag)
        if value is not None:
            doc[key] = value
    if "datasets" not in doc:
        raise UsageError("no datasets given (--data or config file)")
    if doc.get("seed") is None:
        raise UsageError("--seed is required")
    config = ExperimentConfig.from_dict(doc)
    if args.iterations is not None:
        config.pso = replace(config.pso, iterations=args.iterations)
        config.tpso = replace(config.tpso, inner=replace(config.tpso.inner, iterations=args.iterations))
    if args.max_swarm is not None:
        config.tpso = replace(config.tpso, max_swarm=args.max_swarm)
    if args.stop_rule is not None:
        config.tpso = replace(config.tpso, stop_rule=args.stop_rule)
    return config


def cmd_run(args) -> int:
    try:
        config = _experiment_config(args)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    report = run_experiment(config)
    json_path, md_path = write_report(report, config.out)
    print(markdown_summary(report), end="")
    print(f"wrote {json_path} and {md_path}")
    if report["errors"]:
        first = report["errors"][0]
        return _fail("partial_failure", f"{len(report['errors'])} job(s) failed; first: {first['error']}", EXIT_PARTIAL)
    return EXIT_OK


def cmd_compare(args) -> int:
    results = []
    for path in args.report:
        with open(path) as fh:
            results += json.load(fh)["results"]
    rows = compare_results(results, args.candidate, args.baseline)
    if args.json:
        print(json.dumps(rows, indent=1))
    else:
        print(wilcoxon_markdown(rows))
    return EXIT_OK


def cmd_bench(args) -> int:
    config = bench_config(args.folds, args.iterations, args.max_swarm, args.seed)
    rows, fit = run_bench(args.sizes, args.features, args.seed, config, args.repeats)
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["size", "seconds"])
    writer.writerows([(s, f"{t:.6f}") for s, t in rows])
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(buf.getvalue())
        out.with_suffix(".fit.json").write_text(json.dumps(asdict(fit), indent=1) + "\n")
    else:
        print(buf.getvalue(), end="")
    print(f"# fit: T = {fit.slope:.6g} * D + {fit.intercept:.6g}, r^2 = {fit.r_squared:.3f}")
    return EXIT_OK


def cmd_score(args) -> int:
    hints = load_schema(args.schema) if args.schema else None
    data = impute(load_csv(args.data, args.label, hints))
    scores = score_all(data)
    order = sorted(range(len(scores)), key=lambda j: (-scores.scores[j], j))
    writer = csv.writer(sys.stdout)
    writer.writerow(["feature", "score"])
    for j in order:
        writer.writerow([data.feature_names[j], repr(float(scores.scores[j]))])
    return EXIT_OK


COMMANDS = {"run": cmd_run, "compare": cmd_compare, "bench": cmd_bench, "score": cmd_score}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except FileNotFoundError as exc:
        return _fail("file_not_found", exc, EXIT_PARTIAL)
    except (ValueError, RuntimeError) as exc:
        return _fail(type(exc).__name__, exc, EXIT_PARTIAL)


if __name__ == "__main__":
    sys.exit(main())
