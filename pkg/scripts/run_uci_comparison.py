"""Run every method on the bundled UCI/KEEL CSVs and write the comparison report.

    python scripts/run_uci_comparison.py --seed 0 --out results/uci
    python scripts/run_uci_comparison.py --seed 0 --methods tpso,adt_only --datasets wdbc heart

The full four-method run is long (the GA and standard-PSO baselines train
tens of thousands of trees per fold); start with ``--methods tpso,adt_only``.
"""
import argparse
import logging
from pathlib import Path

from tpso.experiment import METHODS, DatasetSpec, ExperimentConfig, markdown_summary, run_experiment, write_report

DATA = Path(__file__).resolve().parents[1] / "data"
DEFAULT_DATASETS = ["australian", "german", "heart", "ionosphere", "sonar", "wdbc"]


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--datasets", nargs="+", default=DEFAULT_DATASETS)
    parser.add_argument("--methods", default=",".join(METHODS))
    parser.add_argument("--folds", type=int, default=10)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--out", default="results/uci")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    specs = [DatasetSpec(str(DATA / f"{name}.csv"), "class", name) for name in args.datasets]
    config = ExperimentConfig(
        specs, args.methods.split(","), seed=args.seed, k_folds=args.folds, out=args.out, jobs=args.jobs
    )
    report = run_experiment(config)
    write_report(report, args.out)
    print(markdown_summary(report), end="")


if __name__ == "__main__":
    main()
