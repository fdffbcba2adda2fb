"""Time TPSO against dataset size and fit a line through the timings.

    python scripts/bench_scalability.py --seed 1 --out results/bench.csv

Writes ``size,seconds`` rows plus ``<out>.fit.json``; absolute numbers depend
on the machine, the fit's r^2 is the interesting part.
"""
import argparse
import sys

from tpso.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, required=True)
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000, 4000, 8000])
    parser.add_argument("--repeats", type=int, default=1)
    parser.add_argument("--out", default="results/bench.csv")
    args = parser.parse_args()
    argv = ["bench", "--seed", str(args.seed), "--repeats", str(args.repeats), "--out", args.out, "--sizes"]
    argv += [str(s) for s in args.sizes]
    sys.exit(cli_main(argv))


if __name__ == "__main__":
    main()
