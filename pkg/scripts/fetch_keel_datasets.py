"""Convert the KEEL raw files bundled with the ``keel_ds`` wheel into CSV.

The benchmark files ship headerless with the class in the last column.  This
writes ``data/<name>.csv`` with a header row (``f1..fm,class``) so they can be
consumed by ``tpso.dataset.load_csv`` with ``--label class``.

    pip install --no-deps keel-ds
    python scripts/fetch_keel_datasets.py --out data
"""
import argparse
import csv
from importlib import resources
from pathlib import Path

DATASETS = ["australian", "german", "heart", "ionosphere", "sonar", "wdbc"]


def read_keel_raw(text):
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("@"):
            continue
        rows.append([cell.strip() for cell in line.split(",")])
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data")
    parser.add_argument("--names", nargs="*", default=DATASETS)
    args = parser.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    raw_dir = resources.files("keel_ds") / "data" / "balanced" / "raw"
    for name in args.names:
        rows = read_keel_raw((raw_dir / f"{name}.dat").read_text())
        width = len(rows[0])
        header = [f"f{j}" for j in range(1, width)] + ["class"]
        with open(out / f"{name}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        classes = sorted({r[-1] for r in rows})
        print(f"{name}: {len(rows)} records, {width - 1} features, classes {classes}")


if __name__ == "__main__":
    main()
