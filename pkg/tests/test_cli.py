import csv
import io
import json

import numpy as np
import pytest

from tpso.cli import main
from tpso.dataset import Dataset
from tpso.experiment import strip_volatile
from tpso.stats import mean_std
from tpso.synthetic import planted_feature, write_csv

QUICK = ["--folds", "3", "--iterations", "4", "--max-swarm", "9", "--rounds", "4"]


@pytest.fixture
def datasets(tmp_path):
    paths = []
    for s in range(5):
        path = tmp_path / f"p{s}.csv"
        write_csv(planted_feature(45, 4, planted=s % 4, seed=s, name=f"p{s}"), path)
        paths.append(str(path))
    return paths


def run_cli(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def load_report(out_dir):
    return json.loads((out_dir / "report.json").read_text())


def test_run_writes_self_consistent_report(datasets, tmp_path, capsys):
    out = tmp_path / "out"
    code, stdout, err = run_cli(
        ["run", "--data", datasets[0], "--methods", "tpso,adt_only,pso_adt,ga_adt", "--seed", "3", "--out", str(out)] + QUICK,
        capsys,
    )
    assert code == 0, err
    report = load_report(out)
    assert "| Dataset |" in stdout and (out / "summary.md").exists()
    assert [r["method"] for r in report["results"]] == ["tpso", "adt_only", "pso_adt", "ga_adt"]
    for r in report["results"]:
        accs = [f["accuracy"] for f in r["folds"] if f["ok"]]
        feats = [f["n_features"] for f in r["folds"] if f["ok"]]
        assert (r["accuracy"]["mean"], r["accuracy"]["std"]) == pytest.approx(mean_std(accs))
        assert (r["features"]["mean"], r["features"]["std"]) == pytest.approx(mean_std(feats))
        assert all(len(f["mask"]) == 4 for f in r["folds"])
    assert report["config"]["seed"] == 3


def test_run_twice_identical(datasets, tmp_path, capsys):
    docs = []
    out = tmp_path / "same"
    for _ in range(2):
        assert run_cli(["run", "--data", datasets[1], "--seed", "9", "--out", str(out)] + QUICK, capsys)[0] == 0
        docs.append(strip_volatile(load_report(out)))
    assert docs[0] == docs[1]


def test_run_with_five_datasets_compares(datasets, tmp_path, capsys):
    out = tmp_path / "five"
    argv = ["run", "--methods", "tpso,adt_only", "--seed", "1", "--out", str(out), "--jobs", "4"] + QUICK
    for p in datasets:
        argv += ["--data", p]
    code, stdout, _ = run_cli(argv, capsys)
    report = load_report(out)
    assert code == 0
    if report["comparisons"]:
        assert report["comparisons"][0]["baseline"] == "adt_only"
    else:  # identical accuracies everywhere make the comparison degenerate
        assert any("all differences zero" in n for n in report["notes"])
    assert not report["errors"]


def test_config_file_and_flag_precedence(datasets, tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"datasets": [{"path": datasets[2]}], "seed": 5, "k_folds": 4, "methods": ["adt_only"]}))
    out = tmp_path / "cfgout"
    code, _, err = run_cli(["run", "--config", str(cfg), "--folds", "3", "--out", str(out)], capsys)
    assert code == 0, err
    report = load_report(out)
    assert report["config"]["k_folds"] == 3 and report["config"]["seed"] == 5
    assert len(report["results"][0]["folds"]) == 3


def one_json_line(err):
    lines = [line for line in err.splitlines() if line.strip()]
    assert len(lines) == 1
    return json.loads(lines[0])


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["run", "--data", "x.csv"],
        ["run", "--data", "x.csv", "--seed", "1", "--methods", "magic"],
        ["run", "--seed", "1"],
        ["bench", "--sizes", "10", "20", "30"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_two(argv, capsys):
    code, _, err = run_cli(argv, capsys)
    assert code == 2
    assert one_json_line(err)["error"] == "usage"


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"datasets": [{"path": "x.csv"}], "seed": 1, "colour": "red"}))
    code, _, err = run_cli(["run", "--config", str(cfg)], capsys)
    assert code == 2 and "colour" in one_json_line(err)["message"]


def test_missing_dataset_partial_failure(datasets, tmp_path, capsys):
    out = tmp_path / "partial"
    code, _, err = run_cli(
        ["run", "--data", datasets[0], "--data", str(tmp_path / "missing.csv"), "--methods", "adt_only", "--seed", "1", "--out", str(out)],
        capsys,
    )
    assert code == 1
    assert one_json_line(err)["error"] == "partial_failure"
    report = load_report(out)
    assert len(report["results"]) == 1 and len(report["errors"]) == 1


def test_score_orders_features(tmp_path, capsys):
    data = planted_feature(80, 5, planted=3, seed=2)
    X = data.X.copy()
    X[:, 1] = 7.0  # constant column
    path = tmp_path / "s.csv"
    write_csv(Dataset.from_arrays(np.column_stack([X, X[:, 0]]), data.labels), path)
    code, out, _ = run_cli(["score", "--data", str(path)], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["feature"] == "f3"
    scores = {r["feature"]: float(r["score"]) for r in rows}
    assert scores["f1"] == 0.0
    assert scores["f0"] == scores["f5"]  # duplicated column
    values = [float(r["score"]) for r in rows]
    assert values == sorted(values, reverse=True)


def test_score_missing_file(tmp_path, capsys):
    code, _, err = run_cli(["score", "--data", str(tmp_path / "none.csv")], capsys)
    assert code == 1 and one_json_line(err)["error"] == "file_not_found"


def write_fake_report(path, rows):
    path.write_text(json.dumps({"results": rows}))


def fake_rows(method, accs):
    return [{"dataset": f"d{i}", "method": method, "accuracy": {"mean": a, "std": 0.0}} for i, a in enumerate(accs)]


def test_compare_all_better(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    write_fake_report(a, fake_rows("tpso", [0.9 + 0.001 * i for i in range(10)]))
    write_fake_report(b, fake_rows("ga_adt", [0.8] * 10))
    code, out, _ = run_cli(["compare", "--report", str(a), "--report", str(b), "--baseline", "ga_adt", "--json"], capsys)
    assert code == 0
    row = json.loads(out)[0]
    assert (row["w_plus"], row["w_minus"]) == (55.0, 0.0)
    code, out, _ = run_cli(["compare", "--report", str(a), "--report", str(b), "--baseline", "ga_adt"], capsys)
    assert "55.0, 0.0" in out


def test_compare_against_itself(tmp_path, capsys):
    a = tmp_path / "a.json"
    write_fake_report(a, fake_rows("tpso", [0.9] * 6))
    code, _, err = run_cli(["compare", "--report", str(a), "--candidate", "tpso", "--baseline", "tpso"], capsys)
    assert code == 1 and "all differences zero" in one_json_line(err)["message"]


def test_compare_too_few_datasets(tmp_path, capsys):
    a = tmp_path / "a.json"
    write_fake_report(a, fake_rows("tpso", [0.9] * 4) + fake_rows("ga_adt", [0.8] * 4))
    code, _, err = run_cli(["compare", "--report", str(a), "--baseline", "ga_adt"], capsys)
    assert code == 1 and "common datasets" in one_json_line(err)["message"]


def test_bench_writes_csv_and_fit(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code, stdout, _ = run_cli(
        ["bench", "--sizes", "60", "90", "120", "--features", "5", "--seed", "1", "--iterations", "2", "--out", str(out)],
        capsys,
    )
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert [int(r["size"]) for r in rows] == [60, 90, 120]
    fit = json.loads(out.with_suffix(".fit.json").read_text())
    assert set(fit) == {"slope", "intercept", "r_squared", "n_points"}
    assert "r^2" in stdout


def test_bench_degenerate_sizes(capsys):
    code, _, err = run_cli(["bench", "--sizes", "50", "50", "50", "--seed", "1"], capsys)
    assert code == 1 and "degenerate" in one_json_line(err)["message"]
