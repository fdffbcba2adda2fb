from pathlib import Path

import numpy as np
import pytest

from tpso.dataset import Dataset

DATA_DIR = Path(__file__).resolve().parents[1] / "data"


def make_dataset(columns, labels, name="toy"):
    """Dataset from a dict of name -> list of numbers."""
    X = np.column_stack([np.asarray(v, dtype=float) for v in columns.values()])
    return Dataset.from_arrays(X, labels, name=name, feature_names=list(columns))


@pytest.fixture
def write_csv(tmp_path):
    def _write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return _write


def require_data(name):
    path = DATA_DIR / f"{name}.csv"
    if not path.exists():
        pytest.fail(f"{path} missing; run scripts/fetch_keel_datasets.py")
    return path


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
