import numpy as np
import pytest

from semacc.benchmark import blob_benchmark
from semacc.data import write_feature_csv

_ACCEPTANCE = []


@pytest.fixture
def criterion():
    """Record an acceptance criterion outcome; printed in the terminal summary."""

    def record(name, passed, detail=""):
        _ACCEPTANCE.append((name, bool(passed), detail))
        return bool(passed)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def small_blob_files(tmp_path_factory):
    """3 classes x 30 points per set in 20-D: fast enough for pipeline tests."""
    d = tmp_path_factory.mktemp("small_blobs")
    real, synth = blob_benchmark(n_classes=3, dim=20, per_class=30, separation=10.0, seed=7)
    write_feature_csv(real, d / "real.csv")
    write_feature_csv(synth, d / "synthetic.csv")
    return d / "real.csv", d / "synthetic.csv"
