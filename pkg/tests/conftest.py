import numpy as np
import pytest

from vropt.data import SparseDataset

_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def _report(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)


def random_dataset(rng, n, d, density=1.0, normalize=False, labels="pm1"):
    A = rng.standard_normal((n, d)) * rng.uniform(0.3, 2.0, size=(n, 1))
    if density < 1:
        A *= rng.random((n, d)) < density
    if normalize:
        norms = np.linalg.norm(A, axis=1, keepdims=True)
        A = np.divide(A, norms, out=A.copy(), where=norms > 0)
    y = np.where(rng.random(n) < 0.5, -1.0, 1.0)
    return SparseDataset.from_dense(A, y)
