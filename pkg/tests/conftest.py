import os
from pathlib import Path

import pytest

from descent_lab import kernels

REPO = Path(__file__).resolve().parent.parent


def mnist_dir():
    for candidate in (os.environ.get("DESCENT_LAB_DATA"), REPO / "data" / "mnist"):
        if candidate and (Path(candidate) / "train-images-idx3-ubyte").exists() or (
            candidate and (Path(candidate) / "train-images-idx3-ubyte.gz").exists()
        ):
            return Path(candidate)
    return None


@pytest.fixture(scope="session")
def mnist_path():
    path = mnist_dir()
    if path is None:
        pytest.skip("MNIST IDX files not found (set DESCENT_LAB_DATA or link data/mnist)")
    return path


@pytest.fixture(params=sorted(kernels.available_backends()))
def backend(request, monkeypatch):
    """Route every kernel call through one backend."""
    impl = kernels.available_backends()[request.param]
    for name in ("pcg32_fill", "pcg32_permutation", "prox_update", "subgradient_update", "cd_sweep"):
        monkeypatch.setattr(kernels, name, getattr(impl, name))
    return request.param


# (criterion number, line) pairs collected by tests/test_acceptance.py.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
