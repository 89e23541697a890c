import json
import time
from pathlib import Path

import numpy as np
import pytest

from dwellcert.sweep import run_sweep
from dwellcert.system import load_system

DATA = Path(__file__).resolve().parents[1] / "data"
EXAMPLE_DOC = json.loads((DATA / "example_system.json").read_text())
A1 = np.array([[1.0, 0.1], [-0.2, 0.9]])
A2 = np.array([[1.0, 0.1], [-0.9, 0.9]])

# published minimal L per periodic dwell; None marks the unstable dwell values
PUBLISHED_MIN_L = {1: 2, 2: 3, 3: 3, 4: 4, 5: 8, 6: None, 7: None, 8: None, 9: 4,
                10: 1, 11: 1, 12: 2, 13: 2, 14: None, 15: 2}

ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def example():
    return load_system(EXAMPLE_DOC)


@pytest.fixture(scope="session")
def example_path():
    return DATA / "example_system.json"


@pytest.fixture(scope="session")
def table_sweep(example):
    """Full condition-b grid tau 1..15, L 1..10 with certificates kept."""
    start = time.perf_counter()
    result = run_sweep(example, range(1, 16), range(1, 11), "b", keep=True)
    result.elapsed = time.perf_counter() - start
    return result
