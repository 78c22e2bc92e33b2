from __future__ import annotations

import sys
from pathlib import Path

import pytest

from promptfix.bench import load_dataset
from promptfix.llm import MockBackend

ROOT = Path(__file__).resolve().parents[1]
SYNTHETIC = ROOT / "data" / "synthetic"
FIXTURES = SYNTHETIC / "fixtures.json"

sys.path.insert(0, str(ROOT / "tools"))


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(SYNTHETIC)


@pytest.fixture
def mock_backend():
    return MockBackend.from_file(FIXTURES)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
