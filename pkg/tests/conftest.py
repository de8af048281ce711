import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cauchy_bound import SeriesOperator, preset  # noqa: E402
from cauchy_bound.domain import SHIPPED_PRESETS  # noqa: E402

_ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str = "") -> None:
    """Remember one acceptance outcome; printed in the terminal summary."""
    status = "PASS" if passed else "FAIL"
    line = f"[{status}] criterion {number}: {title}"
    if detail:
        line += f" ({detail})"
    _ACCEPTANCE_LINES.append(line)
    print(line)


@pytest.fixture(scope="session")
def criterion():
    return record_criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def disk():
    return preset("disk")


@pytest.fixture(scope="session")
def perturbed():
    return preset("perturbed-disk-0.2")


@pytest.fixture(scope="session")
def cubic():
    return preset("cubic-blob-0.1")


_OPERATORS: dict = {}


def operator_for(name: str) -> SeriesOperator:
    if name not in _OPERATORS:
        _OPERATORS[name] = SeriesOperator.build(preset(name))
    return _OPERATORS[name]


@pytest.fixture(scope="session", params=SHIPPED_PRESETS)
def shipped_operator(request):
    return operator_for(request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
