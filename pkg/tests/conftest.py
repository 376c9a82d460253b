from __future__ import annotations

from importlib.resources import files
from pathlib import Path

import pytest

from mesml import parse_spec

FIXTURES = Path(str(files("mesml") / "fixtures"))


def fixture_text(name: str) -> str:
    return (FIXTURES / name).read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def yogurt_path() -> Path:
    return FIXTURES / "yogurt.mesml"


@pytest.fixture(scope="session")
def minimal_path() -> Path:
    return FIXTURES / "minimal.mesml"


@pytest.fixture(scope="session")
def yogurt():
    return parse_spec(fixture_text("yogurt.mesml"), "yogurt.mesml")


@pytest.fixture(scope="session")
def minimal():
    return parse_spec(fixture_text("minimal.mesml"), "minimal.mesml")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""

    def _verdict(number: int, ok: bool, detail: str) -> None:
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return _verdict


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
