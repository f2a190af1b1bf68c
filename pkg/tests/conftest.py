import functools
from pathlib import Path

import pytest

from estimandsim.engine import run_simulation
from estimandsim.presets import get_preset

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

# (criterion number, passed, detail) recorded by test_acceptance
ACCEPTANCE_LOG: list[tuple[int, bool, str]] = []


@functools.lru_cache(maxsize=None)
def simulate_preset(name: str, workers: int = 1):
    """Full-size run of a preset, shared across test modules in one session."""
    return run_simulation(get_preset(name), preset=name, workers=workers)


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for number, passed, detail in sorted(ACCEPTANCE_LOG, key=lambda r: r[0]):
        terminalreporter.write_line(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
