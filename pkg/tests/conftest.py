from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("suite", max_examples=50, deadline=None)
settings.load_profile("suite")


@pytest.fixture
def store(tmp_path):
    from scenarioforge.store import WorkshopStore

    return WorkshopStore(tmp_path / "data")


@pytest.fixture
def driver(store):
    from helpers import Driver

    return Driver(store)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance" not in getattr(report, "nodeid", ""):
                continue
            if getattr(report, "when", "call") != "call":
                continue
            name = report.nodeid.split("::")[-1]
            label = "PASS" if outcome == "passed" else "FAIL"
            lines.append((name, label))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, label in sorted(lines):
            terminalreporter.write_line(f"[{label}] {name}")
