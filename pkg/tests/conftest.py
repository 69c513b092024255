"""Shared fixtures and the acceptance-criterion report.

Tests marked ``@pytest.mark.criterion(n, title)`` are grouped by ``n``; at
the end of the run one PASS/FAIL line is printed per criterion.
"""

from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

import builders  # noqa: E402

# module-level property tests stay light; the acceptance suites ask for more
settings.register_profile("foodnet", max_examples=40, deadline=None)
settings.load_profile("foodnet")

_criteria: dict[int, dict] = {}


@pytest.fixture
def square_kb():
    return builders.square_kb()


@pytest.fixture
def polygons_kb():
    return builders.polygons_kb()


@pytest.fixture
def fixtures_dir():
    return builders.FIXTURES


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            n, title = mark.args
            entry = _criteria.setdefault(n, {"title": title, "tests": {}})
            entry["tests"][item.nodeid] = None


def pytest_runtest_logreport(report):
    for entry in _criteria.values():
        if report.nodeid not in entry["tests"]:
            continue
        if report.when == "call" or report.outcome != "passed":
            prev = entry["tests"][report.nodeid]
            if prev != "failed":
                entry["tests"][report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        entry = _criteria[n]
        outcomes = [o for o in entry["tests"].values() if o is not None]
        if not outcomes:
            continue
        ok = all(o == "passed" for o in outcomes)
        status = "PASS" if ok else "FAIL"
        terminalreporter.write_line(
            f"criterion {n}: {status}  {entry['title']}  ({outcomes.count('passed')}/{len(outcomes)} checks)")
