"""Per-criterion pass/fail summary for the acceptance module."""

from __future__ import annotations

import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_")
_results = {}


def _merge(num, status):
    rank = {"PASS": 0, "FAIL": 1}
    if num not in _results or rank[status] > rank[_results[num]]:
        _results[num] = status


def pytest_runtest_logreport(report):
    mt = _CRITERION.search(report.nodeid)
    if not mt:
        return
    num = int(mt.group(1))
    if report.failed:
        _merge(num, "FAIL")
    elif report.when == "call" and report.passed:
        _merge(num, "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        terminalreporter.write_line(f"criterion {num:2d}: {_results[num]}")
