"""Suite-wide pytest configuration.

Collects the outcome of every test in test_acceptance.py and prints one
PASS/FAIL line per criterion at the end of the run.
"""

from __future__ import annotations

_acceptance: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _acceptance[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_acceptance):
        name = nodeid.split("::")[-1].removeprefix("test_")
        label = name.replace("_", " ")
        outcome = _acceptance[nodeid]
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"{label}: {status}")
