"""Suite-wide pytest configuration.

Provides a session-scoped golden-vector manifest emitted by the external
hologram engine, and prints one PASS/FAIL line per acceptance criterion at
the end of the run.
"""

from __future__ import annotations

import shutil
import subprocess

import pytest

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


@pytest.fixture(scope="session")
def engine() -> str:
    """Path of the hologram engine CLI; skips the test when absent."""
    path = shutil.which("holoscale")
    if path is None:
        pytest.skip("hologram engine CLI (holoscale) not on PATH")
    return path


@pytest.fixture(scope="session")
def golden_manifest(engine, tmp_path_factory):
    """Golden vectors emitted by the engine; returns the manifest path."""
    out_dir = tmp_path_factory.mktemp("goldens")
    proc = subprocess.run(
        [engine, "goldens", "--out-dir", str(out_dir), "--seed", "0"],
        capture_output=True,
        text=True,
        check=True,
    )
    manifest = proc.stdout.strip().splitlines()[-1]
    return manifest
