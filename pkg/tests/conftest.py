import pathlib

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parent.parent


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance test at the end of every run."""
    reports = []
    for outcome in ("passed", "failed", "error"):
        reports.extend(terminalreporter.stats.get(outcome, []))
    acceptance = sorted(
        (r for r in reports
         if getattr(r, "when", "call") == "call" and "test_acceptance.py" in r.nodeid),
        key=lambda r: r.nodeid,
    )
    if not acceptance:
        return
    terminalreporter.section("acceptance summary")
    for report in acceptance:
        name = report.nodeid.split("::")[-1]
        terminalreporter.write_line(f"{name}: {'PASS' if report.passed else 'FAIL'}")


@pytest.fixture(scope="session")
def repo_root() -> pathlib.Path:
    return REPO_ROOT


@pytest.fixture(scope="session")
def scripts_dir() -> pathlib.Path:
    return REPO_ROOT / "scripts"


@pytest.fixture(scope="session")
def fixtures_dir() -> pathlib.Path:
    return REPO_ROOT / "fixtures"


@pytest.fixture(scope="session")
def traces_dir() -> pathlib.Path:
    return REPO_ROOT / "traces"
