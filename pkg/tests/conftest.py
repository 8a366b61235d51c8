from pathlib import Path

import pytest

from wecr.db import default_database_path, load_default_database

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
SAMPLE_DETECTIONS = default_database_path().parent / "sample_detections.jsonl"

_criteria: dict[int, tuple[str, str]] = {}


@pytest.fixture(scope="session")
def db():
    return load_default_database()


@pytest.fixture
def sample_detections_path():
    return SAMPLE_DETECTIONS


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    status = "PASS" if report.passed else "FAIL"
    _criteria[number] = (status, title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = tuple(m.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        status, title = _criteria[number]
        terminalreporter.write_line(f"AC{number} {status}  {title}")
