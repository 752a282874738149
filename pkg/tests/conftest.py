from __future__ import annotations

import pytest

_criteria: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number and short title")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n, title = mark.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        previous = _criteria.get(n, (title, "PASS"))[1]
        _criteria[n] = (title, "FAIL" if failed or previous == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        title, verdict = _criteria[n]
        terminalreporter.write_line(f"criterion {n:>2} {verdict}  {title}")
