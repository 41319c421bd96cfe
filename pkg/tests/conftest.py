"""Collects acceptance results and prints one PASS/FAIL line per criterion."""

from collections import OrderedDict

import pytest

_RESULTS = OrderedDict()  # number -> [title, passed, seconds, tests]


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _RESULTS.setdefault(number, [title, True, 0.0, 0])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        entry[1] = entry[1] and report.outcome == "passed"
        entry[2] += report.duration
        entry[3] += 1


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, seconds, count = _RESULTS[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(
            f"criterion {number}: {status}  {title}  ({count} tests, {seconds:.1f} s)")
