from collections import defaultdict

import pytest

_OUTCOMES: dict[int, list[bool]] = defaultdict(list)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = int(marker.args[0])


def pytest_runtest_logreport(report):
    number = getattr(report, "criterion", None)
    if number is None:
        return
    # setup errors count as failures; skipped or passing setup defers to the call phase
    if report.when == "call" or (report.when == "setup" and report.failed):
        _OUTCOMES[number].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        verdict = "PASS" if all(_OUTCOMES[number]) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {verdict}")
