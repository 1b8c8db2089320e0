import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_ACCEPTANCE = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _ACCEPTANCE.append((marker.args[0], rep.passed, item.name))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label, passed, name in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{label:<6} {'PASS' if passed else 'FAIL'}  {name}")
