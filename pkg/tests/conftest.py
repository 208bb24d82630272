import os
import re
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "default", max_examples=40, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or report.failed:
        prev = _outcomes.get(num, True)
        _outcomes[num] = prev and not failed


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        verdict = "PASS" if _outcomes[num] else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {verdict}")
