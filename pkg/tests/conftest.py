import math

import numpy as np
import pytest

from zeno_sense.bloch import PrecessionFrequency

FIG_THETA = 0.9 * math.pi / 2


@pytest.fixture
def fig_omega():
    """The figure probe: w = 2 pi at theta = 0.9 pi / 2."""
    return PrecessionFrequency.from_theta(FIG_THETA)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance reporting ----------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): numbered acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    n, title = marker.args
    if report.when == "setup" and report.passed:
        return
    detail = dict(item.user_properties).get("detail", "")
    _CRITERIA[n] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        title, ok, detail = _CRITERIA[n]
        line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))
