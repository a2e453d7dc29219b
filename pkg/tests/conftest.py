import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from laserqhe import EngineParams  # noqa: E402


def engine_params(p=st.floats(-0.99, 0.99), lam=st.floats(0.0, 1.0)):
    """Strategy for valid engine-mode parameters (omega_c < omega_h, t_c < t_h)."""

    @st.composite
    def build(draw):
        wc = draw(st.floats(0.5, 19.0))
        wh = draw(st.floats(wc + 0.01, 20.0))
        tc = draw(st.floats(1.0, 19.0))
        th = draw(st.floats(tc + 0.01, 20.0))
        return EngineParams(
            omega_c=wc,
            omega_h=wh,
            gamma_c=draw(st.floats(0.05, 2.0)),
            gamma_h=draw(st.floats(0.05, 2.0)),
            lam=draw(lam),
            p=draw(p),
            t_c=tc,
            t_h=th,
        )

    return build()


@pytest.fixture
def fig2():
    from laserqhe import FIG2_PARAMS

    return FIG2_PARAMS


_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or report.failed or report.skipped:
        previous = _CRITERIA.get(number, (title, "passed"))[1]
        status = report.outcome if previous == "passed" else previous
        _CRITERIA[number] = (title, status)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status = _CRITERIA[number]
        verdict = "PASS" if status == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {verdict}  {title}")
