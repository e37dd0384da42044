import numpy as np
import pytest

_OUTCOMES: dict[int, tuple[str, str]] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None and (report.when == "call" or report.outcome != "passed"):
        number = marker.args[0]
        status = "PASS" if report.outcome == "passed" else "FAIL"
        name = item.name.removeprefix("test_")
        if _OUTCOMES.get(number, ("PASS",))[0] == "PASS":
            _OUTCOMES[number] = (status, name)
    return report


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        status, name = _OUTCOMES[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {name}")
