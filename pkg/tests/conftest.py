import numpy as np
import pytest

from charvar.ring import Polynomial


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def tr():
    return Polynomial.var("t"), Polynomial.var("r")


# one PASS/FAIL line per acceptance criterion, printed after the run
_criteria: dict = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.failed:
        prev = _criteria.get(props["criterion"])
        if prev is None or prev[0] != "FAIL":
            status = "PASS" if report.passed else "FAIL"
            _criteria[props["criterion"]] = (status, props.get("detail"))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split(":")[0])):
        status, detail = _criteria[name]
        line = f"criterion {name}: {status}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
