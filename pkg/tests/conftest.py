from fractions import Fraction

import pytest

from matqe.arith import COMPLEX, GaussRational, Mat


def F(x):
    return Fraction(x)


@pytest.fixture
def i_unit():
    return GaussRational(Fraction(0), Fraction(1))


def rows(*rs, mode="real"):
    return Mat.from_rows(rs, mode)


_CRITERIA = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_c" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    num = int(name.split("_")[1][1:])
    if report.when == "call" or report.outcome != "passed":
        prev = _CRITERIA.get(num, "passed")
        _CRITERIA[num] = report.outcome if prev == "passed" else prev


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        verdict = "PASS" if _CRITERIA[num] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}")
