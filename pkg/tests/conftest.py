import sys
from pathlib import Path

import pytest

from internality.parser import parse_expression

sys.path.insert(0, str(Path(__file__).parent))

X2 = ["x0", "x1"]


def rf(text, names=("x0", "x1")):
    return parse_expression(text, list(names))


def poly(text, names=("x0", "x1")):
    r = rf(text, names)
    assert r.is_polynomial()
    return r.num


def uni(text):
    return rf(text, ["x"])


def upoly(text):
    return poly(text, ["x"])


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
