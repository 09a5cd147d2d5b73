from functools import lru_cache

import pytest

import acceptance_log
from absectors.cocycle import build_frame
from absectors.homotopy import pi1_presentation
from absectors.poset import build_net


@lru_cache(maxsize=None)
def net(kind, *sizes):
    return build_net(kind, *sizes)


@lru_cache(maxsize=None)
def pres(kind, *sizes):
    return pi1_presentation(net(kind, *sizes))


@lru_cache(maxsize=None)
def frame(kind, *sizes):
    return build_frame(net(kind, *sizes))


@pytest.fixture(scope="session")
def circle6():
    return net("circle", 6)


@pytest.fixture(scope="session")
def circle8():
    return net("circle", 8)


@pytest.fixture(scope="session")
def line5():
    return net("line", 5)


@pytest.fixture(scope="session")
def wedge66():
    return net("wedge", 6, 6)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES):
            terminalreporter.write_line(line)
