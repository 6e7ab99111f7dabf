from __future__ import annotations

import pytest

from rendezvous.configuration import (
    OUTSIDE,
    Configuration,
    ResourceState,
    RobotState,
    RobotView,
    Status,
)
from rendezvous.grid import Vertex, build_grid


def V(x: int, y: int) -> Vertex:
    return Vertex(x, y)


def active(x: int, y: int) -> RobotState:
    return RobotState(Status.ACTIVE, Vertex(x, y))


def make_cfg(m, n, r1, r2, res, *, T_f=1, stay=0, fixed=False, round=0, door=(0, 0)):
    """Configuration from plain tuples; ``None`` means outside."""

    def robot(r):
        if r is None:
            return OUTSIDE
        if isinstance(r, RobotState):
            return r
        return active(*r)

    return Configuration(
        build_grid(m, n, Vertex(*door)),
        round,
        robot(r1),
        robot(r2),
        ResourceState(Vertex(*res), stay, fixed),
        T_f,
    )


def view(m, n, pos, res, other=None, *, at_door=False):
    other = None if other is None else Vertex(*other)
    res = Vertex(*res)
    return RobotView(m, n, Vertex(*pos), at_door, other, other == res, res)


@pytest.fixture
def g45():
    return build_grid(4, 5)


@pytest.fixture
def g55():
    return build_grid(5, 5)


# one line per acceptance criterion, printed after the run
CRITERIA: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(CRITERIA):
        terminalreporter.write_line(CRITERIA[k])
