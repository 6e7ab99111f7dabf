"""Global round state and the structural classifiers computed from it.

The geometric predicates (:func:`init_gather_frame`, :func:`boundary_frame_at`)
work on bare positions so the robot policy can evaluate them from a view
without ever being handed the door.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple, Optional

from .errors import GridError, NotActive
from .grid import (
    Axis,
    GridSpec,
    Line,
    Rect,
    Vertex,
    along,
    boundary_line_at,
    col,
    hop,
    is_corner,
    line_through,
    perpendicular_through,
    row,
    sign,
)


class Status(str, Enum):
    OUTSIDE = "outside"
    ACTIVE = "active"
    TERMINATED = "terminated"


class Phase(str, Enum):
    ENTRY = "entry"
    BOUNDARY = "boundary"
    GATHER = "gather"
    DONE = "done"


class RobotState(NamedTuple):
    status: Status
    position: Optional[Vertex] = None

    @property
    def on_grid(self) -> bool:
        return self.status is not Status.OUTSIDE

    @property
    def active(self) -> bool:
        return self.status is Status.ACTIVE


OUTSIDE = RobotState(Status.OUTSIDE, None)


class ResourceState(NamedTuple):
    position: Vertex
    stay_count: int = 0
    fixed: bool = False


@dataclass(frozen=True)
class Configuration:
    grid: GridSpec
    round: int
    r1: RobotState
    r2: RobotState
    res: ResourceState
    T_f: int

    @property
    def robots(self) -> tuple[RobotState, RobotState]:
        return (self.r1, self.r2)

    def robot(self, which: int) -> RobotState:
        return self.r1 if which == 0 else self.r2

    @property
    def key(self) -> tuple:
        """Round-free state identity (the dynamics are stationary)."""
        return (self.r1, self.r2, self.res)

    def with_robots(self, r1: RobotState, r2: RobotState) -> "Configuration":
        return replace(self, r1=r1, r2=r2)

    def swapped(self) -> "Configuration":
        """Same configuration with the robot labels exchanged."""
        return replace(self, r1=self.r2, r2=self.r1)


class RobotView(NamedTuple):
    """What one oblivious robot sees at LOOK time.

    No identity, no history, and the door only as the ``at_door`` flag.
    """

    m: int
    n: int
    pos: Vertex
    at_door: bool
    other: Optional[Vertex]
    other_on_res: bool
    res: Vertex


def robot_view(cfg: Configuration, which: int) -> RobotView:
    me = cfg.robot(which)
    if not me.active:
        raise NotActive(f"robot {which + 1} is {me.status.value}")
    other = cfg.robot(1 - which)
    other_pos = other.position if other.on_grid else None
    res = cfg.res.position
    return RobotView(
        cfg.grid.m,
        cfg.grid.n,
        me.position,
        me.position == cfg.grid.door,
        other_pos,
        other_pos is not None and other_pos == res,
        res,
    )


# -- boundary frame ---------------------------------------------------------


class BoundaryFrame(NamedTuple):
    bd: Line
    pd: Line
    dist: int
    toward: Optional[Vertex]


def boundary_frame_at(m: int, n: int, pos: Vertex, res: Vertex) -> BoundaryFrame:
    """Boundary line, perpendicular line and dist(r) for a robot at ``pos``.

    Raises AtCorner / NotOnBoundary where the boundary line is not unique.
    """
    bd = boundary_line_at(m, n, pos)
    pd = perpendicular_through(bd, pos)
    delta = along(bd, res) - along(bd, pos)
    toward = None
    if delta:
        s = sign(delta)
        toward = Vertex(pos.x + s, pos.y) if bd.axis is Axis.ROW else Vertex(pos.x, pos.y + s)
    return BoundaryFrame(bd, pd, abs(delta), toward)


def boundary_frame(cfg: Configuration, which: int) -> BoundaryFrame:
    me = cfg.robot(which)
    if not me.active:
        raise NotActive(f"robot {which + 1} is {me.status.value}")
    return boundary_frame_at(cfg.grid.m, cfg.grid.n, me.position, cfg.res.position)


def blocked_by_corner(m: int, n: int, pos: Vertex, res: Vertex) -> bool:
    """Whether the next boundary vertex from ``pos`` toward ``res`` is a corner.

    This is the corner-adjacency that stalls a robot; a corner behind it
    does not count.
    """
    try:
        toward = boundary_frame_at(m, n, pos, res).toward
    except GridError:
        return False
    return toward is not None and is_corner(m, n, toward)


# -- InitGather -------------------------------------------------------------


class GatherFrame(NamedTuple):
    """Witness of an InitGather configuration.

    ``anchor`` indexes the robot on ``L`` with the resource (0 or 1 in the
    pair passed to :func:`init_gather_frame`).
    """

    anchor: int
    L: Line
    Lp: Line
    L1_line: Line
    L2_line: Line
    r_con: Rect
    both_collinear: bool

    @property
    def near_line(self) -> Line:
        """Line parallel to L' at one hop, on the anchor's side."""
        return self._parallel(-1)

    @property
    def far_line(self) -> Line:
        return self._parallel(+1)

    def _parallel(self, direction: int) -> Line:
        anchor_side = sign(self.L1_line.index - self.Lp.index)
        return Line(self.Lp.axis, self.Lp.index - direction * anchor_side)


def _shares_line(a: Vertex, b: Vertex) -> bool:
    return a.x == b.x or a.y == b.y


def init_gather_frame(
    m: int, n: int, a: Vertex, b: Vertex, res: Vertex
) -> Optional[GatherFrame]:
    """Evaluate the three InitGather clauses on robot positions ``a``, ``b``."""
    if _shares_line(a, b):
        return None
    cands = []
    for idx, (r, other) in enumerate(((a, b), (b, a))):
        if r == res:
            continue
        if r.y == res.y:
            L = row(res.y)
        elif r.x == res.x:
            L = col(res.x)
        else:
            continue
        Lp = perpendicular_through(L, res)
        if abs(Lp.offset(other)) <= 1:
            cands.append((idx, L, Lp))
    if not cands:
        return None
    # prefer the anchor whose line to the resource is a Row
    cands.sort(key=lambda c: c[1].axis is not Axis.ROW)
    idx, L, Lp = cands[0]
    r, other = (a, b) if idx == 0 else (b, a)
    L1 = perpendicular_through(L, r)
    L2 = line_through(other, L.axis)
    return GatherFrame(idx, L, Lp, L1, L2, _containing_rect(m, n, L1, L2, res), len(cands) > 1)


def _containing_rect(m: int, n: int, l1: Line, l2: Line, res: Vertex) -> Rect:
    xs = l1 if l1.axis is Axis.COL else l2
    ys = l2 if l2.axis is Axis.ROW else l1
    x0, x1 = (xs.index, n - 1) if res.x > xs.index else (0, xs.index)
    y0, y1 = (ys.index, m - 1) if res.y > ys.index else (0, ys.index)
    return Rect(x0, x1, y0, y1)


def detect_init_gather(cfg: Configuration) -> Optional[GatherFrame]:
    if not (cfg.r1.active and cfg.r2.active):
        return None
    return init_gather_frame(
        cfg.grid.m, cfg.grid.n, cfg.r1.position, cfg.r2.position, cfg.res.position
    )


# -- phase dispatch ---------------------------------------------------------


def entry_guard(m: int, n: int, a: Optional[Vertex], b: Optional[Vertex], any_terminated: bool) -> bool:
    """Top-level entry guard on (up to) two on-grid robot positions."""
    if any_terminated:
        return False
    for r, other in ((a, b), (b, a)):
        if r is None or not is_corner(m, n, r):
            continue
        if other is None or hop(r, other) == 1:
            return True
    return False


def classify_phase(cfg: Configuration) -> Phase:
    r1, r2 = cfg.r1, cfg.r2
    if r1.status is Status.TERMINATED and r2.status is Status.TERMINATED:
        return Phase.DONE
    terminated = r1.status is Status.TERMINATED or r2.status is Status.TERMINATED
    m, n = cfg.grid.m, cfg.grid.n
    if entry_guard(m, n, r1.position, r2.position, terminated):
        return Phase.ENTRY
    if detect_init_gather(cfg) is not None:
        return Phase.GATHER
    return Phase.BOUNDARY
