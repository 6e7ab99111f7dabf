"""Finite m x n grid: construction, vertex classes, lines and symmetries.

Coordinates follow the usual layout ``x`` in ``[0, n)`` (column) and ``y`` in
``[0, m)`` (row). Row 0 is drawn at the top, so once the door is normalised
to ``(0, 0)`` it sits in the north-west corner.

Most predicates come in two flavours: plain functions of the grid shape
``(m, n)`` (used on the hot path by the robot policy, which never learns the
door) and thin :class:`GridSpec` methods for everything else.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator, NamedTuple

from .errors import (
    AtCorner,
    DimensionTooSmall,
    InvalidDoor,
    NotOnBoundary,
    OutOfGrid,
    ParallelLines,
)

MIN_SIDE = 3


class Vertex(NamedTuple):
    x: int
    y: int

    def __str__(self) -> str:
        return f"({self.x},{self.y})"


class Axis(str, Enum):
    ROW = "row"
    COL = "col"

    @property
    def other(self) -> "Axis":
        return Axis.COL if self is Axis.ROW else Axis.ROW


class Line(NamedTuple):
    """A full grid line: ``Row y`` holds every ``(x, y)``, ``Col x`` every ``(x, y)``."""

    axis: Axis
    index: int

    def contains(self, v: Vertex) -> bool:
        return (v.y if self.axis is Axis.ROW else v.x) == self.index

    def offset(self, v: Vertex) -> int:
        """Signed perpendicular offset of ``v`` from this line."""
        return (v.y if self.axis is Axis.ROW else v.x) - self.index

    def __str__(self) -> str:
        return f"{'Row' if self.axis is Axis.ROW else 'Col'} {self.index}"


def row(y: int) -> Line:
    return Line(Axis.ROW, y)


def col(x: int) -> Line:
    return Line(Axis.COL, x)


def line_through(v: Vertex, axis: Axis) -> Line:
    return Line(axis, v.y if axis is Axis.ROW else v.x)


def perpendicular_through(line: Line, v: Vertex) -> Line:
    return line_through(v, line.axis.other)


class Rect(NamedTuple):
    """Axis-aligned vertex rectangle, bounds inclusive."""

    x0: int
    x1: int
    y0: int
    y1: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0 + 1

    @property
    def height(self) -> int:
        return self.y1 - self.y0 + 1

    def contains(self, v: Vertex) -> bool:
        return self.x0 <= v.x <= self.x1 and self.y0 <= v.y <= self.y1

    def vertices(self) -> Iterator[Vertex]:
        for y in range(self.y0, self.y1 + 1):
            for x in range(self.x0, self.x1 + 1):
                yield Vertex(x, y)


class VertexClass(str, Enum):
    CORNER = "corner"
    BOUNDARY = "boundary"
    INTERIOR = "interior"


# -- shape-level predicates (no door) ---------------------------------------


def in_bounds(m: int, n: int, v: Vertex) -> bool:
    return 0 <= v.x < n and 0 <= v.y < m


@lru_cache(maxsize=None)
def neighbors_of(m: int, n: int, v: Vertex) -> tuple[Vertex, ...]:
    """Grid neighbours in row-major order (by ``y`` then ``x``)."""
    x, y = v
    cand = ((x, y - 1), (x - 1, y), (x + 1, y), (x, y + 1))
    return tuple(Vertex(a, b) for a, b in cand if 0 <= a < n and 0 <= b < m)


def is_corner(m: int, n: int, v: Vertex) -> bool:
    return (v.x == 0 or v.x == n - 1) and (v.y == 0 or v.y == m - 1)


def is_boundary(m: int, n: int, v: Vertex) -> bool:
    """Degree three or corner."""
    return v.x == 0 or v.x == n - 1 or v.y == 0 or v.y == m - 1


def corners_of(m: int, n: int) -> tuple[Vertex, ...]:
    return (Vertex(0, 0), Vertex(n - 1, 0), Vertex(0, m - 1), Vertex(n - 1, m - 1))


def boundary_lines_of(m: int, n: int) -> tuple[Line, ...]:
    return (row(0), row(m - 1), col(0), col(n - 1))


def boundary_line_at(m: int, n: int, v: Vertex) -> Line:
    """The unique boundary line through a non-corner boundary vertex."""
    if is_corner(m, n, v):
        raise AtCorner(f"{v} is a corner")
    if v.x == 0 or v.x == n - 1:
        return col(v.x)
    if v.y == 0 or v.y == m - 1:
        return row(v.y)
    raise NotOnBoundary(f"{v} is not on the boundary")


def hop(a: Vertex, b: Vertex) -> int:
    return abs(a.x - b.x) + abs(a.y - b.y)


def sign(k: int) -> int:
    return (k > 0) - (k < 0)


def step_toward(src: Vertex, dst: Vertex, axis: Axis) -> Vertex:
    """One hop from ``src`` toward ``dst`` along ``axis`` (a Row moves in x)."""
    if axis is Axis.ROW:
        return Vertex(src.x + sign(dst.x - src.x), src.y)
    return Vertex(src.x, src.y + sign(dst.y - src.y))


def along(boundary: Line, v: Vertex) -> int:
    """Coordinate of ``v`` measured along ``boundary``."""
    return v.x if boundary.axis is Axis.ROW else v.y


# -- GridSpec ---------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    m: int
    n: int
    door: Vertex

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m, self.n)

    def __contains__(self, v: object) -> bool:
        return isinstance(v, tuple) and len(v) == 2 and in_bounds(self.m, self.n, Vertex(*v))

    def check(self, v: Vertex) -> Vertex:
        v = Vertex(*v)
        if not in_bounds(self.m, self.n, v):
            raise OutOfGrid(f"{v} is outside the {self.m}x{self.n} grid")
        return v

    def vertices(self) -> Iterator[Vertex]:
        for y in range(self.m):
            for x in range(self.n):
                yield Vertex(x, y)

    @property
    def size(self) -> int:
        return self.m * self.n

    def neighbors(self, v: Vertex) -> tuple[Vertex, ...]:
        return neighbors_of(self.m, self.n, self.check(v))

    def is_corner(self, v: Vertex) -> bool:
        return is_corner(self.m, self.n, v)

    def corners(self) -> tuple[Vertex, ...]:
        return corners_of(self.m, self.n)

    def boundary_lines(self) -> tuple[Line, ...]:
        return boundary_lines_of(self.m, self.n)

    @property
    def far_corner(self) -> Vertex:
        """Corner diagonally opposite the door."""
        return Vertex(self.n - 1 - self.door.x, self.m - 1 - self.door.y)

    def normalizer(self) -> "Symmetry":
        """The reflection taking the door to ``(0, 0)`` (an involution)."""
        fx = self.door.x != 0
        fy = self.door.y != 0
        return Symmetry(self.m, self.n, fx, fy, False)


def build_grid(m: int, n: int, door: Vertex = Vertex(0, 0)) -> GridSpec:
    if m < MIN_SIDE or n < MIN_SIDE:
        raise DimensionTooSmall(f"grid {m}x{n} is below the {MIN_SIDE}x{MIN_SIDE} minimum")
    door = Vertex(*door)
    if not in_bounds(m, n, door) or not is_corner(m, n, door):
        raise InvalidDoor(f"door {door} is not a corner of the {m}x{n} grid")
    return GridSpec(m, n, door)


def classify_vertex(g: GridSpec, v: Vertex) -> VertexClass:
    v = g.check(v)
    if is_corner(g.m, g.n, v):
        return VertexClass.CORNER
    if is_boundary(g.m, g.n, v):
        return VertexClass.BOUNDARY
    return VertexClass.INTERIOR


def neighbors(g: GridSpec, v: Vertex) -> frozenset[Vertex]:
    return frozenset(g.neighbors(v))


def project_dist_along_boundary(g: GridSpec, boundary: Line, robot: Vertex, res: Vertex) -> int:
    """Hops along ``boundary`` between ``robot`` and the foot of ``res`` on it."""
    robot, res = g.check(robot), g.check(res)
    if boundary not in g.boundary_lines():
        raise NotOnBoundary(f"{boundary} is not a boundary line")
    if not boundary.contains(robot):
        raise NotOnBoundary(f"{robot} does not lie on {boundary}")
    return abs(along(boundary, robot) - along(boundary, res))


# -- quadrants --------------------------------------------------------------


@dataclass(frozen=True)
class QuadrantPartition:
    pd_r: Line
    pd_r2: Line
    ne: Rect
    nw: Rect
    se: Rect
    sw: Rect

    def as_dict(self) -> dict[str, Rect]:
        return {"NE": self.ne, "NW": self.nw, "SE": self.se, "SW": self.sw}


def quadrant_partition(g: GridSpec, pd_r: Line, pd_r2: Line) -> QuadrantPartition:
    """Split the grid by one row line and one column line.

    Labels are read with the door in the north-west corner; the rectangles
    are returned in the grid's own coordinates.
    """
    if pd_r.axis is pd_r2.axis:
        raise ParallelLines(f"{pd_r} and {pd_r2} are parallel")
    rl, cl = (pd_r, pd_r2) if pd_r.axis is Axis.ROW else (pd_r2, pd_r)
    norm = g.normalizer()
    # lines map to lines under a reflection; read them in the door frame
    ny = norm.apply(Vertex(0, rl.index)).y
    nx = norm.apply(Vertex(cl.index, 0)).x
    m, n = g.m, g.n
    boxes = {
        "nw": Rect(0, nx, 0, ny),
        "ne": Rect(nx, n - 1, 0, ny),
        "sw": Rect(0, nx, ny, m - 1),
        "se": Rect(nx, n - 1, ny, m - 1),
    }
    back = {k: norm.apply_rect(r) for k, r in boxes.items()}
    return QuadrantPartition(pd_r, pd_r2, **back)


# -- symmetries -------------------------------------------------------------


class Symmetry(NamedTuple):
    """An element of the rectangle's symmetry group.

    Applied as: optional transpose first, then x/y reflections in the
    resulting frame. Transposition is only valid on square grids.
    """

    m: int
    n: int
    flip_x: bool
    flip_y: bool
    transpose: bool

    def apply(self, v: Vertex) -> Vertex:
        x, y = v
        m, n = self.m, self.n
        if self.transpose:
            x, y = y, x
            m, n = n, m
        if self.flip_x:
            x = n - 1 - x
        if self.flip_y:
            y = m - 1 - y
        return Vertex(x, y)

    def apply_opt(self, v: Vertex | None) -> Vertex | None:
        return None if v is None else self.apply(v)

    def apply_line(self, line: Line) -> Line:
        probe = Vertex(line.index, 0) if line.axis is Axis.COL else Vertex(0, line.index)
        img = self.apply(probe)
        axis = line.axis.other if self.transpose else line.axis
        return line_through(img, axis)

    def apply_rect(self, r: Rect) -> Rect:
        a = self.apply(Vertex(r.x0, r.y0))
        b = self.apply(Vertex(r.x1, r.y1))
        return Rect(min(a.x, b.x), max(a.x, b.x), min(a.y, b.y), max(a.y, b.y))

    @property
    def is_identity(self) -> bool:
        return not (self.flip_x or self.flip_y or self.transpose)


def symmetries(m: int, n: int) -> list[Symmetry]:
    """All 4 (rectangle) or 8 (square) grid symmetries."""
    out = [Symmetry(m, n, fx, fy, False) for fx in (False, True) for fy in (False, True)]
    if m == n:
        out += [Symmetry(m, n, fx, fy, True) for fx in (False, True) for fy in (False, True)]
    return out

