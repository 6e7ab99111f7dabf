"""The oblivious robot controller: one LOOK snapshot in, one move out.

Every function here is a pure function of a :class:`RobotView`. Where the
protocol leaves a free choice (which door edge to take first, which shortest
path to the fixed resource), :func:`admissible_moves` returns the whole set
and :func:`decide` picks from it by a fixed rule.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple, Optional

from .configuration import (
    RobotView,
    blocked_by_corner,
    boundary_frame_at,
    entry_guard,
    init_gather_frame,
)
from .errors import GridError
from .grid import Axis, Vertex, hop, is_corner, neighbors_of, sign, step_toward


class Move(NamedTuple):
    """Stay (``target is None``) or a one-hop step to ``target``."""

    target: Optional[Vertex] = None

    @property
    def is_stay(self) -> bool:
        return self.target is None

    @classmethod
    def step(cls, v: Vertex) -> "Move":
        return cls(Vertex(*v))

    def __str__(self) -> str:
        return "stay" if self.target is None else f"step {self.target.x} {self.target.y}"


STAY = Move(None)


def door_exits(view: RobotView) -> tuple[Vertex, ...]:
    """Door neighbours ordered by the deterministic entry tie-break.

    Smaller coordinate sum first, then smaller x, measured with the door
    reflected onto (0, 0). Since both exits have sum 1 there, the column
    exit (same x as the door) always wins.
    """
    m, n, pos = view.m, view.n, view.pos
    exits = neighbors_of(m, n, pos)
    return tuple(sorted(exits, key=lambda w: (w.x != pos.x, w)))


def decide_entry(view: RobotView, entry_choice: int = 0) -> Move:
    if view.at_door:
        exits = door_exits(view)
        if view.other is None:
            return Move.step(exits[entry_choice % len(exits)])
        free = [w for w in exits if w != view.other]
        return Move.step(free[0]) if free else STAY
    # next to a robot standing at a corner: hold position
    return STAY


def approach_steps(view: RobotView) -> tuple[Vertex, ...]:
    """First hops of every shortest path to ``res`` avoiding non-target corners.

    Ordered by preference: the axis with the larger remaining gap first,
    ties to the row (x) axis.
    """
    m, n, pos, res = view.m, view.n, view.pos, view.res
    dx, dy = res.x - pos.x, res.y - pos.y
    order = (Axis.ROW, Axis.COL) if abs(dx) >= abs(dy) else (Axis.COL, Axis.ROW)
    out = []
    for axis in order:
        if (dx if axis is Axis.ROW else dy) == 0:
            continue
        w = step_toward(pos, res, axis)
        if w != res and is_corner(m, n, w):
            continue
        out.append(w)
    return tuple(out)


def approach_path_step(view: RobotView) -> Move:
    steps = approach_steps(view)
    return Move.step(steps[0]) if steps else STAY


def decide_boundary(view: RobotView) -> Move:
    if view.other_on_res:
        return approach_path_step(view)
    m, n = view.m, view.n
    try:
        mine = boundary_frame_at(m, n, view.pos, view.res)
    except GridError:
        return STAY
    if mine.dist == 0 or view.other is None:
        return STAY
    try:
        theirs = boundary_frame_at(m, n, view.other, view.res)
    except GridError:
        return STAY
    v = mine.toward
    if mine.dist != 0 and theirs.dist != 0:
        if not is_corner(m, n, v):
            # "other adjacent to a corner" means stalled in front of one
            if not blocked_by_corner(m, n, view.other, view.res):
                return Move.step(v)
            if mine.dist != 1:
                return Move.step(v)
        return STAY
    if theirs.dist == 0 and mine.dist > 1:
        return Move.step(v)
    return STAY


def decide_gather(view: RobotView) -> Move:
    if view.other_on_res:
        return approach_path_step(view)
    m, n, pos, res, other = view.m, view.n, view.pos, view.res, view.other
    if pos.x == res.x or pos.y == res.y:
        axis = Axis.ROW if pos.y == res.y else Axis.COL
        if hop(pos, res) > 1:
            return Move.step(step_toward(pos, res, axis))
        if is_corner(m, n, res) and other is not None and hop(other, res) == 1:
            return Move.step(res)
        return STAY
    # the other robot holds L; slide parallel to it onto L'
    if other.y == res.y:
        return Move.step(Vertex(pos.x + sign(res.x - pos.x), pos.y))
    return Move.step(Vertex(pos.x, pos.y + sign(res.y - pos.y)))


def in_entry(view: RobotView) -> bool:
    return entry_guard(view.m, view.n, view.pos, view.other, view.other_on_res)


def in_gather(view: RobotView) -> bool:
    if view.other is None or view.other_on_res:
        return False
    return init_gather_frame(view.m, view.n, view.pos, view.other, view.res) is not None


@lru_cache(maxsize=1 << 20)
def decide(view: RobotView, entry_choice: int = 0) -> Move:
    """Dispatch on the top-level phase guards evaluated from the view."""
    if in_entry(view):
        return decide_entry(view, entry_choice)
    if in_gather(view):
        return decide_gather(view)
    return decide_boundary(view)


def admissible_moves(view: RobotView) -> frozenset[Move]:
    """Every move the protocol permits from this view.

    Singleton except at the two free choices: the first robot's exit from
    the door and the shortest path toward an already captured resource.
    """
    if in_entry(view) and view.at_door and view.other is None:
        return frozenset(Move.step(w) for w in door_exits(view))
    if view.other_on_res:
        steps = approach_steps(view)
        return frozenset(Move.step(w) for w in steps) if steps else frozenset({STAY})
    return frozenset({decide(view)})
