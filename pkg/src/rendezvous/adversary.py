"""Resource movement: the legal move set and the adversary strategies."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Protocol, Sequence

import numpy as np

from .configuration import Configuration, Status
from .errors import IllegalScript, InvalidParams, NoEscape
from .grid import GridSpec, Vertex, hop, is_corner, neighbors_of
from .policy import STAY, Move

ResourceMove = Move


def legal_resource_moves(cfg: Configuration) -> tuple[Move, ...]:
    """Stay first (when allowed), then steps in row-major neighbour order."""
    res = cfg.res
    if res.fixed:
        return (STAY,)
    steps = tuple(Move(w) for w in neighbors_of(cfg.grid.m, cfg.grid.n, res.position))
    if res.stay_count < cfg.T_f:
        return (STAY,) + steps
    return steps


def _active_positions(cfg: Configuration) -> list[Vertex]:
    return [r.position for r in cfg.robots if r.status is Status.ACTIVE]


def _min_dist(v: Vertex, robots: Sequence[Vertex]) -> float:
    return min((hop(v, r) for r in robots), default=float("inf"))


def _dest(cfg: Configuration, mv: Move) -> Vertex:
    return cfg.res.position if mv.target is None else mv.target


class Strategy(Protocol):
    name: str

    def choose(self, cfg: Configuration) -> Move: ...


class GreedyEvade:
    """Maximise the hop distance to the nearest active robot.

    Ties prefer Stay when legal, then row-major neighbour order.
    """

    name = "greedy"

    def choose(self, cfg: Configuration) -> Move:
        robots = _active_positions(cfg)
        best, best_d = None, -1.0
        for mv in legal_resource_moves(cfg):
            d = _min_dist(_dest(cfg, mv), robots)
            if d > best_d:
                best, best_d = mv, d
        return best


class StayMaxRandom:
    """Stay as long as allowed, then take a uniformly random legal step."""

    name = "staymax"

    def __init__(self, seed: Optional[int] = None):
        self.rng = np.random.default_rng(seed)

    def choose(self, cfg: Configuration) -> Move:
        legal = legal_resource_moves(cfg)
        if STAY in legal:
            return STAY
        return legal[int(self.rng.integers(len(legal)))]


class Scripted:
    """Replays a fixed per-round move list.

    Once the script runs out the resource stays when allowed and otherwise
    takes its first legal step.
    """

    name = "scripted"

    def __init__(self, moves: Iterable[Move]):
        self.moves = list(moves)

    def choose(self, cfg: Configuration) -> Move:
        legal = legal_resource_moves(cfg)
        if cfg.round < len(self.moves):
            mv = self.moves[cfg.round]
            if mv not in legal:
                raise IllegalScript(
                    f"round {cfg.round}: scripted move '{mv}' is not legal from {cfg.res}"
                )
            return mv
        return legal[0]

    @classmethod
    def load(cls, path: str | Path) -> "Scripted":
        return cls(parse_script(Path(path).read_text()))

    def dump(self) -> str:
        return format_script(self.moves)


def parse_script(text: str) -> list[Move]:
    """Parse ``stay`` / ``step x y`` lines; blank lines and ``#`` comments skipped."""
    moves = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts == ["stay"]:
            moves.append(STAY)
        elif len(parts) == 3 and parts[0] == "step":
            try:
                moves.append(Move.step((int(parts[1]), int(parts[2]))))
            except ValueError:
                raise IllegalScript(f"line {lineno}: bad coordinates in {raw!r}") from None
        else:
            raise IllegalScript(f"line {lineno}: cannot parse {raw!r}")
    return moves


def format_script(moves: Iterable[Move], header: Sequence[str] = ()) -> str:
    lines = [f"# {h}" for h in header]
    lines += [str(mv) for mv in moves]
    return "\n".join(lines) + "\n"


def oscillator_pair(g: GridSpec) -> tuple[Vertex, Vertex]:
    """P = corner opposite the door, Q = its neighbour on the far column."""
    norm = g.normalizer()
    p = norm.apply(Vertex(g.n - 1, g.m - 1))
    q = norm.apply(Vertex(g.n - 1, g.m - 2))
    return p, q


class Oscillator:
    """Swap between P and Q every ``T_f`` rounds while no robot is close.

    Moves happen on rounds that are positive multiples of ``T_f``. If the
    resource starts elsewhere it first walks to P. As soon as an active
    robot is within one hop it hands over to :class:`GreedyEvade` for good.
    """

    name = "oscillator"

    def __init__(self, g: GridSpec, T_f: int):
        self.p, self.q = oscillator_pair(g)
        self.T_f = T_f
        self.handed_off = False
        self._greedy = GreedyEvade()

    def choose(self, cfg: Configuration) -> Move:
        pos = cfg.res.position
        if not self.handed_off and _min_dist(pos, _active_positions(cfg)) <= 1:
            self.handed_off = True
        if self.handed_off or cfg.res.fixed:
            return self._greedy.choose(cfg)
        legal = legal_resource_moves(cfg)
        if pos not in (self.p, self.q):
            want = Move(_toward(pos, self.p))
        elif cfg.round > 0 and cfg.round % self.T_f == 0:
            want = Move(self.q if pos == self.p else self.p)
        else:
            want = STAY
        return want if want in legal else legal[0]


def _toward(src: Vertex, dst: Vertex) -> Vertex:
    if src.x != dst.x:
        return Vertex(src.x + (1 if dst.x > src.x else -1), src.y)
    return Vertex(src.x, src.y + (1 if dst.y > src.y else -1))


def oscillator_strategy(g: GridSpec, T_f: int) -> Oscillator:
    return Oscillator(g, T_f)


STRATEGY_NAMES = ("greedy", "staymax", "oscillator", "scripted")


def make_strategy(
    name: str,
    *,
    grid: Optional[GridSpec] = None,
    T_f: int = 1,
    seed: Optional[int] = None,
    script: Optional[Sequence[Move]] = None,
) -> Strategy:
    if name == "greedy":
        return GreedyEvade()
    if name == "staymax":
        return StayMaxRandom(seed)
    if name == "oscillator":
        if grid is None:
            raise InvalidParams("oscillator needs the grid")
        return Oscillator(grid, T_f)
    if name in ("scripted", "witness"):
        if script is None:
            raise InvalidParams("scripted adversary needs a script")
        return Scripted(script)
    raise InvalidParams(f"unknown adversary {name!r}")


# -- SSYNC ------------------------------------------------------------------


@dataclass
class SsyncEscape:
    """Semi-synchronous adversary: activate one robot, keep the resource free.

    ``schedule`` lists robot-index sets cycled round by round; every robot
    must appear in every window of ``K`` consecutive entries.

    The resource knows the protocol, so a candidate move is judged by
    resolving the round with the activated robots' real proposals. A move is
    kept only if nobody reaches the resource and some such move still exists
    ``lookahead`` rounds later. Among those it prefers Stay while no
    activated robot is adjacent, then non-corner vertices, then distance
    from the robots.
    """

    schedule: Sequence[frozenset[int]] = (frozenset({0}), frozenset({1}))
    K: int = 2
    lookahead: int = 4
    corner_guard: int = 2
    _memo: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.schedule = tuple(frozenset(s) for s in self.schedule)
        if not self.schedule:
            raise InvalidParams("empty activation schedule")
        if self.K < 1:
            raise InvalidParams("K must be positive")
        if self.lookahead < 0:
            raise InvalidParams("lookahead must be non-negative")
        L = len(self.schedule)
        for robot in (0, 1):
            for start in range(L):
                window = (self.schedule[(start + i) % L] for i in range(self.K))
                if not any(robot in s for s in window):
                    raise InvalidParams(
                        f"robot {robot + 1} is not activated within {self.K} rounds"
                    )

    def activation(self, cfg: Configuration) -> frozenset[int]:
        want = self.schedule[cfg.round % len(self.schedule)]
        on = {i for i in (0, 1) if cfg.robot(i).status is Status.ACTIVE}
        chosen = frozenset(want & on)
        if not chosen and cfg.r2.status is Status.OUTSIDE:
            chosen = frozenset(on)
        return chosen

    def step(self, cfg: Configuration) -> tuple[frozenset[int], Move]:
        act = self.activation(cfg)
        return act, self.escape_move(cfg, act)

    def escape_move(self, cfg: Configuration, act: frozenset[int]) -> Move:
        if cfg.res.fixed:
            return STAY
        ranked = self._ranked(cfg, act)
        for mv in ranked:
            if self._safe(cfg, act, mv, self.lookahead):
                return mv
        for mv in ranked:
            if self._after(cfg, act, mv) is not None:
                return mv
        raise NoEscape(
            f"round {cfg.round}: resource at {cfg.res.position} cannot avoid capture", cfg
        )

    def _ranked(self, cfg: Configuration, act: frozenset[int]) -> list[Move]:
        m, n = cfg.grid.m, cfg.grid.n
        pos = cfg.res.position
        robots = _active_positions(cfg)
        movers = [cfg.robot(i).position for i in act if cfg.robot(i).status is Status.ACTIVE]
        threatened = any(hop(r, pos) == 1 for r in movers)

        def rank(mv: Move):
            w = _dest(cfg, mv)
            cornered = is_corner(m, n, w) and _min_dist(w, robots) <= self.corner_guard
            calm_stay = mv.is_stay and not threatened
            return (not calm_stay, cornered, is_corner(m, n, w), -_min_dist(w, robots))

        return sorted(legal_resource_moves(cfg), key=rank)

    def _after(self, cfg: Configuration, act: frozenset[int], mv: Move) -> Optional[Configuration]:
        """The next configuration, or ``None`` if the resource is caught."""
        # deferred: the engine imports this module
        from .engine import resolve, robot_proposals
        from .errors import ViolationDetected

        try:
            nxt, _ = resolve(cfg, robot_proposals(cfg, act), mv)
        except ViolationDetected:
            return None
        return None if nxt.res.fixed else nxt

    def _safe(self, cfg: Configuration, act: frozenset[int], mv: Move, depth: int) -> bool:
        nxt = self._after(cfg, act, mv)
        if nxt is None:
            return False
        if depth == 0:
            return True
        key = (nxt.key, nxt.round % len(self.schedule), depth)
        got = self._memo.get(key)
        if got is None:
            nact = self.activation(nxt)
            got = any(self._safe(nxt, nact, m2, depth - 1) for m2 in legal_resource_moves(nxt))
            self._memo[key] = got
        return got
