"""Exhaustive worst-case capture time over every legal resource behaviour.

Robots are deterministic, so the game tree only branches on the resource's
move (at most five options) and, optionally, on the first robot's free
choice of door exit. The state key leaves out the round number, which makes
memoisation sound and turns any revisited on-stack state into a witness
that the resource can dodge forever.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .adversary import legal_resource_moves
from .configuration import Configuration, Phase, classify_phase
from .engine import SimParams, init_episode, resolve, robot_proposals
from .errors import InvalidParams, StateSpaceExceeded
from .grid import Vertex, build_grid
from .policy import Move

DEFAULT_STATE_LIMIT = 2_000_000
ENVELOPE_C = 12


@dataclass
class WorstCaseResult:
    m: int
    n: int
    T_f: int
    worst_rounds: Optional[int]
    g0: Optional[Vertex]
    entry: str
    witness: list[Move]
    states_explored: int
    boundary_worst: int
    gather_worst: int
    cycle: list[Configuration] = field(default_factory=list)

    @property
    def non_terminating(self) -> bool:
        return self.worst_rounds is None

    def witness_params(self) -> SimParams:
        return SimParams(
            build_grid(self.m, self.n),
            self.T_f,
            self.g0,
            adversary="scripted",
            max_rounds=max(1, (self.worst_rounds or 0) + 1),
            entry=self.entry,
        )


# value = (rounds, boundary rounds, gather rounds) along the worst play
_DONE = (0, 0, 0)


def worst_case_rounds(
    m: int,
    n: int,
    T_f: int,
    branch_entry: bool = True,
    *,
    state_limit: int = DEFAULT_STATE_LIMIT,
    starts: Optional[Sequence[Vertex]] = None,
) -> WorstCaseResult:
    """Longest forced capture time on an ``m x n`` grid, door at (0, 0)."""
    if T_f < 1:
        raise InvalidParams("T_f must be positive")
    g = build_grid(m, n)
    value: dict[tuple, tuple[int, int, int]] = {}
    best: dict[tuple, Move] = {}
    succ_cache: dict[tuple, list[tuple[Move, Configuration]]] = {}
    on_stack: set[tuple] = set()

    def successors(cfg: Configuration, entry_choice: int) -> list[tuple[Move, Configuration]]:
        k = (cfg.key, entry_choice)
        got = succ_cache.get(k)
        if got is None:
            props = robot_proposals(cfg, entry_choice=entry_choice)
            got = [(mv, resolve(cfg, props, mv)[0]) for mv in legal_resource_moves(cfg)]
            succ_cache[k] = got
        return got

    def solve(root: Configuration, entry_choice: int) -> Optional[list[Configuration]]:
        """Fill ``value`` for everything reachable; return a cycle if found."""
        # frames: (cfg, entry_choice, successor list, next index)
        stack = []

        def push(cfg: Configuration, ec: int) -> None:
            on_stack.add(cfg.key)
            stack.append([cfg, ec, successors(cfg, ec), 0])

        if root.key in value:
            return None
        push(root, entry_choice)
        while stack:
            frame = stack[-1]
            cfg, ec, succs, i = frame
            if i < len(succs):
                frame[3] += 1
                nxt = succs[i][1]
                k = nxt.key
                if k in value:
                    continue
                if k in on_stack:
                    path = [f[0] for f in stack]
                    start = next(j for j, c in enumerate(path) if c.key == k)
                    return path[start:] + [nxt]
                if classify_phase(nxt) is Phase.DONE:
                    value[k] = _DONE
                    continue
                if len(value) >= state_limit:
                    raise StateSpaceExceeded(f"more than {state_limit} states on {m}x{n}, T_f={T_f}")
                push(nxt, 0)
                continue
            stack.pop()
            on_stack.discard(cfg.key)
            phase = classify_phase(cfg)
            b = 1 if phase is Phase.BOUNDARY else 0
            gth = 1 if phase is Phase.GATHER else 0
            top, arg = None, None
            bw = gw = 0
            for mv, nxt in succs:
                v = value[nxt.key]
                if top is None or v[0] > top:
                    top, arg = v[0], mv
                bw = max(bw, v[1])
                gw = max(gw, v[2])
            value[cfg.key] = (top + 1, bw + b, gw + gth)
            best[cfg.key] = arg
        return None

    choices = (0, 1) if branch_entry else (0,)
    starts = [Vertex(*s) for s in starts] if starts is not None else [v for v in g.vertices() if v != g.door]
    worst = None
    bw_all = gw_all = 0
    root_best: dict[tuple, tuple[Move, Configuration]] = {}
    for g0 in starts:
        root = init_episode(SimParams(g, T_f, g0))
        for ec in choices:
            # the root is the only state whose successors depend on the entry choice
            rv = None
            rb = 0
            rg = 0
            arg = None
            for mv, nxt in successors(root, ec):
                if classify_phase(nxt) is Phase.DONE:
                    value.setdefault(nxt.key, _DONE)
                cycle = solve(nxt, 0)
                if cycle is not None:
                    return WorstCaseResult(
                        m, n, T_f, None, g0, _entry_name(ec), [], len(value), 0, 0, cycle=[root] + cycle
                    )
                v = value[nxt.key]
                if rv is None or v[0] > rv:
                    rv, arg = v[0], (mv, nxt)
                rb = max(rb, v[1])
                rg = max(rg, v[2])
            total = rv + 1
            bw_all = max(bw_all, rb + (classify_phase(root) is Phase.BOUNDARY))
            gw_all = max(gw_all, rg + (classify_phase(root) is Phase.GATHER))
            root_best[(g0, ec)] = arg
            if worst is None or total > worst[0]:
                worst = (total, g0, ec)

    total, g0, ec = worst
    mv, cur = root_best[(g0, ec)]
    witness = [mv]
    while classify_phase(cur) is not Phase.DONE:
        mv = best[cur.key]
        witness.append(mv)
        cur = next(c for w, c in successors(cur, 0) if w == mv)
    return WorstCaseResult(
        m, n, T_f, total, g0, _entry_name(ec), witness, len(value), bw_all, gw_all
    )


def _entry_name(choice: int) -> str:
    return "reversed" if choice else "deterministic"


# -- reporting --------------------------------------------------------------


@dataclass
class BoundRow:
    m: int
    n: int
    T_f: int
    worst_rounds: Optional[int]
    envelope: int
    boundary_worst: int
    gather_worst: int
    states_explored: int
    ratio: Optional[float]
    flagged: bool


CSV_COLUMNS = (
    "m",
    "n",
    "T_f",
    "worst_rounds",
    "envelope",
    "boundary_worst",
    "gather_worst",
    "states_explored",
)


@dataclass
class BoundReport:
    rows: list[BoundRow]
    C: int

    @property
    def flagged(self) -> list[BoundRow]:
        return [r for r in self.rows if r.flagged]

    @property
    def ratio_spread(self) -> float:
        ratios = [r.ratio for r in self.rows if r.ratio is not None]
        return max(ratios) / min(ratios) if ratios else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow(
                [
                    r.m,
                    r.n,
                    r.T_f,
                    "nonterminating" if r.worst_rounds is None else r.worst_rounds,
                    r.envelope,
                    r.boundary_worst,
                    r.gather_worst,
                    r.states_explored,
                ]
            )
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{'m':>2} {'n':>2} {'tf':>2} {'worst':>6} {'envelope':>8} {'ratio':>6}  flag"]
        for r in self.rows:
            worst = "inf" if r.worst_rounds is None else str(r.worst_rounds)
            ratio = "-" if r.ratio is None else f"{r.ratio:.3f}"
            lines.append(
                f"{r.m:>2} {r.n:>2} {r.T_f:>2} {worst:>6} {r.envelope:>8} {ratio:>6}  {'!' if r.flagged else ''}"
            )
        lines.append(f"ratio spread (max/min): {self.ratio_spread:.3f}")
        return "\n".join(lines)


def bound_report(results: Sequence[WorstCaseResult], C: int = ENVELOPE_C) -> BoundReport:
    """Compare each worst case with ``C * (T_f + 1) * (m + n)``."""
    if not results:
        raise InvalidParams("no results to report")
    rows = []
    for r in results:
        scale = (r.T_f + 1) * (r.m + r.n)
        env = C * scale
        ratio = None if r.worst_rounds is None else r.worst_rounds / scale
        flagged = r.worst_rounds is None or r.worst_rounds > env
        rows.append(
            BoundRow(r.m, r.n, r.T_f, r.worst_rounds, env, r.boundary_worst, r.gather_worst,
                     r.states_explored, ratio, flagged)
        )
    return BoundReport(rows, C)
