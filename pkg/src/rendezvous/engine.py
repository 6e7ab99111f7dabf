"""Round loop: simultaneous moves, collision rules, entry staging, traces.

One FSYNC round:

1. every active robot looks at the same snapshot and decides;
2. the resource strategy picks a legal move from that snapshot;
3. moves apply together: a robot/robot edge swap or two robots meeting off
   the resource is a protocol violation, a robot/resource edge swap carries
   the resource to the robot's destination;
4. any active robot on the resource terminates and the resource is fixed;
5. the stay counter is updated;
6. if the second robot is still outside and no active robot stands on the
   door, it appears there for the next round.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, NamedTuple, Optional, Sequence

from .adversary import Strategy, SsyncEscape, legal_resource_moves, make_strategy
from .configuration import (
    OUTSIDE,
    Configuration,
    Phase,
    ResourceState,
    RobotState,
    Status,
    classify_phase,
    robot_view,
)
from .errors import (
    IllegalResourceMove,
    InvalidParams,
    MalformedTrace,
    NoEscape,
    ViolationDetected,
)
from .grid import GridSpec, Vertex, build_grid
from .policy import Move, decide

ENTRY_MODES = ("deterministic", "reversed", "branch-both")


class EventKind(str, Enum):
    ENTERED = "entered"
    EDGE_CARRY = "edge_carry"
    CO_LOCATED = "co_located"
    ROBOT_TERMINATED = "robot_terminated"
    PROTOCOL_VIOLATION = "protocol_violation"
    RESOURCE_FIXED = "resource_fixed"
    # the resource moved before the second robot entered
    EARLY_MOVE = "early_move"


class RoundEvent(NamedTuple):
    kind: EventKind
    subject: str
    detail: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "subject": self.subject, "detail": self.detail}


class Outcome(str, Enum):
    RENDEZVOUS = "rendezvous"
    MAX_ROUNDS = "max_rounds_exceeded"
    VIOLATION = "violation"
    NO_ESCAPE = "no_escape"


@dataclass(frozen=True)
class SimParams:
    grid: GridSpec
    T_f: int
    g0: Vertex
    adversary: str = "greedy"
    seed: Optional[int] = None
    max_rounds: int = 10_000
    entry: str = "deterministic"

    def validate(self) -> None:
        if self.T_f < 1:
            raise InvalidParams(f"T_f must be positive, got {self.T_f}")
        if self.max_rounds < 1:
            raise InvalidParams("max_rounds must be at least 1")
        if Vertex(*self.g0) not in self.grid:
            raise InvalidParams(f"g0 {self.g0} is outside the grid")
        if Vertex(*self.g0) == self.grid.door:
            raise InvalidParams("the resource may not start on the door")
        if self.entry not in ENTRY_MODES[:2]:
            raise InvalidParams(f"entry mode {self.entry!r} is not runnable by the engine")

    @property
    def entry_choice(self) -> int:
        return 1 if self.entry == "reversed" else 0

    def header(self) -> dict:
        return {
            "m": self.grid.m,
            "n": self.grid.n,
            "door": list(self.grid.door),
            "tf": self.T_f,
            "g0": list(self.g0),
            "adversary": self.adversary,
            "seed": self.seed,
            "max_rounds": self.max_rounds,
            "entry": self.entry,
        }


def init_episode(params: SimParams) -> Configuration:
    params.validate()
    g = params.grid
    return Configuration(
        grid=g,
        round=0,
        r1=RobotState(Status.ACTIVE, g.door),
        r2=OUTSIDE,
        res=ResourceState(Vertex(*params.g0), 0, False),
        T_f=params.T_f,
    )


# -- one round --------------------------------------------------------------


def robot_proposals(
    cfg: Configuration, active: Optional[Iterable[int]] = None, entry_choice: int = 0
) -> tuple[Optional[Vertex], Optional[Vertex]]:
    """Destination of each robot this round (``None`` when it does not move)."""
    out: list[Optional[Vertex]] = [None, None]
    wake = (0, 1) if active is None else tuple(active)
    for i in wake:
        if cfg.robot(i).status is Status.ACTIVE:
            out[i] = decide(robot_view(cfg, i), entry_choice).target
    return out[0], out[1]


def resolve(
    cfg: Configuration,
    proposals: Sequence[Optional[Vertex]],
    res_move: Move,
) -> tuple[Configuration, list[RoundEvent]]:
    """Apply robot destinations and the resource move simultaneously."""
    g = cfg.grid
    events: list[RoundEvent] = []
    robots = [cfg.r1, cfg.r2]
    old = [r.position for r in robots]
    new = [p if p is not None else o for p, o in zip(proposals, old)]
    res_from = cfg.res.position
    res_to = res_from if res_move.target is None else res_move.target

    if (
        proposals[0] is not None
        and proposals[1] is not None
        and new[0] == old[1]
        and new[1] == old[0]
    ):
        raise ViolationDetected(f"round {cfg.round}: robots swapped across an edge", cfg)

    res_final = res_to
    if res_to != res_from:
        for i in (0, 1):
            if proposals[i] is not None and old[i] == res_to and new[i] == res_from:
                res_final = res_from
                events.append(
                    RoundEvent(EventKind.EDGE_CARRY, f"r{i + 1}", f"{res_to}->{res_from}")
                )

    if (
        robots[0].on_grid
        and robots[1].on_grid
        and new[0] == new[1]
        and new[0] != res_final
    ):
        raise ViolationDetected(f"round {cfg.round}: robots met at {new[0]} off the resource", cfg)

    statuses = [r.status for r in robots]
    caught = False
    for i in (0, 1):
        if statuses[i] is Status.ACTIVE and new[i] == res_final:
            statuses[i] = Status.TERMINATED
            caught = True
            events.append(RoundEvent(EventKind.CO_LOCATED, f"r{i + 1}", str(res_final)))
            events.append(RoundEvent(EventKind.ROBOT_TERMINATED, f"r{i + 1}"))

    fixed = cfg.res.fixed or caught
    if caught and not cfg.res.fixed:
        events.append(RoundEvent(EventKind.RESOURCE_FIXED, "res", str(res_final)))
    if fixed:
        stay = 0
    elif res_final == res_from:
        stay = cfg.res.stay_count + 1
    else:
        stay = 0
    res = ResourceState(res_final, stay, fixed)
    if res_final != res_from and not robots[1].on_grid:
        events.append(RoundEvent(EventKind.EARLY_MOVE, "res", f"{res_from}->{res_final}"))

    r = [
        RobotState(statuses[i], new[i]) if robots[i].on_grid else OUTSIDE
        for i in (0, 1)
    ]
    if r[1].status is Status.OUTSIDE:
        door = g.door
        if not any(x.status is Status.ACTIVE and x.position == door for x in r):
            events.append(RoundEvent(EventKind.ENTERED, "r2", str(door)))
            if res.position == door:
                r[1] = RobotState(Status.TERMINATED, door)
                events.append(RoundEvent(EventKind.CO_LOCATED, "r2", str(door)))
                events.append(RoundEvent(EventKind.ROBOT_TERMINATED, "r2"))
                if not res.fixed:
                    events.append(RoundEvent(EventKind.RESOURCE_FIXED, "res", str(door)))
                res = ResourceState(door, 0, True)
            else:
                r[1] = RobotState(Status.ACTIVE, door)

    nxt = Configuration(g, cfg.round + 1, r[0], r[1], res, cfg.T_f)
    return nxt, events


def apply_round(
    cfg: Configuration,
    res_move: Move,
    *,
    active: Optional[Iterable[int]] = None,
    entry_choice: int = 0,
) -> tuple[Configuration, list[RoundEvent]]:
    if res_move not in legal_resource_moves(cfg):
        raise IllegalResourceMove(f"round {cfg.round}: {res_move} is not legal from {cfg.res}")
    return resolve(cfg, robot_proposals(cfg, active, entry_choice), res_move)


def fsync_step(
    cfg: Configuration, strategy: Strategy, *, entry_choice: int = 0
) -> tuple[Configuration, list[RoundEvent]]:
    return apply_round(cfg, strategy.choose(cfg), entry_choice=entry_choice)


# -- traces -----------------------------------------------------------------


class TraceRecord(NamedTuple):
    round: int
    config: Configuration
    phase: Phase
    events: tuple[RoundEvent, ...]


@dataclass
class Trace:
    params: SimParams
    records: list[TraceRecord] = field(default_factory=list)
    outcome: Outcome = Outcome.MAX_ROUNDS
    rounds: int = 0
    error: str = ""

    @property
    def final(self) -> Configuration:
        return self.records[-1].config

    def phase_lengths(self) -> dict[Phase, int]:
        # the last record is the state after the final executed round
        counts = {p: 0 for p in Phase}
        for rec in self.records[:-1]:
            counts[rec.phase] += 1
        return counts

    def to_jsonl(self) -> str:
        buf = io.StringIO()
        head = {"trace": "rendezvous/1", "params": self.params.header(), "seed": self.params.seed}
        buf.write(json.dumps(head, sort_keys=True) + "\n")
        for rec in self.records:
            buf.write(json.dumps(record_to_dict(rec), sort_keys=True) + "\n")
        tail = {"outcome": self.outcome.value, "rounds": self.rounds, "error": self.error}
        buf.write(json.dumps(tail, sort_keys=True) + "\n")
        return buf.getvalue()

    def write(self, path: str | Path) -> None:
        Path(path).write_text(self.to_jsonl())


def _robot_dict(r: RobotState) -> dict:
    x, y = r.position if r.position is not None else (None, None)
    return {"x": x, "y": y, "status": r.status.value}


def record_to_dict(rec: TraceRecord) -> dict:
    c = rec.config
    return {
        "round": rec.round,
        "r1": _robot_dict(c.r1),
        "r2": _robot_dict(c.r2),
        "res": {
            "x": c.res.position.x,
            "y": c.res.position.y,
            "fixed": c.res.fixed,
            "stay": c.res.stay_count,
        },
        "phase": rec.phase.value,
        "events": [e.as_dict() for e in rec.events],
    }


def _robot_from(d: dict) -> RobotState:
    status = Status(d["status"])
    if status is Status.OUTSIDE:
        return OUTSIDE
    return RobotState(status, Vertex(int(d["x"]), int(d["y"])))


def read_trace(source: str | Path) -> Trace:
    """Parse a JSONL trace written by :meth:`Trace.to_jsonl`."""
    text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise MalformedTrace("empty trace")
    try:
        head = json.loads(lines[0])
        p = head["params"]
        g = build_grid(p["m"], p["n"], Vertex(*p["door"]))
        params = SimParams(
            grid=g,
            T_f=p["tf"],
            g0=Vertex(*p["g0"]),
            adversary=p.get("adversary", "unknown"),
            seed=p.get("seed"),
            max_rounds=p.get("max_rounds", 10_000),
            entry=p.get("entry", "deterministic"),
        )
        trace = Trace(params)
        for ln in lines[1:]:
            d = json.loads(ln)
            if "outcome" in d and "round" not in d:
                trace.outcome = Outcome(d["outcome"])
                trace.rounds = d.get("rounds", 0)
                trace.error = d.get("error", "")
                continue
            res = d["res"]
            cfg = Configuration(
                g,
                d["round"],
                _robot_from(d["r1"]),
                _robot_from(d["r2"]),
                ResourceState(Vertex(res["x"], res["y"]), res["stay"], res["fixed"]),
                params.T_f,
            )
            events = tuple(
                RoundEvent(EventKind(e["kind"]), e["subject"], e.get("detail", ""))
                for e in d["events"]
            )
            trace.records.append(TraceRecord(d["round"], cfg, Phase(d["phase"]), events))
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedTrace(f"cannot parse trace: {exc}") from exc
    if not trace.records:
        raise MalformedTrace("trace has no records")
    return trace


# -- episodes ---------------------------------------------------------------


def _record(cfg: Configuration, events: Sequence[RoundEvent]) -> TraceRecord:
    return TraceRecord(cfg.round, cfg, classify_phase(cfg), tuple(events))


def run_episode(params: SimParams, strategy: Optional[Strategy] = None) -> Trace:
    cfg = init_episode(params)
    if strategy is None:
        strategy = make_strategy(params.adversary, grid=params.grid, T_f=params.T_f, seed=params.seed)
    trace = Trace(params)
    trace.records.append(_record(cfg, ()))
    choice = params.entry_choice
    while cfg.round < params.max_rounds:
        try:
            cfg, events = fsync_step(cfg, strategy, entry_choice=choice)
        except ViolationDetected as exc:
            trace.outcome = Outcome.VIOLATION
            trace.error = str(exc)
            trace.rounds = cfg.round
            return trace
        rec = _record(cfg, events)
        trace.records.append(rec)
        if rec.phase is Phase.DONE:
            trace.outcome = Outcome.RENDEZVOUS
            trace.rounds = cfg.round
            return trace
    trace.outcome = Outcome.MAX_ROUNDS
    trace.rounds = cfg.round
    return trace


def ssync_run(params: SimParams, adversary: Optional[SsyncEscape] = None) -> Trace:
    """Semi-synchronous run: only the robots the adversary wakes move."""
    adversary = adversary or SsyncEscape()
    cfg = init_episode(params)
    trace = Trace(params)
    trace.records.append(_record(cfg, ()))
    while cfg.round < params.max_rounds:
        try:
            act, mv = adversary.step(cfg)
            cfg, events = apply_round(cfg, mv, active=act, entry_choice=params.entry_choice)
        except NoEscape as exc:
            trace.outcome = Outcome.NO_ESCAPE
            trace.error = str(exc)
            trace.rounds = cfg.round
            return trace
        except ViolationDetected as exc:
            trace.outcome = Outcome.VIOLATION
            trace.error = str(exc)
            trace.rounds = cfg.round
            return trace
        rec = _record(cfg, events)
        trace.records.append(rec)
        if rec.phase is Phase.DONE:
            trace.outcome = Outcome.RENDEZVOUS
            trace.rounds = cfg.round
            return trace
    trace.outcome = Outcome.MAX_ROUNDS
    trace.rounds = cfg.round
    return trace
