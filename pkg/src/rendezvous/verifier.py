"""Trace monitors, the symmetry suite and re-exports of the exhaustive oracle.

Monitors ``a`` to ``g`` are the protocol's structural claims checked round
by round on a finished trace. ``model``, ``phases`` and ``entry`` check the
execution model itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, NamedTuple, Optional

from .configuration import (
    Configuration,
    GatherFrame,
    Phase,
    ResourceState,
    RobotState,
    RobotView,
    Status,
    boundary_frame_at,
    detect_init_gather,
    robot_view,
)
from .engine import EventKind, Outcome, Trace, TraceRecord, robot_proposals
from .errors import GridError, MalformedTrace
from .grid import Axis, GridSpec, Symmetry, Vertex, hop, is_corner, neighbors_of, sign, symmetries
from .minimax import BoundReport, WorstCaseResult, bound_report, worst_case_rounds
from .policy import Move, admissible_moves, decide

__all__ = [
    "MONITORS",
    "BoundReport",
    "InvariantReport",
    "MonitorResult",
    "WorstCaseResult",
    "bound_report",
    "check_invariants",
    "equivariance_suite",
    "worst_case_rounds",
]

MONITORS = {
    "a": "boundary phase: robots on a boundary, off corners, boundary line fixed",
    "b": "after res reaches PD(R), dist(R) <= 1 for the rest of the boundary phase",
    "c": "after res reaches PD(R), it never reaches PD(R')",
    "d": "an InitGather round is followed by another, robots never collinear",
    "e": "gather phase: res stays strictly inside the containing rectangle",
    "f": "containing rectangle shrinks monotonically and within 2*T_f+1 rounds",
    "g": "a 2x2 containing rectangle ends in rendezvous at the far corner within T_f+1 rounds",
    "model": "execution model: res hops, stay bound, fixed res, co-location only on res",
    "phases": "phase order entry+ then boundary/gather, no gather to boundary",
    "entry": "entry ends with the robots on the two door neighbours",
}


class MonitorResult(NamedTuple):
    name: str
    passed: bool
    round: Optional[int] = None
    config: Optional[Configuration] = None
    message: str = ""

    def line(self) -> str:
        if self.passed:
            return f"{self.name}: pass"
        return f"{self.name}: FAIL at round {self.round}: {self.message}"


@dataclass
class InvariantReport:
    results: dict[str, MonitorResult] = field(default_factory=dict)
    # informational: did the tighter T_f+1 window for (f) also hold
    tight_window_held: Optional[bool] = None
    checked: int = 0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    @property
    def failures(self) -> list[MonitorResult]:
        return [r for r in self.results.values() if not r.passed]

    def first_failure(self) -> Optional[MonitorResult]:
        fails = [r for r in self.failures if r.round is not None]
        return min(fails, key=lambda r: r.round) if fails else (self.failures or [None])[0]

    def merge(self, other: "InvariantReport") -> "InvariantReport":
        for k, r in other.results.items():
            mine = self.results.get(k)
            if mine is None or (mine.passed and not r.passed):
                self.results[k] = r
        if other.tight_window_held is not None:
            self.tight_window_held = (self.tight_window_held is not False) and other.tight_window_held
        self.checked += other.checked
        return self

    def to_text(self) -> str:
        lines = [r.line() for r in self.results.values()]
        if self.tight_window_held is not None:
            lines.append(f"(f) T_f+1 window held: {self.tight_window_held}")
        return "\n".join(lines)


class _Fail(Exception):
    def __init__(self, rec: TraceRecord, message: str):
        super().__init__(message)
        self.rec = rec
        self.message = message


def _both_active(c: Configuration) -> bool:
    return c.r1.active and c.r2.active


def _events(rec: TraceRecord) -> set[EventKind]:
    return {e.kind for e in rec.events}


def _caught(rec: TraceRecord) -> bool:
    return bool(_events(rec) & {EventKind.CO_LOCATED, EventKind.EDGE_CARRY})


def _boundary_runs(records: list[TraceRecord]) -> Iterator[list[TraceRecord]]:
    """Maximal stretches of Boundary records with both robots active."""
    run: list[TraceRecord] = []
    for rec in records:
        if rec.phase is Phase.BOUNDARY and _both_active(rec.config):
            run.append(rec)
        else:
            if run:
                yield run
            run = []
    if run:
        yield run


def _frames(c: Configuration):
    m, n = c.grid.m, c.grid.n
    return [boundary_frame_at(m, n, r.position, c.res.position) for r in c.robots]


def _signed(c: Configuration, i: int) -> int:
    """Offset of res from PD(robot i), measured along that robot's boundary."""
    f = _frames(c)[i]
    r = c.robot(i).position
    res = c.res.position
    return (res.x - r.x) if f.bd.axis is Axis.ROW else (res.y - r.y)


# -- individual monitors ----------------------------------------------------


def _monitor_a(trace: Trace) -> None:
    for run in _boundary_runs(trace.records):
        bds = None
        for rec in run:
            c = rec.config
            m, n = c.grid.m, c.grid.n
            for r in c.robots:
                if is_corner(m, n, r.position):
                    raise _Fail(rec, f"robot on corner {r.position}")
            try:
                now = tuple(f.bd for f in _frames(c))
            except GridError:
                raise _Fail(rec, "robot off the boundary") from None
            if bds is not None and now != bds:
                raise _Fail(rec, f"boundary line changed {bds} -> {now}")
            bds = now


def _monitor_bc(trace: Trace) -> tuple[Optional[_Fail], Optional[_Fail]]:
    fail_b = fail_c = None
    for run in _boundary_runs(trace.records):
        first: Optional[int] = None
        prev: Optional[tuple[int, int]] = None
        for rec in run:
            c = rec.config
            try:
                off = (_signed(c, 0), _signed(c, 1))
            except GridError:
                # no boundary frame; monitor (a) reports this
                prev = None
                continue
            # only a move during the phase counts, not a starting position
            reached = [
                prev is not None and prev[i] != 0 and (off[i] == 0 or sign(off[i]) != sign(prev[i]))
                for i in (0, 1)
            ]
            if first is None:
                if reached[0] and reached[1]:
                    fail_c = fail_c or _Fail(rec, "res reached both PD lines in the same round")
                elif reached[0] or reached[1]:
                    first = 0 if reached[0] else 1
            else:
                other = 1 - first
                if reached[other] and fail_c is None:
                    fail_c = _Fail(rec, f"res reached PD(r{other + 1}) after PD(r{first + 1})")
                if abs(off[first]) > 1 and fail_b is None:
                    fail_b = _Fail(rec, f"dist(r{first + 1}) = {abs(off[first])} after res reached its PD")
            prev = off
    return fail_b, fail_c


def _gather_pairs(records: list[TraceRecord]) -> Iterator[tuple[TraceRecord, GatherFrame, TraceRecord]]:
    for cur, nxt in zip(records, records[1:]):
        if cur.phase is Phase.GATHER and _both_active(cur.config):
            fr = detect_init_gather(cur.config)
            if fr is not None:
                yield cur, fr, nxt


def _monitor_d(trace: Trace) -> None:
    for cur, fr, nxt in _gather_pairs(trace.records):
        c = nxt.config
        if not _both_active(c):
            continue
        a, b = c.r1.position, c.r2.position
        if a.x == b.x or a.y == b.y:
            raise _Fail(nxt, f"robots collinear at {a} and {b}")
        if detect_init_gather(c) is None:
            raise _Fail(nxt, "InitGather lost")


def _strictly_inside(fr: GatherFrame, v: Vertex) -> bool:
    return fr.r_con.contains(v) and not fr.L1_line.contains(v) and not fr.L2_line.contains(v)


def _monitor_e(trace: Trace) -> None:
    for cur, fr, nxt in _gather_pairs(trace.records):
        if _caught(nxt):
            continue
        res = nxt.config.res.position
        if not _strictly_inside(fr, res):
            raise _Fail(nxt, f"res at {res} left the interior of {fr.r_con}")


def _monitor_f(trace: Trace) -> tuple[Optional[_Fail], Optional[bool]]:
    T_f = trace.params.T_f
    stretch: list[tuple[TraceRecord, GatherFrame]] = []
    stretches = []
    for rec in trace.records:
        fr = detect_init_gather(rec.config) if rec.phase is Phase.GATHER else None
        if fr is not None:
            stretch.append((rec, fr))
        elif stretch:
            stretches.append(stretch)
            stretch = []
    if stretch:
        stretches.append(stretch)

    tight: Optional[bool] = None
    for st in stretches:
        for (ra, fa), (rb, fb) in zip(st, st[1:]):
            if fb.r_con.width > fa.r_con.width or fb.r_con.height > fa.r_con.height:
                return _Fail(rb, f"containing rectangle grew {fa.r_con} -> {fb.r_con}"), tight
        for i, (ra, fa) in enumerate(st):
            if fa.r_con.width <= 2 or fa.r_con.height <= 2:
                continue
            size = fa.r_con.width + fa.r_con.height
            for window, is_tight in ((T_f + 1, True), (2 * T_f + 1, False)):
                j = i + window
                if j >= len(st):
                    continue
                shrunk = st[j][1].r_con.width + st[j][1].r_con.height < size
                if is_tight:
                    tight = (tight is not False) and shrunk
                elif not shrunk:
                    return _Fail(st[j][0], f"no shrink of {fa.r_con} within {window} rounds"), tight
    return None, tight


def _monitor_g(trace: Trace) -> None:
    T_f = trace.params.T_f
    recs = trace.records
    g = trace.params.grid
    for i, rec in enumerate(recs):
        if rec.phase is not Phase.GATHER:
            continue
        fr = detect_init_gather(rec.config)
        if fr is None or fr.r_con.width != 2 or fr.r_con.height != 2:
            continue
        horizon = rec.round + T_f + 1
        done = next((r for r in recs[i:] if r.phase is Phase.DONE), None)
        if done is None:
            if recs[-1].round >= horizon:
                raise _Fail(recs[-1], f"no rendezvous by round {horizon}")
            continue
        if done.round > horizon:
            raise _Fail(done, f"rendezvous at round {done.round}, after {horizon}")
        if done.config.res.position != g.far_corner:
            raise _Fail(done, f"rendezvous at {done.config.res.position}, not {g.far_corner}")
        return


def _monitor_model(trace: Trace) -> None:
    T_f = trace.params.T_f
    recs = trace.records
    for k, rec in enumerate(recs):
        if rec.round != k:
            raise _Fail(rec, f"record {k} has round {rec.round}")
        c = rec.config
        if not c.res.fixed and c.res.stay_count > T_f:
            raise _Fail(rec, f"stay count {c.res.stay_count} exceeds T_f")
        on = [r for r in c.robots if r.on_grid]
        if len(on) == 2 and on[0].position == on[1].position and on[0].position != c.res.position:
            raise _Fail(rec, f"robots share {on[0].position} off the resource")
        for r in c.robots:
            if r.status is Status.TERMINATED and r.position != c.res.position:
                raise _Fail(rec, f"terminated robot at {r.position} is not on res")
    for a, b in zip(recs, recs[1:]):
        ra, rb = a.config.res, b.config.res
        if hop(ra.position, rb.position) > 1:
            raise _Fail(b, f"res jumped {ra.position} -> {rb.position}")
        if ra.fixed and (rb.position != ra.position or not rb.fixed):
            raise _Fail(b, "fixed resource moved")
        for i in (0, 1):
            pa, pb = a.config.robot(i), b.config.robot(i)
            if pa.on_grid and hop(pa.position, pb.position) > 1:
                raise _Fail(b, f"r{i + 1} jumped {pa.position} -> {pb.position}")
            if pa.status is Status.TERMINATED and pb != pa:
                raise _Fail(b, f"terminated r{i + 1} changed")
    if trace.outcome is Outcome.RENDEZVOUS:
        last = recs[-1].config
        if not all(r.status is Status.TERMINATED and r.position == last.res.position for r in last.robots):
            raise _Fail(recs[-1], "rendezvous outcome without both robots on res")


def _monitor_phases(trace: Trace) -> None:
    recs = trace.records
    if recs[0].phase is not Phase.ENTRY:
        raise _Fail(recs[0], f"trace starts in {recs[0].phase.value}")
    left_entry = False
    for a, b in zip(recs, recs[1:]):
        if a.phase is not Phase.ENTRY:
            left_entry = True
        if left_entry and b.phase is Phase.ENTRY:
            raise _Fail(b, "entry phase re-entered")
        if a.phase is Phase.DONE:
            raise _Fail(b, "record after done")
        if a.phase is Phase.GATHER and b.phase is Phase.BOUNDARY and _both_active(b.config):
            raise _Fail(b, "gather followed by boundary")


def _monitor_entry(trace: Trace) -> None:
    g = trace.params.grid
    exits = set(neighbors_of(g.m, g.n, g.door))
    for rec in trace.records:
        if rec.phase is Phase.ENTRY:
            continue
        c = rec.config
        if _both_active(c) and {c.r1.position, c.r2.position} != exits:
            raise _Fail(rec, f"entry ended with robots at {c.r1.position}, {c.r2.position}")
        return


def check_invariants(trace: Trace) -> InvariantReport:
    """Evaluate every monitor on a finished trace."""
    if not isinstance(trace, Trace) or not trace.records:
        raise MalformedTrace("trace has no records")
    report = InvariantReport(checked=1)

    def put(name: str, fail: Optional[_Fail]) -> None:
        if fail is None:
            report.results[name] = MonitorResult(name, True)
        else:
            report.results[name] = MonitorResult(
                name, False, fail.rec.round, fail.rec.config, fail.message
            )

    def run(name: str, fn: Callable[[Trace], None]) -> None:
        try:
            fn(trace)
        except _Fail as f:
            put(name, f)
        else:
            put(name, None)

    run("a", _monitor_a)
    fail_b, fail_c = _monitor_bc(trace)
    put("b", fail_b)
    put("c", fail_c)
    run("d", _monitor_d)
    run("e", _monitor_e)
    fail_f, tight = _monitor_f(trace)
    put("f", fail_f)
    report.tight_window_held = tight
    run("g", _monitor_g)
    run("model", _monitor_model)
    run("phases", _monitor_phases)
    run("entry", _monitor_entry)
    return report


# -- symmetry ---------------------------------------------------------------


def transform_view(s: Symmetry, v: RobotView) -> RobotView:
    mm, nn = (v.n, v.m) if s.transpose else (v.m, v.n)
    return RobotView(
        mm,
        nn,
        s.apply(v.pos),
        v.at_door,
        s.apply_opt(v.other),
        v.other_on_res,
        s.apply(v.res),
    )


def transform_move(s: Symmetry, mv: Move) -> Move:
    return mv if mv.target is None else Move(s.apply(mv.target))


def all_views(m: int, n: int) -> Iterator[RobotView]:
    """Every view an active robot can receive on an ``m x n`` grid."""
    verts = [Vertex(x, y) for y in range(m) for x in range(n)]
    for pos in verts:
        door_flags = (False, True) if is_corner(m, n, pos) else (False,)
        for res in verts:
            if res == pos:
                continue
            for other in [None] + verts:
                if other == pos:
                    continue
                for at_door in door_flags:
                    yield RobotView(m, n, pos, at_door, other, other == res, res)


def _pair_configs(g: GridSpec, T_f: int = 1) -> Iterator[Configuration]:
    verts = list(g.vertices())
    for a in verts:
        for b in verts:
            if b == a:
                continue
            for res in verts:
                if res == a:
                    continue
                r2 = RobotState(Status.TERMINATED if b == res else Status.ACTIVE, b)
                yield Configuration(
                    g, 0, RobotState(Status.ACTIVE, a), r2, ResourceState(res, 0, b == res), T_f
                )


def equivariance_suite(
    g: GridSpec, policy: Callable[[RobotView], Move] = decide
) -> InvariantReport:
    """Exhaustive symmetry and anonymity checks for ``policy`` on ``g``.

    ``symmetry``: the admissible move set commutes with every grid symmetry
    and the policy's choice maps into it. ``selection``: the policy picks an
    admissible move. ``anonymity``: swapping robot labels swaps proposals.
    """
    report = InvariantReport(checked=1)
    syms = [s for s in symmetries(g.m, g.n) if not s.is_identity]

    def fail(name: str, msg: str, cfg: Optional[Configuration] = None) -> None:
        report.results.setdefault(name, MonitorResult(name, False, None, cfg, msg))

    for v in all_views(g.m, g.n):
        adm = admissible_moves(v)
        chosen = policy(v)
        if chosen not in adm:
            fail("selection", f"{v}: {chosen} not in {sorted(map(str, adm))}")
        for s in syms:
            sv = transform_view(s, v)
            image = frozenset(transform_move(s, mv) for mv in adm)
            if admissible_moves(sv) != image:
                fail("symmetry", f"{s}: admissible set not equivariant at {v}")
            if policy(sv) not in image:
                fail("symmetry", f"{s}: {policy(sv)} at {sv} is not the image of a move at {v}")

    for cfg in _pair_configs(g):
        a = _proposals_with(cfg, policy)
        b = _proposals_with(cfg.swapped(), policy)
        if a != (b[1], b[0]):
            fail("anonymity", f"label swap changes moves at {cfg}", cfg)

    for name in ("symmetry", "selection", "anonymity"):
        report.results.setdefault(name, MonitorResult(name, True))
    return report


def _proposals_with(cfg: Configuration, policy: Callable[[RobotView], Move]):
    if policy is decide:
        return robot_proposals(cfg)
    return tuple(
        policy(robot_view(cfg, i)).target if cfg.robot(i).active else None for i in (0, 1)
    )


def check_many(traces: Iterable[Trace]) -> InvariantReport:
    total = InvariantReport()
    for t in traces:
        total.merge(check_invariants(t))
    return total
