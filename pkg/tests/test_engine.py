from __future__ import annotations

import pytest

from conftest import V, make_cfg
from rendezvous.adversary import GreedyEvade, Scripted, SsyncEscape
from rendezvous.configuration import Phase, RobotState, Status
from rendezvous.engine import (
    EventKind,
    Outcome,
    SimParams,
    apply_round,
    fsync_step,
    init_episode,
    read_trace,
    resolve,
    robot_proposals,
    run_episode,
    ssync_run,
)
from rendezvous.errors import IllegalResourceMove, InvalidParams, MalformedTrace, ViolationDetected
from rendezvous.grid import build_grid
from rendezvous.policy import STAY, Move


def kinds(events):
    return [e.kind for e in events]


class TestInit:
    def test_start(self):
        cfg = init_episode(SimParams(build_grid(4, 5), 1, (3, 3)))
        assert cfg.r1 == RobotState(Status.ACTIVE, V(0, 0))
        assert cfg.r2.status is Status.OUTSIDE
        assert cfg.res.position == V(3, 3) and cfg.res.stay_count == 0 and not cfg.res.fixed

    @pytest.mark.parametrize(
        "kw",
        [
            dict(T_f=1, g0=(0, 0)),
            dict(T_f=0, g0=(3, 3)),
            dict(T_f=1, g0=(9, 9)),
            dict(T_f=1, g0=(3, 3), max_rounds=0),
            dict(T_f=1, g0=(3, 3), entry="branch-both"),
        ],
    )
    def test_invalid(self, kw):
        with pytest.raises(InvalidParams):
            init_episode(SimParams(build_grid(4, 5), **kw))


class TestResolve:
    def test_edge_carry(self):
        cfg = make_cfg(5, 5, (1, 1), (0, 3), (1, 2))
        nxt, ev = resolve(cfg, (V(1, 2), None), Move(V(1, 1)))
        assert nxt.r1 == RobotState(Status.TERMINATED, V(1, 2))
        assert nxt.res.position == V(1, 2) and nxt.res.fixed
        assert EventKind.EDGE_CARRY in kinds(ev) and EventKind.RESOURCE_FIXED in kinds(ev)

    def test_step_onto_staying_resource(self):
        cfg = make_cfg(5, 5, (1, 1), (0, 3), (1, 2))
        nxt, ev = resolve(cfg, (V(1, 2), None), STAY)
        assert nxt.r1.status is Status.TERMINATED and nxt.res.fixed
        assert EventKind.CO_LOCATED in kinds(ev) and EventKind.EDGE_CARRY not in kinds(ev)

    def test_both_onto_corner(self):
        cfg = make_cfg(5, 5, (3, 4), (4, 3), (4, 4))
        props = robot_proposals(cfg)
        assert props == (V(4, 4), V(4, 4))
        nxt, ev = apply_round(cfg, STAY)
        assert nxt.r1.status is Status.TERMINATED and nxt.r2.status is Status.TERMINATED
        assert kinds(ev).count(EventKind.ROBOT_TERMINATED) == 2

    def test_robot_swap_is_a_violation(self):
        cfg = make_cfg(5, 5, (1, 1), (1, 2), (3, 3))
        with pytest.raises(ViolationDetected):
            resolve(cfg, (V(1, 2), V(1, 1)), STAY)

    def test_meeting_off_resource_is_a_violation(self):
        cfg = make_cfg(5, 5, (1, 1), (1, 3), (3, 3))
        with pytest.raises(ViolationDetected):
            resolve(cfg, (V(1, 2), V(1, 2)), STAY)

    def test_stay_counter(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (3, 3), T_f=3, stay=1)
        nxt, _ = resolve(cfg, (None, None), STAY)
        assert nxt.res.stay_count == 2
        nxt, _ = resolve(nxt, (None, None), Move(V(3, 2)))
        assert nxt.res.stay_count == 0

    def test_illegal_resource_move(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (3, 3), T_f=1, stay=1)
        with pytest.raises(IllegalResourceMove):
            apply_round(cfg, STAY)


class TestEntryStaging:
    def test_second_robot_appears_when_door_frees(self):
        cfg = init_episode(SimParams(build_grid(4, 4), 1, (3, 3)))
        nxt, ev = fsync_step(cfg, GreedyEvade())
        assert nxt.r1.position == V(0, 1)
        assert nxt.r2 == RobotState(Status.ACTIVE, V(0, 0))
        assert EventKind.ENTERED in kinds(ev)

    def test_resource_on_door(self):
        cfg = init_episode(SimParams(build_grid(4, 4), 1, (1, 0)))
        nxt, ev = apply_round(cfg, Move(V(0, 0)))
        assert nxt.r2 == RobotState(Status.TERMINATED, V(0, 0))
        assert nxt.res.fixed and nxt.res.position == V(0, 0)


class TestRunEpisode:
    def test_greedy_four_by_four(self):
        g = build_grid(4, 4)
        t = run_episode(SimParams(g, 1, (3, 3), adversary="greedy", seed=7, max_rounds=10 * 2 * 8))
        assert t.outcome is Outcome.RENDEZVOUS
        last = t.final
        assert last.r1.position == last.r2.position == last.res.position

    def test_max_rounds(self):
        t = run_episode(SimParams(build_grid(4, 4), 1, (3, 3), max_rounds=1))
        assert t.outcome is Outcome.MAX_ROUNDS and t.rounds == 1

    def test_records_are_gap_free(self):
        t = run_episode(SimParams(build_grid(5, 5), 2, (2, 3), adversary="staymax", seed=3))
        assert [r.round for r in t.records] == list(range(len(t.records)))
        assert t.records[0].phase is Phase.ENTRY

    def test_phase_lengths_sum_to_rounds(self):
        t = run_episode(SimParams(build_grid(5, 6), 2, (4, 3), adversary="greedy"))
        assert sum(t.phase_lengths().values()) == t.rounds

    def test_deterministic(self):
        p = SimParams(build_grid(5, 5), 2, (2, 3), adversary="staymax", seed=11)
        assert run_episode(p).to_jsonl() == run_episode(p).to_jsonl()

    def test_scripted_replay(self):
        p = SimParams(build_grid(4, 4), 1, (3, 3), adversary="greedy", seed=0)
        t = run_episode(p)
        moves = []
        for a, b in zip(t.records, t.records[1:]):
            ra, rb = a.config.res, b.config.res
            carried = any(e.kind is EventKind.EDGE_CARRY for e in b.events)
            assert not carried
            moves.append(STAY if ra.position == rb.position else Move(rb.position))
        again = run_episode(p, Scripted(moves))
        assert again.rounds == t.rounds


class TestTraceFormat:
    def test_round_trip(self, tmp_path):
        t = run_episode(SimParams(build_grid(4, 5), 2, (3, 2), adversary="staymax", seed=1))
        path = tmp_path / "t.jsonl"
        t.write(path)
        back = read_trace(path)
        assert back.to_jsonl() == t.to_jsonl()
        assert back.outcome is t.outcome and back.rounds == t.rounds

    def test_header_fields(self):
        import json

        t = run_episode(SimParams(build_grid(4, 5), 2, (3, 2), seed=1))
        lines = t.to_jsonl().splitlines()
        head = json.loads(lines[0])
        assert head["trace"] == "rendezvous/1" and head["seed"] == 1
        rec = json.loads(lines[1])
        assert set(rec) == {"round", "r1", "r2", "res", "phase", "events"}
        assert set(rec["res"]) == {"x", "y", "fixed", "stay"}
        assert set(rec["r1"]) == {"x", "y", "status"}

    @pytest.mark.parametrize("text", ["", "{}\n", '{"trace": 1, "params": {"m": 1}}\n'])
    def test_malformed(self, text, tmp_path):
        p = tmp_path / "bad.jsonl"
        p.write_text(text)
        with pytest.raises(MalformedTrace):
            read_trace(p)


class TestSsync:
    def test_no_capture_five_by_five(self):
        t = ssync_run(SimParams(build_grid(5, 5), 1, (2, 2), max_rounds=5000), SsyncEscape())
        assert t.outcome is Outcome.MAX_ROUNDS and t.rounds == 5000

    def test_only_activated_robots_move(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (3, 3))
        nxt, _ = apply_round(cfg, STAY, active=[1])
        assert nxt.r1.position == V(0, 1)
        assert nxt.r2.position != V(1, 0)

    def test_full_activation_matches_fsync(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (3, 3))
        assert apply_round(cfg, STAY, active=[0, 1]) == apply_round(cfg, STAY)


def test_early_resource_move_is_flagged():
    cfg = make_cfg(5, 5, (0, 0), None, (3, 3))
    _, ev = apply_round(cfg, Move(V(3, 2)))
    assert any(e.kind is EventKind.EARLY_MOVE for e in ev)
    _, ev = apply_round(cfg, STAY)
    assert not any(e.kind is EventKind.EARLY_MOVE for e in ev)
