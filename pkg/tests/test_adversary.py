from __future__ import annotations

import pytest

from conftest import V, make_cfg
from rendezvous.adversary import (
    GreedyEvade,
    Oscillator,
    Scripted,
    SsyncEscape,
    StayMaxRandom,
    format_script,
    legal_resource_moves,
    make_strategy,
    oscillator_pair,
    parse_script,
)
from rendezvous.engine import SimParams, init_episode, robot_proposals, run_episode
from rendezvous.errors import IllegalScript, InvalidParams
from rendezvous.grid import build_grid, hop, is_corner
from rendezvous.policy import STAY, Move


class TestLegalMoves:
    def test_fixed(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (2, 2), fixed=True)
        assert legal_resource_moves(cfg) == (STAY,)

    def test_interior(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (2, 2), T_f=2, stay=1)
        moves = legal_resource_moves(cfg)
        assert set(moves) == {STAY} | {Move(V(x, y)) for x, y in [(1, 2), (3, 2), (2, 1), (2, 3)]}

    def test_stay_excluded_at_bound(self):
        cfg = make_cfg(5, 5, (0, 2), (2, 0), (4, 4), T_f=2, stay=2, door=(0, 0))
        assert set(legal_resource_moves(cfg)) == {Move(V(3, 4)), Move(V(4, 3))}

    def test_corner_at_bound(self):
        cfg = make_cfg(5, 5, (4, 2), None, (0, 0), T_f=1, stay=1, door=(4, 4))
        assert set(legal_resource_moves(cfg)) == {Move(V(1, 0)), Move(V(0, 1))}


class TestGreedy:
    def test_example(self):
        cfg = make_cfg(5, 5, (0, 2), (2, 0), (2, 2))
        assert GreedyEvade().choose(cfg) == Move(V(3, 2))

    def test_prefers_stay_on_ties(self):
        cfg = make_cfg(5, 5, (0, 0), None, (4, 4))
        assert GreedyEvade().choose(cfg) == STAY

    @pytest.mark.parametrize("res", [(2, 2), (4, 4), (3, 1), (1, 3)])
    def test_never_gives_up_distance(self, res):
        g = build_grid(5, 5)
        for a in g.vertices():
            for b in g.vertices():
                if len({a, b, V(*res)}) < 3:
                    continue
                cfg = make_cfg(5, 5, a, b, res)
                cur = min(hop(V(*res), a), hop(V(*res), b))
                mv = GreedyEvade().choose(cfg)
                dest = cfg.res.position if mv.target is None else mv.target
                best = max(
                    min(hop(cfg.res.position if m.target is None else m.target, r) for r in (a, b))
                    for m in legal_resource_moves(cfg)
                )
                assert min(hop(dest, a), hop(dest, b)) == best
                if best >= cur:
                    assert min(hop(dest, a), hop(dest, b)) >= cur


class TestStayMax:
    def test_stays_while_allowed(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (2, 2), T_f=3, stay=2)
        assert StayMaxRandom(1).choose(cfg) == STAY

    def test_forced_step_is_legal_and_seeded(self):
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (2, 2), T_f=1, stay=1)
        a = [StayMaxRandom(5).choose(cfg) for _ in range(1)]
        b = [StayMaxRandom(5).choose(cfg) for _ in range(1)]
        assert a == b and a[0] in legal_resource_moves(cfg) and a[0] != STAY


class TestScripted:
    def test_illegal(self):
        cfg = make_cfg(5, 5, (0, 0), None, (2, 2))
        with pytest.raises(IllegalScript):
            Scripted([Move(V(4, 4))]).choose(cfg)

    def test_round_trip(self):
        moves = [STAY, Move(V(1, 2)), Move(V(3, 0))]
        text = format_script(moves, ["header"])
        assert text.startswith("# header\n")
        assert parse_script(text) == moves

    def test_parse_errors(self):
        with pytest.raises(IllegalScript):
            parse_script("jump 1 2\n")
        with pytest.raises(IllegalScript):
            parse_script("step a b\n")

    def test_comments_and_blanks(self):
        assert parse_script("# c\n\nstay  # trailing\n") == [STAY]


class TestOscillator:
    def test_pair_on_four_by_four(self):
        assert oscillator_pair(build_grid(4, 4)) == (V(3, 3), V(3, 2))

    def test_pair_follows_the_door(self):
        assert oscillator_pair(build_grid(4, 4, (3, 3))) == (V(0, 0), V(0, 1))

    def test_period(self):
        g = build_grid(6, 6)
        osc = Oscillator(g, 2)
        p = SimParams(g, 2, (5, 5), adversary="oscillator", max_rounds=7)
        trace = run_episode(p, osc)
        positions = [r.config.res.position for r in trace.records]
        changes = [i for i in range(1, len(positions)) if positions[i] != positions[i - 1]]
        # a change visible in record i happened during round i - 1
        assert [i - 1 for i in changes] == [2, 4, 6]

    def test_hand_off(self):
        g = build_grid(4, 4)
        osc = Oscillator(g, 1)
        cfg = make_cfg(4, 4, (3, 1), (2, 0), (3, 3))
        osc.choose(cfg)
        assert not osc.handed_off
        cfg = make_cfg(4, 4, (3, 2), (2, 0), (3, 3))
        osc.choose(cfg)
        assert osc.handed_off

    def test_lower_bound_four_by_four(self):
        g = build_grid(4, 4)
        t = run_episode(SimParams(g, 1, (3, 3), adversary="oscillator"))
        assert t.outcome.value == "rendezvous" and t.rounds >= 7


class TestMakeStrategy:
    def test_names(self):
        g = build_grid(4, 4)
        assert isinstance(make_strategy("greedy"), GreedyEvade)
        assert isinstance(make_strategy("staymax", seed=3), StayMaxRandom)
        assert isinstance(make_strategy("oscillator", grid=g, T_f=2), Oscillator)
        assert isinstance(make_strategy("witness", script=[STAY]), Scripted)

    @pytest.mark.parametrize("kw", [dict(name="bogus"), dict(name="oscillator"), dict(name="scripted")])
    def test_errors(self, kw):
        with pytest.raises(InvalidParams):
            make_strategy(kw.pop("name"), **kw)


class TestSsyncEscape:
    def test_calm_stay(self):
        cfg = make_cfg(5, 5, (0, 0), (4, 4), (2, 2), door=(0, 0))
        act, mv = SsyncEscape().step(cfg)
        assert act == {0} and mv == STAY

    def test_adjacent_robot_cannot_reach(self):
        cfg = make_cfg(5, 5, (1, 2), (4, 4), (2, 2))
        act, mv = SsyncEscape().step(cfg)
        assert act == {0}
        assert mv.target in {V(2, 3), V(3, 2), V(2, 1)}
        props = robot_proposals(cfg, act)
        assert props[0] != mv.target

    def test_never_into_occupied_corner(self):
        cfg = make_cfg(5, 5, (0, 0), (4, 4), (1, 0), stay=1, door=(0, 0))
        act, mv = SsyncEscape().step(cfg)
        assert mv.target in {V(2, 0), V(1, 1)}
        assert not is_corner(5, 5, mv.target)

    def test_fairness_checked(self):
        with pytest.raises(InvalidParams):
            SsyncEscape(schedule=[{0}, {0}, {1}], K=2)
        SsyncEscape(schedule=[{0}, {0}, {1}], K=3)

    def test_both_activated_is_fsync(self):
        g = build_grid(5, 5)
        adv = SsyncEscape(schedule=[{0, 1}], K=1)
        cfg = init_episode(SimParams(g, 1, (3, 3)))
        assert adv.activation(cfg) == {0}
        cfg = make_cfg(5, 5, (0, 1), (1, 0), (3, 3))
        assert adv.activation(cfg) == {0, 1}
