from __future__ import annotations

import pytest

from conftest import V, make_cfg
from rendezvous.adversary import Scripted, legal_resource_moves
from rendezvous.configuration import classify_phase
from rendezvous.engine import (
    EventKind,
    Outcome,
    RoundEvent,
    SimParams,
    Trace,
    TraceRecord,
    apply_round,
    resolve,
    robot_proposals,
    run_episode,
)
from rendezvous.errors import MalformedTrace
from rendezvous.grid import build_grid
from rendezvous.minimax import bound_report, worst_case_rounds
from rendezvous.policy import STAY, Move, decide
from rendezvous.verifier import check_invariants, equivariance_suite


def trace_of(m, n, T_f, steps, outcome=Outcome.MAX_ROUNDS, events=None):
    """Trace from ``(r1, r2, res)`` tuples, one per round."""
    g = build_grid(m, n)
    recs = []
    for k, (r1, r2, res) in enumerate(steps):
        cfg = make_cfg(m, n, r1, r2, res, T_f=T_f, round=k)
        ev = tuple((events or {}).get(k, ()))
        recs.append(TraceRecord(k, cfg, classify_phase(cfg), ev))
    return Trace(SimParams(g, T_f, (n - 1, m - 1)), recs, outcome, len(steps) - 1)


def failed(report):
    return {r.name for r in report.failures}


class TestPositive:
    @pytest.mark.parametrize("seed", range(6))
    def test_greedy_five_by_five(self, seed):
        g = build_grid(5, 5)
        g0 = [v for v in g.vertices() if v != g.door][seed * 3]
        t = run_episode(SimParams(g, 1 + seed % 3, g0, adversary="greedy", seed=seed))
        rep = check_invariants(t)
        assert t.outcome is Outcome.RENDEZVOUS
        assert rep.passed, rep.to_text()

    def test_report_lists_every_monitor(self):
        t = run_episode(SimParams(build_grid(4, 4), 1, (3, 3)))
        assert set(check_invariants(t).results) == {"a", "b", "c", "d", "e", "f", "g", "model", "phases", "entry"}

    def test_empty(self):
        with pytest.raises(MalformedTrace):
            check_invariants(Trace(SimParams(build_grid(4, 4), 1, (3, 3))))


class TestSeededNegatives:
    def test_a_corner_during_boundary(self):
        t = trace_of(5, 5, 1, [((0, 3), (2, 0), (3, 2)), ((0, 4), (2, 0), (3, 2))])
        rep = check_invariants(t)
        assert "a" in failed(rep)
        assert rep.results["a"].round == 1

    def test_b_dist_grows_after_landing(self):
        steps = [
            ((0, 1), (2, 0), (4, 2)),
            ((0, 1), (2, 0), (4, 1)),
            ((0, 1), (2, 0), (4, 2)),
            ((0, 1), (2, 0), (4, 3)),
        ]
        rep = check_invariants(trace_of(6, 6, 1, steps))
        assert failed(rep) == {"b", "entry", "phases"}
        assert rep.results["b"].round == 3

    def test_c_crosses_the_other_line(self):
        steps = [
            ((0, 2), (3, 0), (5, 3)),
            ((0, 2), (3, 0), (5, 2)),
            ((0, 2), (4, 0), (5, 3)),
            ((0, 2), (5, 0), (4, 3)),
        ]
        rep = check_invariants(trace_of(7, 7, 2, steps))
        assert "c" in failed(rep) and "b" not in failed(rep)
        assert rep.results["c"].round == 3

    def test_d_robots_become_collinear(self):
        steps = [((1, 4), (3, 1), (4, 4)), ((2, 4), (2, 1), (4, 4))]
        rep = check_invariants(trace_of(5, 5, 2, steps))
        assert "d" in failed(rep)

    def test_e_resource_onto_l2(self):
        steps = [((1, 2), (3, 1), (4, 2)), ((1, 2), (3, 1), (4, 1))]
        rep = check_invariants(trace_of(5, 5, 2, steps))
        assert "e" in failed(rep)
        assert rep.results["e"].round == 1

    def test_e_collision_is_exempt(self):
        ev = {1: [RoundEvent(EventKind.CO_LOCATED, "r2", "(4,1)")]}
        steps = [((1, 2), (3, 1), (4, 2)), ((1, 2), (3, 1), (4, 1))]
        rep = check_invariants(trace_of(5, 5, 2, steps, events=ev))
        assert "e" not in failed(rep)

    def test_f_rectangle_grows(self):
        steps = [((1, 2), (3, 1), (4, 2)), ((0, 2), (3, 1), (4, 2))]
        rep = check_invariants(trace_of(5, 5, 2, steps))
        assert "f" in failed(rep)

    def test_f_no_progress_in_window(self):
        steps = [((1, 2), (3, 1), (4, 2))] * 4
        rep = check_invariants(trace_of(5, 5, 1, steps))
        assert "f" in failed(rep)
        assert rep.results["f"].round == 3

    def test_g_two_by_two_without_rendezvous(self):
        steps = [((3, 4), (4, 3), (4, 4))] * 3
        rep = check_invariants(trace_of(5, 5, 1, steps))
        assert "g" in failed(rep)

    def test_model_resource_jump(self):
        steps = [((0, 0), None, (3, 3)), ((0, 1), (0, 0), (3, 1))]
        rep = check_invariants(trace_of(5, 5, 1, steps))
        assert "model" in failed(rep)

    def test_model_stay_bound(self):
        cfg = make_cfg(5, 5, (0, 0), None, (3, 3), T_f=1, stay=2)
        t = Trace(SimParams(build_grid(5, 5), 1, (3, 3)), [TraceRecord(0, cfg, classify_phase(cfg), ())])
        assert "model" in failed(check_invariants(t))

    def test_model_rendezvous_claim(self):
        steps = [((0, 0), None, (3, 3))]
        rep = check_invariants(trace_of(5, 5, 1, steps, outcome=Outcome.RENDEZVOUS))
        assert "model" in failed(rep)

    def test_phases_must_start_with_entry(self):
        rep = check_invariants(trace_of(5, 5, 1, [((0, 1), (1, 0), (3, 3))]))
        assert "phases" in failed(rep)

    def test_entry_completion(self):
        steps = [((0, 0), None, (3, 3)), ((0, 1), (0, 0), (3, 3)), ((0, 2), (1, 0), (3, 3))]
        rep = check_invariants(trace_of(5, 5, 2, steps))
        assert "entry" in failed(rep)


class TestEquivariance:
    @pytest.mark.parametrize("m, n", [(3, 3), (3, 4), (4, 4)])
    def test_protocol_passes(self, m, n):
        rep = equivariance_suite(build_grid(m, n))
        assert rep.passed, rep.to_text()

    def test_biased_stub_fails(self):
        def eastward(v):
            # always prefers +x: breaks mirror symmetry
            if v.pos.x + 1 < v.n:
                return Move.step((v.pos.x + 1, v.pos.y))
            return decide(v)

        rep = equivariance_suite(build_grid(3, 4), eastward)
        assert not rep.passed
        assert "symmetry" in failed(rep)

    def test_identity_aware_stub_fails_anonymity(self):
        def by_label(v):
            # leaks an ordering between the two robots through their coordinates
            if v.other is not None and v.other < v.pos:
                return STAY
            return decide(v)

        rep = equivariance_suite(build_grid(3, 3), by_label)
        assert "anonymity" in failed(rep) or "symmetry" in failed(rep)


class TestMinimax:
    def test_three_by_three(self):
        r = worst_case_rounds(3, 3, 1)
        assert not r.non_terminating and r.worst_rounds is not None
        assert r.worst_rounds >= 3 + 3 - 1

    def test_four_by_four_lower_bound(self):
        assert worst_case_rounds(4, 4, 1).worst_rounds >= 7

    def test_monotone_in_tf(self):
        vals = [worst_case_rounds(3, 4, tf).worst_rounds for tf in (1, 2, 3)]
        assert vals == sorted(vals)

    def test_witness_replays(self):
        r = worst_case_rounds(4, 4, 2)
        t = run_episode(r.witness_params(), Scripted(r.witness))
        assert t.outcome is Outcome.RENDEZVOUS and t.rounds == r.worst_rounds

    def test_successors_match_engine(self):
        cfg = make_cfg(4, 4, (0, 1), (1, 0), (3, 2), T_f=2)
        for mv in legal_resource_moves(cfg):
            a = resolve(cfg, robot_proposals(cfg), mv)[0]
            assert apply_round(cfg, mv)[0] == a

    def test_bound_report(self):
        rows = [worst_case_rounds(3, 3, 1)]
        rep = bound_report(rows)
        assert len(rep.rows) == 1 and not rep.flagged
        text = rep.to_csv().splitlines()
        assert text[0] == "m,n,T_f,worst_rounds,envelope,boundary_worst,gather_worst,states_explored"

    def test_bound_report_flags(self):
        r = worst_case_rounds(3, 3, 1)
        r.worst_rounds = 10_000
        assert bound_report([r]).flagged

    def test_restricted_start(self):
        r = worst_case_rounds(4, 4, 1, starts=[(3, 3)], branch_entry=False)
        assert r.g0 == V(3, 3) and r.entry == "deterministic"
