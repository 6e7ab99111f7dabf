"""A run where the boundary-phase distance bound is exceeded.

After the resource reaches the perpendicular line of one robot, that robot
is expected to stay within one hop of the resource's projection. Here the
other robot is stalled in front of a corner, the first robot holds at
distance one, and the resource walks away to distance two. The episode
still ends in rendezvous; only the intermediate bound fails.

Run: python3 demos/monitor_counterexample.py
"""

from __future__ import annotations

from rendezvous import SimParams, build_grid, check_invariants, run_episode
from rendezvous.render import render_ascii


def main() -> None:
    trace = run_episode(SimParams(build_grid(4, 5), 1, (2, 0), adversary="greedy", seed=20))
    report = check_invariants(trace)
    print(report.to_text())
    bad = report.results["b"]
    for rec in trace.records[max(0, bad.round - 2) : bad.round + 1]:
        print(render_ascii(rec.config, frames=False))
    print(f"final outcome: {trace.outcome.value} at round {trace.rounds}")


if __name__ == "__main__":
    main()
