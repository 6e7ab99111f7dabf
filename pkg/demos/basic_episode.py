"""One synchronous episode on a 5x6 grid, drawn round by round.

Run: python3 demos/basic_episode.py
"""

from __future__ import annotations

from rendezvous import SimParams, build_grid, run_episode
from rendezvous.render import LEGEND, render_ascii


def main() -> None:
    params = SimParams(build_grid(5, 6), T_f=2, g0=(4, 3), adversary="greedy", seed=1)
    trace = run_episode(params)
    print(LEGEND)
    for rec in trace.records:
        print(f"-- {rec.phase.value}")
        print(render_ascii(rec.config))
    print(f"{trace.outcome.value} after {trace.rounds} rounds")
    for phase, k in trace.phase_lengths().items():
        print(f"  {phase.value:>9}: {k}")


if __name__ == "__main__":
    main()
