"""Exhaustive worst-case capture times and the longest forced play.

Every legal resource behaviour is searched; the table compares the worst
round count with the linear envelope and the witness is replayed.

Run: python3 demos/worst_case.py
"""

from __future__ import annotations

from itertools import product

from rendezvous import Scripted, bound_report, run_episode, worst_case_rounds


def main() -> None:
    rows = [worst_case_rounds(m, n, tf) for m, n, tf in product((3, 4, 5), (3, 4, 5), (1, 2))]
    print(bound_report(rows).to_text())

    longest = max(rows, key=lambda r: r.worst_rounds)
    trace = run_episode(longest.witness_params(), Scripted(longest.witness))
    print(
        f"\nlongest: {longest.m}x{longest.n} T_f={longest.T_f} from g0={longest.g0} "
        f"({longest.entry} entry), {longest.worst_rounds} rounds; replay gives {trace.rounds}"
    )


if __name__ == "__main__":
    main()
