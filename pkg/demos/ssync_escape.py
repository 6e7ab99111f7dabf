"""Under a semi-synchronous scheduler the resource can avoid capture.

The scheduler activates one robot per round, alternating, and the resource
plays a short lookahead against the robots' actual moves.

Run: python3 demos/ssync_escape.py
"""

from __future__ import annotations

import time

from rendezvous import SimParams, SsyncEscape, build_grid, ssync_run
from rendezvous.render import render_ascii


def main() -> None:
    for m, n, tf in ((4, 4, 1), (5, 5, 1), (6, 5, 2)):
        g = build_grid(m, n)
        t = time.perf_counter()
        trace = ssync_run(SimParams(g, tf, (n // 2, m // 2), max_rounds=5000), SsyncEscape())
        took = time.perf_counter() - t
        print(f"{m}x{n} T_f={tf}: {trace.outcome.value} after {trace.rounds} rounds ({took:.2f}s)")
    print("\nlast configuration of the final run:")
    print(render_ascii(trace.final))


if __name__ == "__main__":
    main()
