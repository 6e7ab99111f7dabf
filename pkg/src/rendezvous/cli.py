"""Command-line entry point: ``python -m rendezvous <command> ...``.

Vertex flags are ``x,y`` with the door at ``(0,0)``. Exit codes:
0 success, 1 bad flags or I/O, 2 max rounds exceeded, 3 protocol violation,
4 a verification failed.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
import tempfile
import time
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .adversary import STRATEGY_NAMES, Scripted, SsyncEscape, format_script, make_strategy
from .configuration import Phase
from .engine import ENTRY_MODES, Outcome, SimParams, read_trace, run_episode, ssync_run
from .errors import RendezvousError
from .grid import Vertex, build_grid
from .minimax import bound_report, worst_case_rounds
from .render import render
from .verifier import MONITORS, InvariantReport, check_invariants, equivariance_suite

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_MAX_ROUNDS = 2
EXIT_VIOLATION = 3
EXIT_VERIFY = 4

SWEEP_COLUMNS = (
    "m", "n", "tf", "adversary", "seed", "outcome", "rounds",
    "entry_len", "boundary_len", "gather_len",
)

_OUTCOME_EXIT = {
    Outcome.RENDEZVOUS: EXIT_OK,
    Outcome.MAX_ROUNDS: EXIT_MAX_ROUNDS,
    Outcome.VIOLATION: EXIT_VIOLATION,
    Outcome.NO_ESCAPE: EXIT_VERIFY,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def parse_vertex(text: str) -> Vertex:
    try:
        x, y = (int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y, got {text!r}") from None
    return Vertex(x, y)


def parse_range(text: str) -> list[int]:
    """``"3..5"`` -> [3, 4, 5]; ``"4"`` -> [4]; ``"3,5"`` -> [3, 5]."""
    try:
        if ".." in text:
            lo, hi = (int(p) for p in text.split(".."))
            if hi < lo:
                raise ValueError
            return list(range(lo, hi + 1))
        return [int(p) for p in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None


def atomic_write(path: str | Path, text: str) -> None:
    """Write via a temporary file in the target directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _err(msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return EXIT_USAGE


# -- run --------------------------------------------------------------------


def _params(a: argparse.Namespace, g0: Vertex, adversary: str, seed: Optional[int]) -> SimParams:
    g = build_grid(a.m, a.n)
    return SimParams(g, a.tf, g0, adversary=adversary, seed=seed, max_rounds=a.max_rounds, entry=a.entry)


def cmd_run(a: argparse.Namespace) -> int:
    params = _params(a, a.g0, a.adversary, a.seed)
    params.validate()
    if a.adversary == "scripted":
        if a.script is None:
            return _err("--adversary scripted needs --script")
        strategy = Scripted.load(a.script)
    else:
        strategy = make_strategy(a.adversary, grid=params.grid, T_f=a.tf, seed=a.seed)
    trace = run_episode(params, strategy)
    if a.trace:
        atomic_write(a.trace, trace.to_jsonl())
    line = f"{trace.outcome.value} rounds={trace.rounds}"
    if trace.error:
        line += f" ({trace.error})"
    print(line)
    return _OUTCOME_EXIT[trace.outcome]


# -- sweep ------------------------------------------------------------------


def cmd_sweep(a: argparse.Namespace) -> int:
    out = Path(a.out)
    if not out.parent.is_dir() or not os.access(out.parent, os.W_OK):
        return _err(f"cannot write {out}")
    for name in a.adversary:
        if name not in ("greedy", "staymax", "oscillator"):
            return _err(f"sweep adversary must be greedy, staymax or oscillator, not {name!r}")
    rows = []
    for m in a.m:
        for n in a.n:
            g = build_grid(m, n)
            starts = [v for v in g.vertices() if v != g.door]
            for tf in a.tf:
                for name in a.adversary:
                    for k in range(a.episodes):
                        seed = a.seed_base + k
                        g0 = starts[int(np.random.default_rng(seed).integers(len(starts)))]
                        p = SimParams(g, tf, g0, adversary=name, seed=seed, max_rounds=a.max_rounds)
                        t = run_episode(p)
                        lens = t.phase_lengths()
                        rows.append(
                            (m, n, tf, name, seed, t.outcome.value, t.rounds,
                             lens[Phase.ENTRY], lens[Phase.BOUNDARY], lens[Phase.GATHER])
                        )
    buf = _csv_text(SWEEP_COLUMNS, rows)
    try:
        atomic_write(out, buf)
    except OSError as exc:
        return _err(f"cannot write {out}: {exc}")
    ok = sum(1 for r in rows if r[5] == Outcome.RENDEZVOUS.value)
    pct = 100.0 * ok / len(rows) if rows else 0.0
    mean = float(np.mean([r[6] for r in rows])) if rows else 0.0
    worst = max((r[6] for r in rows), default=0)
    print(f"{len(rows)} episodes, rendezvous {pct:.1f}%, mean rounds {mean:.2f}, max rounds {worst}")
    return EXIT_OK if ok == len(rows) else EXIT_MAX_ROUNDS


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# -- worst ------------------------------------------------------------------


def witness_filename(m: int, n: int, tf: int) -> str:
    return f"witness_{m}x{n}_tf{tf}.txt"


def cmd_worst(a: argparse.Namespace) -> int:
    results = []
    for m in a.m:
        for n in a.n:
            for tf in a.tf:
                results.append(
                    worst_case_rounds(m, n, tf, branch_entry=not a.no_branch_entry, state_limit=a.state_limit)
                )
    report = bound_report(results, C=a.C)
    print(report.to_text())
    if a.csv:
        atomic_write(a.csv, report.to_csv())
    if a.witness_dir:
        d = Path(a.witness_dir)
        d.mkdir(parents=True, exist_ok=True)
        for r in results:
            if r.non_terminating:
                continue
            head = [
                f"{r.m}x{r.n} T_f={r.T_f} worst_rounds={r.worst_rounds}",
                f"replay: run --m {r.m} --n {r.n} --tf {r.T_f} --g0 {r.g0.x},{r.g0.y} "
                f"--entry {r.entry} --adversary scripted --script {witness_filename(r.m, r.n, r.T_f)}",
            ]
            atomic_write(d / witness_filename(r.m, r.n, r.T_f), format_script(r.witness, head))
    bad = [r for r in results if r.non_terminating]
    for r in bad:
        print(f"non-terminating on {r.m}x{r.n} T_f={r.T_f}, cycle of {len(r.cycle) - 1} states from g0={r.g0}")
    return EXIT_VERIFY if bad or report.flagged else EXIT_OK


# -- ssync ------------------------------------------------------------------


def cmd_ssync_demo(a: argparse.Namespace) -> int:
    g = build_grid(a.m, a.n)
    g0 = a.g0 if a.g0 is not None else Vertex(a.n // 2, a.m // 2)
    params = SimParams(g, a.tf, g0, adversary="ssync-escape", max_rounds=a.rounds)
    start = time.perf_counter()
    trace = ssync_run(params, SsyncEscape(K=a.K))
    took = time.perf_counter() - start
    if a.trace:
        atomic_write(a.trace, trace.to_jsonl())
    if trace.outcome is Outcome.MAX_ROUNDS:
        print(f"no rendezvous after {trace.rounds} rounds ({took:.2f}s)")
        return EXIT_OK
    print(f"{trace.outcome.value} at round {trace.rounds} {trace.error}".rstrip())
    return EXIT_VERIFY


# -- verify -----------------------------------------------------------------


def _print_report(title: str, rep: InvariantReport) -> None:
    print(f"== {title}")
    for r in rep.results.values():
        print(r.line())
        if not r.passed and r.config is not None:
            print(render(r.config, "ascii"), end="")
    if rep.tight_window_held is not None:
        print(f"(f) T_f+1 window also held: {rep.tight_window_held}")


def cmd_verify(a: argparse.Namespace) -> int:
    ok = True
    if a.trace:
        for path in a.trace:
            rep = check_invariants(read_trace(path))
            _print_report(str(path), rep)
            ok &= rep.passed
        return EXIT_OK if ok else EXIT_VERIFY
    for m, n in ((4, 4), (4, 5)):
        rep = equivariance_suite(build_grid(m, n))
        _print_report(f"equivariance {m}x{n}", rep)
        ok &= rep.passed
    total = InvariantReport()
    for m in range(3, 6):
        for n in range(3, 6):
            g = build_grid(m, n)
            starts = [v for v in g.vertices() if v != g.door]
            for tf in (1, 2):
                for k in range(a.episodes):
                    adv = ("greedy", "staymax")[k % 2]
                    p = SimParams(g, tf, starts[k % len(starts)], adversary=adv, seed=k)
                    total.merge(check_invariants(run_episode(p)))
    _print_report(f"monitors over {total.checked} episodes", total)
    ok &= total.passed
    return EXIT_OK if ok else EXIT_VERIFY


# -- render -----------------------------------------------------------------


def cmd_render(a: argparse.Namespace) -> int:
    trace = read_trace(a.trace)
    if a.round is None:
        rec = trace.records[-1]
    else:
        match = [r for r in trace.records if r.round == a.round]
        if not match:
            return _err(f"trace has no round {a.round}")
        rec = match[0]
    text = render(rec.config, a.format, frames=not a.no_frames)
    if a.out:
        atomic_write(a.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rendezvous", description="Two-robot rendezvous with a moving resource on a grid.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def grid_flags(sp, ranges: bool = False):
        kind = parse_range if ranges else int
        sp.add_argument("--m", type=kind, required=True, help="rows")
        sp.add_argument("--n", type=kind, required=True, help="columns")
        sp.add_argument("--tf", type=kind, required=True, help="max consecutive stays of the resource")

    r = sub.add_parser("run", help="run one FSYNC episode")
    grid_flags(r)
    r.add_argument("--g0", type=parse_vertex, required=True, help="initial resource x,y")
    r.add_argument("--adversary", choices=STRATEGY_NAMES, default="greedy")
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--max-rounds", type=int, default=10_000)
    r.add_argument("--trace", help="write the JSONL trace here")
    r.add_argument("--script", help="move list for --adversary scripted")
    r.add_argument("--entry", choices=ENTRY_MODES[:2], default="deterministic")
    r.set_defaults(fn=cmd_run)

    s = sub.add_parser("sweep", help="many episodes to CSV")
    grid_flags(s, ranges=True)
    s.add_argument("--adversary", type=lambda t: t.split(","), default=["greedy"])
    s.add_argument("--episodes", type=int, default=100)
    s.add_argument("--seed-base", type=int, default=0)
    s.add_argument("--max-rounds", type=int, default=10_000)
    s.add_argument("--entry", choices=ENTRY_MODES[:2], default="deterministic")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_sweep)

    w = sub.add_parser("worst", help="exhaustive worst-case capture time")
    grid_flags(w, ranges=True)
    w.add_argument("--no-branch-entry", action="store_true")
    w.add_argument("--C", type=int, default=12, help="envelope constant")
    w.add_argument("--state-limit", type=int, default=2_000_000)
    w.add_argument("--csv", help="write the results table here")
    w.add_argument("--witness-dir", help="write one replayable script per cell here")
    w.set_defaults(fn=cmd_worst)

    d = sub.add_parser("ssync-demo", help="semi-synchronous escape run")
    grid_flags(d)
    d.add_argument("--rounds", type=int, default=5000)
    d.add_argument("--g0", type=parse_vertex, default=None)
    d.add_argument("--K", type=int, default=2, help="fairness window")
    d.add_argument("--trace")
    d.set_defaults(fn=cmd_ssync_demo)

    v = sub.add_parser("verify", help="invariant and symmetry suites")
    v.add_argument("--trace", nargs="+", help="check these trace files instead of the built-in suite")
    v.add_argument("--episodes", type=int, default=20, help="episodes per cell in the built-in suite")
    v.set_defaults(fn=cmd_verify)

    rd = sub.add_parser("render", help="draw one trace record")
    rd.add_argument("--trace", required=True)
    rd.add_argument("--format", choices=("ascii", "svg"), default="ascii")
    rd.add_argument("--round", type=int, default=None, help="default: last record")
    rd.add_argument("--out")
    rd.add_argument("--no-frames", action="store_true")
    rd.set_defaults(fn=cmd_render)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except UsageError as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return _err(str(exc))
    try:
        return a.fn(a)
    except RendezvousError as exc:
        return _err(f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _err(str(exc))


__all__ = ["MONITORS", "build_parser", "main", "parse_range", "parse_vertex"]
