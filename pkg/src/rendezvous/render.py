"""Static pictures of a single configuration, as text or SVG."""

from __future__ import annotations

from xml.sax.saxutils import escape

from .configuration import Configuration, Status, detect_init_gather
from .grid import Axis, Vertex

LEGEND = "1/2 robots, R resource, @ robot on resource, D door, : containing rectangle"


def _glyphs(cfg: Configuration) -> dict[Vertex, str]:
    out: dict[Vertex, str] = {}
    res = cfg.res.position
    for i, r in enumerate(cfg.robots):
        if r.status is Status.OUTSIDE:
            continue
        out[r.position] = "@" if r.position == res else str(i + 1)
    out.setdefault(res, "R")
    return out


def render_ascii(cfg: Configuration, frames: bool = True) -> str:
    """Row 0 first; one character per vertex."""
    g = cfg.grid
    glyph = _glyphs(cfg)
    fr = detect_init_gather(cfg) if frames else None
    lines = [f"round {cfg.round}  {g.m}x{g.n}  T_f={cfg.T_f}  stay={cfg.res.stay_count}"]
    for y in range(g.m):
        row = []
        for x in range(g.n):
            v = Vertex(x, y)
            if v in glyph:
                row.append(glyph[v])
            elif v == g.door:
                row.append("D")
            elif fr is not None and fr.r_con.contains(v):
                row.append(":")
            else:
                row.append(".")
        lines.append(" ".join(row))
    outside = [f"r{i + 1}" for i, r in enumerate(cfg.robots) if r.status is Status.OUTSIDE]
    if outside:
        lines.append("outside: " + ", ".join(outside))
    return "\n".join(lines) + "\n"


CELL = 40
PAD = 20


def _c(k: int) -> int:
    return PAD + k * CELL


def render_svg(cfg: Configuration, frames: bool = True) -> str:
    g = cfg.grid
    w, h = _c(g.n - 1) + PAD, _c(g.m - 1) + PAD + 20
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="white"/>',
    ]
    for y in range(g.m):
        parts.append(f'<line x1="{_c(0)}" y1="{_c(y)}" x2="{_c(g.n - 1)}" y2="{_c(y)}" stroke="#bbb"/>')
    for x in range(g.n):
        parts.append(f'<line x1="{_c(x)}" y1="{_c(0)}" x2="{_c(x)}" y2="{_c(g.m - 1)}" stroke="#bbb"/>')
    d = g.door
    parts.append(
        f'<rect x="{_c(d.x) - 9}" y="{_c(d.y) - 9}" width="18" height="18" fill="none" '
        f'stroke="black" stroke-width="3" class="door"/>'
    )
    fr = detect_init_gather(cfg) if frames else None
    if fr is not None:
        r = fr.r_con
        parts.append(
            f'<rect x="{_c(r.x0) - 6}" y="{_c(r.y0) - 6}" width="{(r.x1 - r.x0) * CELL + 12}" '
            f'height="{(r.y1 - r.y0) * CELL + 12}" fill="none" stroke="green" '
            f'stroke-dasharray="4 3" class="rcon"/>'
        )
        for line, colour, cls in ((fr.L, "blue", "L"), (fr.Lp, "orange", "Lp")):
            if line.axis is Axis.ROW:
                x1, y1, x2, y2 = _c(0), _c(line.index), _c(g.n - 1), _c(line.index)
            else:
                x1, y1, x2, y2 = _c(line.index), _c(0), _c(line.index), _c(g.m - 1)
            parts.append(
                f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{colour}" '
                f'stroke-width="2" opacity="0.6" class="{cls}"/>'
            )
    res = cfg.res.position
    fill = "crimson" if cfg.res.fixed else "gold"
    parts.append(
        f'<rect x="{_c(res.x) - 8}" y="{_c(res.y) - 8}" width="16" height="16" '
        f'fill="{fill}" stroke="black" class="res"/>'
    )
    for i, r in enumerate(cfg.robots):
        if r.status is Status.OUTSIDE:
            continue
        fill = "white" if r.status is Status.TERMINATED else "steelblue"
        dx = -5 if i == 0 else 5
        parts.append(
            f'<circle cx="{_c(r.position.x) + dx}" cy="{_c(r.position.y)}" r="7" '
            f'fill="{fill}" stroke="black" class="robot"/>'
        )
    label = escape(f"round {cfg.round}")
    parts.append(f'<text x="{PAD}" y="{h - 6}" font-size="12" font-family="monospace">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(cfg: Configuration, fmt: str = "ascii", frames: bool = True) -> str:
    if fmt == "ascii":
        return render_ascii(cfg, frames)
    if fmt == "svg":
        return render_svg(cfg, frames)
    raise ValueError(f"unknown format {fmt!r}")
