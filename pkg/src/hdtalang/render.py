"""Gantt-style diagrams of tipomset activity intervals (text and SVG)."""

from __future__ import annotations

from fractions import Fraction
from xml.sax.saxutils import escape

from .timed import Tipomset, format_rational


def _rows(t: Tipomset) -> list[int]:
    # events sorted by start, then end, then canonical position
    order = t.ipomset.canonical_order
    rank = {e: i for i, e in enumerate(order)}
    return sorted(t.ipomset.events, key=lambda e: (t.starts[e], t.ends[e], rank[e]))


def _names(t: Tipomset) -> dict[int, str]:
    return {e: f"x{e + 1}" for e in t.ipomset.events}


def render_text(t: Tipomset, width: int = 60) -> str:
    """One row per event; ``|`` marks an interface end, ``=`` the activity."""
    d = t.duration
    names = _names(t)
    p = t.ipomset

    def col(x: Fraction) -> int:
        return 0 if d == 0 else round(x / d * width)

    label_w = max((len(f"{names[e]}:{p.labels[e]}") for e in p.events), default=0)
    lines = []
    for e in _rows(t):
        s, f = col(t.starts[e]), col(t.ends[e])
        bar = [" "] * (width + 1)
        for i in range(s, f + 1):
            bar[i] = "="
        if e in p.sources:
            bar[s] = "|"
        if e in p.targets:
            bar[f] = "|"
        head = f"{names[e]}:{p.labels[e]}".ljust(label_w)
        span = f"[{format_rational(t.starts[e])},{format_rational(t.ends[e])}]"
        lines.append(f"{head} {''.join(bar).rstrip()}  {span}")
    axis = "0".ljust(width) + format_rational(d)
    lines.append(" " * (label_w + 1) + axis)
    if p.prec:
        pairs = ", ".join(f"{names[a]}<{names[b]}" for a, b in sorted(p.prec))
        lines.append(f"precedence: {pairs}")
    return "\n".join(lines) + "\n"


def render_svg(t: Tipomset, scale: int = 40, row: int = 24) -> str:
    """Deterministic SVG: fixed ordering, no timestamps or ids in metadata."""
    d = t.duration
    names = _names(t)
    p = t.ipomset
    left = 70
    rows = _rows(t)
    wide = left + int(max(d, 1) * scale) + 20
    high = row * (len(rows) + 2)

    def x(v: Fraction) -> str:
        return f"{left + float(v) * scale:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{wide}" height="{high}" '
        f'viewBox="0 0 {wide} {high}" font-family="monospace" font-size="12">'
    ]
    for i, e in enumerate(rows):
        y = row * (i + 1)
        out.append(f'<text x="4" y="{y + 4}">{escape(names[e])}:{escape(p.labels[e])}</text>')
        out.append(
            f'<line x1="{x(t.starts[e])}" y1="{y}" x2="{x(t.ends[e])}" y2="{y}" stroke="black" stroke-width="3"/>'
        )
        for end, is_iface in ((t.starts[e], e in p.sources), (t.ends[e], e in p.targets)):
            if is_iface:
                out.append(f'<line x1="{x(end)}" y1="{y - 6}" x2="{x(end)}" y2="{y + 6}" stroke="black"/>')
            else:
                out.append(f'<circle cx="{x(end)}" cy="{y}" r="3" fill="black"/>')
    axis_y = row * (len(rows) + 1)
    out.append(f'<line x1="{x(Fraction(0))}" y1="{axis_y}" x2="{x(d)}" y2="{axis_y}" stroke="gray"/>')
    out.append(f'<text x="{x(Fraction(0))}" y="{axis_y + 14}">0</text>')
    out.append(f'<text x="{x(d)}" y="{axis_y + 14}">{format_rational(d)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
