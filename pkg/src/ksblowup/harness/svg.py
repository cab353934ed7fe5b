"""Minimal dependency-free SVG line charts."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 400
MARGIN = 60
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _finite(xs, ys, log_y):
    pts = []
    for x, y in zip(xs, ys):
        if y is None or x is None:
            continue
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            continue
        if log_y:
            if y <= 0:
                continue
            y = math.log10(y)
        pts.append((x, y))
    return pts


def _span(lo, hi):
    if hi - lo < 1e-300:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def line_chart(path: str | Path, series: dict[str, tuple], title: str, xlabel: str,
               ylabel: str, log_y: bool = False) -> None:
    """Write ``series`` (label -> (xs, ys)) as one SVG chart."""
    data = {k: _finite(xs, ys, log_y) for k, (xs, ys) in series.items()}
    pts = [p for v in data.values() for p in v]
    if pts:
        x0, x1 = _span(min(p[0] for p in pts), max(p[0] for p in pts))
        y0, y1 = _span(min(p[1] for p in pts), max(p[1] for p in pts))
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    pw, ph = WIDTH - 2 * MARGIN, HEIGHT - 2 * MARGIN

    def sx(x):
        return MARGIN + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return HEIGHT - MARGIN - (y - y0) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<rect x="{MARGIN}" y="{MARGIN}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
           f'<text x="{WIDTH / 2}" y="{MARGIN / 2}" text-anchor="middle" font-size="16">'
           f'{escape(title)}</text>',
           f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">'
           f'{escape(xlabel)}</text>',
           f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" font-size="13" '
           f'transform="rotate(-90 15 {HEIGHT / 2})">'
           f'{escape(("log10 " if log_y else "") + ylabel)}</text>']
    for frac in (0.0, 0.5, 1.0):
        xv, yv = x0 + frac * (x1 - x0), y0 + frac * (y1 - y0)
        out.append(f'<text x="{sx(xv):.1f}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle" '
                   f'font-size="11">{xv:.4g}</text>')
        out.append(f'<text x="{MARGIN - 6}" y="{sy(yv):.1f}" text-anchor="end" '
                   f'font-size="11">{yv:.4g}</text>')
    for i, (label, points) in enumerate(data.items()):
        color = COLORS[i % len(COLORS)]
        if points:
            coords = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in points)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                       f'points="{coords}"/>')
            for x, y in points if len(points) <= 20 else ():
                out.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>')
        out.append(f'<text x="{MARGIN + 10}" y="{MARGIN + 18 + 16 * i}" font-size="12" '
                   f'fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n", encoding="utf-8")
