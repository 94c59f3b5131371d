"""Minimal self-contained SVG 1.1 line plots (no plotting dependency)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 480
MARGIN = (64, 24, 24, 48)  # left, right, top, bottom
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * span:
        out.append(round(t, 12))
        t += step
    return out


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class Axes:
    def __init__(self, xlim, ylim):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        left, right, top, bottom = MARGIN
        self.px0, self.px1 = left, WIDTH - right
        self.py0, self.py1 = HEIGHT - bottom, top

    def x(self, v: float) -> float:
        return self.px0 + (v - self.x0) / (self.x1 - self.x0) * (self.px1 - self.px0)

    def y(self, v: float) -> float:
        return self.py0 + (v - self.y0) / (self.y1 - self.y0) * (self.py1 - self.py0)


def line_plot(series, xlim, ylim, *, hlines=(), xlabel="t", ylabel="lambda", title="") -> str:
    """``series``: iterable of lists of (x, y) points, one polyline each.

    ``hlines`` are drawn dashed across the full width.
    """
    ax = Axes(xlim, ylim)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<defs><clipPath id="plot"><rect x="{ax.px0}" y="{ax.py1}" width="{ax.px1 - ax.px0}" '
        f'height="{ax.py0 - ax.py1}"/></clipPath></defs>',
    ]
    if title:
        out.append(f'<text x="{WIDTH / 2:.1f}" y="16" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="13">{escape(title)}</text>')
    for t in _ticks(ax.x0, ax.x1):
        px = _fmt(ax.x(t))
        out.append(f'<line x1="{px}" y1="{ax.py0}" x2="{px}" y2="{ax.py0 + 5}" stroke="black"/>')
        out.append(f'<text x="{px}" y="{ax.py0 + 18}" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{t:g}</text>')
    for t in _ticks(ax.y0, ax.y1):
        py = _fmt(ax.y(t))
        out.append(f'<line x1="{ax.px0 - 5}" y1="{py}" x2="{ax.px0}" y2="{py}" stroke="black"/>')
        out.append(f'<text x="{ax.px0 - 8}" y="{py}" text-anchor="end" dominant-baseline="middle" '
                   f'font-family="sans-serif" font-size="11">{t:g}</text>')
    out.append(f'<rect x="{ax.px0}" y="{ax.py1}" width="{ax.px1 - ax.px0}" height="{ax.py0 - ax.py1}" '
               f'fill="none" stroke="black"/>')
    out.append(f'<text x="{(ax.px0 + ax.px1) / 2:.1f}" y="{HEIGHT - 8}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">{escape(xlabel)}</text>')
    out.append(f'<text x="14" y="{(ax.py0 + ax.py1) / 2:.1f}" text-anchor="middle" font-family="sans-serif" '
               f'font-size="12" transform="rotate(-90 14 {(ax.py0 + ax.py1) / 2:.1f})">{escape(ylabel)}</text>')
    out.append('<g clip-path="url(#plot)">')
    for h in hlines:
        py = _fmt(ax.y(h))
        out.append(f'<line x1="{ax.px0}" y1="{py}" x2="{ax.px1}" y2="{py}" stroke="#888888" '
                   f'stroke-dasharray="6,4" stroke-width="1"/>')
    for k, pts in enumerate(series):
        pts = list(pts)
        if not pts:
            continue
        color = PALETTE[k % len(PALETTE)]
        if len(pts) == 1:
            x, y = pts[0]
            out.append(f'<circle cx="{_fmt(ax.x(x))}" cy="{_fmt(ax.y(y))}" r="2" fill="{color}"/>')
            continue
        coords = " ".join(f"{_fmt(ax.x(x))},{_fmt(ax.y(y))}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
