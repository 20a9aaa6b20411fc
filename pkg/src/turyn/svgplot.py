"""Minimal deterministic SVG line and scatter plots.

Output depends only on the data and labels: coordinates are printed with a
fixed number of decimals and elements are emitted in series order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

PALETTE = ("#1f4e9c", "#c0392b", "#2a8c4a", "#7d3c98", "#b9770e", "#117a8b", "#555555")


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    style: str = "line"  # "line", "marker" or "both"
    color: str | None = None


@dataclass
class PlotSpec:
    series: list[Series]
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    width: int = 720
    height: int = 480
    hline: float | None = None  # optional reference line
    extras: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not self.series:
            raise ValueError("plot needs at least one series")
        for s in self.series:
            if len(s.x) == 0 or len(s.x) != len(s.y):
                raise ValueError(f"series {s.label!r} is empty or ragged")
            if not all(math.isfinite(v) for v in list(s.x) + list(s.y)):
                raise ValueError(f"series {s.label!r} has non-finite values")
            if s.style not in ("line", "marker", "both"):
                raise ValueError(f"unknown style {s.style!r}")


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(target - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        ticks.append(start + k * step)
        k += 1
    return ticks


def _fmt_tick(v: float, step: float) -> str:
    decimals = max(0, -math.floor(math.log10(step)) + (1 if step / 10 ** math.floor(math.log10(step)) == 2.5 else 0))
    s = f"{v:.{decimals}f}"
    return "0" if s.strip("-0.") == "" else s


def _c(v: float) -> str:
    return f"{v:.2f}"


def render_svg(spec: PlotSpec) -> str:
    spec.validate()
    W, H = spec.width, spec.height
    left, right, top, bottom = 84, 24, 36 if spec.title else 16, 56
    pw, ph = W - left - right, H - top - bottom
    xs = [v for s in spec.series for v in s.x]
    ys = [v for s in spec.series for v in s.y]
    if spec.hline is not None:
        ys.append(spec.hline)
    xlo, xhi = min(xs), max(xs)
    ylo, yhi = min(ys), max(ys)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    pad = 0.05 * (yhi - ylo) if yhi > ylo else 0.5 * max(abs(ylo), 1e-12)
    ylo, yhi = ylo - pad, yhi + pad

    def X(v):
        return left + (v - xlo) / (xhi - xlo) * pw

    def Y(v):
        return top + (yhi - v) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{_c(W / 2)}" y="22" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    out.append(
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>'
    )
    xt = nice_ticks(xlo, xhi)
    yt = nice_ticks(ylo, yhi)
    xstep = xt[1] - xt[0] if len(xt) > 1 else 1.0
    ystep = yt[1] - yt[0] if len(yt) > 1 else 1.0
    for v in xt:
        if xlo <= v <= xhi:
            px = _c(X(v))
            out.append(f'<line x1="{px}" y1="{top + ph}" x2="{px}" y2="{top + ph + 5}" stroke="black"/>')
            out.append(f'<text x="{px}" y="{top + ph + 19}" text-anchor="middle">{_fmt_tick(v, xstep)}</text>')
    for v in yt:
        if ylo <= v <= yhi:
            py = _c(Y(v))
            out.append(f'<line x1="{left - 5}" y1="{py}" x2="{left}" y2="{py}" stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{py}" text-anchor="end" dy="4">{_fmt_tick(v, ystep)}</text>')
    if spec.xlabel:
        out.append(f'<text x="{_c(left + pw / 2)}" y="{H - 12}" text-anchor="middle">{escape(spec.xlabel)}</text>')
    if spec.ylabel:
        cy = _c(top + ph / 2)
        out.append(
            f'<text x="18" y="{cy}" text-anchor="middle" transform="rotate(-90 18 {cy})">{escape(spec.ylabel)}</text>'
        )
    if spec.hline is not None:
        py = _c(Y(spec.hline))
        out.append(
            f'<line x1="{left}" y1="{py}" x2="{left + pw}" y2="{py}" stroke="#999999" stroke-dasharray="4 4"/>'
        )
    for i, s in enumerate(spec.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        pts = [(X(a), Y(b)) for a, b in zip(s.x, s.y)]
        if s.style in ("line", "both") and len(pts) > 1:
            path = " ".join(f"{_c(a)},{_c(b)}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        if s.style in ("marker", "both"):
            for a, b in pts:
                out.append(f'<circle cx="{_c(a)}" cy="{_c(b)}" r="2.5" fill="{color}"/>')
    # legend, top right inside the frame
    lx, ly = left + pw - 150, top + 14
    for i, s in enumerate(spec.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        y = ly + 18 * i
        if s.style == "marker":
            out.append(f'<circle cx="{lx + 10}" cy="{y}" r="3" fill="{color}"/>')
        else:
            out.append(f'<line x1="{lx}" y1="{y}" x2="{lx + 20}" y2="{y}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{lx + 28}" y="{y}" dy="4">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
