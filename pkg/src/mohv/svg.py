"""Minimal self-contained SVG line and scatter plots."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=60, right=170, top=40, bottom=50)
PALETTE = ["#1f77b4", "#e377c2", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#d62728"]
HV_CAP = 25.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    return [lo + (hi - lo) * i / count for i in range(count + 1)]


class _Frame:
    def __init__(self, xlim, ylim, title, xlabel, ylabel):
        self.xlim, self.ylim = xlim, ylim
        self.x0, self.x1 = MARGIN["left"], WIDTH - MARGIN["right"]
        self.y0, self.y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
            f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
            f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
            f'<rect x="{self.x0}" y="{self.y1}" width="{self.x1 - self.x0}" height="{self.y0 - self.y1}" '
            'fill="none" stroke="black"/>',
        ]
        for t in _ticks(*xlim):
            px = self.px(t)
            self.parts.append(f'<line x1="{_fmt(px)}" y1="{self.y0}" x2="{_fmt(px)}" y2="{self.y0 + 4}" stroke="black"/>')
            self.parts.append(f'<text x="{_fmt(px)}" y="{self.y0 + 16}" text-anchor="middle">{t:g}</text>')
        for t in _ticks(*ylim):
            py = self.py(t)
            self.parts.append(f'<line x1="{self.x0 - 4}" y1="{_fmt(py)}" x2="{self.x0}" y2="{_fmt(py)}" stroke="black"/>')
            self.parts.append(f'<text x="{self.x0 - 7}" y="{_fmt(py + 4)}" text-anchor="end">{t:.3g}</text>')
        self.parts.append(
            f'<text x="{(self.x0 + self.x1) / 2}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>'
        )
        self.parts.append(
            f'<text x="16" y="{(self.y0 + self.y1) / 2}" text-anchor="middle" '
            f'transform="rotate(-90 16 {(self.y0 + self.y1) / 2})">{escape(ylabel)}</text>'
        )
        self.legend_rows = 0

    def px(self, x: float) -> float:
        lo, hi = self.xlim
        return self.x0 + (x - lo) / (hi - lo) * (self.x1 - self.x0)

    def py(self, y: float) -> float:
        lo, hi = self.ylim
        return self.y0 - (y - lo) / (hi - lo) * (self.y0 - self.y1)

    def legend(self, label: str, color: str):
        y = self.y1 + 10 + 16 * self.legend_rows
        x = self.x1 + 12
        self.parts.append(f'<rect x="{x}" y="{y - 8}" width="12" height="10" fill="{color}"/>')
        self.parts.append(f'<text x="{x + 18}" y="{y + 1}">{escape(label)}</text>')
        self.legend_rows += 1

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _limits(lo: float, hi: float) -> tuple[float, float]:
    if not np.isfinite(lo) or not np.isfinite(hi):
        return 0.0, 1.0
    if hi <= lo:
        return lo - 0.5, hi + 0.5
    return lo, hi


def curve_plot(curves, title: str = "", xlabel: str = "iteration", ylabel: str = "dominated hypervolume") -> str:
    """Mean curves with a one-standard-error band.

    ``curves`` is a list of ``(label, steps, mean, stderr)``. The y-axis is
    ``[0, 25]`` whenever the data fit inside it.
    """
    steps_max = max((int(np.max(s)) for _, s, _, _ in curves), default=1)
    top = max((float(np.max(m + e)) for _, _, m, e in curves), default=1.0)
    bottom = min((float(np.min(m - e)) for _, _, m, e in curves), default=0.0)
    ylim = (0.0, HV_CAP) if bottom >= 0.0 and top <= HV_CAP else _limits(min(bottom, 0.0), top)
    frame = _Frame(_limits(1.0, float(steps_max)), ylim, title, xlabel, ylabel)
    for i, (label, steps, mean, stderr) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        upper = [f"{_fmt(frame.px(s))},{_fmt(frame.py(v))}" for s, v in zip(steps, mean + stderr)]
        lower = [f"{_fmt(frame.px(s))},{_fmt(frame.py(v))}" for s, v in zip(steps, mean - stderr)]
        frame.parts.append(f'<polygon points="{" ".join(upper + lower[::-1])}" fill="{color}" fill-opacity="0.2" stroke="none"/>')
        line = [f"{_fmt(frame.px(s))},{_fmt(frame.py(v))}" for s, v in zip(steps, mean)]
        frame.parts.append(f'<polyline points="{" ".join(line)}" fill="none" stroke="{color}" stroke-width="1.8"/>')
        frame.legend(label, color)
    return frame.render()


def scatter_plot(groups, title: str = "", xlabel: str = "objective 1", ylabel: str = "objective 2") -> str:
    """Scatter of 2-D objective vectors, one color per ``(label, points)`` group."""
    pts = [np.asarray(p, dtype=np.float64).reshape(-1, 2) for _, p in groups]
    allpts = np.vstack(pts) if pts else np.zeros((0, 2))
    if allpts.size:
        xlim = _limits(float(allpts[:, 0].min()), float(allpts[:, 0].max()))
        ylim = _limits(float(allpts[:, 1].min()), float(allpts[:, 1].max()))
    else:
        xlim = ylim = (0.0, 1.0)
    frame = _Frame(xlim, ylim, title, xlabel, ylabel)
    for i, ((label, _), P) in enumerate(zip(groups, pts)):
        color = PALETTE[i % len(PALETTE)]
        for x, y in P:
            frame.parts.append(
                f'<circle cx="{_fmt(frame.px(x))}" cy="{_fmt(frame.py(y))}" r="2.5" fill="{color}" fill-opacity="0.7"/>'
            )
        frame.legend(label, color)
    return frame.render()
