"""Minimal SVG line charts (fixed 800x400 viewBox, no plotting dependency).

Series are drawn as polylines with an optional shaded band (used when
aggregating three or more seeds).  Output is deterministic text.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

__all__ = ["Series", "line_chart", "two_panel_chart"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_W, _H = 800, 400


@dataclass
class Series:
    label: str
    x: list
    y: list
    band_low: Optional[list] = None
    band_high: Optional[list] = None


@dataclass
class _Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _render_panel(panel: _Panel, x0: int, width: int) -> list[str]:
    pad_l, pad_r, pad_t, pad_b = 52, 14, 30, 42
    plot_w, plot_h = width - pad_l - pad_r, _H - pad_t - pad_b
    xs = [x for s in panel.series for x in s.x]
    ys = [y for s in panel.series for y in s.y]
    for s in panel.series:
        if s.band_low is not None:
            ys += list(s.band_low) + list(s.band_high)
    if not xs:
        xs, ys = [0.0, 1.0], [0.0, 1.0]
    x_min, x_max = min(xs), max(xs)
    y_min, y_max = min(ys), max(ys)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0

    def px(x):
        return x0 + pad_l + (x - x_min) / (x_max - x_min) * plot_w

    def py(y):
        return pad_t + plot_h - (y - y_min) / (y_max - y_min) * plot_h

    out = [
        f'<rect x="{x0 + pad_l}" y="{pad_t}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#888" stroke-width="1"/>',
        f'<text x="{x0 + pad_l + plot_w / 2:.1f}" y="18" text-anchor="middle" '
        f'font-size="14">{panel.title}</text>',
        f'<text x="{x0 + pad_l + plot_w / 2:.1f}" y="{_H - 8}" text-anchor="middle" '
        f'font-size="12">{panel.xlabel}</text>',
        f'<text x="{x0 + 14}" y="{pad_t + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-size="12" transform="rotate(-90 {x0 + 14} {pad_t + plot_h / 2:.1f})">'
        f"{panel.ylabel}</text>",
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x_min + frac * (x_max - x_min)
        yv = y_min + frac * (y_max - y_min)
        out.append(
            f'<text x="{px(xv):.1f}" y="{pad_t + plot_h + 16}" text-anchor="middle" '
            f'font-size="10">{_fmt(xv)}</text>'
        )
        out.append(
            f'<text x="{x0 + pad_l - 6}" y="{py(yv) + 3:.1f}" text-anchor="end" '
            f'font-size="10">{_fmt(yv)}</text>'
        )
    for i, s in enumerate(panel.series):
        color = _PALETTE[i % len(_PALETTE)]
        if s.band_low is not None and len(s.x) >= 2:
            upper = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.band_high))
            lower = " ".join(
                f"{px(x):.2f},{py(y):.2f}"
                for x, y in zip(reversed(s.x), reversed(s.band_low))
            )
            out.append(
                f'<polygon points="{upper} {lower}" fill="{color}" opacity="0.15" stroke="none"/>'
            )
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(s.x, s.y))
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        ly = pad_t + 14 + 14 * i
        lx = x0 + pad_l + 8
        out.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 18}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(f'<text x="{lx + 22}" y="{ly}" font-size="11">{s.label}</text>')
    return out


def _document(body: list[str]) -> str:
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_W} {_H}" '
        f'width="{_W}" height="{_H}" font-family="sans-serif">'
    )
    return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>'] + body + ["</svg>"]) + "\n"


def line_chart(series: list[Series], title: str, xlabel: str, ylabel: str) -> str:
    return _document(_render_panel(_Panel(title, xlabel, ylabel, list(series)), 0, _W))


def two_panel_chart(
    left: list[Series],
    right: list[Series],
    titles: tuple[str, str],
    xlabel: str,
    ylabels: tuple[str, str],
) -> str:
    half = _W // 2
    body = _render_panel(_Panel(titles[0], xlabel, ylabels[0], list(left)), 0, half)
    body += _render_panel(_Panel(titles[1], xlabel, ylabels[1], list(right)), half, half)
    return _document(body)
