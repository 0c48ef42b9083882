"""Minimal SVG emission: line charts and a marching-squares contour plot.

Charts are built directly from arrays, no plotting library involved.
Output is deterministic for identical inputs.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .material import SafeSetGrid

_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 62.0, 16.0, 30.0, 46.0
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for step in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= step * mag:
            raw = step * mag
            break
    start = math.ceil(lo / raw) * raw
    out = []
    v = start
    while v <= hi + 1e-12 * max(abs(lo), abs(hi), 1.0):
        out.append(0.0 if abs(v) < 1e-12 * raw else v)
        v += raw
    return out or [lo, hi]


def _fmt_tick(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.1e}"
    return f"{v:.4g}"


def line_chart(
    series: list[tuple[str, np.ndarray, np.ndarray]],
    title: str,
    xlabel: str,
    ylabel: str,
    width: int = 640,
    height: int = 380,
    hline: float | None = None,
) -> str:
    """Render labelled (x, y) series as an SVG line chart.

    hline draws a dashed horizontal reference line (used for the h = 0
    barrier level).
    """
    xs = np.concatenate([np.asarray(s[1], dtype=float) for s in series])
    ys = np.concatenate([np.asarray(s[2], dtype=float) for s in series])
    if hline is not None:
        ys = np.append(ys, hline)
    x_lo, x_hi = float(xs.min()), float(xs.max())
    y_lo, y_hi = float(ys.min()), float(ys.max())
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo -= pad
    y_hi += pad

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica,Arial,sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w:.1f}" height="{plot_h:.1f}" '
        'fill="none" stroke="#333333"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{height - 10}" text-anchor="middle">{xlabel}</text>',
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>',
    ]
    for tx in _ticks(x_lo, x_hi):
        if tx < x_lo or tx > x_hi:
            continue
        parts.append(
            f'<line x1="{px(tx):.1f}" y1="{_MARGIN_T + plot_h:.1f}" x2="{px(tx):.1f}" '
            f'y2="{_MARGIN_T + plot_h + 5:.1f}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{px(tx):.1f}" y="{_MARGIN_T + plot_h + 18:.1f}" text-anchor="middle">{_fmt_tick(tx)}</text>'
        )
    for ty in _ticks(y_lo, y_hi):
        if ty < y_lo or ty > y_hi:
            continue
        parts.append(
            f'<line x1="{_MARGIN_L - 5:.1f}" y1="{py(ty):.1f}" x2="{_MARGIN_L}" y2="{py(ty):.1f}" stroke="#333333"/>'
        )
        parts.append(
            f'<text x="{_MARGIN_L - 8:.1f}" y="{py(ty) + 4:.1f}" text-anchor="end">{_fmt_tick(ty)}</text>'
        )
    if hline is not None and y_lo <= hline <= y_hi:
        parts.append(
            f'<line x1="{_MARGIN_L}" y1="{py(hline):.1f}" x2="{_MARGIN_L + plot_w:.1f}" '
            f'y2="{py(hline):.1f}" stroke="#555555" stroke-dasharray="6 4"/>'
        )
    for idx, (label, x, y) in enumerate(series):
        color = _COLORS[idx % len(_COLORS)]
        pts = " ".join(f"{px(float(xi)):.2f},{py(float(yi)):.2f}" for xi, yi in zip(x, y))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        lx = _MARGIN_L + plot_w - 10
        ly = _MARGIN_T + 16 + 16 * idx
        parts.append(f'<line x1="{lx - 28:.1f}" y1="{ly - 4:.1f}" x2="{lx - 8:.1f}" y2="{ly - 4:.1f}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{lx - 32:.1f}" y="{ly:.1f}" text-anchor="end">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def _cell_segments(x0, x1, y0, y1, v00, v10, v01, v11) -> list[tuple]:
    """Marching-squares zero-level segments for one grid cell.

    Corner values v(row, col) with rows along x and cols along y.
    """

    def lerp(a, b, va, vb):
        t = va / (va - vb)
        return a + t * (b - a)

    corners = ((v00 > 0) << 0) | ((v10 > 0) << 1) | ((v11 > 0) << 2) | ((v01 > 0) << 3)
    if corners in (0, 15):
        return []
    # Edge midpoints where the zero level crosses.
    bottom = (lerp(x0, x1, v00, v10), y0) if (v00 > 0) != (v10 > 0) else None
    right = (x1, lerp(y0, y1, v10, v11)) if (v10 > 0) != (v11 > 0) else None
    top = (lerp(x0, x1, v01, v11), y1) if (v01 > 0) != (v11 > 0) else None
    left = (x0, lerp(y0, y1, v00, v01)) if (v00 > 0) != (v01 > 0) else None
    table = {
        1: [(left, bottom)],
        2: [(bottom, right)],
        3: [(left, right)],
        4: [(right, top)],
        5: [(left, top), (bottom, right)],
        6: [(bottom, top)],
        7: [(left, top)],
        8: [(top, left)],
        9: [(top, bottom)],
        10: [(bottom, left), (top, right)],
        11: [(top, right)],
        12: [(right, left)],
        13: [(right, bottom)],
        14: [(bottom, left)],
    }
    return [(a, b) for a, b in table[corners] if a is not None and b is not None]


def contour_segments(grid: SafeSetGrid) -> list[tuple]:
    """Zero-level segments ((x0, y0), (x1, y1)) in stretch coordinates."""
    segs = []
    h = grid.h_values
    for i in range(len(grid.theta_axis) - 1):
        for j in range(len(grid.z_axis) - 1):
            segs.extend(
                _cell_segments(
                    grid.theta_axis[i],
                    grid.theta_axis[i + 1],
                    grid.z_axis[j],
                    grid.z_axis[j + 1],
                    h[i, j],
                    h[i + 1, j],
                    h[i, j + 1],
                    h[i + 1, j + 1],
                )
            )
    return segs


def safe_set_figure(
    grid: SafeSetGrid,
    title: str = "Material safe set",
    trajectory: tuple[np.ndarray, np.ndarray] | None = None,
    width: int = 560,
    height: int = 520,
) -> str:
    """Shaded safe region (h >= 0) with the h = 0 boundary contour.

    Optionally overlays a stretch trajectory.
    """
    x_lo, x_hi = float(grid.theta_axis[0]), float(grid.theta_axis[-1])
    y_lo, y_hi = float(grid.z_axis[0]), float(grid.z_axis[-1])
    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(x: float) -> float:
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="Helvetica,Arial,sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="14">{title}</text>',
    ]
    # Shade safe cells (all four corners inside).
    h = grid.h_values
    safe = h > 0
    cell_w = plot_w / (len(grid.theta_axis) - 1)
    cell_h = plot_h / (len(grid.z_axis) - 1)
    for i in range(len(grid.theta_axis) - 1):
        for j in range(len(grid.z_axis) - 1):
            if safe[i, j] and safe[i + 1, j] and safe[i, j + 1] and safe[i + 1, j + 1]:
                x = px(grid.theta_axis[i])
                y = py(grid.z_axis[j + 1])
                parts.append(
                    f'<rect x="{x:.2f}" y="{y:.2f}" width="{cell_w + 0.5:.2f}" '
                    f'height="{cell_h + 0.5:.2f}" fill="#cde6f7"/>'
                )
    for (x0, y0), (x1, y1) in contour_segments(grid):
        parts.append(
            f'<line x1="{px(x0):.2f}" y1="{py(y0):.2f}" x2="{px(x1):.2f}" y2="{py(y1):.2f}" '
            'stroke="#1f77b4" stroke-width="1.5"/>'
        )
    if trajectory is not None:
        tx, ty = trajectory
        pts = " ".join(f"{px(float(a)):.2f},{py(float(b)):.2f}" for a, b in zip(tx, ty))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="#d62728" stroke-width="1.5"/>')
        parts.append(f'<circle cx="{px(float(tx[0])):.2f}" cy="{py(float(ty[0])):.2f}" r="4" fill="#d62728"/>')
    parts.append(
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w:.1f}" height="{plot_h:.1f}" '
        'fill="none" stroke="#333333"/>'
    )
    for tx_ in _ticks(x_lo, x_hi):
        if x_lo <= tx_ <= x_hi:
            parts.append(
                f'<text x="{px(tx_):.1f}" y="{_MARGIN_T + plot_h + 18:.1f}" text-anchor="middle">{_fmt_tick(tx_)}</text>'
            )
    for ty_ in _ticks(y_lo, y_hi):
        if y_lo <= ty_ <= y_hi:
            parts.append(
                f'<text x="{_MARGIN_L - 8:.1f}" y="{py(ty_) + 4:.1f}" text-anchor="end">{_fmt_tick(ty_)}</text>'
            )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.1f}" y="{height - 10}" text-anchor="middle">circumferential stretch</text>'
    )
    parts.append(
        f'<text x="16" y="{_MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MARGIN_T + plot_h / 2:.1f})">axial stretch</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)


def write_svg(content: str, path: str | Path) -> None:
    Path(path).write_text(content + "\n", newline="\n")
