"""Minimal SVG line plots (presentation only)."""

from xml.sax.saxutils import escape

import numpy as np


def line_plot(x, series, title="", xlabel="n", ylabel="concurrence", width=640, height=400, ylim=(0.0, 1.0)):
    """``series`` maps a label to y values sharing the x axis."""
    x = np.asarray(x, dtype=float)
    left, right, top, bottom = 60, 20, 30, 45
    pw, ph = width - left - right, height - top - bottom
    x0, x1 = float(np.nanmin(x)), float(np.nanmax(x))
    if x1 == x0:
        x1 = x0 + 1.0
    y0, y1 = ylim

    def sx(v):
        return left + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return top + (1.0 - (v - y0) / (y1 - y0)) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"]
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="11">',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>',
        f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<text x="{width / 2:.1f}" y="{height - 8}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" transform="rotate(-90 14 {top + ph / 2:.1f})">'
        f"{escape(ylabel)}</text>",
    ]
    for k in range(5):
        yv = y0 + k * (y1 - y0) / 4
        xv = x0 + k * (x1 - x0) / 4
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.2g}</text>')
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 15}" text-anchor="middle">{xv:.4g}</text>')
    for k, (label, y) in enumerate(series.items()):
        y = np.clip(np.asarray(y, dtype=float), y0, y1)
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y) if np.isfinite(a) and np.isfinite(b))
        color = colors[k % len(colors)]
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.2" points="{pts}"/>')
        if len(series) > 1:
            out.append(f'<text x="{left + pw - 4}" y="{top + 14 + 13 * k}" text-anchor="end" fill="{color}">{escape(str(label))}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
