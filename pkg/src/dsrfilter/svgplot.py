"""Minimal deterministic SVG line plot of dB traces versus frequency."""
from __future__ import annotations

import math

import numpy as np

W, H = 720, 440
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _nice_step(span, target=8):
    raw = span / target
    mag = 10 ** math.floor(math.log10(raw))
    for m in (1, 2, 5, 10):
        if m * mag >= raw:
            return m * mag
    return 10 * mag


def svg_plot(freq_hz, traces: dict, title: str = "", y_floor: float = -100.0) -> str:
    """``traces`` maps a label to dB values on ``freq_hz``."""
    f = np.asarray(freq_hz, float) / 1e9
    ys = {k: np.maximum(np.asarray(v, float), y_floor) for k, v in traces.items()}
    ymax = max(0.0, max(float(np.max(v)) for v in ys.values()))
    ymin = min(float(np.min(v)) for v in ys.values())
    ystep = _nice_step(ymax - ymin or 10.0)
    ylo = math.floor(ymin / ystep) * ystep
    yhi = math.ceil(ymax / ystep) * ystep or ystep
    fx0, fx1 = float(f[0]), float(f[-1]) if f[-1] > f[0] else float(f[0]) + 1.0
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - fx0) / (fx1 - fx0) * pw

    def py(y):
        return TOP + (yhi - y) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
    ]
    y = ylo
    while y <= yhi + 1e-9:
        yy = py(y)
        out.append(f'<line x1="{LEFT}" y1="{yy:.2f}" x2="{W - RIGHT}" y2="{yy:.2f}" stroke="#ddd"/>')
        out.append(f'<text x="{LEFT - 6}" y="{yy + 4:.2f}" text-anchor="end">{y:g}</text>')
        y += ystep
    xstep = _nice_step(fx1 - fx0)
    x = math.ceil(fx0 / xstep) * xstep
    while x <= fx1 + 1e-12:
        xx = px(x)
        out.append(f'<line x1="{xx:.2f}" y1="{TOP}" x2="{xx:.2f}" y2="{H - BOTTOM}" stroke="#eee"/>')
        out.append(f'<text x="{xx:.2f}" y="{H - BOTTOM + 16}" text-anchor="middle">{x:.4g}</text>')
        x += xstep
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 10}" text-anchor="middle">Frequency (GHz)</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {TOP + ph / 2:.1f})">Magnitude (dB)</text>')
    if title:
        out.append(f'<text x="{LEFT + pw / 2:.1f}" y="18" text-anchor="middle">{title}</text>')
    for k, (label, v) in enumerate(ys.items()):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(f, v))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        ly = TOP + 16 + 16 * k
        out.append(f'<line x1="{W - RIGHT - 120}" y1="{ly - 4}" x2="{W - RIGHT - 100}" y2="{ly - 4}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{W - RIGHT - 95}" y="{ly}">{label}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
