"""Minimal static SVG charts: bars and polylines, optional log y-axis."""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

W, H = 480, 320
PAD_L, PAD_R, PAD_T, PAD_B = 64, 16, 32, 48
COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(v):
    return f"{v:.3g}"


def _scale(lo, hi, a, b, log=False):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)
    span = (hi - lo) or 1.0

    def f(v):
        if log:
            v = math.log10(v)
        return a + (v - lo) / span * (b - a)

    return f


def _frame(title, xlabel, ylabel, ylo, yhi, log):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<line x1="{PAD_L}" y1="{H - PAD_B}" x2="{W - PAD_R}" y2="{H - PAD_B}" stroke="black"/>',
        f'<line x1="{PAD_L}" y1="{PAD_T}" x2="{PAD_L}" y2="{H - PAD_B}" stroke="black"/>',
        f'<text x="{W / 2}" y="{H - 10}" text-anchor="middle">{escape(xlabel)}</text>',
        f'<text x="14" y="{H / 2}" text-anchor="middle" transform="rotate(-90 14 {H / 2})">'
        f"{escape(ylabel)}</text>",
        f'<text x="{PAD_L - 4}" y="{H - PAD_B}" text-anchor="end">{_fmt(ylo)}</text>',
        f'<text x="{PAD_L - 4}" y="{PAD_T + 8}" text-anchor="end">{_fmt(yhi)}</text>',
    ]
    if log:
        parts.append(f'<text x="{PAD_L + 4}" y="{PAD_T - 4}">log scale</text>')
    return parts


def _yrange(values, log):
    vals = [v for v in values if (v > 0 if log else math.isfinite(v))]
    if not vals:
        return (1e-16, 1.0) if log else (0.0, 1.0)
    lo, hi = min(vals), max(vals)
    if not log:
        lo = min(lo, 0.0)
    if hi == lo:
        hi = lo * 10 if log else lo + 1.0
    return lo, hi


def bar_chart(path, labels, values, title="", xlabel="", ylabel="", log=False):
    labels = [str(x) for x in labels]
    ylo, yhi = _yrange(values, log)
    parts = _frame(title, xlabel, ylabel, ylo, yhi, log)
    y = _scale(ylo, yhi, H - PAD_B, PAD_T, log)
    n = max(len(values), 1)
    slot = (W - PAD_L - PAD_R) / n
    for i, (lab, v) in enumerate(zip(labels, values)):
        x0 = PAD_L + i * slot + slot * 0.15
        top = y(v) if (v > 0 or not log) else H - PAD_B
        parts.append(f'<rect x="{x0:.2f}" y="{min(top, H - PAD_B):.2f}" width="{slot * 0.7:.2f}" '
                     f'height="{abs(H - PAD_B - top):.2f}" fill="{COLORS[0]}"/>')
        parts.append(f'<text x="{x0 + slot * 0.35:.2f}" y="{H - PAD_B + 14}" '
                     f'text-anchor="middle">{escape(lab)}</text>')
    parts.append("</svg>")
    _write(path, parts)


def line_chart(path, series: dict, title="", xlabel="", ylabel="", log=False):
    """``series`` maps a legend label to (xs, ys)."""
    xs_all = [x for xs, _ in series.values() for x in xs]
    ys_all = [v for _, ys in series.values() for v in ys]
    ylo, yhi = _yrange(ys_all, log)
    xlo, xhi = (min(xs_all), max(xs_all)) if xs_all else (0.0, 1.0)
    parts = _frame(title, xlabel, ylabel, ylo, yhi, log)
    fx = _scale(xlo, xhi if xhi > xlo else xlo + 1, PAD_L, W - PAD_R)
    fy = _scale(ylo, yhi, H - PAD_B, PAD_T, log)
    parts.append(f'<text x="{PAD_L}" y="{H - PAD_B + 14}">{_fmt(xlo)}</text>')
    parts.append(f'<text x="{W - PAD_R}" y="{H - PAD_B + 14}" text-anchor="end">{_fmt(xhi)}</text>')
    for k, (name, (xs, ys)) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        pts = [(fx(x), fy(v)) for x, v in zip(xs, ys) if (v > 0 if log else math.isfinite(v))]
        if pts:
            coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in pts)
            parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="{W - PAD_R - 4}" y="{PAD_T + 12 * (k + 1)}" text-anchor="end" '
                     f'fill="{color}">{escape(str(name))}</text>')
    parts.append("</svg>")
    _write(path, parts)


def _write(path, parts):
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
