"""Dependency-free SVG charts: line curves, silhouette bars and regime timelines."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["line_chart", "silhouette_chart", "timeline_chart", "REGIME_COLORS"]

REGIME_COLORS = ("#2c7bb6", "#abd9e9", "#fdae61", "#d7191c", "#7b3294", "#008837", "#636363", "#e66101")

_W, _H = 640, 400
_M = {"l": 60, "r": 20, "t": 40, "b": 50}


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".")


def _doc(width, height, body, title):
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">\n'
        f'<rect width="{width}" height="{height}" fill="white"/>\n'
        f'<text x="{width / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def _write(text, path):
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def line_chart(xs, ys, title="", xlabel="", ylabel="", mark=None, errors=None, path=None) -> str:
    """Polyline with point markers; ``mark`` highlights one x value."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    lo = ys.min() if errors is None else (ys - errors).min()
    hi = ys.max() if errors is None else (ys + errors).max()
    if hi == lo:
        hi, lo = hi + 1, lo - 1
    pw, ph = _W - _M["l"] - _M["r"], _H - _M["t"] - _M["b"]
    span = xs.max() - xs.min() or 1.0

    def px(x):
        return _M["l"] + (x - xs.min()) / span * pw

    def py(y):
        return _M["t"] + (hi - y) / (hi - lo) * ph

    body = [
        f'<line x1="{_M["l"]}" y1="{_M["t"] + ph}" x2="{_M["l"] + pw}" y2="{_M["t"] + ph}" stroke="black"/>',
        f'<line x1="{_M["l"]}" y1="{_M["t"]}" x2="{_M["l"]}" y2="{_M["t"] + ph}" stroke="black"/>',
    ]
    for x in xs:
        body.append(f'<text x="{px(x):.1f}" y="{_M["t"] + ph + 16}" text-anchor="middle">{_fmt(x)}</text>')
    for frac in (0.0, 0.5, 1.0):
        v = lo + frac * (hi - lo)
        body.append(f'<text x="{_M["l"] - 6}" y="{py(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    if mark is not None:
        body.append(f'<line x1="{px(mark):.1f}" y1="{_M["t"]}" x2="{px(mark):.1f}" y2="{_M["t"] + ph}" '
                    'stroke="#888" stroke-dasharray="4 3"/>')
    if errors is not None:
        for x, y, e in zip(xs, ys, errors):
            body.append(f'<line x1="{px(x):.1f}" y1="{py(y - e):.1f}" x2="{px(x):.1f}" y2="{py(y + e):.1f}" stroke="#2c7bb6"/>')
    pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
    body.append(f'<polyline points="{pts}" fill="none" stroke="#2c7bb6" stroke-width="2"/>')
    for x, y in zip(xs, ys):
        body.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3.5" fill="#2c7bb6"/>')
    body.append(f'<text x="{_M["l"] + pw / 2:.1f}" y="{_H - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    body.append(f'<text x="14" y="{_M["t"] + ph / 2:.1f}" text-anchor="middle" '
                f'transform="rotate(-90 14 {_M["t"] + ph / 2:.1f})">{escape(ylabel)}</text>')
    return _write(_doc(_W, _H, body, title), path)


def silhouette_chart(values, labels, names=None, title="Silhouette", path=None) -> str:
    """One horizontal bar per observation, grouped by cluster and sorted within it, plus a mean line."""
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels)
    groups = list(np.unique(labels))
    names = names or [str(g) for g in groups]
    order = []
    for g in groups:
        idx = np.flatnonzero(labels == g)
        order.append((g, idx[np.argsort(-values[idx], kind="stable")]))
    n = values.size + 2 * len(groups)
    pw, ph = _W - _M["l"] - _M["r"], _H - _M["t"] - _M["b"]
    bar = ph / max(n, 1)
    x0 = _M["l"] + pw / 3

    def px(v):
        return x0 + v * (pw * 2 / 3)

    body = [f'<line x1="{x0:.1f}" y1="{_M["t"]}" x2="{x0:.1f}" y2="{_M["t"] + ph}" stroke="black"/>']
    row = 0
    for gi, (g, idx) in enumerate(order):
        color = REGIME_COLORS[gi % len(REGIME_COLORS)]
        start = row
        for i in idx:
            v = values[i]
            y = _M["t"] + row * bar
            left, right = sorted((px(0), px(v)))
            body.append(f'<rect x="{left:.2f}" y="{y:.2f}" width="{right - left:.2f}" height="{max(bar, 0.5):.2f}" fill="{color}"/>')
            row += 1
        body.append(f'<text x="{_M["l"] - 6}" y="{_M["t"] + (start + row) / 2 * bar + 4:.1f}" '
                    f'text-anchor="end">{escape(str(names[gi]))}</text>')
        row += 2
    mean = float(values.mean())
    body.append(f'<line x1="{px(mean):.1f}" y1="{_M["t"]}" x2="{px(mean):.1f}" y2="{_M["t"] + ph}" '
                'stroke="red" stroke-dasharray="4 3"/>')
    for v in (-1.0, -0.5, 0.0, 0.5, 1.0):
        if px(v) >= _M["l"]:
            body.append(f'<text x="{px(v):.1f}" y="{_M["t"] + ph + 16}" text-anchor="middle">{_fmt(v)}</text>')
    body.append(f'<text x="{px(mean) + 4:.1f}" y="{_M["t"] - 4}" fill="red">mean {mean:.2f}</text>')
    return _write(_doc(_W, _H, body, title), path)


def timeline_chart(times, strips, names, title="Regime timeline", path=None) -> str:
    """Stacked colored strips, one per labeling; each cell is one observation.

    ``strips`` maps a row title to a sequence of regime indices into ``names``.
    """
    T = len(times)
    rows = list(strips.items())
    width = _W + 200
    pw = width - 140 - _M["r"]
    cell = pw / max(T, 1)
    strip_h = 36
    height = _M["t"] + len(rows) * (strip_h + 14) + 80
    body = []
    for r, (label, seq) in enumerate(rows):
        y = _M["t"] + r * (strip_h + 14)
        body.append(f'<text x="130" y="{y + strip_h / 2 + 4:.1f}" text-anchor="end">{escape(label)}</text>')
        seq = list(seq)
        start = 0
        # run-length encode to keep the document small
        for t in range(1, T + 1):
            if t == T or seq[t] != seq[start]:
                color = REGIME_COLORS[int(seq[start]) % len(REGIME_COLORS)]
                body.append(f'<rect x="{140 + start * cell:.2f}" y="{y}" width="{(t - start) * cell:.2f}" '
                            f'height="{strip_h}" fill="{color}"/>')
                start = t
    yb = _M["t"] + len(rows) * (strip_h + 14)
    ticks = np.unique(np.linspace(0, T - 1, num=min(T, 8)).round().astype(int))
    for t in ticks:
        body.append(f'<text x="{140 + (t + 0.5) * cell:.1f}" y="{yb + 4}" text-anchor="middle">{escape(str(times[t]))}</text>')
    for i, nm in enumerate(names):
        x = 140 + i * 130
        body.append(f'<rect x="{x}" y="{yb + 24}" width="14" height="14" fill="{REGIME_COLORS[i % len(REGIME_COLORS)]}"/>')
        body.append(f'<text x="{x + 20}" y="{yb + 36}">{escape(str(nm))}</text>')
    return _write(_doc(width, height, body, title), path)
