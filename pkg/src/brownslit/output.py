"""CSV tables and minimal SVG renderings with atomic writes."""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass, field
from html import escape

import numpy as np

from . import __version__


def atomic_write_text(path, text):
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fmt(value) -> str:
    value = float(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


@dataclass
class Table:
    """Columns of equal length plus the metadata written into the comment row."""

    name: str
    columns: dict
    meta: dict
    descriptions: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        meta = " ".join(f"{k}={v}" for k, v in self.meta.items())
        lines = [f"# brownslit {__version__} {meta}".rstrip()]
        if self.descriptions:
            doc = "; ".join(f"{k}: {self.descriptions[k]}" for k in self.columns if k in self.descriptions)
            lines.append(f"# columns: {doc}")
        lines.append(",".join(self.columns))
        arrays = [np.broadcast_to(np.asarray(v, dtype=float), (self.length,)) for v in self.columns.values()]
        for row in zip(*arrays):
            lines.append(",".join(fmt(v) for v in row))
        return "\n".join(lines) + "\n"

    @property
    def length(self) -> int:
        return max(np.size(v) for v in self.columns.values())

    def write(self, directory):
        path = os.path.join(directory, f"{self.name}.csv")
        atomic_write_text(path, self.to_csv())
        return path


# --- SVG -----------------------------------------------------------------

_W, _H = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 20, 30, 50
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
_DASHES = ("", "6,4", "2,3", "8,3,2,3")


def _ticks(lo, hi, log):
    if log:
        a, b = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        step = max(1, (b - a) // 6)
        return [10.0**k for k in range(a, b + 1, step) if lo <= 10.0**k <= hi]
    return list(np.linspace(lo, hi, 5))


def _scale(lo, hi, log, a, b):
    if log:
        lo, hi = math.log10(lo), math.log10(hi)

    def f(v):
        v = math.log10(v) if log else v
        return a + (b - a) * (v - lo) / (hi - lo if hi != lo else 1.0)

    return f


def _frame(title, xlabel, ylabel, xs, ys, xr, yr, logx, logy):
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W / 2}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
        f'<rect x="{_LEFT}" y="{_TOP}" width="{_W - _LEFT - _RIGHT}" height="{_H - _TOP - _BOTTOM}" '
        'fill="none" stroke="black"/>',
    ]
    for v in _ticks(*xr, logx):
        px = xs(v)
        parts.append(f'<line x1="{px:.2f}" y1="{_H - _BOTTOM}" x2="{px:.2f}" y2="{_H - _BOTTOM + 4}" stroke="black"/>')
        parts.append(f'<text x="{px:.2f}" y="{_H - _BOTTOM + 16}" text-anchor="middle">{v:.3g}</text>')
    for v in _ticks(*yr, logy):
        py = ys(v)
        parts.append(f'<line x1="{_LEFT - 4}" y1="{py:.2f}" x2="{_LEFT}" y2="{py:.2f}" stroke="black"/>')
        parts.append(f'<text x="{_LEFT - 6}" y="{py + 4:.2f}" text-anchor="end">{v:.3g}</text>')
    parts.append(f'<text x="{_W / 2}" y="{_H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(
        f'<text x="16" y="{_H / 2}" text-anchor="middle" transform="rotate(-90 16 {_H / 2})">{escape(ylabel)}</text>'
    )
    return parts


def line_plot(curves, title="", xlabel="", ylabel="", logx=False, logy=False) -> str:
    """Render ``curves`` = [(x, y, label), ...] as a static SVG string."""
    xs_all = np.concatenate([np.asarray(c[0], float) for c in curves])
    ys_all = np.concatenate([np.asarray(c[1], float) for c in curves])
    okx = xs_all > 0 if logx else np.isfinite(xs_all)
    oky = ys_all > 0 if logy else np.isfinite(ys_all)
    xr = (float(xs_all[okx].min()), float(xs_all[okx].max()))
    yr = (float(ys_all[oky].min()), float(ys_all[oky].max()))
    if yr[0] == yr[1]:
        yr = (yr[0] - 1.0, yr[1] + 1.0) if not logy else (yr[0] / 10, yr[1] * 10)
    xs = _scale(*xr, logx, _LEFT, _W - _RIGHT)
    ys = _scale(*yr, logy, _H - _BOTTOM, _TOP)
    parts = _frame(title, xlabel, ylabel, xs, ys, xr, yr, logx, logy)
    for k, (x, y, label) in enumerate(curves):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        keep = (x > 0 if logx else np.isfinite(x)) & (y > 0 if logy else np.isfinite(y))
        pts = " ".join(f"{xs(a):.2f},{ys(b):.2f}" for a, b in zip(x[keep], y[keep]))
        color = _COLORS[k % len(_COLORS)]
        dash = _DASHES[k % len(_DASHES)]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash_attr} points="{pts}"/>')
        ly = _TOP + 14 + 14 * k
        parts.append(
            f'<line x1="{_W - _RIGHT - 150}" y1="{ly - 4}" x2="{_W - _RIGHT - 125}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"{dash_attr}/>'
        )
        parts.append(f'<text x="{_W - _RIGHT - 120}" y="{ly}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def heatmap(x, y, Z, title="", xlabel="", ylabel="") -> str:
    """Grey-scale map of ``Z[i, j]`` over ``x[j]`` (horizontal) and ``y[i]`` (vertical)."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    Z = np.asarray(Z, float)
    xr = (float(x.min()), float(x.max()))
    yr = (float(y.min()), float(y.max()))
    xs = _scale(*xr, False, _LEFT, _W - _RIGHT)
    ys = _scale(*yr, False, _H - _BOTTOM, _TOP)
    parts = _frame(title, xlabel, ylabel, xs, ys, xr, yr, False, False)
    zmax = float(Z.max()) or 1.0
    dx = (_W - _LEFT - _RIGHT) / max(len(x) - 1, 1)
    dy = (_H - _TOP - _BOTTOM) / max(len(y) - 1, 1)
    for i, yi in enumerate(y):
        for j, xj in enumerate(x):
            level = int(round(255 * (1.0 - max(Z[i, j], 0.0) / zmax)))
            parts.append(
                f'<rect x="{xs(xj) - dx / 2:.2f}" y="{ys(yi) - dy / 2:.2f}" width="{dx:.2f}" '
                f'height="{dy:.2f}" fill="rgb({level},{level},{level})"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
