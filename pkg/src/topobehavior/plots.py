"""Static SVG plot writers.

Every writer renders a fixed-size SVG with no external dependencies and
embeds the plotted numbers as a CSV table inside an XML comment, so the files
are deterministic, diff-able in tests, and auditable without a viewer. Floats
in data tables use ``repr`` (round-trip exact); pixel coordinates are rounded.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

_W, _H = 480, 360
_MARGIN = 48
PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)


def color_for(index: int) -> str:
    return PALETTE[index % len(PALETTE)]


class _Canvas:
    """Accumulates SVG elements over a linear data-to-pixel mapping."""

    def __init__(self, title, x_range, y_range, x_label="", y_label=""):
        self.parts = []
        x_lo, x_hi = x_range
        y_lo, y_hi = y_range
        if not (x_hi > x_lo):
            x_hi = x_lo + 1.0
        if not (y_hi > y_lo):
            y_hi = y_lo + 1.0
        self._x = (x_lo, x_hi)
        self._y = (y_lo, y_hi)
        self.parts.append(
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
            f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="11">'
        )
        self.parts.append(f'<rect width="{_W}" height="{_H}" fill="white"/>')
        self.text(_W / 2, 16, title, anchor="middle", size=13)
        # axes box
        self.parts.append(
            f'<rect x="{_MARGIN}" y="{_MARGIN}" width="{_W - 2 * _MARGIN}" '
            f'height="{_H - 2 * _MARGIN}" fill="none" stroke="#444"/>'
        )
        if x_label:
            self.text(_W / 2, _H - 8, x_label, anchor="middle")
        if y_label:
            self.text(14, _H / 2, y_label, anchor="middle", rotate=True)
        for frac in (0.0, 0.5, 1.0):
            xv = x_lo + frac * (x_hi - x_lo)
            yv = y_lo + frac * (y_hi - y_lo)
            self.text(self.px(xv), _H - _MARGIN + 14, f"{xv:.4g}", anchor="middle", size=9)
            self.text(_MARGIN - 4, self.py(yv) + 3, f"{yv:.4g}", anchor="end", size=9)

    def px(self, v: float) -> float:
        lo, hi = self._x
        return round(_MARGIN + (v - lo) / (hi - lo) * (_W - 2 * _MARGIN), 2)

    def py(self, v: float) -> float:
        lo, hi = self._y
        return round(_H - _MARGIN - (v - lo) / (hi - lo) * (_H - 2 * _MARGIN), 2)

    def text(self, x, y, s, anchor="start", size=11, rotate=False):
        transform = f' transform="rotate(-90 {x} {y})"' if rotate else ""
        self.parts.append(
            f'<text x="{x}" y="{y}" text-anchor="{anchor}" font-size="{size}"{transform}>'
            f"{_escape(s)}</text>"
        )

    def circle(self, x, y, r, color, opacity=1.0):
        self.parts.append(
            f'<circle cx="{self.px(x)}" cy="{self.py(y)}" r="{r}" fill="{color}" '
            f'fill-opacity="{opacity:.3g}"/>'
        )

    def segment(self, x1, y1, x2, y2, color, width=1.0, dash=None):
        d = f' stroke-dasharray="{dash}"' if dash else ""
        self.parts.append(
            f'<line x1="{self.px(x1)}" y1="{self.py(y1)}" x2="{self.px(x2)}" '
            f'y2="{self.py(y2)}" stroke="{color}" stroke-width="{width}"{d}/>'
        )

    def polyline(self, xs, ys, color, width=1.5):
        pts = " ".join(f"{self.px(x)},{self.py(y)}" for x, y in zip(xs, ys))
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'
        )

    def marker(self, x, y, color, shape="triangle"):
        cx, cy = self.px(x), self.py(y)
        if shape == "triangle":
            pts = f"{cx},{cy - 4} {cx - 4},{cy + 3} {cx + 4},{cy + 3}"
            self.parts.append(f'<polygon points="{pts}" fill="{color}"/>')

    def legend(self, names_colors):
        y = _MARGIN + 6
        for name, color in names_colors:
            self.parts.append(
                f'<rect x="{_W - _MARGIN - 86}" y="{y - 8}" width="10" height="10" fill="{color}"/>'
            )
            self.text(_W - _MARGIN - 72, y, name, size=10)
            y += 14

    def comment(self, label: str, table: str):
        safe = table.replace("--", "- -")
        self.parts.append(f"<!-- {label}\n{safe}\n-->")

    def write(self, path, config_hash=None):
        if config_hash:
            self.parts.append(f"<!-- config {config_hash} -->")
        self.parts.append("</svg>")
        Path(path).write_text("\n".join(self.parts) + "\n")


def _escape(s: str) -> str:
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _csv_table(header, rows):
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, (int, float, np.floating)) else str(v) for v in row))
    return "\n".join(lines)


def plot_diagram(pairs: np.ndarray, path, title="persistence diagram", config_hash=None):
    """Scatter of (birth, death) pairs; essential pairs appear as triangles
    pinned to the top edge; the diagonal is dashed."""
    pairs = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    finite = pairs[np.isfinite(pairs[:, 1])] if pairs.size else pairs
    hi = float(finite.max()) if finite.size else 1.0
    hi = hi if hi > 0 else 1.0
    cap = hi * 1.08
    c = _Canvas(title, (0.0, cap), (0.0, cap), "birth", "death")
    c.segment(0.0, 0.0, cap, cap, "#999", dash="4,3")
    for b, d in pairs:
        if math.isinf(d):
            c.marker(b, cap, "#d62728")
        else:
            c.circle(b, d, 3, "#1f77b4", opacity=0.8)
    c.comment("pairs", _csv_table("birth,death", [(b, "+inf" if math.isinf(d) else d) for b, d in pairs]))
    c.write(path, config_hash)


def plot_landscape(grid_ts: np.ndarray, values: np.ndarray, path, title="persistence landscape", config_hash=None):
    """One polyline per depth of a discretized landscape."""
    values = np.asarray(values, dtype=np.float64)
    hi = float(values.max()) if values.size else 1.0
    c = _Canvas(title, (float(grid_ts[0]), float(grid_ts[-1])), (0.0, hi if hi > 0 else 1.0), "t", "lambda_k(t)")
    for k in range(values.shape[0]):
        c.polyline(grid_ts, values[k], color_for(k))
    c.legend([(f"depth {k + 1}", color_for(k)) for k in range(values.shape[0])])
    c.comment(
        "landscape",
        _csv_table(
            "t," + ",".join(f"lambda_{k + 1}" for k in range(values.shape[0])),
            [(grid_ts[i], *values[:, i]) for i in range(len(grid_ts))],
        ),
    )
    c.write(path, config_hash)


def plot_scatter(coords: np.ndarray, labels, path, title, x_label="axis 1", y_label="axis 2", config_hash=None):
    """2-d scatter colored by label (sorted label order fixes the palette)."""
    coords = np.asarray(coords, dtype=np.float64)
    xs, ys = coords[:, 0], coords[:, 1] if coords.shape[1] > 1 else np.zeros(len(coords))
    pad_x = 0.06 * (xs.max() - xs.min() or 1.0)
    pad_y = 0.06 * (ys.max() - ys.min() or 1.0)
    c = _Canvas(title, (xs.min() - pad_x, xs.max() + pad_x), (ys.min() - pad_y, ys.max() + pad_y), x_label, y_label)
    labels = [str(l) for l in labels] if labels is not None else [""] * len(coords)
    uniq = sorted(set(labels))
    color_of = {name: color_for(i) for i, name in enumerate(uniq)}
    for x, y, l in zip(xs, ys, labels):
        c.circle(x, y, 3.5, color_of[l], opacity=0.85)
    if len(uniq) > 1:
        c.legend([(name, color_of[name]) for name in uniq])
    c.comment("points", _csv_table("x,y,label", list(zip(xs, ys, labels))))
    c.write(path, config_hash)


def plot_curves(rows: np.ndarray, names, path, title, x_label="coordinate", y_label="value", config_hash=None):
    """One polyline per named row (e.g. per-class standard deviations)."""
    rows = np.asarray(rows, dtype=np.float64).reshape(len(names), -1)
    xs = np.arange(rows.shape[1])
    hi = float(rows.max()) if rows.size else 1.0
    lo = min(0.0, float(rows.min())) if rows.size else 0.0
    c = _Canvas(title, (0.0, float(xs[-1]) if len(xs) > 1 else 1.0), (lo, hi if hi > lo else lo + 1.0), x_label, y_label)
    for i, name in enumerate(names):
        c.polyline(xs, rows[i], color_for(i))
    c.legend([(str(n), color_for(i)) for i, n in enumerate(names)])
    c.comment(
        "curves",
        _csv_table("coordinate," + ",".join(str(n) for n in names), [(x, *rows[:, int(x)]) for x in xs]),
    )
    c.write(path, config_hash)


def plot_strip(groups: dict, path, title, y_label="estimate", config_hash=None):
    """Strip plot of per-group values at deterministic horizontal offsets."""
    names = sorted(groups)
    all_vals = np.concatenate([np.asarray(groups[n], dtype=np.float64) for n in names])
    lo, hi = float(all_vals.min()), float(all_vals.max())
    pad = 0.06 * ((hi - lo) or 1.0)
    c = _Canvas(title, (-0.5, len(names) - 0.5), (lo - pad, hi + pad), "group", y_label)
    rows = []
    for gi, name in enumerate(names):
        vals = np.asarray(groups[name], dtype=np.float64)
        for vi, v in enumerate(vals):
            dx = 0.0 if len(vals) == 1 else (vi / (len(vals) - 1) - 0.5) * 0.5
            c.circle(gi + dx, v, 3, color_for(gi), opacity=0.8)
            rows.append((name, v))
        c.text(c.px(gi), _H - _MARGIN + 26, str(name), anchor="middle", size=10)
    c.comment("values", _csv_table("group,value", rows))
    c.write(path, config_hash)
