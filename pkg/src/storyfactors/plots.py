"""Static SVG rendering of factor planes and dendrograms.

Both renderers are pure functions from fitted objects to an SVG document
string: no randomized layout, no timestamps, no external resources, so a
rerun over identical inputs is byte-identical.  Geometry is kept simple
on purpose — the plots are batch deliverables, not an interactive
surface.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .ca import CAModel
from .clustering import Dendrogram

# Point/label styling shared by both renderers.
_ROW_COLOR = "#1f77b4"
_COL_COLOR = "#d62728"
_FONT = "font-family=\"Helvetica, Arial, sans-serif\""
_LABEL_STEP = 12.0  # vertical stacking offset for overlapping labels


def _fmt(value: float) -> str:
    out = f"{value:.2f}"
    return "0.00" if out == "-0.00" else out


class _Canvas:
    """Append-only SVG document builder."""

    def __init__(self, width: float, height: float) -> None:
        self.width = width
        self.height = height
        self.parts: list[str] = [
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
            f"<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:g}\" "
            f"height=\"{height:g}\" viewBox=\"0 0 {width:g} {height:g}\">\n",
            f"<rect x=\"0\" y=\"0\" width=\"{width:g}\" height=\"{height:g}\" "
            "fill=\"white\"/>\n",
        ]

    def line(self, x1, y1, x2, y2, stroke="#333333", width=1.0, dash=None, extra=""):
        dash_attr = f" stroke-dasharray=\"{dash}\"" if dash else ""
        self.parts.append(
            f"<line x1=\"{_fmt(x1)}\" y1=\"{_fmt(y1)}\" x2=\"{_fmt(x2)}\" "
            f"y2=\"{_fmt(y2)}\" stroke=\"{stroke}\" stroke-width=\"{width:g}\""
            f"{dash_attr}{extra}/>\n"
        )

    def circle(self, x, y, r, fill):
        self.parts.append(
            f"<circle cx=\"{_fmt(x)}\" cy=\"{_fmt(y)}\" r=\"{r:g}\" fill=\"{fill}\"/>\n"
        )

    def text(self, x, y, content, size=10, fill="#000000", anchor="start", rotate=None):
        transform = ""
        if rotate is not None:
            transform = f" transform=\"rotate({rotate:g} {_fmt(x)} {_fmt(y)})\""
        self.parts.append(
            f"<text x=\"{_fmt(x)}\" y=\"{_fmt(y)}\" font-size=\"{size:g}\" "
            f"fill=\"{fill}\" text-anchor=\"{anchor}\" {_FONT}{transform}>"
            f"{escape(content)}</text>\n"
        )

    def raw(self, fragment: str) -> None:
        self.parts.append(fragment)

    def document(self) -> str:
        return "".join(self.parts) + "</svg>\n"


def _axis_percent(model: CAModel, axis: int) -> float:
    ev = model.singular_values**2
    return float(ev[axis - 1] / ev.sum() * 100.0)


def _select_points(
    model: CAModel,
    axis_x: int,
    axis_y: int,
    side: str,
    selection: tuple,
) -> list[str]:
    """Resolve a selection rule to a list of point labels (model order)."""
    labels = model.row_labels if side == "row" else model.col_labels
    coords = model.row_coords if side == "row" else model.col_coords
    contrib = model.row_contrib if side == "row" else model.col_contrib
    if not isinstance(selection, tuple) or len(selection) != 2:
        raise ValueError("selection must be ('top', k), ('origin', fraction) or ('labels', seq)")
    kind, arg = selection
    if kind == "top":
        k = int(arg)
        if k <= 0:
            raise ValueError("empty selection: top-k requires k >= 1")
        score = contrib[:, axis_x - 1] + contrib[:, axis_y - 1]
        order = sorted(range(len(labels)), key=lambda i: (-score[i], labels[i]))
        chosen = set(order[:k])
        return [lab for i, lab in enumerate(labels) if i in chosen]
    if kind == "origin":
        fraction = float(arg)
        if not 0.0 < fraction <= 1.0:
            raise ValueError("near-origin fraction must lie in (0, 1]")
        radius = np.hypot(coords[:, axis_x - 1], coords[:, axis_y - 1])
        cutoff = fraction * float(radius.max())
        picked = [lab for i, lab in enumerate(labels) if radius[i] <= cutoff]
        if not picked:
            raise ValueError("empty selection: no points inside the near-origin window")
        return picked
    if kind == "labels":
        wanted = list(arg)
        if not wanted:
            raise ValueError("empty selection: no labels given")
        known = set(labels)
        missing = [lab for lab in wanted if lab not in known]
        if missing:
            raise ValueError(f"unknown {side} labels: {', '.join(missing)}")
        order = {lab: i for i, lab in enumerate(labels)}
        return sorted(wanted, key=order.__getitem__)
    raise ValueError(f"unknown selection kind {kind!r}")


def _place_labels(anchors: list[tuple[float, float, str]]) -> list[tuple[float, float, str]]:
    """Stack overlapping labels vertically (the only collision handling)."""
    placed: list[tuple[float, float, str]] = []
    for x, y, text in sorted(anchors, key=lambda a: (a[0], a[1], a[2])):
        yy = y
        width = 6.0 * max(len(text), 1)
        while any(abs(yy - py) < _LABEL_STEP and px < x + width and x < px + 6.0 * len(pt)
                  for px, py, pt in placed):
            yy += _LABEL_STEP
        placed.append((x, yy, text))
    return placed


def render_factor_plane(
    model: CAModel,
    axis_x: int = 1,
    axis_y: int = 2,
    side: str = "col",
    selection: tuple = ("top", 20),
    trajectory: bool = False,
    title: str | None = None,
    width: float = 720.0,
    height: float = 540.0,
) -> str:
    """Scatter a factor plane as an SVG document string.

    ``selection`` picks which points of ``side`` are drawn and labelled:
    ``('top', k)`` for the k points contributing most to the two displayed
    axes, ``('origin', fraction)`` for points within ``fraction`` of the
    largest point radius (a zoom on the centre of the plane), or
    ``('labels', sequence)`` for an explicit list.  With ``trajectory``
    the row points are additionally joined, in row order, by arrows —
    for tables whose rows are chronological segments.
    """
    if side not in ("row", "col"):
        raise ValueError(f"side must be 'row' or 'col', got {side!r}")
    for axis in (axis_x, axis_y):
        if not 1 <= axis <= model.n_axes:
            raise ValueError(f"axis {axis} outside fitted range 1..{model.n_axes}")
    if axis_x == axis_y:
        raise ValueError("axis_x and axis_y must differ")

    chosen = _select_points(model, axis_x, axis_y, side, selection)
    labels = model.row_labels if side == "row" else model.col_labels
    coords = model.row_coords if side == "row" else model.col_coords
    index = {lab: i for i, lab in enumerate(labels)}
    pts = np.array([[coords[index[lab], axis_x - 1], coords[index[lab], axis_y - 1]]
                    for lab in chosen])
    traj = model.row_coords[:, [axis_x - 1, axis_y - 1]] if trajectory else None

    shown = pts if traj is None else np.vstack([pts, traj])
    span_x = float(np.abs(shown[:, 0]).max())
    span_y = float(np.abs(shown[:, 1]).max())
    margin = 56.0
    # One common unit-per-pixel scale so plane distances keep their meaning.
    scale = min(
        (width / 2.0 - margin) / max(span_x, 1e-12),
        (height / 2.0 - margin) / max(span_y, 1e-12),
    )
    cx, cy = width / 2.0, height / 2.0

    def to_px(p):
        return cx + p[0] * scale, cy - p[1] * scale

    svg = _Canvas(width, height)
    svg.raw(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" "
        "markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">"
        "<path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#555555\"/></marker></defs>\n"
    )
    # Origin cross.
    svg.line(margin / 2, cy, width - margin / 2, cy, stroke="#bbbbbb")
    svg.line(cx, margin / 2, cx, height - margin / 2, stroke="#bbbbbb")

    if traj is not None:
        for a, b in zip(traj[:-1], traj[1:]):
            (x1, y1), (x2, y2) = to_px(a), to_px(b)
            svg.line(x1, y1, x2, y2, stroke="#555555", width=1.2,
                     extra=" marker-end=\"url(#arrow)\"")
        if side != "row":
            for i, p in enumerate(traj):
                x, y = to_px(p)
                svg.circle(x, y, 3.5, _ROW_COLOR)
                svg.text(x + 5, y - 5, model.row_labels[i], size=11, fill=_ROW_COLOR)

    color = _ROW_COLOR if side == "row" else _COL_COLOR
    anchors = []
    for lab, p in zip(chosen, pts):
        x, y = to_px(p)
        svg.circle(x, y, 3.0, color)
        anchors.append((x + 5.0, y - 4.0, lab))
    for x, y, text in _place_labels(anchors):
        svg.text(x, y, text, size=10, fill=color)

    svg.text(width - margin / 2, cy - 6, f"factor {axis_x} ({_axis_percent(model, axis_x):.1f}%)",
             size=11, fill="#333333", anchor="end")
    svg.text(cx + 6, margin / 2 + 10, f"factor {axis_y} ({_axis_percent(model, axis_y):.1f}%)",
             size=11, fill="#333333")
    if title:
        svg.text(width / 2.0, 18.0, title, size=13, fill="#000000", anchor="middle")
    return svg.document()


def _leaf_order(dendrogram: Dendrogram) -> list[int]:
    """Left-to-right leaf order of the merge tree.

    Children are visited earliest-member first, which reproduces the
    chronological order 1..n for contiguity-constrained trees and a
    deterministic seriation for unconstrained ones.
    """
    n = dendrogram.n_leaves
    children: dict[int, tuple[int, int]] = {}
    first = list(range(n)) + [0] * (n - 1)
    for step, (left, right, _, _) in enumerate(dendrogram.merges):
        node = n + step
        a, b = sorted((left, right), key=lambda c: first[c])
        children[node] = (a, b)
        first[node] = first[a]
    order: list[int] = []
    stack = [2 * n - 2] if n > 1 else [0]
    while stack:
        node = stack.pop()
        if node < n:
            order.append(node)
        else:
            a, b = children[node]
            stack.append(b)
            stack.append(a)
    return order


def render_dendrogram(
    dendrogram: Dendrogram,
    cut: int | None = None,
    title: str | None = None,
    width: float = 720.0,
    height: float = 480.0,
) -> str:
    """Draw a merge tree as an SVG document string.

    Leaves sit on the baseline in tree order (chronological for
    constrained trees); each merge is an inverted U at its height.  With
    ``cut`` a dashed line is drawn at the level separating ``cut``
    clusters, i.e. between the last two merge heights it straddles.
    """
    n = dendrogram.n_leaves
    merges = dendrogram.merges
    order = _leaf_order(dendrogram)
    margin_l, margin_r, margin_t, margin_b = 64.0, 24.0, 30.0, 60.0
    span = width - margin_l - margin_r
    step = span / n
    baseline = height - margin_b
    h_max = max(m[2] for m in merges) if merges else 1.0
    h_scale = (baseline - margin_t) / max(h_max, 1e-300)

    def y_of(h: float) -> float:
        return baseline - h * h_scale

    pos_x = [0.0] * (2 * n - 1)
    pos_h = [0.0] * (2 * n - 1)
    rank = {leaf: i for i, leaf in enumerate(order)}
    for leaf in range(n):
        pos_x[leaf] = margin_l + (rank[leaf] + 0.5) * step

    svg = _Canvas(width, height)
    # Height axis with a few reference ticks.
    svg.line(margin_l - 10, baseline, margin_l - 10, margin_t, stroke="#333333")
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        h = h_max * frac
        svg.line(margin_l - 14, y_of(h), margin_l - 10, y_of(h), stroke="#333333")
        svg.text(margin_l - 18, y_of(h) + 3, f"{h:.3g}", size=9, anchor="end")

    for index, (left, right, h, _) in enumerate(merges):
        node = n + index
        xa, xb = pos_x[left], pos_x[right]
        svg.line(xa, y_of(pos_h[left]), xa, y_of(h))
        svg.line(xb, y_of(pos_h[right]), xb, y_of(h))
        svg.line(xa, y_of(h), xb, y_of(h))
        pos_x[node] = (xa + xb) / 2.0
        pos_h[node] = h

    if cut is not None:
        if not 1 <= cut <= n:
            raise ValueError(f"cut must produce between 1 and {n} clusters, got {cut}")
        if cut == 1:
            level = h_max * 1.02
        else:
            upper = merges[n - cut][2]
            lower = merges[n - cut - 1][2] if cut < n else 0.0
            level = (upper + lower) / 2.0
        svg.line(margin_l - 10, y_of(level), width - margin_r, y_of(level),
                 stroke="#d62728", width=1.2, dash="6,4")
        svg.text(width - margin_r, y_of(level) - 4, f"k = {cut}", size=10,
                 fill="#d62728", anchor="end")

    show_labels = n <= 40
    for leaf in range(n):
        x = pos_x[leaf]
        svg.line(x, baseline, x, baseline + 4)
        if show_labels:
            svg.text(x + 3, baseline + 8, dendrogram.labels[leaf], size=8,
                     anchor="end", rotate=-90.0)
    if not show_labels:
        svg.text(margin_l, baseline + 16,
                 f"{n} leaves, left to right: {dendrogram.labels[order[0]]} "
                 f"... {dendrogram.labels[order[-1]]}", size=9, fill="#333333")
    if title:
        svg.text(width / 2.0, 18.0, title, size=13, anchor="middle")
    return svg.document()
