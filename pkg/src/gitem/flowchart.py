"""Layered flow charts: one row of boxes per level, arrows between rows."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ._fmt import fmt_num
from .chipmap import Rect

Point = tuple[float, float]
ROW_FILL = 0.9  # usable fraction of the canvas width for one row


class FlowSpecError(ValueError):
    pass


@dataclass
class FlowSpec:
    nodes: list[tuple[str, int | None]]
    edges: list[tuple[str, str]] = field(default_factory=list)
    box_size: tuple[float, float] = (0.08, 0.2)

    @classmethod
    def from_json(cls, data: dict) -> "FlowSpec":
        nodes = [(str(n["id"]), n.get("level")) for n in data.get("nodes", [])]
        edges = [(str(a), str(b)) for a, b in data.get("edges", [])]
        kw = {"box_size": tuple(data["box_size"])} if "box_size" in data else {}
        return cls(nodes, edges, **kw)


@dataclass
class FlowLine:
    points: list[Point]
    arrow: bool = True


@dataclass
class DrawData:
    boxes: dict[str, Rect] = field(default_factory=dict)
    lines: list[FlowLine] = field(default_factory=list)


def infer_levels(ids: Sequence[str], edges: Sequence[tuple[str, str]]) -> dict[str, int]:
    """Longest-path layering; raises on cycles."""
    preds = defaultdict(list)
    for a, b in edges:
        preds[b].append(a)
    level: dict[str, int] = {}
    state: dict[str, int] = {}

    def visit(n, stack):
        if state.get(n) == 2:
            return level[n]
        if state.get(n) == 1:
            raise FlowSpecError(f"cycle through {' -> '.join(stack + [n])}")
        state[n] = 1
        level[n] = max((visit(p, stack + [n]) + 1 for p in preds[n]), default=0)
        state[n] = 2
        return level[n]

    for n in ids:
        visit(n, [])
    return level


def _resolve_levels(spec: FlowSpec) -> dict[str, int]:
    ids = [n for n, _ in spec.nodes]
    if len(set(ids)) != len(ids):
        raise FlowSpecError("node ids must be unique")
    known = set(ids)
    dangling = [e for e in spec.edges if e[0] not in known or e[1] not in known]
    if dangling:
        raise FlowSpecError(f"edges reference unknown nodes: {dangling}")
    given = {n: lv for n, lv in spec.nodes if lv is not None}
    if len(given) == len(ids):
        levels = {n: int(lv) for n, lv in given.items()}
        bad = [e for e in spec.edges if levels[e[0]] >= levels[e[1]]]
        if bad:
            raise FlowSpecError(f"edges must point to a deeper level: {bad}")
        return levels
    if given:
        raise FlowSpecError("either every node has a level or none does")
    return infer_levels(ids, spec.edges)


def get_draw_data(spec: FlowSpec) -> DrawData:
    """Place boxes row by row and connect them with elbow lines.

    Level 0 is the top row. Rows share the canvas height evenly; each row's
    boxes keep input order and are centred as a group with one box width
    between neighbours (narrowed when the widest row would not fit).
    """
    levels = _resolve_levels(spec)
    rows: dict[int, list[str]] = defaultdict(list)
    for n, _ in spec.nodes:
        rows[levels[n]].append(n)
    if not rows:
        return DrawData()
    depth = max(rows) + 1
    widest = max(len(r) for r in rows.values())
    w, h = spec.box_size
    w = min(w, ROW_FILL / (2 * widest - 1))
    h = min(h, 0.8 / depth)

    boxes = {}
    for lv, members in rows.items():
        cy = 1 - (lv + 0.5) / depth
        total = len(members) * w + (len(members) - 1) * w
        x = 0.5 - total / 2
        for n in members:
            boxes[n] = Rect(x, cy - h / 2, x + w, cy + h / 2)
            x += 2 * w

    lines = []
    for a, b in spec.edges:
        src, dst = boxes[a], boxes[b]
        sx, sy = (src.x0 + src.x1) / 2, src.y0
        tx, ty = (dst.x0 + dst.x1) / 2, dst.y1
        # turn halfway into the gap below the source row
        next_top = 1 - (levels[a] + 1.5) / depth + h / 2
        ym = (sy + next_top) / 2
        if abs(sx - tx) < 1e-12:
            pts = [(sx, sy), (tx, ty)]
        else:
            pts = [(sx, sy), (sx, ym), (tx, ym), (tx, ty)]
        lines.append(FlowLine(pts))
    return DrawData(boxes, lines)


def label_anchor(box: Rect) -> tuple[Point, int]:
    """Where overpic text for ``box`` starts, and its rotation."""
    w, h = box.x1 - box.x0, box.y1 - box.y0
    if h > w + 1e-9:
        # rotated text runs downward from near the top-left corner
        return (box.x0 + 0.25 * w, box.y1 - 0.05 * h), -90
    return (box.x0 + 0.05 * w, box.y0 + 0.5 * h), 0


def flow_chart_svg(data: DrawData, width_px: int = 800, height_px: int = 800) -> str:
    s = min(width_px, height_px)

    def px(p):
        return fmt_num(p[0] * s, 3), fmt_num((1 - p[1]) * s, 3)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{s}" height="{s}" '
        f'viewBox="0 0 {s} {s}">',
    ]
    if data.lines:
        out.append('<defs><marker id="arrow" viewBox="0 0 10 10" refX="10" refY="5" markerWidth="6" '
                   'markerHeight="6" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#000000"/></marker></defs>')
    for n, r in data.boxes.items():
        x, y = px((r.x0, r.y1))
        out.append(f'<rect class="node" data-id="{n}" x="{x}" y="{y}" width="{fmt_num((r.x1 - r.x0) * s, 3)}" '
                   f'height="{fmt_num((r.y1 - r.y0) * s, 3)}" fill="#FFFFFF" stroke="#000000" stroke-width="1.5"/>')
    for line in data.lines:
        pts = " ".join(",".join(px(p)) for p in line.points)
        marker = ' marker-end="url(#arrow)"' if line.arrow else ""
        out.append(f'<polyline class="link" points="{pts}" fill="none" stroke="#000000" stroke-width="1.2"{marker}/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_flow_chart(data: DrawData, out_path: str | Path, width_px: int = 800, height_px: int = 800):
    """Write ``data`` as SVG; return the path and per-node label anchors."""
    out_path = Path(out_path)
    try:
        out_path.write_text(flow_chart_svg(data, width_px, height_px), encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write flow chart to {out_path}: {exc}") from exc
    anchors = {n: label_anchor(r) for n, r in data.boxes.items()}
    return out_path, anchors
