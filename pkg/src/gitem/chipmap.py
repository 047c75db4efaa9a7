"""Chip-and-pin citation maps.

Papers sit as pins around the four sides of a square "chip". Each paper has a
blue pin where its outgoing wires start and a red pin where incoming wires
end; every citation is drawn as a rectilinear wire in the citing paper's
colour.

All geometry lives in a unit square with y pointing up (the same convention
``overpic`` uses). Pixels only appear when rendering.
"""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from ._fmt import fmt_num

SIDES = ("up", "down", "left", "right")
HORIZONTAL_SIDES = frozenset({"up", "down"})

MARGIN = 0.125
PIN_DEPTH = 0.02
INNER_LO = MARGIN + PIN_DEPTH
INNER_HI = 1 - MARGIN - PIN_DEPTH
# label anchors sit just outside the big box; rotated labels read downwards
LABEL_INSET = 0.12
LABEL_OFFSET = {"up": 0.05, "down": -0.065, "left": -0.08, "right": 0.05}
EPS = 1e-9

Point = tuple[float, float]
RGB = tuple[int, int, int]
CiteList = list[tuple[int, list[int]]]


class RoutingCapacityError(RuntimeError):
    pass


@dataclass(frozen=True)
class Rect:
    x0: float
    y0: float
    x1: float
    y1: float

    def contains(self, p: Point, tol: float = EPS) -> bool:
        return self.x0 - tol <= p[0] <= self.x1 + tol and self.y0 - tol <= p[1] <= self.y1 + tol

    def overlaps(self, other: "Rect") -> bool:
        return (min(self.x1, other.x1) - max(self.x0, other.x0) > EPS
                and min(self.y1, other.y1) - max(self.y0, other.y0) > EPS)


@dataclass
class ChipStyle:
    zoom_arrow: float = 1.0
    zoom_lineW: float = 1.0
    citebox_width: float = 0.02
    image_width_px: int = 800
    image_height_px: int = 800
    seed: int = 0

    def __post_init__(self):
        for name in ("zoom_arrow", "zoom_lineW", "citebox_width"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.image_width_px <= 0 or self.image_height_px <= 0:
            raise ValueError("image size must be positive")

    @property
    def lane_offset(self) -> float:
        return self.citebox_width / 2


@dataclass
class RoutedEdge:
    from_ni: int
    to_ni: int
    kind: str
    polyline: list[Point]
    color: RGB

    def segments(self):
        return list(zip(self.polyline, self.polyline[1:]))


@dataclass
class ChipLayout:
    items: list[int]
    order: list[int]
    big_box: Rect
    side_of: dict[int, str]
    red_box: dict[int, Rect]
    blue_box: dict[int, Rect]
    four_sides_dict: dict[str, list[tuple[int, Point, int]]]
    routed_edges: list[RoutedEdge] = field(default_factory=list)


def validate_cite_list(cite_list: Sequence) -> CiteList:
    """Normalise ``[[ni, [c1, ...]], ...]`` and check its invariants."""
    out: CiteList = []
    seen = set()
    for entry in cite_list:
        ni, cites = entry
        ni = int(ni)
        if ni < 1:
            raise ValueError(f"paper index {ni} is not positive")
        if ni in seen:
            raise ValueError(f"paper index {ni} listed twice")
        seen.add(ni)
        out.append((ni, [int(c) for c in cites]))
    for ni, cites in out:
        if ni in cites:
            raise ValueError(f"paper {ni} cites itself")
        if len(set(cites)) != len(cites):
            raise ValueError(f"paper {ni} cites a paper twice")
        missing = [c for c in cites if c not in seen]
        if missing:
            raise ValueError(f"paper {ni} cites unknown papers {missing}")
    return out


def generate_test_data(item_nums: int, max_cite: int, seed: int = 0) -> CiteList:
    """Random citation list: each paper cites between 1 and ``max_cite`` others."""
    if item_nums < 1 or max_cite < 1:
        raise ValueError("item_nums and max_cite must be >= 1")
    rng = random.Random(seed)
    out: CiteList = []
    for ni in range(1, item_nums + 1):
        others = [c for c in range(1, item_nums + 1) if c != ni]
        if not others:
            out.append((ni, []))
            continue
        k = rng.randint(1, min(max_cite, len(others)))
        out.append((ni, rng.sample(others, k)))
    return out


def allocate_colors(n: int) -> list[RGB]:
    """``n`` distinct single-channel colours, item k on channel k mod 3."""
    if n < 1:
        raise ValueError("need at least one colour")
    if n > 765:
        raise ValueError(f"cannot allocate {n} distinct single-channel colours (max 765)")
    family_size = [len(range(ch, n, 3)) for ch in range(3)]
    colors = []
    for k in range(n):
        ch, j = k % 3, k // 3
        value = 255 * (j + 1) // family_size[ch]
        rgb = [0, 0, 0]
        rgb[ch] = value
        colors.append(tuple(rgb))
    return colors


def hex_color(rgb: RGB) -> str:
    return "#{:02X}{:02X}{:02X}".format(*rgb)


def side_counts(n: int) -> dict[str, int]:
    return {s: n // 4 + (1 if i < n % 4 else 0) for i, s in enumerate(SIDES)}


def _slot(side_count: int, k: int) -> tuple[float, float]:
    length = (1 - 2 * MARGIN) / side_count
    start = MARGIN + k * length
    return start, start + length


def build_layout(cite_list: Sequence, style: ChipStyle | None = None) -> ChipLayout:
    """Assign papers to sides and place their pins and labels.

    Papers are ranked by times cited, then number of citations made, then
    index; the ranking is cut into contiguous runs for up, down, left and
    right with sizes differing by at most one.
    """
    style = style or ChipStyle()
    cl = validate_cite_list(cite_list)
    indeg: dict[int, int] = defaultdict(int)
    for _, cites in cl:
        for c in cites:
            indeg[c] += 1
    outdeg = {ni: len(cites) for ni, cites in cl}
    order = sorted((ni for ni, _ in cl), key=lambda ni: (-indeg[ni], -outdeg[ni], ni))

    counts = side_counts(len(order))
    side_of, red, blue = {}, {}, {}
    four: dict[str, list] = {s: [] for s in SIDES}
    pos = 0
    for side in SIDES:
        for k in range(counts[side]):
            ni = order[pos]
            pos += 1
            side_of[ni] = side
            a, b = _slot(counts[side], k)
            length = b - a
            pw = min(style.citebox_width, 0.4 * length)
            mid = (a + b) / 2
            # opposite sides mirror pin order so red faces blue across the chip
            first, second = (mid - pw, mid), (mid, mid + pw)
            red_span, blue_span = (first, second) if side in ("up", "left") else (second, first)
            red[ni] = _pin_rect(side, *red_span)
            blue[ni] = _pin_rect(side, *blue_span)
            four[side].append((ni, _label_anchor(side, a, b), 0 if side in HORIZONTAL_SIDES else -90))
    return ChipLayout(
        items=[ni for ni, _ in cl], order=order,
        big_box=Rect(MARGIN, MARGIN, 1 - MARGIN, 1 - MARGIN),
        side_of=side_of, red_box=red, blue_box=blue, four_sides_dict=four,
    )


def _pin_rect(side: str, a: float, b: float) -> Rect:
    if side == "up":
        return Rect(a, INNER_HI, b, 1 - MARGIN)
    if side == "down":
        return Rect(a, MARGIN, b, INNER_LO)
    if side == "left":
        return Rect(MARGIN, a, INNER_LO, b)
    return Rect(INNER_HI, a, 1 - MARGIN, b)


def _label_anchor(side: str, a: float, b: float) -> Point:
    inset = LABEL_INSET * (b - a)
    if side in HORIZONTAL_SIDES:
        y = (1 - MARGIN if side == "up" else MARGIN) + LABEL_OFFSET[side]
        return (a + inset, y)
    x = (MARGIN if side == "left" else 1 - MARGIN) + LABEL_OFFSET[side]
    return (x, b - inset)


def _axis_class(side: str) -> str:
    return "ud" if side in HORIZONTAL_SIDES else "lr"


def classify_edges(cite_list: Sequence, layout: ChipLayout):
    """Split citations into same-axis wires (first) and cross-axis wires (second).

    A wire joining {left, right} to {up, down} needs one 90 degree transfer
    point and goes to the second list; everything else goes to the first.
    """
    first, second = [], []
    for ni, cites in validate_cite_list(cite_list):
        for c in cites:
            a, b = layout.side_of[ni], layout.side_of[c]
            (second if _axis_class(a) != _axis_class(b) else first).append((ni, c))
    return first, second


class _Occupancy:
    """Axis-aligned segments already drawn, bucketed by the line they lie on."""

    def __init__(self):
        self.lines: dict[tuple[str, float], list[tuple[float, float]]] = defaultdict(list)

    @staticmethod
    def _key(p: Point, q: Point):
        if abs(p[1] - q[1]) <= EPS:
            return ("h", round(p[1], 9)), tuple(sorted((p[0], q[0])))
        if abs(p[0] - q[0]) <= EPS:
            return ("v", round(p[0], 9)), tuple(sorted((p[1], q[1])))
        raise ValueError(f"segment {p}->{q} is not axis-aligned")

    def clashes(self, polyline: Sequence[Point]) -> bool:
        for p, q in zip(polyline, polyline[1:]):
            key, (lo, hi) = self._key(p, q)
            for a, b in self.lines.get(key, ()):
                if min(hi, b) - max(lo, a) > EPS:
                    return True
        return False

    def add(self, polyline: Sequence[Point]) -> None:
        for p, q in zip(polyline, polyline[1:]):
            key, span = self._key(p, q)
            self.lines[key].append(span)


def _attach_points(edges, layout: ChipLayout) -> dict[tuple[int, int, str], Point]:
    """Where each wire leaves its blue pin and enters its red pin.

    Wires sharing a pin are spread evenly across its inner face. Coordinates
    along each axis are made globally unique so pin stubs never share a line.
    """
    ends: dict[tuple[int, str], list[tuple[int, int]]] = defaultdict(list)
    for e in edges:
        ends[(e[0], "blue")].append(e)
        ends[(e[1], "red")].append(e)
    used = {"ud": [], "lr": []}
    out = {}
    for ni in layout.order:
        side = layout.side_of[ni]
        axis = _axis_class(side)
        for colour in ("blue", "red"):
            group = ends.get((ni, colour), [])
            box = (layout.blue_box if colour == "blue" else layout.red_box)[ni]
            a, b = (box.x0, box.x1) if axis == "ud" else (box.y0, box.y1)
            step = (b - a) / (len(group) + 1)
            for j, e in enumerate(group):
                t = a + step * (j + 1)
                while any(abs(t - u) <= 1e-7 for u in used[axis]):
                    t += step * 1e-3
                used[axis].append(t)
                face = {"up": box.y0, "down": box.y1, "left": box.x1, "right": box.x0}[side]
                out[(e[0], e[1], colour)] = (t, face) if axis == "ud" else (face, t)
    return out


def _lane_candidates(base: float, step: float, direction: int):
    """Lane coordinates from ``base`` outward; direction 0 alternates sides."""
    k = 0
    while True:
        if direction:
            yield base + direction * k * step
        else:
            yield base + step * ((k + 1) // 2) * (1 if k % 2 else -1) if k else base
        k += 1


def route_edges(first, second, layout: ChipLayout, style: ChipStyle | None = None,
                colors: Sequence[RGB] | None = None) -> list[RoutedEdge]:
    """Draw every citation as a rectilinear wire from blue pin to red pin.

    Same-axis wires run through a lane parallel to the sides they join; a lane
    already used by an overlapping wire is abandoned for the next one, one
    lane offset further on. Cross-axis wires turn once. Raises
    ``RoutingCapacityError`` when no lane inside the chip is free.
    """
    style = style or ChipStyle()
    if colors is None:
        colors = allocate_colors(len(layout.items)) if layout.items else []
    color_of = dict(zip(layout.items, colors))
    attach = _attach_points(list(first) + list(second), layout)
    # a lane may not sit on the line of any pin stub running the same way
    forbidden: dict[str, list[float]] = {"h": [], "v": []}
    for (f, t, colour), p in attach.items():
        side = layout.side_of[f if colour == "blue" else t]
        if _axis_class(side) == "ud":
            forbidden["v"].append(p[0])
        else:
            forbidden["h"].append(p[1])
    occ = _Occupancy()
    step = style.lane_offset
    routed = []

    for f, t in first:
        s, d = attach[(f, t, "blue")], attach[(f, t, "red")]
        sside, tside = layout.side_of[f], layout.side_of[t]
        horizontal_lane = _axis_class(sside) == "ud"
        if sside == tside:
            base, direction = {"up": (INNER_HI - step, -1), "down": (INNER_LO + step, 1),
                               "right": (INNER_HI - step, -1), "left": (INNER_LO + step, 1)}[sside]
        else:
            base, direction = 0.5, 0
        banned = forbidden["h" if horizontal_lane else "v"]
        for lane in _lane_candidates(base, step, direction):
            if not INNER_LO + EPS < lane < INNER_HI - EPS:
                if direction or abs(lane - base) > 0.5:
                    raise RoutingCapacityError(
                        f"no free lane for citation {f}->{t} ({sside}->{tside}); "
                        "reduce citebox_width or the number of papers")
                continue
            if any(abs(lane - u) <= 1e-7 for u in banned):
                continue
            if horizontal_lane:
                path = [s, (s[0], lane), (d[0], lane), d]
            else:
                path = [s, (lane, s[1]), (lane, d[1]), d]
            if not occ.clashes(path):
                break
        occ.add(path)
        routed.append(RoutedEdge(f, t, "first_process", path, color_of[f]))

    for f, t in second:
        s, d = attach[(f, t, "blue")], attach[(f, t, "red")]
        if _axis_class(layout.side_of[f]) == "lr":
            path = [s, (d[0], s[1]), d]
        else:
            path = [s, (s[0], d[1]), d]
        if occ.clashes(path):
            path = _shift_transfer(path, occ, step)
        occ.add(path)
        routed.append(RoutedEdge(f, t, "second_process", path, color_of[f]))
    return routed


def _shift_transfer(path, occ: _Occupancy, step: float):
    """Detour an L-shaped wire through a shifted transfer point."""
    s, corner, d = path
    leaves_horizontally = abs(s[1] - corner[1]) <= EPS
    for k in range(1, int(1 / step) + 1):
        for sign in (1, -1):
            off = sign * k * step
            if leaves_horizontally:
                x = corner[0] + off
                cand = [s, (x, s[1]), (x, d[1] + off), (d[0], d[1] + off), d]
            else:
                y = corner[1] + off
                cand = [s, (s[0], y), (d[0] + off, y), (d[0] + off, d[1]), d]
            if all(INNER_LO < c < INNER_HI for p in cand[1:-1] for c in p) and not occ.clashes(cand):
                return cand
    raise RoutingCapacityError(f"no clear transfer point for wire {s}->{d}")


def chip_map(cite_list: Sequence, style: ChipStyle | None = None) -> ChipLayout:
    """Lay out, classify and route ``cite_list`` in one call."""
    style = style or ChipStyle()
    layout = build_layout(cite_list, style)
    first, second = classify_edges(cite_list, layout)
    layout.routed_edges = route_edges(first, second, layout, style)
    return layout


# -- rendering ----------------------------------------------------------------

class _Canvas:
    """Maps unit-square coordinates (y up) to pixels (y down)."""

    def __init__(self, style: ChipStyle):
        self.w, self.h = style.image_width_px, style.image_height_px
        self.scale = min(self.w, self.h)
        self.ox = (self.w - self.scale) / 2
        self.oy = (self.h - self.scale) / 2

    def px(self, p: Point) -> tuple[float, float]:
        return self.ox + p[0] * self.scale, self.oy + (1 - p[1]) * self.scale

    def image_fraction(self, p: Point) -> Point:
        """Position as overpic wants it: both axes in units of image width, y up."""
        return (self.ox + p[0] * self.scale) / self.w, (self.oy + p[1] * self.scale) / self.w


def _arrowhead(edge: RoutedEdge, size: float) -> list[Point]:
    (px, py), (qx, qy) = edge.polyline[-2], edge.polyline[-1]
    dx, dy = qx - px, qy - py
    norm = (dx * dx + dy * dy) ** 0.5 or 1.0
    ux, uy = dx / norm, dy / norm
    bx, by = qx - ux * size, qy - uy * size
    half = size * 0.5
    return [(qx, qy), (bx - uy * half, by + ux * half), (bx + uy * half, by - ux * half)]


def sides_in_image(layout: ChipLayout, style: ChipStyle) -> dict[str, list[tuple[int, Point, int]]]:
    cv = _Canvas(style)
    return {side: [(ni, cv.image_fraction(p), rot) for ni, p, rot in entries]
            for side, entries in layout.four_sides_dict.items()}


def chip_map_svg(layout: ChipLayout, style: ChipStyle) -> str:
    cv = _Canvas(style)

    def f(v):
        return fmt_num(v, 3)

    def rect(r: Rect, cls: str, fill: str, stroke: str, sw: float) -> str:
        x0, y1 = cv.px((r.x0, r.y0))
        x1, y0 = cv.px((r.x1, r.y1))
        return (f'<rect class="{cls}" x="{f(x0)}" y="{f(y0)}" width="{f(x1 - x0)}" '
                f'height="{f(y1 - y0)}" fill="{fill}" stroke="{stroke}" stroke-width="{f(sw)}"/>')

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{cv.w}" height="{cv.h}" '
        f'viewBox="0 0 {cv.w} {cv.h}">',
        rect(layout.big_box, "bigbox", "none", "#000000", 2),
    ]
    for ni in layout.order:
        out.append(rect(layout.red_box[ni], "pin red", "#FF0000", "#000000", 0.5))
        out.append(rect(layout.blue_box[ni], "pin blue", "#0000FF", "#000000", 0.5))
    arrow = 0.012 * style.zoom_arrow
    for e in layout.routed_edges:
        col = hex_color(e.color)
        pts = " ".join(f"{f(x)},{f(y)}" for x, y in map(cv.px, e.polyline))
        out.append(f'<polyline class="edge" points="{pts}" fill="none" stroke="{col}" '
                   f'stroke-width="{f(style.zoom_lineW)}"/>')
        head = " ".join(f"{f(x)},{f(y)}" for x, y in map(cv.px, _arrowhead(e, arrow)))
        out.append(f'<polygon class="arrow" points="{head}" fill="{col}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def chip_map_png(layout: ChipLayout, style: ChipStyle, path: str | Path) -> None:
    from PIL import Image, ImageDraw

    cv = _Canvas(style)
    img = Image.new("RGB", (cv.w, cv.h), "white")
    draw = ImageDraw.Draw(img)

    def box(r: Rect, fill):
        x0, y1 = cv.px((r.x0, r.y0))
        x1, y0 = cv.px((r.x1, r.y1))
        draw.rectangle([x0, y0, x1, y1], fill=fill, outline="black")

    x0, y1 = cv.px((layout.big_box.x0, layout.big_box.y0))
    x1, y0 = cv.px((layout.big_box.x1, layout.big_box.y1))
    draw.rectangle([x0, y0, x1, y1], outline="black", width=2)
    for ni in layout.order:
        box(layout.red_box[ni], "red")
        box(layout.blue_box[ni], "blue")
    width = max(1, round(style.zoom_lineW))
    for e in layout.routed_edges:
        draw.line([cv.px(p) for p in e.polyline], fill=e.color, width=width)
        draw.polygon([cv.px(p) for p in _arrowhead(e, 0.012 * style.zoom_arrow)], fill=e.color)
    img.save(path, format="PNG")


def render_chip_map(layout: ChipLayout, style: ChipStyle, out_path: str | Path, png: bool = False):
    """Write the map as SVG (plus a PNG twin when ``png``).

    Returns the written path and the label anchors per side, expressed as
    fractions of the image width for ``overpic``.
    """
    out_path = Path(out_path)
    try:
        out_path.write_text(chip_map_svg(layout, style), encoding="utf-8")
        if png:
            chip_map_png(layout, style, out_path.with_suffix(".png"))
    except OSError as exc:
        raise OSError(f"cannot write chip map to {out_path}: {exc}") from exc
    return out_path, sides_in_image(layout, style)


def sides_to_json(sides: dict[str, list[tuple[int, Point, int]]]) -> dict[str, list[list]]:
    """``{"up": [[ni, x_frac, y_frac, rot], ...], ...}``"""
    return {side: [[ni, round(p[0], 10), round(p[1], 10), rot] for ni, p, rot in entries]
            for side, entries in sides.items()}
