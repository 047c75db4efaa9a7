import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from gitem.chipmap import (SIDES, ChipStyle, RoutingCapacityError, allocate_colors, build_layout,
                           chip_map, chip_map_svg, classify_edges, generate_test_data, hex_color,
                           render_chip_map, route_edges, side_counts, sides_in_image, sides_to_json,
                           validate_cite_list)

from chip_oracles import collinear_overlaps, is_rectilinear
from conftest import NERF_MAP_ANCHORS

EIGHT_ITEM_LIST = [[1, [3, 5]], [2, [1]], [3, [1, 2]], [4, [1, 3]], [5, [1]], [6, [2, 5]], [7, [1, 6]], [8, [4]]]


# -- test data ------------------------------------------------------------------

def test_single_item_has_no_targets():
    assert generate_test_data(1, 5, seed=9) == [(1, [])]


def test_generation_is_deterministic():
    assert generate_test_data(8, 3, seed=42) == generate_test_data(8, 3, seed=42)


def test_generation_constraints_over_seeds():
    for seed in range(200):
        cl = generate_test_data(8, 3, seed)
        assert [ni for ni, _ in cl] == list(range(1, 9))
        for ni, cites in cl:
            assert 1 <= len(cites) <= 3
            assert all(1 <= c <= 8 for c in cites)
            assert ni not in cites
            assert len(set(cites)) == len(cites)


def test_max_cite_capped_by_available_papers():
    for seed in range(20):
        assert all(len(c) == 1 for _, c in generate_test_data(2, 5, seed))


@pytest.mark.parametrize("bad", [[[1, [1]]], [[1, [2]]], [[1, []], [1, []]], [[0, []]], [[1, [2, 2]], [2, []]]])
def test_invalid_cite_lists(bad):
    with pytest.raises(ValueError):
        validate_cite_list(bad)


# -- layout ---------------------------------------------------------------------

def _count_per_side(layout):
    return {s: sum(1 for v in layout.side_of.values() if v == s) for s in SIDES}


def test_eight_items_two_per_side():
    layout = build_layout(EIGHT_ITEM_LIST)
    assert _count_per_side(layout) == dict.fromkeys(SIDES, 2)
    rotations = {s: {rot for _, _, rot in layout.four_sides_dict[s]} for s in SIDES}
    assert rotations == {"up": {0}, "down": {0}, "left": {-90}, "right": {-90}}


def test_four_items_one_per_side():
    layout = build_layout(generate_test_data(4, 2, 0))
    assert _count_per_side(layout) == dict.fromkeys(SIDES, 1)


def test_ten_items_remainder_rule():
    assert side_counts(10) == {"up": 3, "down": 3, "left": 2, "right": 2}
    layout = build_layout(generate_test_data(10, 3, 5))
    assert _count_per_side(layout) == {"up": 3, "down": 3, "left": 2, "right": 2}


def test_sort_order_by_degree():
    # 3 is cited twice, 1 once (and cites twice), 2 once, 4 never
    cl = [[1, [2, 3]], [2, [3]], [3, [1]], [4, []]]
    layout = build_layout(cl)
    assert layout.order == [3, 1, 2, 4]
    assert [layout.side_of[n] for n in layout.order] == ["up", "down", "left", "right"]


def test_eight_item_anchors_match_reference_positions():
    """Anchor fractions of any 8-paper map equal the reference label positions."""
    layout = build_layout(EIGHT_ITEM_LIST)
    got = sorted((round(p[0], 12), round(p[1], 12), rot)
                 for side in layout.four_sides_dict.values() for _, p, rot in side)
    want = sorted((x, y, rot) for x, y, _, rot in NERF_MAP_ANCHORS)
    assert got == want


@given(st.integers(1, 80), st.integers(1, 5), st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_layout_invariants(n, k, seed):
    cl = generate_test_data(n, k, seed)
    layout = build_layout(cl)
    counts = _count_per_side(layout)
    assert max(counts.values()) - min(counts.values()) <= 1
    assert set(layout.side_of) == set(layout.red_box) == set(layout.blue_box) == {ni for ni, _ in cl}
    for side in SIDES:
        boxes = [b for ni, s in layout.side_of.items() if s == side for b in (layout.red_box[ni], layout.blue_box[ni])]
        for i, a in enumerate(boxes):
            for b in boxes[i + 1:]:
                assert not a.overlaps(b)
        for ni in (ni for ni, s in layout.side_of.items() if s == side):
            for b in (layout.red_box[ni], layout.blue_box[ni]):
                # pins sit inside the big box, against their own side
                edge = {"up": b.y1, "down": b.y0, "left": b.x0, "right": b.x1}[side]
                target = {"up": layout.big_box.y1, "down": layout.big_box.y0,
                          "left": layout.big_box.x0, "right": layout.big_box.x1}[side]
                assert edge == pytest.approx(target)


# -- colours ----------------------------------------------------------------------

def test_one_colour():
    assert [hex_color(c) for c in allocate_colors(1)] == ["#FF0000"]


def test_three_colours():
    assert [hex_color(c) for c in allocate_colors(3)] == ["#FF0000", "#00FF00", "#0000FF"]


def test_six_colours_round_robin():
    got = [hex_color(c) for c in allocate_colors(6)]
    assert got == ["#7F0000", "#007F00", "#00007F", "#FF0000", "#00FF00", "#0000FF"]
    assert sorted(got) == sorted(["#7F0000", "#FF0000", "#007F00", "#00FF00", "#00007F", "#0000FF"])


def _formula_oracle(n):
    fams = [[k for k in range(n) if k % 3 == ch] for ch in range(3)]
    out = [None] * n
    for ch, fam in enumerate(fams):
        for j, k in enumerate(fam):
            rgb = [0, 0, 0]
            rgb[ch] = (255 * (j + 1)) // len(fam)
            out[k] = tuple(rgb)
    return out


@pytest.mark.parametrize("n", [1, 2, 4, 7, 64, 100, 764, 765])
def test_colours_match_formula_and_are_distinct(n):
    cols = allocate_colors(n)
    assert cols == _formula_oracle(n)
    assert len(set(cols)) == n


def test_too_many_colours():
    with pytest.raises(ValueError):
        allocate_colors(766)


# -- classification -----------------------------------------------------------------

def test_no_citations():
    cl = [[1, []], [2, []]]
    assert classify_edges(cl, build_layout(cl)) == ([], [])


def test_left_to_up_is_second_process():
    cl = [[1, []], [2, []], [3, [1]], [4, []]]
    layout = build_layout(cl)
    layout.side_of.update({3: "left", 1: "up"})
    assert classify_edges(cl, layout) == ([], [(3, 1)])


@pytest.mark.parametrize("seed", range(5))
def test_classification_exhaustive(seed):
    cl = generate_test_data(20, 4, seed)
    layout = build_layout(cl)
    first, second = classify_edges(cl, layout)
    lr = {"left", "right"}
    want_second = {(a, b) for a, cs in cl for b in cs
                   if (layout.side_of[a] in lr) != (layout.side_of[b] in lr)}
    all_pairs = {(a, b) for a, cs in cl for b in cs}
    assert set(second) == want_second
    assert set(first) == all_pairs - want_second
    assert len(first) + len(second) == len(all_pairs)


# -- routing ----------------------------------------------------------------------

def _check_routing(cl, layout):
    edges = layout.routed_edges
    assert len(edges) == sum(len(c) for _, c in cl)
    colors = dict(zip(layout.items, allocate_colors(len(layout.items))))
    for e in edges:
        assert len(e.polyline) >= 2
        assert is_rectilinear(e.polyline)
        assert layout.blue_box[e.from_ni].contains(e.polyline[0])
        assert layout.red_box[e.to_ni].contains(e.polyline[-1])
        assert e.color == colors[e.from_ni]
        assert all(layout.big_box.contains(p) for p in e.polyline)
    assert collinear_overlaps(layout) == []


def test_zero_edges():
    cl = [[1, []], [2, []]]
    layout = build_layout(cl)
    assert route_edges([], [], layout) == []


def test_single_up_down_edge_geometry():
    cl = [[1, [2]], [2, []]]
    layout = chip_map(cl)
    assert (layout.side_of[1], layout.side_of[2]) == ("down", "up") or \
           (layout.side_of[1], layout.side_of[2]) == ("up", "down")
    [e] = layout.routed_edges
    assert e.kind == "first_process"
    assert len(e.polyline) == 4
    _check_routing(cl, layout)


def test_eight_item_list_has_no_overlaps():
    layout = chip_map(EIGHT_ITEM_LIST)
    _check_routing(EIGHT_ITEM_LIST, layout)
    kinds = Counter(e.kind for e in layout.routed_edges)
    assert kinds["first_process"] and kinds["second_process"]


def test_second_process_turns_once():
    layout = chip_map(EIGHT_ITEM_LIST)
    for e in layout.routed_edges:
        if e.kind == "second_process":
            assert len(e.polyline) in (3, 5)


@given(st.integers(2, 64), st.integers(1, 5), st.integers(0, 10_000))
@settings(max_examples=30, deadline=None)
def test_routing_invariants(n, k, seed):
    cl = generate_test_data(n, k, seed)
    _check_routing(cl, chip_map(cl))


def test_capacity_exhausted_raises():
    cl = [[i, [j for j in range(1, 41) if j != i][:20]] for i in range(1, 41)]
    with pytest.raises(RoutingCapacityError):
        chip_map(cl, ChipStyle(citebox_width=0.2))


def test_routing_is_deterministic():
    cl = generate_test_data(30, 4, 7)
    a, b = chip_map(cl), chip_map(cl)
    assert [e.polyline for e in a.routed_edges] == [e.polyline for e in b.routed_edges]


# -- rendering ----------------------------------------------------------------------

def test_zero_edge_render_has_only_boxes(tmp_path):
    cl = [[i, []] for i in range(1, 6)]
    layout = chip_map(cl)
    path, _ = render_chip_map(layout, ChipStyle(), tmp_path / "m.svg")
    svg = path.read_text()
    assert svg.count("<rect ") == 1 + 2 * 5
    assert svg.count('class="bigbox"') == 1
    assert "<polyline" not in svg


def test_eight_item_sides(tmp_path):
    layout = chip_map(EIGHT_ITEM_LIST)
    _, sides = render_chip_map(layout, ChipStyle(), tmp_path / "m.svg")
    assert sorted(ni for s in sides.values() for ni, _, _ in s) == list(range(1, 9))
    assert {s: len(v) for s, v in sides.items()} == dict.fromkeys(SIDES, 2)


def test_render_twice_byte_identical(tmp_path):
    style = ChipStyle(zoom_arrow=1.5, zoom_lineW=2)
    layout = chip_map(generate_test_data(20, 3, 1), style)
    a, _ = render_chip_map(layout, style, tmp_path / "a.svg", png=True)
    b, _ = render_chip_map(layout, style, tmp_path / "b.svg", png=True)
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a.png").read_bytes() == (tmp_path / "b.png").read_bytes()


def test_style_scales_reach_svg():
    layout = chip_map(EIGHT_ITEM_LIST)
    thin = chip_map_svg(layout, ChipStyle(zoom_lineW=1))
    thick = chip_map_svg(layout, ChipStyle(zoom_lineW=3))
    assert 'stroke-width="3"' in thick and 'stroke-width="3"' not in thin
    for e in layout.routed_edges:
        assert hex_color(e.color) in thin


def test_unwritable_path(tmp_path):
    layout = chip_map(EIGHT_ITEM_LIST)
    with pytest.raises(OSError):
        render_chip_map(layout, ChipStyle(), tmp_path / "missing" / "m.svg")


def test_non_square_image_anchor_fractions():
    layout = chip_map(EIGHT_ITEM_LIST)
    style = ChipStyle(image_width_px=1000, image_height_px=500)
    sides = sides_in_image(layout, style)
    for side, entries in sides.items():
        for (ni, p, _), (_, q, _) in zip(entries, layout.four_sides_dict[side]):
            # unit square is 500px wide, centred horizontally
            assert p[0] == pytest.approx((250 + q[0] * 500) / 1000)
            assert p[1] == pytest.approx(q[1] * 500 / 1000)


def test_sides_json_shape():
    layout = chip_map(EIGHT_ITEM_LIST)
    data = sides_to_json(layout.four_sides_dict)
    assert set(data) == set(SIDES)
    assert all(len(row) == 4 for rows in data.values() for row in rows)
