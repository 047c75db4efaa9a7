"""``gitem`` command line: one subcommand per generator plus the full pipeline.

Exit status is 0 on success, 1 on usage errors and 2 when processing fails.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bib import BibParseError, export_records, parse_bib, records_to_json
from .cellmap import TableSpec, generate_table
from .chipmap import (ChipStyle, RoutingCapacityError, chip_map, generate_test_data,
                      render_chip_map, sides_to_json)
from .flowchart import FlowSpec, FlowSpecError, get_draw_data, render_flow_chart
from .flowgraph import FlowGraphSpec, generate_flow_graph
from .hvam import Analysis, total_score
from .overlay import CoorText, OcrError, blank_regions, detect_text_regions, generate_overpic
from .pdfrefs import ExtractionError, process_directory
from .pipeline import PipelineConfig, PipelineError, run_pipeline

log = logging.getLogger("gitem")

USAGE_ERROR = 1
PROCESSING_ERROR = 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _read_json(path: str):
    return json.loads(_read_text(path))


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2) + "\n"


def _style(args) -> ChipStyle:
    return ChipStyle(zoom_arrow=args.zoom_arrow, zoom_lineW=args.zoom_linew,
                     citebox_width=args.citebox_width, image_width_px=args.width_px,
                     image_height_px=args.height_px, seed=args.seed)


def _add_style_args(p) -> None:
    p.add_argument("--zoom-arrow", type=float, default=1.0, help="arrowhead scale")
    p.add_argument("--zoom-linew", type=float, default=1.0, help="wire width scale")
    p.add_argument("--citebox-width", type=float, default=0.02, help="pin width, unit-square fraction")
    p.add_argument("--width-px", type=int, default=800)
    p.add_argument("--height-px", type=int, default=800)
    p.add_argument("--seed", type=int, default=0)


# -- subcommands --------------------------------------------------------------

def cmd_analyze_refs(args) -> int:
    db = parse_bib(_read_text(args.bib), None if args.bib == "-" else args.bib)
    for w in db.warnings:
        log.warning("%s", w)
    _emit(records_to_json(export_records(db)) + "\n", args.output)
    return 0


def cmd_pdf_refs(args) -> int:
    result = process_directory(args.directory, jobs=args.jobs)
    for path, err in result.errors.items():
        log.error("skipped %s: %s", path, err)
    if not result.records:
        log.error("no papers could be analysed")
        return PROCESSING_ERROR
    _emit(_dump(result.rows()), args.output)
    return 0


def cmd_cell_map(args) -> int:
    grid = _read_json(args.input)
    spec = TableSpec(grid, bordered=args.border, caption=args.caption, label=args.label,
                     column_width=args.col_width)
    _emit(generate_table(spec), args.output)
    return 0


def cmd_gen_test_data(args) -> int:
    _emit(json.dumps(generate_test_data(args.items, args.max_cite, args.seed)) + "\n", args.output)
    return 0


def cmd_chip_map(args) -> int:
    if args.input is not None:
        if args.items is not None or args.max_cite is not None:
            raise UsageError("--input cannot be combined with --items/--max-cite")
        cite_list = _read_json(args.input)
    elif args.items is not None and args.max_cite is not None:
        cite_list = generate_test_data(args.items, args.max_cite, args.seed)
    else:
        raise UsageError("give either --input or both --items and --max-cite")
    style = _style(args)
    layout = chip_map(cite_list, style)
    out = Path(args.out)
    _, sides = render_chip_map(layout, style, out, png=args.png)
    sides_path = out.with_name(out.stem + ".sides.json")
    sides_path.write_text(_dump(sides_to_json(sides)), encoding="utf-8")
    return 0


def cmd_flow_chart(args) -> int:
    spec = FlowSpec.from_json(_read_json(args.input))
    out = Path(args.out)
    _, anchors = render_flow_chart(get_draw_data(spec), out)
    data = {n: [round(p[0], 10), round(p[1], 10), rot] for n, (p, rot) in anchors.items()}
    out.with_name(out.stem + ".anchors.json").write_text(_dump(data), encoding="utf-8")
    return 0


def cmd_flow_graph(args) -> int:
    spec = FlowGraphSpec.from_json(_read_json(args.input), items_per_row=args.per_row,
                                   box_width=args.box_width, caption=args.caption, label=args.label)
    _emit(generate_flow_graph(spec), args.out)
    return 0


def anchors_to_items(anchors, labels: dict) -> list[CoorText]:
    """Accept chip-map ``sides.json`` or flow-chart ``anchors.json`` content."""
    items = []
    if anchors and all(isinstance(v, list) and (not v or isinstance(v[0], list)) for v in anchors.values()):
        for side in ("up", "down", "left", "right"):
            for ni, x, y, rot in anchors.get(side, []):
                items.append(CoorText(x, y, labels.get(str(ni), str(ni)), int(rot)))
    else:
        for key, (x, y, rot) in anchors.items():
            items.append(CoorText(x, y, labels.get(str(key), str(key)), int(rot)))
    return items


def cmd_overpic(args) -> int:
    labels = _read_json(args.labels) if args.labels else {}
    items = anchors_to_items(_read_json(args.anchors), labels)
    _emit(generate_overpic(args.image, args.width, items), args.output)
    return 0


def cmd_ocr_blank(args) -> int:
    from PIL import Image

    fill = args.fill.lstrip("#")
    if len(fill) != 6:
        raise UsageError("--fill takes a 6-digit hex colour such as FFFFFF")
    rgb = tuple(int(fill[i:i + 2], 16) for i in (0, 2, 4))
    boxes = detect_text_regions(args.image, args.lang.split(","), engine_cmd=args.engine_cmd)
    with Image.open(args.image) as img:
        img = img.convert("RGB")
        out = blank_regions(img, boxes, rgb)
    out.save(args.output)
    log.info("blanked %d regions", len(boxes))
    return 0


def cmd_hvam(args) -> int:
    total, per_stage = total_score(Analysis.from_json(_read_json(args.input)))
    for i, v in enumerate(per_stage, 1):
        print(f"CHV_{i}\t{v!r}")
    print(f"C\t{total!r}")
    return 0


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig(pdf_dir=Path(args.pdf_dir), out_dir=Path(args.out_dir),
                         bib_path=Path(args.bib) if args.bib else None,
                         style=_style(args), width_frac=args.width, jobs=args.jobs)
    manifest = run_pipeline(cfg)
    for path, err in manifest["errors"].items():
        log.error("skipped %s: %s", path, err)
    sys.stdout.write(_dump(manifest))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gitem", description="Generate interactive LaTeX graphic items.")
    p.add_argument("--version", action="version", version=f"gitem {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("analyze-refs", help="bib file -> indexed JSON records")
    s.add_argument("bib", help="path to .bib file, or - for stdin")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_analyze_refs)

    s = sub.add_parser("pdf-refs", help="paper directory -> titles, authors and cross-citations")
    s.add_argument("directory")
    s.add_argument("-o", "--output")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_pdf_refs)

    s = sub.add_parser("cell-map", help="JSON grid -> LaTeX table")
    s.add_argument("input", help="JSON array of rows, null for blank cells; - for stdin")
    s.add_argument("--border", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--caption", default="table title")
    s.add_argument("--label", default="table label")
    s.add_argument("--col-width", default="1.35cm")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_cell_map)

    s = sub.add_parser("chip-map", help="citation list -> chip map SVG and label anchors")
    s.add_argument("--input", help="cites.json: [[ni, [c1, ...]], ...]")
    s.add_argument("--items", type=int, help="generate random test data with this many papers")
    s.add_argument("--max-cite", type=int)
    s.add_argument("--out", required=True)
    s.add_argument("--png", action="store_true", help="also write a PNG next to the SVG")
    _add_style_args(s)
    s.set_defaults(func=cmd_chip_map)

    s = sub.add_parser("gen-test-data", help="random citation list")
    s.add_argument("--items", type=int, required=True)
    s.add_argument("--max-cite", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_gen_test_data)

    s = sub.add_parser("flow-chart", help="layered flow -> SVG chart and label anchors")
    s.add_argument("--input", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_flow_chart)

    s = sub.add_parser("flow-graph", help="period groups -> LaTeX flow graph")
    s.add_argument("--input", required=True)
    s.add_argument("--out")
    s.add_argument("--per-row", type=int, default=3)
    s.add_argument("--box-width", default="2cm")
    s.add_argument("--caption", default="flow graph")
    s.add_argument("--label", default="flow graph")
    s.set_defaults(func=cmd_flow_graph)

    s = sub.add_parser("overpic", help="label anchors -> overpic LaTeX block")
    s.add_argument("--image", required=True)
    s.add_argument("--width", type=float, default=0.4)
    s.add_argument("--anchors", required=True)
    s.add_argument("--labels", help="JSON map of index/id -> label text")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_overpic)

    s = sub.add_parser("ocr-blank", help="blank out text regions found by an OCR engine")
    s.add_argument("--image", required=True)
    s.add_argument("--engine-cmd")
    s.add_argument("--lang", default="en")
    s.add_argument("--fill", default="FFFFFF")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_ocr_blank)

    s = sub.add_parser("hvam", help="horizontal-vertical analysis scores")
    s.add_argument("--input", required=True)
    s.set_defaults(func=cmd_hvam)

    s = sub.add_parser("pipeline", help="paper directory -> chip map, anchors and overlay")
    s.add_argument("--pdf-dir", required=True)
    s.add_argument("--out-dir", required=True)
    s.add_argument("--bib")
    s.add_argument("--width", type=float, default=0.4)
    s.add_argument("--jobs", type=int, default=1)
    _add_style_args(s)
    s.set_defaults(func=cmd_pipeline)
    return p


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            raise UsageError(parser.format_help())
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return USAGE_ERROR
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"gitem {args.command}: {exc}\n")
        return USAGE_ERROR
    except (BibParseError, ExtractionError, FlowSpecError, OcrError, PipelineError,
            RoutingCapacityError, ValueError, OSError, KeyError) as exc:
        sys.stderr.write(f"gitem {args.command}: {exc}\n")
        return PROCESSING_ERROR


def main() -> None:
    sys.exit(run())
