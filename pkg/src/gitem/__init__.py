"""Interactive LaTeX graphic items built from bibliographies and paper corpora."""

__version__ = "0.1.0"

from .bib import BibDatabase, BibEntry, export_records, parse_bib
from .cellmap import TableSpec, generate_table
from .chipmap import (ChipLayout, ChipStyle, RoutedEdge, allocate_colors, build_layout,
                      chip_map, classify_edges, generate_test_data, render_chip_map, route_edges)
from .flowchart import DrawData, FlowSpec, get_draw_data, render_flow_chart
from .flowgraph import FlowColumn, FlowGraphSpec, generate_flow_graph
from .hvam import Analysis, ComparisonStage, stage_score, total_score
from .overlay import CoorText, PixelBox, blank_regions, detect_text_regions, generate_overpic
from .pdfrefs import (PaperRecord, TextSpan, cross_reference, detect_title_authors,
                      extract_spans, is_person_name, sort_spans)
