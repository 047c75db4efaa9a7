"""Time-sequence flow graphs as LaTeX matrices of boxed periods and coloured item boxes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

STAR = "\\star"
TCOLORBOX_OPTS = ("left=0mm, right=0mm, top=0mm, bottom=0mm, boxsep=0.5mm, arc=0mm, "
                  "boxrule=0pt, bottomrule=0pt, toprule=0pt, title={}")


@dataclass
class FlowColumn:
    period: str
    color: str
    items: list[tuple[str, str]]


@dataclass
class FlowGraphSpec:
    columns: list[FlowColumn]
    items_per_row: int = 3
    box_width: str = "2cm"
    caption: str = "flow graph"
    label: str = "flow graph"
    arraystretch: float = 1.5

    def __post_init__(self):
        if not self.columns:
            raise ValueError("flow graph needs at least one column")
        if self.items_per_row < 1:
            raise ValueError("items_per_row must be >= 1")
        for i, col in enumerate(self.columns):
            if not col.items:
                raise ValueError(f"column {i} ({col.period}) has no items")
            if not col.color:
                raise ValueError(f"column {i} ({col.period}) has no colour")

    @classmethod
    def from_json(cls, groups: Sequence[dict], **kw) -> "FlowGraphSpec":
        cols = [FlowColumn(str(g["period"]), str(g["color"]), [(str(k), str(t)) for k, t in g["items"]])
                for g in groups]
        return cls(cols, **kw)


def math_text(text: str) -> str:
    """Item text is set in math mode; keep hyphens from becoming minus signs."""
    return text.replace("-", "\\text{-}")


def _item_box(col: FlowColumn, staircase: int, width: str) -> list[str]:
    lines = ["& \\boxed{", "\\begin{matrix}"]
    lines += ["\\\\"] * staircase
    lines.append(f"\\begin{{tcolorbox}}[colback={col.color}, width={width}, {TCOLORBOX_OPTS}]")
    lines += ["$", "\\begin{matrix}"]
    lines += [f"\\cite{{{key}}}{math_text(text)}  \\\\" for key, text in col.items]
    lines += ["\\end{matrix}", "$", "\\end{tcolorbox}\\end{matrix}", "}", ""]
    return lines


def _block(cols: Sequence[FlowColumn], first_ordinal: int, width: str) -> list[str]:
    heads = "  ".join(f"& \\underbrace{{\\boxed{{{c.period}}}}}" for c in cols)
    stars = " ".join(
        f"& \\boxed{{{STAR * (first_ordinal + i)} \\rightarrow}}" for i in range(len(cols))
    )
    arrows = " ".join("& \\uparrow" for _ in cols)
    lines = ["$", "\\begin{matrix}", f"{heads}   &  \\\\[0pt]", f" {stars} \\\\[0pt]", f"{arrows}  \\\\[0pt]", ""]
    for i, c in enumerate(cols):
        lines += _item_box(c, i, width)
    lines += ["\\end{matrix}", "$"]
    return lines


def generate_flow_graph(spec: FlowGraphSpec) -> str:
    """LaTeX ``table`` holding the flow graph.

    Columns wrap into a new matrix block every ``items_per_row`` columns. The
    star count marks each column's position in the whole sequence; within a
    block, column i's item box drops i-1 blank lines lower than the first.
    """
    n = spec.items_per_row
    blocks = [spec.columns[i:i + n] for i in range(0, len(spec.columns), n)]
    body: list[str] = []
    for b, cols in enumerate(blocks):
        if b:
            body.append("\\\\")
        body += _block(cols, b * n + 1, spec.box_width)
    stretch = f"{spec.arraystretch:g}"
    head = [
        "\\begin{table}[htbp]\\scriptsize",
        "\\begin{center}",
        f"\\caption{{{spec.caption}}}",
        f"\\label{{{spec.label}}}",
        "\\tabcolsep=0cm",
        f"\\renewcommand\\arraystretch{{{stretch}}}",
        "\\begin{tabular}{c}",
        "",
    ]
    tail = ["\\end{tabular}", "\\end{center}", "\\end{table}"]
    return "\n".join(head + body + tail) + "\n"
