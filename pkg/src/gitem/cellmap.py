"""LaTeX table source from a 2-D grid of cells."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

from ._fmt import fmt_num


@dataclass
class TableSpec:
    cells: Sequence[Sequence[Any]]
    bordered: bool = True
    caption: str = "table title"
    label: str = "table label"
    column_width: str = "1.35cm"
    arraystretch: float = 1
    tabcolsep: str = "0.1cm"

    def __post_init__(self):
        if not self.cells:
            raise ValueError("table needs at least one row")
        width = len(self.cells[0])
        if width < 1:
            raise ValueError("row 0 is empty")
        for i, row in enumerate(self.cells):
            if len(row) != width:
                raise ValueError(f"row {i} has {len(row)} cells, expected {width}")
        if self.arraystretch <= 0:
            raise ValueError("arraystretch must be positive")


def _cell(value: Any) -> str:
    # blank cells must still occupy their column
    if value is None or value == "":
        return " "
    return str(value)


def column_preamble(ncols: int, width: str, bordered: bool) -> str:
    col = f"p{{{width}}}<{{\\centering}}"
    if bordered:
        return "{| " + " | ".join([col] * ncols) + "| }"
    return "{" + " ".join([col] * ncols) + "}"


def table_body(spec: TableSpec) -> str:
    hline = "\\hline " if spec.bordered else ""
    lines = [hline + " & ".join(_cell(c) for c in row) + "   \\\\" for row in spec.cells]
    if spec.bordered:
        lines.append(hline)
    return "\n".join(lines) + "\n"


def generate_table(spec: TableSpec) -> str:
    """Render ``spec`` as a complete ``table`` environment."""
    ncols = len(spec.cells[0])
    return (
        "\\begin{table}\\centering\n"
        f"\\caption{{{spec.caption}}}\n"
        f"\\label{{{spec.label}}}\n"
        f"\\renewcommand{{\\arraystretch}}{{{fmt_num(spec.arraystretch)}}}\n"
        f"\\tabcolsep={spec.tabcolsep}\n"
        f"\\begin{{tabular}}{column_preamble(ncols, spec.column_width, spec.bordered)}\n"
        + table_body(spec)
        + "\\end{tabular}\n"
        "\\end{table}\n"
    )
