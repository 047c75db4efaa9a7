"""Number formatting shared by the LaTeX and SVG writers."""

from __future__ import annotations

COORD_DECIMALS = 10


def fmt_num(value: float, decimals: int = COORD_DECIMALS) -> str:
    """Shortest plain decimal for ``value`` after rounding off float noise.

    ``0.17 * 0.4`` prints as ``0.068`` and ``1.0`` as ``1``; no exponent form.
    """
    text = f"{round(float(value), decimals):.{decimals}f}".rstrip("0").rstrip(".")
    return "0" if text in ("-0", "") else text
