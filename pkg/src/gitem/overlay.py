"""Post-processing for figures: overpic label code and OCR-driven text blanking."""

from __future__ import annotations

import math
import os
import shlex
import subprocess
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._fmt import fmt_num

OCR_ENV_VAR = "GITEM_OCR_CMD"


class OcrError(RuntimeError):
    pass


@dataclass
class CoorText:
    x_frac: float
    y_frac: float
    text: str
    rotation: int = 0
    small: bool = False

    def __post_init__(self):
        if not (0 <= self.x_frac <= 1 and 0 <= self.y_frac <= 1):
            raise ValueError(f"anchor ({self.x_frac}, {self.y_frac}) outside the unit square")
        if self.rotation not in (0, -90):
            raise ValueError(f"rotation must be 0 or -90, got {self.rotation}")


@dataclass(frozen=True)
class PixelBox:
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if min(self.x0, self.y0) < 0 or not (self.x0 < self.x1 and self.y0 < self.y1):
            raise ValueError(f"invalid pixel box {self}")


def put_line(item: CoorText, width_frac: float) -> str:
    body = item.text if item.rotation == 0 else f"\\rotatebox{{-90}}{{{item.text}}}"
    if item.small:
        body = "\\small " + body
    x = fmt_num(item.x_frac * width_frac)
    y = fmt_num(item.y_frac * width_frac)
    return f"\\put({x}\\textwidth, {y}\\textwidth){{{body}}}"


def generate_overpic(image_path: str, width_frac: float, items: Sequence[CoorText]) -> str:
    """``overpic`` block placing each text at its anchor over the image.

    Anchors are fractions of the image width; ``\\put`` coordinates are those
    fractions scaled by ``width_frac`` so they read in units of ``\\textwidth``.
    """
    if not 0 < width_frac <= 1:
        raise ValueError("width_frac must be in (0, 1]")
    lines = [f"\\begin{{overpic}}[width={fmt_num(width_frac)}\\textwidth]{{{image_path}}}"]
    lines += [put_line(it, width_frac) for it in items]
    lines.append("\\end{overpic}")
    return "\n".join(lines) + "\n"


def blank_regions(image, boxes: Sequence[PixelBox], fill=(255, 255, 255)):
    """Paint every box with ``fill``; boxes are half-open ``[x0, x1) x [y0, y1)``.

    Accepts a PIL image or an ``(H, W[, C])`` array and returns the same kind;
    the input is not modified.
    """
    is_pil = not isinstance(image, np.ndarray)
    arr = np.array(image, copy=True)
    h, w = arr.shape[:2]
    for b in boxes:
        if b.x1 > w or b.y1 > h:
            raise ValueError(f"box {b} exceeds image bounds {w}x{h}")
    fill_val = np.asarray(fill, dtype=arr.dtype)
    if arr.ndim == 2:
        fill_val = fill_val.reshape(-1)[0]
    elif fill_val.size != arr.shape[2]:
        # RGB fill on an RGBA image keeps the alpha channel opaque
        fill_val = np.concatenate([fill_val, np.full(arr.shape[2] - fill_val.size, 255, arr.dtype)])
    for b in boxes:
        arr[b.y0:b.y1, b.x0:b.x1] = fill_val
    if is_pil:
        from PIL import Image
        out = Image.fromarray(arr)
        return out if out.mode == image.mode else out.convert(image.mode)
    return arr


def parse_ocr_output(text: str) -> list[PixelBox]:
    """Parse engine lines ``x0 y0 x1 y1 <text> <confidence>``."""
    boxes = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        try:
            if len(parts) < 5:
                raise ValueError("too few fields")
            x0, y0, x1, y1 = (float(v) for v in parts[:4])
            float(parts[-1])
            boxes.append(PixelBox(math.floor(x0), math.floor(y0), math.ceil(x1), math.ceil(y1)))
        except ValueError as exc:
            raise OcrError(f"unparseable OCR output at line {lineno}: {line!r} ({exc})") from exc
    return boxes


def detect_text_regions(image_path: str, languages: Sequence[str] = ("en",),
                        engine_cmd: str | None = None, timeout: float = 300) -> list[PixelBox]:
    """Run the external OCR engine and return its text boxes in emitted order.

    The engine is called as ``<cmd> <image_path> <lang,...>``. ``engine_cmd``
    falls back to the ``GITEM_OCR_CMD`` environment variable.
    """
    cmd = engine_cmd or os.environ.get(OCR_ENV_VAR)
    if not cmd:
        raise OcrError(f"no OCR engine configured; pass --engine-cmd or set {OCR_ENV_VAR}")
    argv = shlex.split(cmd) + [str(image_path), ",".join(languages)]
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout, check=False)
    except FileNotFoundError as exc:
        raise OcrError(f"OCR engine not found: {argv[0]!r}; check --engine-cmd or {OCR_ENV_VAR}") from exc
    if proc.returncode != 0:
        raise OcrError(f"OCR engine exited with {proc.returncode}: {proc.stderr.strip()}")
    return parse_ocr_output(proc.stdout)
