"""Corpus-to-chip-map pipeline: PDFs in, chip map plus overpic labels out."""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

from .bib import BibDatabase, parse_bib
from .chipmap import ChipStyle, chip_map, render_chip_map, sides_to_json
from .overlay import CoorText, generate_overpic
from .pdfrefs import PaperRecord, list_corpus, normalize_text, process_directory

logger = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    pdf_dir: Path
    out_dir: Path
    bib_path: Path | None = None
    style: ChipStyle = field(default_factory=ChipStyle)
    width_frac: float = 0.4
    jobs: int = 1


def short_name_from_label(label: str) -> str:
    m = re.search(r"[A-Za-z]+$", label)
    return m.group(0).capitalize() if m else label


def title_label(record: PaperRecord, index: int) -> tuple[str, str]:
    """Citation key and display name made up from a record without a bib match."""
    surname = ""
    if record.authors:
        surname = re.sub(r"[^a-z]", "", record.authors[0].split()[-1].lower())
    words = record.title.split()
    first = re.sub(r"[^a-z0-9]", "", words[0].lower()) if words else ""
    key = (surname + first) or f"paper{index}"
    head = record.title.split(":", 1)[0].strip()
    name = head if ":" in record.title and len(head.split()) <= 3 else (words[0] if words else key)
    return key, name


def resolve_labels(records: list[PaperRecord], bib: BibDatabase | None) -> dict[int, str]:
    """``\\cite{key}: Name`` text per 1-based record index."""
    by_title = {}
    if bib is not None:
        for e in bib.entries:
            t = e.fields.get("title")
            if t:
                by_title.setdefault(normalize_text(t.replace("{", "").replace("}", "")), e.citation_label)
    out = {}
    for i, rec in enumerate(records, 1):
        key = by_title.get(normalize_text(rec.title))
        if key:
            name = short_name_from_label(key)
        else:
            key, name = title_label(rec, i)
        out[i] = f"\\cite{{{key}}}: {name}"
    return out


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Analyse the corpus and write every artifact into ``cfg.out_dir``.

    Returns the manifest, which is also written as ``manifest.json``.
    """
    if not list_corpus(cfg.pdf_dir):
        raise PipelineError(f"{cfg.pdf_dir}: corpus is empty (no .pdf or .spans.jsonl files)")
    result = process_directory(cfg.pdf_dir, jobs=cfg.jobs)
    if not result.records or (result.errors and len(result.records) < 2):
        raise PipelineError(f"too few papers could be analysed ({len(result.records)}); "
                            f"failures: {result.errors}")
    bib = None
    if cfg.bib_path is not None:
        bib = parse_bib(Path(cfg.bib_path).read_text(encoding="utf-8"), str(cfg.bib_path))

    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cite_list = [[i + 1, [j + 1 for j in hits]] for i, hits in enumerate(result.cites)]
    layout = chip_map(cite_list, cfg.style)
    svg_path, sides = render_chip_map(layout, cfg.style, out / "map.svg", png=True)
    labels = resolve_labels(result.records, bib)
    items = [CoorText(p[0], p[1], labels[ni], rot) for side in sides.values() for ni, p, rot in side]
    overlay = generate_overpic("map.png", cfg.width_frac, items)

    files = {
        "refs": "refs.json",
        "cites": "cites.json",
        "labels": "labels.json",
        "map_svg": "map.svg",
        "map_png": "map.png",
        "sides": "map.sides.json",
        "overlay": "overlay.tex",
    }
    _write_json(out / files["refs"], result.rows())
    _write_json(out / files["cites"], cite_list)
    _write_json(out / files["labels"], {str(k): v for k, v in labels.items()})
    _write_json(out / files["sides"], sides_to_json(sides))
    (out / files["overlay"]).write_text(overlay, encoding="utf-8")
    manifest = {
        "papers": len(result.records),
        "citations": sum(len(c) for _, c in cite_list),
        "errors": result.errors,
        "files": files,
    }
    _write_json(out / "manifest.json", manifest)
    return manifest
