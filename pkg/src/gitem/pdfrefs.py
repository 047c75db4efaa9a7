"""Title/author detection and cross-citation discovery over a paper corpus.

Text comes either from real PDFs (via PyMuPDF) or from span fixtures: JSON
lines of ``{"page", "size", "text", "bbox"}``, one text run per line.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

FIXTURE_SUFFIX = ".spans.jsonl"
SIZE_TOL = 0.05

_SENTENCE_PUNCT = set(".,:;!?")
_SUPERSCRIPT_MARKS = "*∗†‡§¶⋆★#0123456789¹²³⁰⁴⁵⁶⁷⁸⁹"
_SPLIT_RE = re.compile(
    r"\s*,\s*|\s+and\s+|\s*&\s*|[" + re.escape(_SUPERSCRIPT_MARKS) + r"]+"
)


class ExtractionError(RuntimeError):
    pass


class FixtureError(ExtractionError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.line = line


@dataclass(frozen=True)
class TextSpan:
    page: int
    text: str
    font_size: float
    bbox: tuple[float, float, float, float]

    def __post_init__(self):
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate bbox {self.bbox}")
        if self.font_size <= 0:
            raise ValueError(f"font size must be positive, got {self.font_size}")
        if self.page < 0:
            raise ValueError(f"negative page {self.page}")
        if not " ".join(self.text.split()):
            raise ValueError("span text is blank")

    def to_json(self) -> dict:
        return {"page": self.page, "size": self.font_size, "text": self.text, "bbox": list(self.bbox)}


@dataclass
class PaperRecord:
    title: str
    file_path: str
    authors: list[str] = field(default_factory=list)
    cited_titles: list[str] = field(default_factory=list)

    def as_row(self) -> list:
        """The ``[title, [cited titles], path, [authors]]`` row."""
        return [self.title, list(self.cited_titles), self.file_path, list(self.authors)]


# -- extraction ---------------------------------------------------------------

def read_fixture(path: str | Path) -> list[TextSpan]:
    spans = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                bbox = tuple(float(v) for v in rec["bbox"])
                if len(bbox) != 4:
                    raise ValueError("bbox needs 4 numbers")
                spans.append(TextSpan(int(rec["page"]), str(rec["text"]), float(rec["size"]), bbox))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise FixtureError(path, lineno, str(exc)) from exc
    return spans


def write_fixture(spans: Iterable[TextSpan], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in spans:
            fh.write(json.dumps(s.to_json(), ensure_ascii=False) + "\n")


def _read_pdf(path: Path) -> list[TextSpan]:
    try:
        import pymupdf
    except ImportError as exc:  # pragma: no cover - depends on install
        raise ExtractionError(f"{path}: reading PDFs needs PyMuPDF (pip install 'artifact[pdf]')") from exc
    try:
        doc = pymupdf.open(path)
    except Exception as exc:
        raise ExtractionError(f"{path}: cannot open PDF ({exc})") from exc
    with doc:
        if doc.needs_pass:
            raise ExtractionError(f"{path}: PDF is encrypted")
        spans = []
        for pno, page in enumerate(doc):
            for block in page.get_text("dict")["blocks"]:
                for line in block.get("lines", ()):
                    for s in line["spans"]:
                        text = " ".join(s["text"].split())
                        x0, y0, x1, y1 = s["bbox"]
                        if not text or s["size"] <= 0 or x1 <= x0 or y1 <= y0:
                            continue
                        spans.append(TextSpan(pno, text, round(float(s["size"]), 2),
                                              (float(x0), float(y0), float(x1), float(y1))))
    return spans


def extract_spans(source: str | Path) -> list[TextSpan]:
    """Text runs of a PDF or span fixture, in page order."""
    path = Path(source)
    if not path.is_file():
        raise ExtractionError(f"{path}: no such file")
    if path.name.endswith(".jsonl"):
        return read_fixture(path)
    return _read_pdf(path)


# -- heuristics ---------------------------------------------------------------

def sort_spans(spans: Sequence[TextSpan]) -> list[TextSpan]:
    """Largest font first; ties in reading order (page, y0, x0)."""
    return sorted(spans, key=lambda s: (-s.font_size, s.page, s.bbox[1], s.bbox[0]))


def _name_token_ok(tok: str) -> bool:
    if any(ch.isdigit() for ch in tok):
        return False
    # initial like "P."
    if len(tok) == 2 and tok[0].isupper() and tok[0].isalpha() and tok[1] == ".":
        return True
    if any(ch in _SENTENCE_PUNCT for ch in tok):
        return False
    parts = tok.split("-")
    if all(p.isalpha() and len(p) >= 2 and p.isupper() for p in parts):
        return True
    return all(p.isalpha() and p[0].isupper() and (len(p) == 1 or p[1:].islower()) and len(p) >= 2
               for p in parts)


def is_person_name(candidate: str) -> bool:
    """Whether ``candidate`` looks like a personal name.

    Two to four tokens, each Capitalized, an initial such as ``P.``, or
    upper-case of length two or more. Digits and sentence punctuation reject.
    """
    tokens = candidate.split()
    if not 2 <= len(tokens) <= 4:
        return False
    return all(_name_token_ok(t) for t in tokens)


def _reading_order(spans):
    return sorted(spans, key=lambda s: (s.bbox[1], s.bbox[0]))


def detect_title_authors(spans: Sequence[TextSpan]) -> tuple[str, list[str]]:
    """Guess a paper's title and author list from its first page.

    The title is every first-page span at the largest first-page font size,
    joined in reading order. Authors are read from the spans after the title up
    to an "abstract" heading; only spans at the size of the first name-bearing
    span count, which keeps smaller affiliation lines out.
    """
    first = [s for s in spans if s.page == 0]
    if not first:
        raise ExtractionError("no text on first page")
    top = max(s.font_size for s in first)
    ordered = _reading_order(first)
    title_spans = [s for s in ordered if abs(s.font_size - top) <= SIZE_TOL]
    title = " ".join(" ".join(s.text.split()) for s in title_spans)

    last_title = ordered.index(title_spans[-1])
    authors: list[str] = []
    author_size = None
    for s in ordered[last_title + 1:]:
        if abs(s.font_size - top) <= SIZE_TOL:
            continue
        if "abstract" in s.text.lower():
            break
        if author_size is not None and abs(s.font_size - author_size) > SIZE_TOL:
            continue
        names = [c for c in (p.strip() for p in _SPLIT_RE.split(s.text)) if is_person_name(c)]
        if names:
            author_size = s.font_size
            authors.extend(n for n in names if n not in authors)
    return title, authors


# -- corpus -------------------------------------------------------------------

def normalize_text(text: str) -> str:
    """Lowercase, undo line-break hyphenation, drop punctuation, squeeze spaces."""
    text = re.sub(r"(\w)-\s+(\w)", r"\1\2", text)
    text = re.sub(r"[^\w\s]|_", " ", text.lower())
    return " ".join(text.split())


def full_text(spans: Sequence[TextSpan]) -> str:
    return " ".join(s.text for s in spans)


@dataclass
class CorpusResult:
    records: list[PaperRecord]
    cites: list[list[int]]
    errors: dict[str, str] = field(default_factory=dict)

    def rows(self) -> list[list]:
        return [r.as_row() for r in self.records]


def cross_reference(corpus: Sequence[tuple[Sequence[TextSpan], str]]) -> list[PaperRecord]:
    """Build one record per paper listing which other corpus papers it cites.

    Paper A cites paper B when B's normalized title occurs in A's normalized
    full text. A paper is never matched against itself.
    """
    return _cross_reference(corpus)[0]


def _cross_reference(corpus):
    if not corpus:
        raise ValueError("corpus is empty")
    heads = [(detect_title_authors(spans), path) for spans, path in corpus]
    texts = [" " + normalize_text(full_text(spans)) + " " for spans, _ in corpus]
    keys = [" " + normalize_text(title) + " " for (title, _), _ in heads]
    records, cites = [], []
    for i, ((title, authors), path) in enumerate(heads):
        hits = [j for j in range(len(heads)) if j != i and keys[j].strip() and keys[j] in texts[i]]
        records.append(PaperRecord(title, path, authors, [heads[j][0][0] for j in hits]))
        cites.append(hits)
    return records, cites


def list_corpus(directory: str | Path) -> list[Path]:
    """PDFs and span fixtures in ``directory``, sorted by file name."""
    d = Path(directory)
    if not d.is_dir():
        raise ExtractionError(f"{d}: not a directory")
    return sorted(p for p in d.iterdir()
                  if p.is_file() and (p.suffix.lower() == ".pdf" or p.name.endswith(FIXTURE_SUFFIX)))


def _analyze(path: Path):
    try:
        spans = extract_spans(path)
        detect_title_authors(spans)
        return spans, None
    except (ExtractionError, ValueError) as exc:
        return None, str(exc)


def process_directory(directory: str | Path, jobs: int = 1) -> CorpusResult:
    """Extract every paper in ``directory`` and cross-reference them.

    Files that fail are reported in ``errors`` and left out; the rest are still
    processed. Extraction may run in parallel, results merge in file order.
    """
    paths = list_corpus(directory)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_analyze, paths))
    else:
        results = [_analyze(p) for p in paths]
    corpus, errors = [], {}
    for path, (spans, err) in zip(paths, results):
        if err is not None:
            logger.error("%s", err)
            errors[str(path)] = err
        else:
            corpus.append((spans, str(path)))
    if not corpus:
        return CorpusResult([], [], errors)
    records, cites = _cross_reference(corpus)
    return CorpusResult(records, cites, errors)
