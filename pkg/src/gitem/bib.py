"""BibTeX parsing into an integer-indexed entry database.

Entries are keyed by their 1-based position in the source file rather than by
citation label or title, since neither of those is guaranteed unique.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

logger = logging.getLogger(__name__)

SKIPPED_TYPES = frozenset({"string", "comment", "preamble"})


class BibParseError(ValueError):
    """Raised for a malformed entry; ``line`` is where the entry starts."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class BibEntry:
    index: int
    entry_type: str
    citation_label: str
    fields: dict[str, str] = field(default_factory=dict)


@dataclass
class BibDatabase:
    entries: list[BibEntry] = field(default_factory=list)
    source_path: str | None = None
    warnings: list[str] = field(default_factory=list, compare=False)

    def __len__(self) -> int:
        return len(self.entries)

    def by_label(self, label: str) -> list[BibEntry]:
        """All entries carrying ``label``; duplicates are legal."""
        return [e for e in self.entries if e.citation_label == label]


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def line_at(self, pos: int) -> int:
        return self.text.count("\n", 0, pos) + 1

    def eof(self) -> bool:
        return self.pos >= len(self.text)

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def read_while(self, pred) -> str:
        start = self.pos
        while self.pos < len(self.text) and pred(self.text[self.pos]):
            self.pos += 1
        return self.text[start:self.pos]

    def read_braced(self) -> str | None:
        """Consume ``{...}`` starting at the cursor; return the inner text."""
        depth = 0
        for i in range(self.pos, len(self.text)):
            ch = self.text[i]
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
                if depth == 0:
                    inner = self.text[self.pos + 1:i]
                    self.pos = i + 1
                    return inner
        return None

    def read_quoted(self) -> str | None:
        """Consume ``"..."``; quotes nested inside braces do not terminate."""
        depth = 0
        for i in range(self.pos + 1, len(self.text)):
            ch = self.text[i]
            if ch == "{":
                depth += 1
            elif ch == "}":
                depth -= 1
            elif ch == '"' and depth == 0:
                inner = self.text[self.pos + 1:i]
                self.pos = i + 1
                return inner
        return None


def _is_ident(ch: str) -> bool:
    return not ch.isspace() and ch not in '{}(),="#@%'


def parse_bib(text: str, source_path: str | None = None) -> BibDatabase:
    """Parse BibTeX source text.

    Every ``@type{label, name = value, ...}`` block becomes one entry, numbered
    from 1 in file order. ``@string``, ``@comment`` and ``@preamble`` blocks are
    skipped and noted in ``warnings``. Field values keep their inner LaTeX
    verbatim; only the outermost braces or quotes are removed.
    """
    db = BibDatabase(source_path=source_path)
    sc = _Scanner(text)
    seen_labels: set[str] = set()

    while True:
        at = text.find("@", sc.pos)
        if at < 0:
            break
        sc.pos = at + 1
        start_line = sc.line_at(at)
        sc.skip_ws()
        entry_type = sc.read_while(lambda c: c.isalnum() or c in "_-").lower()
        sc.skip_ws()
        opener = sc.peek()
        if not entry_type or opener not in "{(":
            # stray '@' in free text between entries
            continue
        closer = "}" if opener == "{" else ")"

        if entry_type in SKIPPED_TYPES:
            body = _skip_block(sc, opener, closer)
            if body is None:
                raise BibParseError(f"unterminated @{entry_type} block", start_line)
            msg = f"line {start_line}: skipped @{entry_type} block"
            db.warnings.append(msg)
            logger.warning(msg)
            continue

        sc.pos += 1
        sc.skip_ws()
        label = sc.read_while(lambda c: c not in ",}) \t\r\n")
        if not label:
            raise BibParseError(f"@{entry_type} entry has no citation label", start_line)
        fields = _parse_fields(sc, closer, start_line, db.warnings)

        if label in seen_labels:
            msg = f"line {start_line}: duplicate citation label {label!r}"
            db.warnings.append(msg)
            logger.warning(msg)
        seen_labels.add(label)
        db.entries.append(
            BibEntry(index=len(db.entries) + 1, entry_type=entry_type,
                     citation_label=label, fields=fields)
        )
    return db


def _skip_block(sc: _Scanner, opener: str, closer: str) -> str | None:
    depth = 0
    for i in range(sc.pos, len(sc.text)):
        ch = sc.text[i]
        if ch == opener or (opener == "(" and ch == "{"):
            depth += 1
        elif ch == closer or (opener == "(" and ch == "}"):
            depth -= 1
            if depth == 0:
                body = sc.text[sc.pos + 1:i]
                sc.pos = i + 1
                return body
    return None


def _parse_fields(sc: _Scanner, closer: str, start_line: int, warnings: list[str]) -> dict[str, str]:
    fields: dict[str, str] = {}
    while True:
        sc.skip_ws()
        ch = sc.peek()
        if ch == "":
            raise BibParseError("unbalanced braces: entry not closed before end of input", start_line)
        if ch == ",":
            sc.pos += 1
            continue
        if ch == closer:
            sc.pos += 1
            return fields
        name = sc.read_while(_is_ident).lower()
        if not name:
            raise BibParseError(f"unexpected character {ch!r} in field list", start_line)
        sc.skip_ws()
        if sc.peek() != "=":
            raise BibParseError(f"expected '=' after field {name!r}", start_line)
        sc.pos += 1
        value = _parse_value(sc, start_line)
        if name in fields:
            msg = f"line {start_line}: duplicate field {name!r} ignored"
            warnings.append(msg)
            logger.warning(msg)
            continue
        fields[name] = value


def _parse_value(sc: _Scanner, start_line: int) -> str:
    parts: list[str] = []
    while True:
        sc.skip_ws()
        ch = sc.peek()
        if ch == "{":
            inner = sc.read_braced()
            if inner is None:
                raise BibParseError("unbalanced braces: field value not closed before end of input", start_line)
            parts.append(inner)
        elif ch == '"':
            inner = sc.read_quoted()
            if inner is None:
                raise BibParseError("unterminated quoted field value", start_line)
            parts.append(inner)
        elif ch and _is_ident(ch):
            # bare number or macro name, kept as written
            parts.append(sc.read_while(_is_ident))
        elif ch == "":
            raise BibParseError("unbalanced braces: entry not closed before end of input", start_line)
        else:
            raise BibParseError(f"unexpected character {ch!r} in field value", start_line)
        sc.skip_ws()
        if sc.peek() == "#":
            sc.pos += 1
            continue
        return " # ".join(parts) if len(parts) > 1 else parts[0]


def serialize_bib(db: BibDatabase) -> str:
    """Write ``db`` back out as BibTeX with braced values."""
    chunks = []
    for e in db.entries:
        lines = [f"@{e.entry_type}{{{e.citation_label},"]
        lines += [f"  {k} = {{{v}}}," for k, v in e.fields.items()]
        lines.append("}")
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def export_records(db: BibDatabase) -> dict[int, dict[str, str]]:
    """Flatten ``db`` into ``{index: {"type": ..., <field>: <value>, ...}}``.

    A bib field literally named ``type`` would clash with the entry type, so it
    is exported as ``type_field``.
    """
    out: dict[int, dict[str, str]] = {}
    for e in db.entries:
        rec = {"type": e.entry_type}
        for k, v in e.fields.items():
            rec["type_field" if k == "type" else k] = v
        out[e.index] = rec
    return out


def records_to_json(records: dict[int, dict[str, str]], indent: int | None = 2) -> str:
    return json.dumps({str(k): v for k, v in records.items()}, ensure_ascii=False, indent=indent)
