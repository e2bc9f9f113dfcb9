"""Corpus intake: HTML title and text extraction, tokenization, admission filters."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from html.parser import HTMLParser
from pathlib import Path
from typing import Iterable, Sequence

from .stopwords import STOPWORDS

__all__ = [
    "AdmissionReason",
    "AdmissionReport",
    "CorpusError",
    "ManifestEntry",
    "PageDocument",
    "TitleRecord",
    "admit",
    "extract_text",
    "extract_title",
    "format_timestamp",
    "load_documents",
    "parse_timestamp",
    "read_manifest",
    "stopword_ratio",
    "tokenize",
    "write_manifest",
]

DEFAULT_MIN_TERMS = 50
ENGLISH_STOPWORD_RATIO = 0.10

# Alphanumeric runs only; underscore is a separator like any other punctuation.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


class CorpusError(ValueError):
    """Raised for unreadable manifests or missing corpus files."""


def collapse_whitespace(text: str) -> str:
    """Collapse any whitespace run (including NBSP) to a single space and trim."""
    return " ".join(text.split())


def tokenize(text: str) -> tuple[str, ...]:
    """Lowercase terms split on runs of non-alphanumeric characters; order and duplicates kept."""
    return tuple(_TOKEN_RE.findall(text.lower()))


def parse_timestamp(value: str) -> datetime:
    """Parse an ISO-8601 timestamp ('Z' accepted) to aware UTC at second precision."""
    v = value.strip()
    if v.endswith(("Z", "z")):
        v = v[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(v)
    except ValueError as exc:
        raise CorpusError(f"bad timestamp {value!r}: {exc}") from exc
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).replace(microsecond=0)


def format_timestamp(dt: datetime) -> str:
    """Render an aware datetime as ISO-8601 UTC with a Z suffix, second precision."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class TitleRecord:
    """A page title in display form plus its tokenized terms."""

    raw: str
    terms: tuple[str, ...]
    char_count: int

    @classmethod
    def from_raw(cls, raw: str) -> "TitleRecord":
        collapsed = collapse_whitespace(raw)
        return cls(raw=collapsed, terms=tokenize(collapsed), char_count=len(collapsed))


class _TitleParser(HTMLParser):
    """Collects the inner text of the first <title> element anywhere in the document."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._in_title = False
        self._done = False
        self.pieces: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag == "title" and not self._done:
            self._in_title = True

    def handle_endtag(self, tag: str) -> None:
        if tag == "title" and self._in_title:
            self._in_title = False
            self._done = True

    def handle_data(self, data: str) -> None:
        if self._in_title:
            self.pieces.append(data)


class _TextParser(HTMLParser):
    """Collects character data outside script/style bodies and comments."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self._skip_depth = 0
        self.pieces: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        if tag in ("script", "style"):
            self._skip_depth += 1

    def handle_endtag(self, tag: str) -> None:
        if tag in ("script", "style") and self._skip_depth:
            self._skip_depth -= 1

    def handle_data(self, data: str) -> None:
        if not self._skip_depth:
            self.pieces.append(data)


def _decode(raw_html: bytes | str) -> str:
    if isinstance(raw_html, bytes):
        return raw_html.decode("utf-8", errors="replace")
    return raw_html


def extract_title(raw_html: bytes | str) -> TitleRecord | None:
    """First <title> inner text, entities decoded and whitespace collapsed; None when absent.

    Malformed markup degrades to an absent title instead of raising. Markup nested
    inside <title> stays literal text (RCDATA), matching how browsers treat it.
    """
    parser = _TitleParser()
    try:
        parser.feed(_decode(raw_html))
        parser.close()
    except Exception:
        return None
    raw = collapse_whitespace("".join(parser.pieces))
    if not raw:
        return None
    return TitleRecord.from_raw(raw)


def extract_text(raw_html: bytes | str) -> str:
    """Visible text with tags, script/style bodies, and comments removed; entities decoded.

    Tag boundaries act as whitespace and the result is whitespace-collapsed.
    """
    parser = _TextParser()
    try:
        parser.feed(_decode(raw_html))
        parser.close()
    except Exception:
        pass  # malformed markup degrades to whatever was collected
    return collapse_whitespace(" ".join(parser.pieces))


@dataclass(frozen=True)
class PageDocument:
    """One fetched page: identity, raw bytes, extracted title, and tokenized body terms."""

    uri: str
    fetched_at: datetime
    raw_html: bytes
    title: TitleRecord | None
    terms: tuple[str, ...]

    @classmethod
    def from_html(cls, uri: str, fetched_at: datetime, raw_html: bytes) -> "PageDocument":
        return cls(
            uri=uri,
            fetched_at=fetched_at.astimezone(timezone.utc).replace(microsecond=0),
            raw_html=raw_html,
            title=extract_title(raw_html),
            terms=tokenize(extract_text(raw_html)),
        )


class AdmissionReason(str, Enum):
    """Why a page was rejected or flagged during intake."""

    TOO_SHORT = "TooShort"
    NOT_ENGLISH = "NotEnglish"
    NO_TITLE = "NoTitle-warning"


@dataclass(frozen=True)
class AdmissionReport:
    """Outcome of the intake filters; kept iff neither rejection reason is present."""

    kept: bool
    reasons: tuple[AdmissionReason, ...]


def stopword_ratio(terms: Sequence[str], stopwords: frozenset[str] = STOPWORDS) -> float:
    """Fraction of tokens found in the bundled English stopword list; 0 for no tokens."""
    if not terms:
        return 0.0
    return sum(1 for t in terms if t in stopwords) / len(terms)


def admit(
    doc: PageDocument,
    min_terms: int = DEFAULT_MIN_TERMS,
    english_ratio: float = ENGLISH_STOPWORD_RATIO,
) -> AdmissionReport:
    """Apply the intake filters: length, English-ness, and a title-presence warning.

    A missing title never rejects on its own; it is recorded as a warning.
    """
    reasons: list[AdmissionReason] = []
    if len(doc.terms) < min_terms:
        reasons.append(AdmissionReason.TOO_SHORT)
    if stopword_ratio(doc.terms) < english_ratio:
        reasons.append(AdmissionReason.NOT_ENGLISH)
    if doc.title is None or not doc.title.terms:
        reasons.append(AdmissionReason.NO_TITLE)
    kept = AdmissionReason.TOO_SHORT not in reasons and AdmissionReason.NOT_ENGLISH not in reasons
    return AdmissionReport(kept=kept, reasons=tuple(reasons))


@dataclass(frozen=True)
class ManifestEntry:
    """One line of an ingestion manifest."""

    id: str
    uri: str
    fetched_at: datetime
    path: str


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    """Read a JSON-lines manifest ({"id", "uri", "fetched_at", "path"} per line)."""
    manifest_path = Path(path)
    try:
        lines = manifest_path.read_text("utf-8").splitlines()
    except OSError as exc:
        raise CorpusError(f"cannot read manifest {manifest_path}: {exc}") from exc
    entries: list[ManifestEntry] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{manifest_path}:{lineno}: malformed manifest line: {exc}") from exc
        if not isinstance(record, dict):
            raise CorpusError(f"{manifest_path}:{lineno}: manifest line is not an object")
        missing = [k for k in ("id", "uri", "fetched_at", "path") if k not in record]
        if missing:
            raise CorpusError(f"{manifest_path}:{lineno}: manifest line missing {missing}")
        entries.append(
            ManifestEntry(
                id=str(record["id"]),
                uri=str(record["uri"]),
                fetched_at=parse_timestamp(str(record["fetched_at"])),
                path=str(record["path"]),
            )
        )
    return entries


def write_manifest(entries: Iterable[ManifestEntry], path: str | Path) -> None:
    """Write entries as JSON lines in the given order."""
    out = []
    for e in entries:
        out.append(
            json.dumps(
                {"id": e.id, "uri": e.uri, "fetched_at": format_timestamp(e.fetched_at), "path": e.path},
                ensure_ascii=False,
                sort_keys=True,
            )
        )
    Path(path).write_text("\n".join(out) + ("\n" if out else ""), "utf-8")


def load_documents(manifest_path: str | Path) -> list[tuple[ManifestEntry, PageDocument]]:
    """Load every manifest entry's HTML (paths resolved against the manifest directory)."""
    manifest = Path(manifest_path)
    base = manifest.parent
    loaded: list[tuple[ManifestEntry, PageDocument]] = []
    for entry in read_manifest(manifest):
        page_path = Path(entry.path)
        if not page_path.is_absolute():
            page_path = base / page_path
        try:
            raw = page_path.read_bytes()
        except OSError as exc:
            raise CorpusError(f"cannot read page {page_path} for id {entry.id!r}: {exc}") from exc
        loaded.append((entry, PageDocument.from_html(entry.uri, entry.fetched_at, raw)))
    return loaded
