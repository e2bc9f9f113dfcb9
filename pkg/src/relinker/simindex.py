"""A small deterministic inverted index: local stand-in for a web search backend."""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .corpus import PageDocument
from .rediscovery import DEFAULT_MAX_RESULTS, ResultEntry, ResultList, canonicalize_uri
from .stopwords import STOPWORDS

__all__ = [
    "EmptyCorpusError",
    "EmptyQueryError",
    "IndexFormatError",
    "IndexedDoc",
    "InvertedIndex",
    "build_index",
    "load_index",
    "save_index",
]

log = logging.getLogger(__name__)

INDEX_FORMAT_VERSION = 1


class EmptyCorpusError(ValueError):
    """Building an index requires at least one document."""


class EmptyQueryError(ValueError):
    """No query terms were left after stopword removal."""


class IndexFormatError(ValueError):
    """The index file is not something this version can read."""


@dataclass(frozen=True)
class IndexedDoc:
    """Per-document bookkeeping; doc_id equals its position in the doc table."""

    doc_id: int
    uri: str
    term_count: int


class InvertedIndex:
    """Postings over a corpus; doubles as SearchBackend and DfProvider.

    Doc ids are assigned in canonical-URI order, so the same corpus always
    produces the same index no matter how its documents were ordered.
    """

    def __init__(
        self,
        postings: dict[str, tuple[tuple[int, int], ...]],
        docs: tuple[IndexedDoc, ...],
        index_size_estimate: int | None = None,
    ) -> None:
        self.postings = postings
        self.docs = docs
        self.index_size_estimate = index_size_estimate

    @property
    def doc_count(self) -> int:
        return len(self.docs)

    def df(self, term: str) -> int:
        """Number of indexed documents containing the term."""
        return len(self.postings.get(term, ()))

    def index_size(self) -> int:
        """Corpus size used for IDF; the configured estimate wins when present."""
        return self.index_size_estimate if self.index_size_estimate is not None else self.doc_count

    def stats(self) -> dict[str, int | None]:
        return {
            "documents": self.doc_count,
            "distinct_terms": len(self.postings),
            "postings": sum(len(p) for p in self.postings.values()),
            "index_size_estimate": self.index_size_estimate,
        }

    def search(
        self,
        query_terms: Iterable[str],
        max_results: int = DEFAULT_MAX_RESULTS,
        mode: str = "or",
        stopwords: frozenset[str] = STOPWORDS,
    ) -> ResultList:
        """Rank documents for a query by summed tf x ln(N/df); ties go to the lower doc id.

        Stopwords are removed (and duplicates collapsed) before matching; a query
        with nothing left is an error. OR mode accepts any matching term, AND mode
        keeps only documents containing every remaining query term.
        """
        if mode not in ("or", "and"):
            raise ValueError(f"unknown search mode {mode!r}")
        if max_results < 1:
            raise ValueError(f"max_results must be at least 1, got {max_results}")
        original = tuple(query_terms)
        terms: list[str] = []
        for term in original:
            if term not in stopwords and term not in terms:
                terms.append(term)
        if not terms:
            raise EmptyQueryError(f"query {original!r} has no terms after stopword removal")
        n = self.index_size()
        scores: dict[int, float] = {}
        matches: dict[int, int] = {}
        for term in terms:
            posting = self.postings.get(term, ())
            if not posting:
                continue
            df = len(posting)
            weight = math.log(n / min(max(df, 1), n))
            for doc_id, tf in posting:
                scores[doc_id] = scores.get(doc_id, 0.0) + tf * weight
                matches[doc_id] = matches.get(doc_id, 0) + 1
        if mode == "and":
            candidates = [doc_id for doc_id, hit in matches.items() if hit == len(terms)]
        else:
            candidates = list(scores)
        candidates.sort(key=lambda doc_id: (-scores[doc_id], doc_id))
        entries = tuple(
            ResultEntry(rank=position, uri=self.docs[doc_id].uri)
            for position, doc_id in enumerate(candidates[:max_results], start=1)
        )
        return ResultList(query=original, entries=entries)


def build_index(docs: Iterable[PageDocument], index_size_estimate: int | None = None) -> InvertedIndex:
    """Index documents under their canonical URIs; later duplicates replace earlier ones."""
    latest: dict[str, PageDocument] = {}
    for doc in docs:
        curi = canonicalize_uri(doc.uri)
        if curi in latest:
            log.warning("duplicate canonical URI %s: keeping the later document", curi)
        latest[curi] = doc
    if not latest:
        raise EmptyCorpusError("no documents to index")
    table: list[IndexedDoc] = []
    postings: dict[str, list[tuple[int, int]]] = {}
    for doc_id, curi in enumerate(sorted(latest)):
        doc = latest[curi]
        table.append(IndexedDoc(doc_id=doc_id, uri=curi, term_count=len(doc.terms)))
        for term, tf in sorted(Counter(doc.terms).items()):
            postings.setdefault(term, []).append((doc_id, tf))
    frozen = {term: tuple(rows) for term, rows in sorted(postings.items())}
    return InvertedIndex(postings=frozen, docs=tuple(table), index_size_estimate=index_size_estimate)


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Write the whole index as one JSON file."""
    payload = {
        "format_version": INDEX_FORMAT_VERSION,
        "index_size_estimate": index.index_size_estimate,
        "docs": [[d.doc_id, d.uri, d.term_count] for d in index.docs],
        "postings": {term: [list(row) for row in rows] for term, rows in index.postings.items()},
    }
    text = json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    Path(path).write_text(text + "\n", "utf-8")


def load_index(path: str | Path) -> InvertedIndex:
    """Read an index file back; search results are identical to the saved index's."""
    index_path = Path(path)
    try:
        payload = json.loads(index_path.read_text("utf-8"))
    except OSError as exc:
        raise IndexFormatError(f"cannot read index {index_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise IndexFormatError(f"index {index_path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format_version") != INDEX_FORMAT_VERSION:
        raise IndexFormatError(f"index {index_path} has an unsupported format version")
    docs = tuple(
        IndexedDoc(doc_id=int(row[0]), uri=str(row[1]), term_count=int(row[2]))
        for row in payload["docs"]
    )
    postings = {
        str(term): tuple((int(doc_id), int(tf)) for doc_id, tf in rows)
        for term, rows in payload["postings"].items()
    }
    estimate = payload.get("index_size_estimate")
    return InvertedIndex(
        postings=postings,
        docs=docs,
        index_size_estimate=int(estimate) if estimate is not None else None,
    )
