"""Lexical signatures: the top-k TF-IDF terms that best identify a page."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Mapping, Protocol, runtime_checkable

from .corpus import PageDocument, format_timestamp, parse_timestamp
from .stopwords import STOPWORDS

__all__ = [
    "DEFAULT_LS_SIZES",
    "DfProvider",
    "LexicalSignature",
    "ProviderError",
    "generate_ls",
    "term_frequency",
    "tfidf_score",
]

DEFAULT_LS_SIZES: tuple[int, ...] = (5, 7)


class ProviderError(RuntimeError):
    """A document-frequency provider failed while scoring terms."""


@runtime_checkable
class DfProvider(Protocol):
    """Source of corpus statistics for IDF: document frequency and corpus size."""

    def df(self, term: str) -> int: ...

    def index_size(self) -> int: ...


def term_frequency(doc: PageDocument, term: str) -> int:
    """Occurrences of a term in the document's term sequence."""
    return doc.terms.count(term)


def tfidf_score(tf: int, df: int, index_size: float) -> float:
    """tf x ln(index_size / df), with df clamped into [1, index_size].

    Zero when tf is 0 or the term appears in every document; never negative.
    """
    if index_size < 1:
        raise ValueError(f"index size must be at least 1, got {index_size}")
    if tf < 0 or df < 0:
        raise ValueError("tf and df must be non-negative")
    if tf == 0:
        return 0.0
    clamped = min(max(df, 1), index_size)
    return tf * math.log(index_size / clamped)


@dataclass(frozen=True)
class LexicalSignature:
    """Up to k distinct terms of a page, strongest first, with their scores."""

    uri: str
    k: int
    terms: tuple[str, ...]
    scores: tuple[float, ...]
    generated_at: datetime

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "uri": self.uri,
            "k": self.k,
            "terms": list(self.terms),
            "scores": list(self.scores),
            "generated_at": format_timestamp(self.generated_at),
        }

    @classmethod
    def from_json_dict(cls, data: Mapping[str, Any]) -> "LexicalSignature":
        return cls(
            uri=str(data["uri"]),
            k=int(data["k"]),
            terms=tuple(str(t) for t in data["terms"]),
            scores=tuple(float(s) for s in data["scores"]),
            generated_at=parse_timestamp(str(data["generated_at"])),
        )


def generate_ls(
    doc: PageDocument,
    provider: DfProvider,
    k: int,
    stopwords: frozenset[str] = STOPWORDS,
    generated_at: datetime | None = None,
) -> LexicalSignature:
    """Score every distinct non-stopword term and keep the top k.

    Ties break toward the higher term frequency, then lexicographic term order.
    Returns fewer than k terms when the document has fewer scorable terms.
    """
    if k < 1:
        raise ValueError(f"signature size must be at least 1, got {k}")
    counts = Counter(doc.terms)
    try:
        n = provider.index_size()
    except Exception as exc:
        raise ProviderError(f"index_size lookup failed: {exc}") from exc
    scored: list[tuple[str, int, float]] = []
    for term in sorted(counts):
        if term in stopwords:
            continue
        try:
            df = provider.df(term)
        except Exception as exc:
            raise ProviderError(f"df lookup failed for {term!r}: {exc}") from exc
        scored.append((term, counts[term], tfidf_score(counts[term], df, n)))
    scored.sort(key=lambda row: (-row[2], -row[1], row[0]))
    top = scored[:k]
    return LexicalSignature(
        uri=doc.uri,
        k=k,
        terms=tuple(term for term, _, _ in top),
        scores=tuple(score for _, _, score in top),
        generated_at=generated_at or datetime.now(timezone.utc).replace(microsecond=0),
    )
