"""Rediscovering a lost page: canonical URIs, rank outcomes, queries, relevance."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Iterable, Mapping, Protocol
from urllib.parse import urlsplit, urlunsplit

from .corpus import PageDocument, TitleRecord
from .signatures import DfProvider, LexicalSignature, ProviderError, generate_ls
from .similarity import (
    DEFAULT_SHINGLE_W,
    SimilarityClass,
    classify,
    resemblance,
    shingle_set,
    term_overlap,
)

__all__ = [
    "DEFAULT_DISCOVERED_DEPTH",
    "DEFAULT_MAX_RESULTS",
    "EvaluationReport",
    "RankCategory",
    "RankRelevance",
    "ResultEntry",
    "ResultList",
    "ResultRelevance",
    "RetrievalOutcome",
    "SearchBackend",
    "Strategy",
    "UriError",
    "canonicalize_uri",
    "evaluate_corpus",
    "locate",
    "ls_query",
    "relevance",
    "title_query",
]

DEFAULT_DISCOVERED_DEPTH = 10
DEFAULT_MAX_RESULTS = 100

_DEFAULT_PORTS = {"http": 80, "https": 443}


class UriError(ValueError):
    """A URI could not be parsed or canonicalized."""


def canonicalize_uri(uri: str) -> str:
    """Normalize a URI for equality checks.

    Drops the query string and fragment, lowercases scheme and host, and removes
    a default port (:80 for http, :443 for https). The path is preserved as-is;
    in particular no trailing-slash normalization happens.
    """
    try:
        parts = urlsplit(uri.strip())
        port = parts.port  # may raise for garbage ports
    except ValueError as exc:
        raise UriError(f"malformed URI {uri!r}: {exc}") from exc
    scheme = parts.scheme.lower()
    host = parts.hostname or ""
    if not scheme or not host:
        raise UriError(f"URI must be absolute with scheme and host: {uri!r}")
    if ":" in host:
        host = f"[{host}]"  # bare IPv6 needs its brackets back
    netloc = host
    if parts.username is not None:
        userinfo = parts.username
        if parts.password is not None:
            userinfo += f":{parts.password}"
        netloc = f"{userinfo}@{host}"
    if port is not None and port != _DEFAULT_PORTS.get(scheme):
        netloc = f"{netloc}:{port}"
    return urlunsplit((scheme, netloc, parts.path, "", ""))


class RankCategory(str, Enum):
    """Where a target landed in a ranked result list."""

    TOP = "Top"
    TOP10 = "Top10"
    TOP100 = "Top100"
    UNDISCOVERED = "Undiscovered"


@dataclass(frozen=True)
class RetrievalOutcome:
    """A rank category plus the concrete rank when one exists."""

    category: RankCategory
    rank: int | None

    def __post_init__(self) -> None:
        has_rank = self.rank is not None
        if has_rank == (self.category is RankCategory.UNDISCOVERED):
            raise ValueError("rank must be present exactly when the target was discovered at all")

    @property
    def discovered(self) -> bool:
        return self.category in (RankCategory.TOP, RankCategory.TOP10)


@dataclass(frozen=True)
class ResultEntry:
    """One ranked hit; the document itself is attached when the backend has it."""

    rank: int
    uri: str
    doc: PageDocument | None = None


@dataclass(frozen=True)
class ResultList:
    """A ranked response to one query."""

    query: tuple[str, ...]
    entries: tuple[ResultEntry, ...]
    issued_at: datetime = field(
        default_factory=lambda: datetime.now(timezone.utc).replace(microsecond=0)
    )

    def __post_init__(self) -> None:
        for position, entry in enumerate(self.entries, start=1):
            if entry.rank != position:
                raise ValueError(f"ranks must be contiguous from 1; found {entry.rank} at position {position}")


class SearchBackend(Protocol):
    """The seam a search engine plugs into; the bundled index implements it."""

    def search(self, query_terms: Iterable[str], max_results: int = DEFAULT_MAX_RESULTS) -> ResultList: ...


def locate(
    target_uri: str,
    results: ResultList,
    discovered_depth: int = DEFAULT_DISCOVERED_DEPTH,
    max_rank: int = DEFAULT_MAX_RESULTS,
) -> RetrievalOutcome:
    """Find the target in a result list by canonical URI equality.

    Rank 1 is Top, ranks 2..discovered_depth are Top10, ranks up to max_rank are
    Top100, anything else is Undiscovered.
    """
    target = canonicalize_uri(target_uri)
    for entry in results.entries:
        if canonicalize_uri(entry.uri) != target:
            continue
        if entry.rank == 1:
            return RetrievalOutcome(RankCategory.TOP, entry.rank)
        if entry.rank <= discovered_depth:
            return RetrievalOutcome(RankCategory.TOP10, entry.rank)
        if entry.rank <= max_rank:
            return RetrievalOutcome(RankCategory.TOP100, entry.rank)
        break
    return RetrievalOutcome(RankCategory.UNDISCOVERED, None)


def title_query(title: TitleRecord | None) -> tuple[str, ...]:
    """The title's full term sequence, stopwords included (backends filter for themselves)."""
    if title is None or not title.terms:
        raise ValueError("page has no usable title to query with")
    return title.terms


def ls_query(ls: LexicalSignature) -> tuple[str, ...]:
    """The signature's terms in score order."""
    if not ls.terms:
        raise ValueError("lexical signature has no terms to query with")
    return ls.terms


@dataclass(frozen=True)
class RankRelevance:
    """Overlap and shingle agreement between the origin page and one ranked hit."""

    rank: int
    uri: str
    overlap: float
    overlap_class: SimilarityClass
    shingle: float
    shingle_class: SimilarityClass


@dataclass(frozen=True)
class ResultRelevance:
    """Per-rank relevance for the top of a result list; unfetchable ranks listed apart."""

    by_rank: tuple[RankRelevance, ...]
    unresolved_ranks: tuple[int, ...]


def relevance(
    origin: PageDocument,
    results: ResultList,
    corpus_by_uri: Mapping[str, PageDocument] | None = None,
    depth: int = DEFAULT_DISCOVERED_DEPTH,
    w: int = DEFAULT_SHINGLE_W,
) -> ResultRelevance:
    """Score the top-`depth` hits against the origin page.

    Result documents come from the entry itself when the backend attached one,
    falling back to a canonical-URI lookup in the given corpus. Ranks whose
    document cannot be resolved are reported as unresolved rather than scored.
    """
    origin_shingles = shingle_set(origin.terms, w)
    rows: list[RankRelevance] = []
    unresolved: list[int] = []
    for entry in results.entries:
        if entry.rank > depth:
            break
        doc = entry.doc
        if doc is None and corpus_by_uri is not None:
            doc = corpus_by_uri.get(canonicalize_uri(entry.uri))
        if doc is None:
            unresolved.append(entry.rank)
            continue
        overlap = term_overlap(origin.terms, doc.terms)
        shingle = resemblance(origin_shingles, shingle_set(doc.terms, w))
        rows.append(
            RankRelevance(
                rank=entry.rank,
                uri=entry.uri,
                overlap=overlap,
                overlap_class=classify(overlap),
                shingle=shingle,
                shingle_class=classify(shingle),
            )
        )
    return ResultRelevance(by_rank=tuple(rows), unresolved_ranks=tuple(unresolved))


class Strategy(str, Enum):
    """How the rediscovery query for a page is formed."""

    TITLE = "title"
    LS5 = "ls5"
    LS7 = "ls7"


_STRATEGY_K = {Strategy.LS5: 5, Strategy.LS7: 7}


@dataclass(frozen=True)
class EvaluationReport:
    """Per-URI outcomes for one strategy plus their aggregate distribution."""

    strategy: Strategy
    outcomes: dict[str, RetrievalOutcome]
    counts: dict[RankCategory, int]
    fractions: dict[RankCategory, float]
    skipped_no_title: tuple[str, ...]
    errors: dict[str, str]

    @property
    def evaluated(self) -> int:
        return len(self.outcomes)


def evaluate_corpus(
    docs: Iterable[PageDocument],
    backend: SearchBackend,
    strategy: Strategy,
    provider: DfProvider | None = None,
    max_results: int = DEFAULT_MAX_RESULTS,
    discovered_depth: int = DEFAULT_DISCOVERED_DEPTH,
) -> EvaluationReport:
    """Query the backend once per page and bucket where each page resurfaces.

    Pages without a title are skipped (and counted) under the title strategy.
    Backend and signature failures are recorded per URI and excluded from the
    aggregate fractions. Documents are processed in canonical-URI order, so the
    report does not depend on corpus input order.
    """
    strategy = Strategy(strategy)
    if strategy is not Strategy.TITLE:
        if provider is None and isinstance(backend, DfProvider):
            provider = backend
        if provider is None:
            raise ValueError(f"strategy {strategy.value} needs a df provider")
    ordered = sorted(docs, key=lambda d: canonicalize_uri(d.uri))
    outcomes: dict[str, RetrievalOutcome] = {}
    skipped: list[str] = []
    errors: dict[str, str] = {}
    for doc in ordered:
        curi = canonicalize_uri(doc.uri)
        if strategy is Strategy.TITLE:
            if doc.title is None or not doc.title.terms:
                skipped.append(curi)
                continue
            query = title_query(doc.title)
        else:
            try:
                query = ls_query(generate_ls(doc, provider, _STRATEGY_K[strategy]))
            except (ProviderError, ValueError) as exc:
                errors[curi] = f"{type(exc).__name__}: {exc}"
                continue
        try:
            results = backend.search(query, max_results=max_results)
            outcome = locate(doc.uri, results, discovered_depth=discovered_depth, max_rank=max_results)
        except Exception as exc:  # a failing backend is an outcome to report, not a crash
            errors[curi] = f"{type(exc).__name__}: {exc}"
            continue
        outcomes[curi] = outcome
    counts = {category: 0 for category in RankCategory}
    for outcome in outcomes.values():
        counts[outcome.category] += 1
    evaluated = len(outcomes)
    fractions = {
        category: (counts[category] / evaluated if evaluated else 0.0) for category in RankCategory
    }
    return EvaluationReport(
        strategy=strategy,
        outcomes=outcomes,
        counts=counts,
        fractions=fractions,
        skipped_no_title=tuple(skipped),
        errors=errors,
    )
