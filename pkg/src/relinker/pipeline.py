"""End-to-end runs shared by the command line and the HTTP service.

Every function returns JSON-safe payloads (each carrying the effective config
under "config") and, where a report has a tabular form, the rendered CSV/TSV
text alongside.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping

from relinker import reports
from relinker.archive import SnapshotStore, make_windows, title_evolution, title_vs_content
from relinker.config import Config, ConfigError
from relinker.corpus import (
    CorpusError,
    PageDocument,
    TitleRecord,
    admit,
    load_documents,
    parse_timestamp,
)
from relinker.rediscovery import (
    EvaluationReport,
    Strategy,
    canonicalize_uri,
    locate,
    ls_query,
    relevance,
    title_query,
    evaluate_corpus,
)
from relinker.signatures import generate_ls
from relinker.simindex import InvertedIndex, build_index, load_index, save_index
from relinker.similarity import (
    levenshtein_norm,
    resemblance,
    shingle_set,
    term_overlap,
)
from relinker.titlequality import StopTitleList, TitleVerdict, confusion, predict


def classify_error(exc: BaseException) -> str:
    """Map an exception onto the two CLI/service failure kinds."""
    if isinstance(exc, ConfigError):
        return "usage"
    return "data"


def _header(config: Config) -> dict[str, Any]:
    return {"config": config.to_dict()}


@dataclass(frozen=True)
class CorpusLoad:
    """Documents that survived intake, plus what fell out and why."""

    admitted: tuple[PageDocument, ...]
    rejected: tuple[tuple[str, tuple[str, ...]], ...]
    warnings: tuple[tuple[str, str], ...]
    total: int


def load_corpus(manifest_path: str | Path, config: Config) -> CorpusLoad:
    """Read a manifest, load every page, and run the admission filters."""
    admitted: list[PageDocument] = []
    rejected: list[tuple[str, tuple[str, ...]]] = []
    warnings: list[tuple[str, str]] = []
    loaded = load_documents(manifest_path)
    for entry, doc in loaded:
        report = admit(doc, min_terms=config.min_terms)
        hard = tuple(r.value for r in report.reasons if not r.value.endswith("warning"))
        for reason in report.reasons:
            if reason.value.endswith("warning"):
                warnings.append((doc.uri, reason.value))
        if report.kept:
            admitted.append(doc)
        else:
            rejected.append((doc.uri, hard))
    return CorpusLoad(
        admitted=tuple(admitted),
        rejected=tuple(rejected),
        warnings=tuple(warnings),
        total=len(loaded),
    )


def corpus_by_canonical(docs: Iterable[PageDocument]) -> dict[str, PageDocument]:
    """Map canonical URI to document; later manifest entries win collisions."""
    by_uri: dict[str, PageDocument] = {}
    for doc in docs:
        by_uri[canonicalize_uri(doc.uri)] = doc
    return dict(sorted(by_uri.items()))


def _doc_row(doc: PageDocument) -> dict[str, Any]:
    row: dict[str, Any] = {
        "uri": doc.uri,
        "canonical_uri": canonicalize_uri(doc.uri),
        "term_count": len(doc.terms),
    }
    if doc.title is None:
        row["title"] = None
    else:
        row["title"] = {
            "raw": doc.title.raw,
            "terms": list(doc.title.terms),
            "char_count": doc.title.char_count,
        }
    return row


def ingest_run(manifest_path: str | Path, config: Config) -> dict[str, Any]:
    """Admission summary for a manifest; rows are sorted by canonical URI."""
    load = load_corpus(manifest_path, config)
    admitted_rows = sorted((_doc_row(d) for d in load.admitted), key=lambda r: r["canonical_uri"])
    payload = _header(config)
    payload.update(
        {
            "manifest": str(manifest_path),
            "total": load.total,
            "admitted": admitted_rows,
            "rejected": [
                {"uri": uri, "reasons": list(reasons)}
                for uri, reasons in sorted(load.rejected)
            ],
            "warnings": [
                {"uri": uri, "warning": warning}
                for uri, warning in sorted(load.warnings)
            ],
        }
    )
    return payload


def index_build_run(manifest_path: str | Path, index_path: str | Path, config: Config) -> dict[str, Any]:
    """Index the admitted part of a corpus and persist it to one file."""
    load = load_corpus(manifest_path, config)
    index = build_index(load.admitted, index_size_estimate=config.index_size_estimate)
    save_index(index, index_path)
    payload = _header(config)
    payload.update(
        {
            "index_path": str(index_path),
            "admitted": len(load.admitted),
            "rejected": len(load.rejected),
            "stats": index.stats(),
        }
    )
    return payload


def index_stats_run(index_path: str | Path, config: Config) -> dict[str, Any]:
    index = load_index(index_path)
    payload = _header(config)
    payload.update({"index_path": str(index_path), "stats": index.stats()})
    return payload


def title_run(uri: str, raw_html: bytes, fetched_at: str, config: Config) -> dict[str, Any]:
    """Title and term extraction for a single page."""
    doc = PageDocument.from_html(uri, parse_timestamp(fetched_at), raw_html)
    payload = _header(config)
    payload.update(_doc_row(doc))
    return payload


def load_stop_titles(config: Config) -> StopTitleList:
    if config.stop_title_path is None:
        return StopTitleList.default()
    try:
        return StopTitleList.from_file(config.stop_title_path)
    except OSError as exc:
        raise ConfigError(f"cannot read stop title list {config.stop_title_path}: {exc}") from exc


def _verdict_row(title: str, verdict: TitleVerdict) -> dict[str, Any]:
    return {
        "title": title,
        "predicted_good": verdict.predicted_good,
        "rule": verdict.rule.value,
        "term_ratio": verdict.term_ratio,
        "char_ratio": verdict.char_ratio,
        "excessive_terms": verdict.excessive_terms,
    }


def quality_run(titles: Mapping[str, str], config: Config) -> dict[str, Any]:
    """Verdicts for a keyed set of titles (key is a URI or a line number label)."""
    stop_titles = load_stop_titles(config)
    verdicts: dict[str, Any] = {}
    skipped: list[str] = []
    for key in sorted(titles):
        record = TitleRecord.from_raw(titles[key])
        if not record.terms:
            skipped.append(key)
            continue
        verdict = predict(record, stop_titles, threshold=config.quality_threshold)
        verdicts[key] = _verdict_row(titles[key], verdict)
    payload = _header(config)
    payload.update({"verdicts": verdicts, "skipped_empty": skipped})
    return payload


def quality_manifest_run(manifest_path: str | Path, config: Config) -> dict[str, Any]:
    """Verdicts for every admitted page's title, keyed by canonical URI."""
    load = load_corpus(manifest_path, config)
    by_uri = corpus_by_canonical(load.admitted)
    titles: dict[str, str] = {}
    skipped_no_title: list[str] = []
    for curi, doc in by_uri.items():
        if doc.title is None:
            skipped_no_title.append(curi)
        else:
            titles[curi] = doc.title.raw
    payload = quality_run(titles, config)
    payload["skipped_no_title"] = skipped_no_title
    return payload


def sim_run(a: PageDocument, b: PageDocument, config: Config) -> dict[str, Any]:
    """Pairwise similarity: normalized title edit distance, term overlap, resemblance."""
    payload = _header(config)
    if a.title is not None and b.title is not None:
        payload["title_distance"] = levenshtein_norm(a.title.raw, b.title.raw)
    else:
        payload["title_distance"] = None
    overlap = term_overlap(a.terms, b.terms)
    shingles = resemblance(shingle_set(a.terms, config.shingle_w), shingle_set(b.terms, config.shingle_w))
    payload.update(
        {
            "a": _doc_row(a),
            "b": _doc_row(b),
            "term_overlap": overlap,
            "resemblance": shingles,
        }
    )
    return payload


def _evaluation_payload(report: EvaluationReport, config: Config) -> dict[str, Any]:
    outcomes = {}
    for uri in sorted(report.outcomes):
        outcome = report.outcomes[uri]
        outcomes[uri] = {
            "category": outcome.category.value,
            "rank": outcome.rank,
            "discovered": outcome.discovered,
        }
    payload = _header(config)
    payload.update(
        {
            "strategy": report.strategy.value,
            "outcomes": outcomes,
            "counts": {cat.value: report.counts.get(cat, 0) for cat in reports.CATEGORY_ORDER},
            "fractions": {cat.value: report.fractions.get(cat, 0.0) for cat in reports.CATEGORY_ORDER},
            "evaluated": report.evaluated,
            "skipped_no_title": sorted(report.skipped_no_title),
            "errors": {uri: report.errors[uri] for uri in sorted(report.errors)},
        }
    )
    return payload


def rediscover_run(
    manifest_path: str | Path,
    index_path: str | Path,
    strategy: Strategy,
    config: Config,
) -> tuple[dict[str, Any], str]:
    """Evaluate one strategy over the admitted corpus against the stored index."""
    load = load_corpus(manifest_path, config)
    index = load_index(index_path)
    report = evaluate_corpus(
        load.admitted,
        index,
        strategy,
        provider=index,
        max_results=config.max_results,
        discovered_depth=config.discovered_depth,
    )
    return _evaluation_payload(report, config), reports.rediscovery_summary_tsv(report)


def relevance_run(
    manifest_path: str | Path,
    index_path: str | Path,
    strategy: Strategy,
    config: Config,
) -> tuple[dict[str, Any], str]:
    """Score top-ranked hits against each origin page, split by discovery outcome."""
    load = load_corpus(manifest_path, config)
    index = load_index(index_path)
    by_uri = corpus_by_canonical(load.admitted)
    cases: list[tuple[bool, Any]] = []
    rows: dict[str, Any] = {}
    skipped_no_title: list[str] = []
    errors: dict[str, str] = {}
    for curi, doc in by_uri.items():
        try:
            if strategy is Strategy.TITLE:
                if doc.title is None or not doc.title.terms:
                    skipped_no_title.append(curi)
                    continue
                query = title_query(doc.title)
            else:
                k = {Strategy.LS5: 5, Strategy.LS7: 7}[strategy]
                query = ls_query(generate_ls(doc, index, k, generated_at=doc.fetched_at))
            results = index.search(query, max_results=config.max_results)
        except Exception as exc:  # a failing backend is an outcome to report, not a crash
            errors[curi] = f"{type(exc).__name__}: {exc}"
            continue
        outcome = locate(curi, results, discovered_depth=config.discovered_depth, max_rank=config.max_results)
        scored = relevance(doc, results, corpus_by_uri=by_uri, depth=config.discovered_depth, w=config.shingle_w)
        cases.append((outcome.discovered, scored))
        rows[curi] = {
            "discovered": outcome.discovered,
            "rows": [
                {
                    "rank": r.rank,
                    "uri": r.uri,
                    "overlap": r.overlap,
                    "overlap_class": r.overlap_class.value,
                    "shingle": r.shingle,
                    "shingle_class": r.shingle_class.value,
                }
                for r in scored.by_rank
            ],
            "unresolved_ranks": list(scored.unresolved_ranks),
        }
    tally = reports.tally_relevance(cases)
    payload = _header(config)
    payload.update(
        {
            "strategy": strategy.value,
            "relevance": rows,
            "skipped_no_title": skipped_no_title,
            "errors": errors,
        }
    )
    return payload, reports.relevance_csv(tally, depth=config.discovered_depth)


def _load_series(manifest_path: str | Path, snapshots_root: str | Path, config: Config):
    load = load_corpus(manifest_path, config)
    store = SnapshotStore(snapshots_root)
    by_uri = corpus_by_canonical(load.admitted)
    return [store.load_series(curi, doc) for curi, doc in by_uri.items()]


def evolve_run(
    manifest_path: str | Path,
    snapshots_root: str | Path,
    config: Config,
) -> tuple[dict[str, Any], str]:
    """Title-drift histograms per time window over the snapshot archive."""
    windows = make_windows(config.window_anchor, config.window_count)
    series = _load_series(manifest_path, snapshots_root, config)
    report = title_evolution(series, windows, minor_change_threshold=config.minor_change_threshold)
    payload = _header(config)
    payload.update(
        {
            "windows": [
                {
                    "window": row.window.label,
                    "available": row.available,
                    "missing_title": row.missing_title,
                    "bins": list(row.bins),
                    "p_unchanged": row.p_unchanged,
                    "p_minor_change": row.p_minor_change,
                }
                for row in report.windows
            ],
        }
    )
    return payload, reports.evolution_csv(report)


def correlate_run(
    manifest_path: str | Path,
    snapshots_root: str | Path,
    config: Config,
) -> tuple[dict[str, Any], str]:
    """Title drift vs. content dissimilarity grid over the snapshot archive."""
    windows = make_windows(config.window_anchor, config.window_count)
    series = _load_series(manifest_path, snapshots_root, config)
    grid = title_vs_content(series, windows, w=config.shingle_w)
    payload = _header(config)
    payload.update(
        {
            "points": [list(p) for p in grid.points],
            "included": grid.included,
            "skipped_no_window": grid.skipped_no_window,
            "skipped_no_title": grid.skipped_no_title,
        }
    )
    return payload, reports.correlation_csv(grid)


def lexsig_run(
    manifest_path: str | Path,
    index_path: str | Path,
    config: Config,
) -> dict[str, Any]:
    """Lexical signatures for every admitted page, one per configured size."""
    load = load_corpus(manifest_path, config)
    index = load_index(index_path)
    by_uri = corpus_by_canonical(load.admitted)
    signatures: dict[str, Any] = {}
    for curi, doc in by_uri.items():
        signatures[curi] = [
            generate_ls(doc, index, k, generated_at=doc.fetched_at).to_json_dict()
            for k in config.ls_k
        ]
    payload = _header(config)
    payload.update({"signatures": signatures})
    return payload


def verdict_map(quality_payload: Mapping[str, Any]) -> dict[str, bool]:
    """The {uri: predicted_good} view of a quality payload."""
    verdicts = quality_payload.get("verdicts")
    if not isinstance(verdicts, Mapping):
        raise CorpusError("quality payload lacks a verdicts object")
    return {uri: bool(row["predicted_good"]) for uri, row in verdicts.items()}


def outcome_map(rediscover_payload: Mapping[str, Any]) -> dict[str, bool]:
    """The {uri: discovered} view of a rediscovery payload."""
    outcomes = rediscover_payload.get("outcomes")
    if not isinstance(outcomes, Mapping):
        raise CorpusError("rediscovery payload lacks an outcomes object")
    return {uri: bool(row["discovered"]) for uri, row in outcomes.items()}


def eval_run(
    predictions: Mapping[str, bool],
    actuals: Mapping[str, bool],
    config: Config,
) -> tuple[dict[str, Any], str]:
    """Cross title verdicts against retrieval outcomes into the percentage matrix."""
    matrix = confusion(predictions, actuals)
    payload = _header(config)
    payload.update({"cells": matrix.cells(), "total": matrix.total})
    return payload, reports.confusion_tsv(matrix)
