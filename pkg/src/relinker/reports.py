"""Figure-ready CSV/TSV renderers for the analytic reports."""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from relinker.archive import CorrelationGrid, EvolutionReport
from relinker.rediscovery import EvaluationReport, RankCategory, ResultRelevance
from relinker.similarity import SimilarityClass
from relinker.titlequality import ConfusionMatrix

CATEGORY_ORDER = (
    RankCategory.TOP,
    RankCategory.TOP10,
    RankCategory.TOP100,
    RankCategory.UNDISCOVERED,
)

CLASS_ORDER = (
    SimilarityClass.EXACT,
    SimilarityClass.HIGH,
    SimilarityClass.MEDIUM,
    SimilarityClass.LOW,
    SimilarityClass.NONE,
)


def rediscovery_summary_tsv(report: EvaluationReport) -> str:
    """Category distribution for one strategy plus bookkeeping rows."""
    lines = ["row\tcount\tfraction"]
    for category in CATEGORY_ORDER:
        count = report.counts.get(category, 0)
        fraction = report.fractions.get(category, 0.0)
        lines.append(f"{category.value}\t{count}\t{fraction}")
    lines.append(f"evaluated\t{report.evaluated}\t")
    lines.append(f"skipped_no_title\t{len(report.skipped_no_title)}\t")
    lines.append(f"errors\t{len(report.errors)}\t")
    return "\n".join(lines) + "\n"


# (metric, discovered-or-undiscovered, rank, class value) -> count
RelevanceTally = Counter


def tally_relevance(cases: Iterable[tuple[bool, ResultRelevance]]) -> Counter:
    """Fold per-URI relevance rows into rank-by-class counts, split by discovery."""
    tally: Counter = Counter()
    for discovered, result in cases:
        group = "discovered" if discovered else "undiscovered"
        for row in result.by_rank:
            tally[("overlap", group, row.rank, row.overlap_class.value)] += 1
            tally[("shingle", group, row.rank, row.shingle_class.value)] += 1
    return tally


def relevance_csv(tally: Counter, depth: int = 10) -> str:
    """Dense rank-by-class table, zero rows kept so the shape never varies."""
    lines = ["metric,group,rank,class,count"]
    for metric in ("overlap", "shingle"):
        for group in ("discovered", "undiscovered"):
            for rank in range(1, depth + 1):
                for cls in CLASS_ORDER:
                    count = tally.get((metric, group, rank, cls.value), 0)
                    lines.append(f"{metric},{group},{rank},{cls.value},{count}")
    return "\n".join(lines) + "\n"


def evolution_csv(report: EvolutionReport) -> str:
    """One row per window: availability, drift histogram, and the two probabilities."""
    lines = [
        "window,available,missing_title,"
        "d_0,d_0.0_0.3,d_0.3_0.5,d_0.5_0.8,d_0.8_1.0,"
        "p_unchanged,p_minor_change"
    ]
    for row in report.windows:
        p_unchanged = "" if row.p_unchanged is None else str(row.p_unchanged)
        p_minor = "" if row.p_minor_change is None else str(row.p_minor_change)
        bins = ",".join(str(n) for n in row.bins)
        lines.append(
            f"{row.window.label},{row.available},{row.missing_title},"
            f"{bins},{p_unchanged},{p_minor}"
        )
    return "\n".join(lines) + "\n"


def correlation_csv(grid: CorrelationGrid) -> str:
    """Grid triples: mean title drift, mean content dissimilarity, frequency."""
    lines = ["title_drift,content_dissimilarity,frequency"]
    for x, y, freq in grid.points:
        lines.append(f"{x},{y},{freq}")
    return "\n".join(lines) + "\n"


def confusion_tsv(matrix: ConfusionMatrix) -> str:
    """2x2 percentage table: retrieval outcome rows, predicted-quality columns."""
    lines = [
        "outcome\tpredicted_found\tpredicted_notfound",
        f"found\t{matrix.found_found}\t{matrix.found_notfound}",
        f"notfound\t{matrix.notfound_found}\t{matrix.notfound_notfound}",
    ]
    return "\n".join(lines) + "\n"
