"""Similarity between pages and titles: edit distance, term overlap, and w-shingles."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

__all__ = [
    "SimilarityClass",
    "ShingleSet",
    "classify",
    "levenshtein_distance",
    "levenshtein_norm",
    "resemblance",
    "shingle_set",
    "term_overlap",
]

DEFAULT_SHINGLE_W = 5


class SimilarityClass(str, Enum):
    """Five-way bucket for a similarity value in [0, 1]."""

    EXACT = "exact"
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"
    NONE = "none"


def classify(value: float) -> SimilarityClass:
    """Bucket a similarity: 1 exact, [0.75, 1) high, [0.5, 0.75) medium, (0, 0.5) low, 0 none."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"similarity value outside [0, 1]: {value!r}")
    if value == 1.0:
        return SimilarityClass.EXACT
    if value >= 0.75:
        return SimilarityClass.HIGH
    if value >= 0.5:
        return SimilarityClass.MEDIUM
    if value > 0.0:
        return SimilarityClass.LOW
    return SimilarityClass.NONE


def levenshtein_distance(a: str, b: str) -> int:
    """Minimum count of single-character insertions, deletions, and substitutions."""
    if a == b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        current = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + cost))
        previous = current
    return previous[-1]


def levenshtein_norm(a: str, b: str) -> float:
    """Edit distance divided by the longer length; defined as 0 for two empty strings."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return levenshtein_distance(a, b) / longest


def term_overlap(a_terms: Iterable[str], b_terms: Iterable[str]) -> float:
    """Jaccard similarity of the distinct term sets; two empty sets count as 1."""
    sa, sb = set(a_terms), set(b_terms)
    if not sa and not sb:
        return 1.0
    return len(sa & sb) / len(sa | sb)


@dataclass(frozen=True)
class ShingleSet:
    """The contiguous w-term windows of a term sequence, as a set."""

    w: int
    shingles: frozenset[tuple[str, ...]]

    def __len__(self) -> int:
        return len(self.shingles)


def shingle_set(terms: Sequence[str], w: int = DEFAULT_SHINGLE_W) -> ShingleSet:
    """All contiguous w-term windows; a shorter nonempty sequence yields one shingle of all terms."""
    if w < 1:
        raise ValueError(f"shingle width must be at least 1, got {w}")
    seq = tuple(terms)
    if not seq:
        return ShingleSet(w=w, shingles=frozenset())
    if len(seq) < w:
        return ShingleSet(w=w, shingles=frozenset((seq,)))
    return ShingleSet(w=w, shingles=frozenset(seq[i : i + w] for i in range(len(seq) - w + 1)))


def resemblance(a: ShingleSet, b: ShingleSet) -> float:
    """Jaccard similarity of two shingle sets; two empty sets count as 1."""
    if not a.shingles and not b.shingles:
        return 1.0
    return len(a.shingles & b.shingles) / len(a.shingles | b.shingles)
