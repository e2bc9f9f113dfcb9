"""Title quality prediction: stop-title coverage, verdict rules, confusion matrix."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import TitleRecord, tokenize

__all__ = [
    "DEFAULT_STOP_TITLES",
    "LONG_TITLE_TERM_LIMIT",
    "ConfusionMatrix",
    "KeyMismatchError",
    "StopTitleList",
    "TitleVerdict",
    "VerdictRule",
    "confusion",
    "covered_positions",
    "predict",
    "stop_term_cover",
]

# Default boilerplate titles emitted by page generators and servers.
DEFAULT_STOP_TITLES: tuple[str, ...] = (
    "home",
    "index",
    "home page",
    "untitled document",
    "welcome",
    "main page",
    "default page",
    "index html",
)

DEFAULT_QUALITY_THRESHOLD = 0.75

# Titles beyond this many terms tend to be keyword-stuffed; flagged, never rejected.
LONG_TITLE_TERM_LIMIT = 24


class StopTitleList:
    """Ordered stop-title phrases, matched greedily longest-first."""

    def __init__(self, phrases: Iterable[str]) -> None:
        parsed: list[tuple[str, ...]] = []
        seen: set[tuple[str, ...]] = set()
        for raw in phrases:
            terms = tokenize(raw)
            if not terms or terms in seen:
                continue
            seen.add(terms)
            parsed.append(terms)
        if not parsed:
            raise ValueError("stop-title list has no usable phrases")
        self.phrases: tuple[tuple[str, ...], ...] = tuple(parsed)
        self._exact = frozenset(parsed)
        # Longest first so "home page" wins over "home"; lexicographic for determinism.
        self._by_length: tuple[tuple[str, ...], ...] = tuple(sorted(parsed, key=lambda p: (-len(p), p)))

    @classmethod
    def default(cls) -> "StopTitleList":
        return cls(DEFAULT_STOP_TITLES)

    @classmethod
    def from_file(cls, path: str | Path) -> "StopTitleList":
        """Load one phrase per line; blank lines are skipped."""
        return cls(Path(path).read_text("utf-8").splitlines())

    def is_exact(self, terms: Sequence[str]) -> bool:
        return tuple(terms) in self._exact

    def __len__(self) -> int:
        return len(self.phrases)

    def __contains__(self, phrase: str) -> bool:
        return tokenize(phrase) in self._exact


def covered_positions(terms: Sequence[str], stop_titles: StopTitleList) -> tuple[bool, ...]:
    """Mark term positions covered by greedy longest-first, left-to-right phrase matches."""
    seq = tuple(terms)
    covered = [False] * len(seq)
    i = 0
    while i < len(seq):
        matched = 0
        for phrase in stop_titles._by_length:
            n = len(phrase)
            if seq[i : i + n] == phrase:
                matched = n
                break
        if matched:
            for j in range(i, i + matched):
                covered[j] = True
            i += matched
        else:
            i += 1
    return tuple(covered)


def stop_term_cover(title: TitleRecord, stop_titles: StopTitleList | None = None) -> int:
    """Count of title terms covered by non-overlapping stop-title phrase matches."""
    if not title.terms:
        raise ValueError("title has no terms")
    stop_titles = stop_titles or StopTitleList.default()
    return sum(covered_positions(title.terms, stop_titles))


class VerdictRule(str, Enum):
    """Which rule decided a verdict, in precedence order."""

    EXACT_STOP_TITLE = "ExactStopTitle"
    TERM_RATIO = "TermRatio"
    CHAR_RATIO = "CharRatio"
    PASS = "Pass"


@dataclass(frozen=True)
class TitleVerdict:
    """Predicted retrievability of a title, with the deciding rule and both ratios."""

    predicted_good: bool
    rule: VerdictRule
    term_ratio: float
    char_ratio: float
    excessive_terms: bool


def predict(
    title: TitleRecord,
    stop_titles: StopTitleList | None = None,
    threshold: float = DEFAULT_QUALITY_THRESHOLD,
) -> TitleVerdict:
    """Judge a title: exact stop title, then term ratio, then character ratio, else pass.

    Both ratio rules require strictly greater than the threshold. The character
    ratio counts non-space characters of covered terms over those of all terms.
    """
    terms = title.terms
    if not terms:
        raise ValueError("title has no terms")
    stop_titles = stop_titles or StopTitleList.default()
    covered = covered_positions(terms, stop_titles)
    cover = sum(covered)
    term_ratio = cover / len(terms)
    total_chars = sum(len(t) for t in terms)
    covered_chars = sum(len(t) for t, hit in zip(terms, covered) if hit)
    char_ratio = covered_chars / total_chars
    if stop_titles.is_exact(terms):
        rule = VerdictRule.EXACT_STOP_TITLE
    elif term_ratio > threshold:
        rule = VerdictRule.TERM_RATIO
    elif char_ratio > threshold:
        rule = VerdictRule.CHAR_RATIO
    else:
        rule = VerdictRule.PASS
    return TitleVerdict(
        predicted_good=rule is VerdictRule.PASS,
        rule=rule,
        term_ratio=term_ratio,
        char_ratio=char_ratio,
        excessive_terms=len(terms) > LONG_TITLE_TERM_LIMIT,
    )


class KeyMismatchError(ValueError):
    """Prediction and outcome maps cover different URI sets."""


@dataclass(frozen=True)
class ConfusionMatrix:
    """Percentage cells of predicted good/bad against discovered yes/no; cells sum to 100."""

    found_found: float
    found_notfound: float
    notfound_found: float
    notfound_notfound: float
    total: int

    def cells(self) -> dict[str, float]:
        return {
            "found_found": self.found_found,
            "found_notfound": self.found_notfound,
            "notfound_found": self.notfound_found,
            "notfound_notfound": self.notfound_notfound,
        }


def confusion(predictions: Mapping[str, bool], actuals: Mapping[str, bool]) -> ConfusionMatrix:
    """Cross predicted-good against actually-discovered, as percentages of all URIs."""
    pred_keys, actual_keys = set(predictions), set(actuals)
    if pred_keys != actual_keys:
        only_pred = sorted(pred_keys - actual_keys)
        only_actual = sorted(actual_keys - pred_keys)
        raise KeyMismatchError(
            f"prediction/outcome key mismatch: only in predictions {only_pred[:5]}, only in outcomes {only_actual[:5]}"
        )
    if not predictions:
        raise ValueError("cannot build a confusion matrix from zero URIs")
    n = len(predictions)
    counts = {(True, True): 0, (True, False): 0, (False, True): 0, (False, False): 0}
    # cell names read actual first, prediction second
    for uri, predicted_good in predictions.items():
        counts[(actuals[uri], predicted_good)] += 1
    pct = {k: 100.0 * v / n for k, v in counts.items()}
    return ConfusionMatrix(
        found_found=pct[(True, True)],
        found_notfound=pct[(True, False)],
        notfound_found=pct[(False, True)],
        notfound_notfound=pct[(False, False)],
        total=n,
    )
