"""Archived snapshot analytics: time windows, title drift, content correlation."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

from .corpus import (
    PageDocument,
    TitleRecord,
    extract_text,
    extract_title,
    format_timestamp,
    parse_timestamp,
    tokenize,
)
from .rediscovery import canonicalize_uri
from .similarity import DEFAULT_SHINGLE_W, levenshtein_norm, resemblance, shingle_set

__all__ = [
    "DEFAULT_MINOR_CHANGE_THRESHOLD",
    "DEFAULT_WINDOW_ANCHOR",
    "DEFAULT_WINDOW_COUNT",
    "WINDOW_DAYS",
    "CorrelationGrid",
    "EvolutionReport",
    "Snapshot",
    "SnapshotSeries",
    "SnapshotStore",
    "TimeWindow",
    "WindowError",
    "WindowEvolution",
    "evolution_bin",
    "make_windows",
    "representative",
    "round_tenth",
    "title_evolution",
    "title_vs_content",
]

WINDOW_DAYS = 60
WINDOW_MONTHS = (2, 8)  # one window starting each February and August
DEFAULT_WINDOW_COUNT = 27
DEFAULT_WINDOW_ANCHOR = "2009-02"
DEFAULT_MINOR_CHANGE_THRESHOLD = 0.3

# Distance histogram bins: exactly 0, then (0,0.3], (0.3,0.5], (0.5,0.8], (0.8,1].
EVOLUTION_BIN_UPPER = (0.3, 0.5, 0.8, 1.0)

_ANCHOR_RE = re.compile(r"^(\d{4})-(\d{2})$")
_STAMP_FORMAT = "%Y%m%dT%H%M%SZ"


class WindowError(ValueError):
    """Bad window anchor or count."""


@dataclass(frozen=True)
class TimeWindow:
    """A fixed 60-day observation window starting on the 1st of February or August."""

    label: str
    start: date
    days: int = WINDOW_DAYS

    @property
    def end(self) -> date:
        """Exclusive end date."""
        return self.start + timedelta(days=self.days)

    def contains(self, ts: datetime) -> bool:
        day = ts.astimezone(timezone.utc).date() if ts.tzinfo else ts.date()
        return self.start <= day < self.end


def make_windows(newest: str, count: int = DEFAULT_WINDOW_COUNT) -> tuple[TimeWindow, ...]:
    """Build `count` windows walking backward from the newest anchor, newest first.

    The anchor is "YYYY-MM" and its month must be February or August.
    """
    match = _ANCHOR_RE.match(newest.strip())
    if not match:
        raise WindowError(f"window anchor must look like YYYY-MM, got {newest!r}")
    year, month = int(match.group(1)), int(match.group(2))
    if month not in WINDOW_MONTHS:
        raise WindowError(f"window anchor month must be February (02) or August (08), got {month:02d}")
    if count < 1:
        raise WindowError(f"window count must be at least 1, got {count}")
    windows: list[TimeWindow] = []
    for _ in range(count):
        windows.append(TimeWindow(label=f"{year:04d}-{month:02d}", start=date(year, month, 1)))
        year, month = (year, 2) if month == 8 else (year - 1, 8)
    return tuple(windows)


@dataclass(frozen=True)
class Snapshot:
    """One archived copy of a page."""

    timestamp: datetime
    raw_html: bytes
    title: TitleRecord | None
    terms: tuple[str, ...]

    @classmethod
    def from_html(cls, timestamp: datetime, raw_html: bytes) -> "Snapshot":
        return cls(
            timestamp=timestamp.astimezone(timezone.utc).replace(microsecond=0),
            raw_html=raw_html,
            title=extract_title(raw_html),
            terms=tokenize(extract_text(raw_html)),
        )


@dataclass(frozen=True)
class SnapshotSeries:
    """All archived copies of one URI plus the live baseline page."""

    uri: str
    baseline: PageDocument
    snapshots: tuple[Snapshot, ...]

    @classmethod
    def make(cls, uri: str, baseline: PageDocument, snapshots: Iterable[Snapshot]) -> "SnapshotSeries":
        """Sort snapshots by time; equal timestamps collapse to the first seen."""
        by_time: dict[datetime, Snapshot] = {}
        for snap in sorted(snapshots, key=lambda s: s.timestamp):
            by_time.setdefault(snap.timestamp, snap)
        return cls(uri=uri, baseline=baseline, snapshots=tuple(by_time.values()))


def representative(series: SnapshotSeries, window: TimeWindow) -> Snapshot | None:
    """The earliest snapshot inside the window, or None when the window is empty."""
    for snap in series.snapshots:
        if window.contains(snap.timestamp):
            return snap
    return None


def evolution_bin(distance: float) -> int:
    """Histogram bin for a normalized title distance."""
    if not 0.0 <= distance <= 1.0:
        raise ValueError(f"distance outside [0, 1]: {distance!r}")
    if distance == 0.0:
        return 0
    for position, upper in enumerate(EVOLUTION_BIN_UPPER, start=1):
        if distance <= upper:
            return position
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class WindowEvolution:
    """Title-drift histogram for one window across all series."""

    window: TimeWindow
    available: int
    bins: tuple[int, int, int, int, int]
    p_unchanged: float | None
    p_minor_change: float | None
    missing_title: int


@dataclass(frozen=True)
class EvolutionReport:
    windows: tuple[WindowEvolution, ...]
    minor_change_threshold: float


def title_evolution(
    series_list: Sequence[SnapshotSeries],
    windows: Sequence[TimeWindow],
    minor_change_threshold: float = DEFAULT_MINOR_CHANGE_THRESHOLD,
) -> EvolutionReport:
    """Histogram baseline-vs-representative title distances per window.

    A URI contributes to a window when a representative exists and both the
    baseline and the representative carry a title; representatives without a
    title on either end are excluded and counted separately.
    """
    rows: list[WindowEvolution] = []
    for window in windows:
        distances: list[float] = []
        missing_title = 0
        for series in series_list:
            rep = representative(series, window)
            if rep is None:
                continue
            if series.baseline.title is None or rep.title is None:
                missing_title += 1
                continue
            distances.append(levenshtein_norm(series.baseline.title.raw, rep.title.raw))
        bins = [0, 0, 0, 0, 0]
        for d in distances:
            bins[evolution_bin(d)] += 1
        available = len(distances)
        rows.append(
            WindowEvolution(
                window=window,
                available=available,
                bins=tuple(bins),
                p_unchanged=(bins[0] / available) if available else None,
                p_minor_change=(
                    sum(1 for d in distances if d <= minor_change_threshold) / available
                    if available
                    else None
                ),
                missing_title=missing_title,
            )
        )
    return EvolutionReport(windows=tuple(rows), minor_change_threshold=minor_change_threshold)


def round_tenth(value: float) -> float:
    """Round half up to one decimal place (0.25 -> 0.3), working from the printed value."""
    return float(Decimal(str(value)).quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class CorrelationGrid:
    """Frequencies of (mean title drift, mean content dissimilarity) per URI, on a 0.1 grid."""

    points: tuple[tuple[float, float, int], ...]
    included: int
    skipped_no_window: int
    skipped_no_title: int

    def frequency_total(self) -> int:
        return sum(freq for _, _, freq in self.points)


def title_vs_content(
    series_list: Sequence[SnapshotSeries],
    windows: Sequence[TimeWindow],
    w: int = DEFAULT_SHINGLE_W,
) -> CorrelationGrid:
    """Per URI: mean title drift vs. mean content dissimilarity over populated windows.

    Every populated window weighs equally. Windows lacking a title on either end
    are left out of the title mean but still count toward the content mean; a URI
    with no populated window, or no titled comparison at all, is excluded and
    counted.
    """
    counts: dict[tuple[float, float], int] = {}
    skipped_no_window = 0
    skipped_no_title = 0
    for series in series_list:
        reps = [rep for window in windows if (rep := representative(series, window)) is not None]
        if not reps:
            skipped_no_window += 1
            continue
        baseline = series.baseline
        base_shingles = shingle_set(baseline.terms, w)
        content = [1.0 - resemblance(base_shingles, shingle_set(rep.terms, w)) for rep in reps]
        title_distances = [
            levenshtein_norm(baseline.title.raw, rep.title.raw)
            for rep in reps
            if baseline.title is not None and rep.title is not None
        ]
        if not title_distances:
            skipped_no_title += 1
            continue
        point = (round_tenth(fmean(title_distances)), round_tenth(fmean(content)))
        counts[point] = counts.get(point, 0) + 1
    points = tuple((x, y, counts[(x, y)]) for x, y in sorted(counts))
    return CorrelationGrid(
        points=points,
        included=sum(counts.values()),
        skipped_no_window=skipped_no_window,
        skipped_no_title=skipped_no_title,
    )


class SnapshotStore:
    """On-disk archive laid out as <root>/<sha1(canonical uri)>/<stamp>.html plus a manifest."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    @staticmethod
    def _key(canonical: str) -> str:
        return hashlib.sha1(canonical.encode("utf-8")).hexdigest()

    def _dir_for(self, canonical: str) -> Path:
        return self.root / self._key(canonical)

    def add(self, uri: str, timestamp: datetime, raw_html: bytes) -> Path:
        """Store one snapshot and update the per-URI manifest."""
        canonical = canonicalize_uri(uri)
        folder = self._dir_for(canonical)
        folder.mkdir(parents=True, exist_ok=True)
        ts = timestamp.astimezone(timezone.utc).replace(microsecond=0)
        name = ts.strftime(_STAMP_FORMAT) + ".html"
        (folder / name).write_bytes(raw_html)
        manifest_path = folder / "manifest.json"
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text("utf-8"))
        else:
            manifest = {"uri": uri, "canonical_uri": canonical, "snapshots": []}
        rows = {row["path"]: row for row in manifest["snapshots"]}
        rows[name] = {"timestamp": format_timestamp(ts), "path": name}
        manifest["snapshots"] = sorted(rows.values(), key=lambda row: row["timestamp"])
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")
        return folder / name

    def canonical_uris(self) -> list[str]:
        """Canonical URIs with at least one stored snapshot, sorted."""
        uris = []
        if not self.root.is_dir():
            return []
        for manifest_path in self.root.glob("*/manifest.json"):
            manifest = json.loads(manifest_path.read_text("utf-8"))
            uris.append(manifest["canonical_uri"])
        return sorted(uris)

    def load_series(self, uri: str, baseline: PageDocument) -> SnapshotSeries:
        """Assemble the snapshot series for a URI; no stored copies yields an empty series."""
        canonical = canonicalize_uri(uri)
        folder = self._dir_for(canonical)
        manifest_path = folder / "manifest.json"
        if not manifest_path.exists():
            return SnapshotSeries.make(canonical, baseline, ())
        manifest = json.loads(manifest_path.read_text("utf-8"))
        snapshots = []
        for row in manifest["snapshots"]:
            raw = (folder / row["path"]).read_bytes()
            snapshots.append(Snapshot.from_html(parse_timestamp(row["timestamp"]), raw))
        return SnapshotSeries.make(canonical, baseline, snapshots)
