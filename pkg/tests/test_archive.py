"""Window construction, representatives, drift histograms, correlation grid, store."""

from __future__ import annotations

import hashlib
import json
from datetime import date, datetime, timezone
from pathlib import Path

import pytest

from relinker.archive import (
    CorrelationGrid,
    Snapshot,
    SnapshotSeries,
    SnapshotStore,
    TimeWindow,
    WindowError,
    evolution_bin,
    make_windows,
    representative,
    round_tenth,
    title_evolution,
    title_vs_content,
)
from relinker.corpus import PageDocument

UTC = timezone.utc


def ts(year: int, month: int, day: int, hour: int = 12) -> datetime:
    return datetime(year, month, day, hour, tzinfo=UTC)


def snap(when: datetime, title: str | None, body: str) -> Snapshot:
    html = (f"<title>{title}</title>" if title is not None else "") + f"<body><p>{body}</p></body>"
    return Snapshot.from_html(when, html.encode())


def base_page(uri: str, title: str | None, body: str) -> PageDocument:
    html = (f"<title>{title}</title>" if title is not None else "") + f"<body><p>{body}</p></body>"
    return PageDocument.from_html(uri, ts(2009, 2, 1), html.encode())


def test_make_windows_paper_run() -> None:
    windows = make_windows("2009-02", 27)
    assert len(windows) == 27
    assert windows[0].label == "2009-02"
    assert windows[0].start == date(2009, 2, 1)
    assert windows[1].label == "2008-08"
    assert windows[-1].label == "1996-02"
    assert windows[-1].start == date(1996, 2, 1)
    assert all(w.days == 60 for w in windows)


def test_make_windows_are_disjoint_and_descending() -> None:
    windows = make_windows("2009-02", 27)
    for newer, older in zip(windows, windows[1:]):
        assert older.start < newer.start
        assert older.end <= newer.start  # 60-day spans never overlap the next anchor


def test_make_windows_small_counts() -> None:
    assert [w.label for w in make_windows("2008-08", 1)] == ["2008-08"]
    assert [w.label for w in make_windows("2009-02", 3)] == ["2009-02", "2008-08", "2008-02"]


@pytest.mark.parametrize("anchor", ["2009-03", "2009-13", "garbage", "09-02", "2009/02"])
def test_make_windows_rejects_bad_anchor(anchor: str) -> None:
    with pytest.raises(WindowError):
        make_windows(anchor)


def test_make_windows_rejects_bad_count() -> None:
    with pytest.raises(WindowError):
        make_windows("2009-02", 0)


def test_window_contains_sixty_days() -> None:
    window = TimeWindow(label="2009-02", start=date(2009, 2, 1))
    assert window.end == date(2009, 4, 2)
    assert window.contains(ts(2009, 2, 1, hour=0))
    assert window.contains(ts(2009, 4, 1, hour=23))
    assert not window.contains(ts(2009, 4, 2, hour=0))
    assert not window.contains(ts(2009, 1, 31))


def test_representative_is_earliest_in_window() -> None:
    series = SnapshotSeries.make(
        "http://u.org/",
        base_page("http://u.org/", "T", "body words"),
        [
            snap(ts(2009, 2, 10), "T", "later copy"),
            snap(ts(2009, 2, 3), "T", "earlier copy"),
            snap(ts(2008, 8, 5), "T", "previous window"),
        ],
    )
    window = TimeWindow(label="2009-02", start=date(2009, 2, 1))
    rep = representative(series, window)
    assert rep is not None and rep.timestamp == ts(2009, 2, 3)
    empty_window = TimeWindow(label="2007-02", start=date(2007, 2, 1))
    assert representative(series, empty_window) is None


def test_series_sorts_and_deduplicates_snapshots() -> None:
    a = snap(ts(2009, 2, 3), "First", "one")
    b = snap(ts(2009, 2, 3), "Second", "two")  # same timestamp: first seen wins
    c = snap(ts(2008, 8, 1), "Old", "zero")
    series = SnapshotSeries.make("http://u.org/", base_page("http://u.org/", "T", "x"), [a, b, c])
    assert [s.timestamp for s in series.snapshots] == [ts(2008, 8, 1), ts(2009, 2, 3)]
    assert series.snapshots[1].title is not None and series.snapshots[1].title.raw == "First"


def test_evolution_bins() -> None:
    assert evolution_bin(0.0) == 0
    assert evolution_bin(0.1) == 1
    assert evolution_bin(0.3) == 1
    assert evolution_bin(0.31) == 2
    assert evolution_bin(0.5) == 2
    assert evolution_bin(0.8) == 3
    assert evolution_bin(0.81) == 4
    assert evolution_bin(1.0) == 4
    with pytest.raises(ValueError):
        evolution_bin(1.01)


WINDOW_0902 = TimeWindow(label="2009-02", start=date(2009, 2, 1))


def drift_series(uri: str, baseline_title: str, snapshot_title: str | None) -> SnapshotSeries:
    return SnapshotSeries.make(
        uri,
        base_page(uri, baseline_title, "stable body text"),
        [snap(ts(2009, 2, 5), snapshot_title, "stable body text")],
    )


def test_title_evolution_hand_computed_histogram() -> None:
    # Baseline titles are all "aaaaaaaaaa" (10 chars); snapshot titles pin each bin.
    series = [
        drift_series("http://u0.org/", "aaaaaaaaaa", "aaaaaaaaaa"),  # 0.0 -> bin 0
        drift_series("http://u1.org/", "aaaaaaaaaa", "aaaaaaaaab"),  # 0.1 -> bin 1
        drift_series("http://u2.org/", "aaaaaaaaaa", "aaaaabbbbb"),  # 0.5 -> bin 2
        drift_series("http://u3.org/", "aaaaaaaaaa", "aabbbbbbbb"),  # 0.8 -> bin 3
        drift_series("http://u4.org/", "aaaaaaaaaa", "bbbbbbbbbb"),  # 1.0 -> bin 4
        drift_series("http://u5.org/", "aaaaaaaaaa", None),          # titleless: excluded, counted
    ]
    report = title_evolution(series, [WINDOW_0902])
    row = report.windows[0]
    assert row.available == 5
    assert row.bins == (1, 1, 1, 1, 1)
    assert row.missing_title == 1
    assert row.p_unchanged == pytest.approx(1 / 5)
    assert row.p_minor_change == pytest.approx(2 / 5)  # distances 0.0 and 0.1
    assert sum(row.bins) == row.available
    assert row.p_unchanged <= row.p_minor_change


def test_title_evolution_all_identical() -> None:
    series = [drift_series(f"http://s{i}.org/", "Same Title", "Same Title") for i in range(4)]
    report = title_evolution(series, [WINDOW_0902])
    row = report.windows[0]
    assert row.available == 4
    assert row.p_unchanged == 1.0
    assert row.p_minor_change == 1.0
    assert row.bins == (4, 0, 0, 0, 0)


def test_title_evolution_empty_window_has_no_probabilities() -> None:
    series = [drift_series("http://u.org/", "T", "T")]
    old_window = TimeWindow(label="1997-02", start=date(1997, 2, 1))
    row = title_evolution(series, [old_window]).windows[0]
    assert row.available == 0
    assert row.p_unchanged is None and row.p_minor_change is None


def test_round_tenth_half_up() -> None:
    assert round_tenth(0.25) == 0.3
    assert round_tenth(0.05) == 0.1
    assert round_tenth(0.15) == 0.2
    assert round_tenth(0.24) == 0.2
    assert round_tenth(0.0) == 0.0
    assert round_tenth(1.0) == 1.0
    assert round_tenth(0.8499) == 0.8


LONG_A = "alpha beta gamma delta epsilon zeta eta theta iota kappa"
LONG_B = "one two three four five six seven eight nine ten"


def content_series(uri: str, baseline_body: str, snapshot_body: str, titles: tuple[str, str] = ("T", "T")) -> SnapshotSeries:
    return SnapshotSeries.make(
        uri,
        base_page(uri, titles[0], baseline_body),
        [snap(ts(2009, 2, 5), titles[1], snapshot_body)],
    )


def test_title_vs_content_trivial_points() -> None:
    series = [
        content_series("http://stable.org/", LONG_A, LONG_A),            # (0.0, 0.0)
        content_series("http://rewritten.org/", LONG_A, LONG_B),         # (0.0, 1.0)
    ]
    grid = title_vs_content(series, [WINDOW_0902])
    assert grid.points == ((0.0, 0.0, 1), (0.0, 1.0, 1))
    assert grid.included == 2
    assert grid.frequency_total() == grid.included


def test_title_vs_content_counts_skips() -> None:
    no_copy = SnapshotSeries.make("http://empty.org/", base_page("http://empty.org/", "T", LONG_A), [])
    titleless = content_series("http://untitled.org/", LONG_A, LONG_A, titles=("T", None))  # type: ignore[arg-type]
    grid = title_vs_content([no_copy, titleless], [WINDOW_0902])
    assert grid.included == 0
    assert grid.skipped_no_window == 1
    assert grid.skipped_no_title == 1


def test_title_vs_content_mixed_windows_average_equally() -> None:
    # Two populated windows: contents identical in one, fully rewritten in the other -> mean 0.5.
    baseline = base_page("http://avg.org/", "aaaaaaaaaa", LONG_A)
    series = SnapshotSeries.make(
        "http://avg.org/",
        baseline,
        [
            snap(ts(2009, 2, 5), "aaaaaaaaaa", LONG_A),
            snap(ts(2008, 8, 5), "bbbbbbbbbb", LONG_B),
        ],
    )
    windows = make_windows("2009-02", 2)
    grid = title_vs_content([series], windows)
    assert grid.points == ((0.5, 0.5, 1),)


def test_title_vs_content_untitled_window_still_counts_for_content() -> None:
    # Snapshot without a title: its window joins the content mean but not the title mean.
    baseline = base_page("http://partial.org/", "aaaaaaaaaa", LONG_A)
    series = SnapshotSeries.make(
        "http://partial.org/",
        baseline,
        [
            snap(ts(2009, 2, 5), "aaaaaaaaaa", LONG_A),
            snap(ts(2008, 8, 5), None, LONG_B),
        ],
    )
    grid = title_vs_content([series], make_windows("2009-02", 2))
    assert grid.points == ((0.0, 0.5, 1),)


def test_snapshot_store_layout_and_round_trip(tmp_path: Path) -> None:
    store = SnapshotStore(tmp_path / "snapshots")
    uri = "http://Example.org/page?x=1"
    canonical = "http://example.org/page"
    store.add(uri, ts(2009, 2, 3), b"<title>Old</title><p>old body</p>")
    store.add(uri, ts(2008, 8, 9), b"<title>Older</title><p>older body</p>")
    key = hashlib.sha1(canonical.encode()).hexdigest()
    folder = tmp_path / "snapshots" / key
    assert (folder / "20090203T120000Z.html").is_file()
    assert (folder / "20080809T120000Z.html").is_file()
    manifest = json.loads((folder / "manifest.json").read_text())
    assert manifest["canonical_uri"] == canonical
    assert [row["timestamp"] for row in manifest["snapshots"]] == [
        "2008-08-09T12:00:00Z",
        "2009-02-03T12:00:00Z",
    ]
    series = store.load_series(uri, base_page(canonical, "Now", "current body"))
    assert len(series.snapshots) == 2
    assert series.snapshots[0].title is not None and series.snapshots[0].title.raw == "Older"
    assert series.snapshots[1].terms == ("old", "old", "body")
    assert store.canonical_uris() == [canonical]


def test_snapshot_store_unknown_uri_is_empty_series(tmp_path: Path) -> None:
    store = SnapshotStore(tmp_path / "snapshots")
    series = store.load_series("http://nothing.org/", base_page("http://nothing.org/", "T", "b"))
    assert series.snapshots == ()
    assert store.canonical_uris() == []


def test_correlation_grid_type_totals() -> None:
    grid = CorrelationGrid(points=((0.0, 1.0, 2), (0.5, 0.5, 1)), included=3, skipped_no_window=0, skipped_no_title=0)
    assert grid.frequency_total() == 3
