#!/usr/bin/env python3
"""Rebuild the bundled test fixtures: a 20-page corpus, a snapshot archive, and config.

Every page and snapshot is written verbatim (no randomness), and the designed
properties the test suite relies on are asserted at the end, so an accidental
edit to a body or title fails loudly here instead of mysteriously in the tests.
"""

from __future__ import annotations

import shutil
import sys
from pathlib import Path

from relinker.archive import SnapshotSeries, SnapshotStore, make_windows, representative, title_vs_content
from relinker.corpus import ManifestEntry, PageDocument, admit, parse_timestamp, write_manifest
from relinker.rediscovery import Strategy, canonicalize_uri, evaluate_corpus
from relinker.similarity import levenshtein_norm, resemblance, shingle_set
from relinker.simindex import build_index
from relinker.titlequality import DEFAULT_STOP_TITLES, StopTitleList, predict

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

COLLIDING_TITLE = "Welcome to my new website!"

# Twelve body-padding stopwords keep the shingle arithmetic of d11 exact; the
# snapshot swaps the first metal, five positions clear of both ends, so the
# change touches exactly five shingles on top of the one the title touches.
PADDING = "the of and to in is it on as at by for"
METALS = "copper silver bronze iron pewter nickel cobalt zinc tin"
METALS_SNAPSHOT = METALS.replace("copper", "brass")


def page(title: str | None, body: str) -> str:
    head = f"<head><title>{title}</title></head>" if title is not None else "<head></head>"
    return f"<html>{head}<body><p>{body}</p></body></html>"


# id, uri, title, body
CORPUS = [
    (
        "d01",
        "http://clockwork.example.org/",
        "Clockwork Toy Cabinet",
        "the clockwork toy cabinet holds tin automata and windup birds from old "
        "workshops with gears that still turn in every drawer",
    ),
    (
        "d02",
        "http://paella.example.org/",
        "Saffron Paella Kitchen",
        "our saffron paella kitchen shares recipes from the coast and notes on "
        "rice stock peppers and slow flame cooking for friends",
    ),
    (
        "d03",
        "http://telescope.example.org/",
        "Amateur Telescope Optics",
        "an amateur telescope optics log about mirrors lenses and eyepieces with "
        "collimation tips for clear nights under open sky and stars",
    ),
    (
        "d04",
        "http://rugby.example.org/",
        "Coastal Rugby Fixtures",
        "the coastal rugby fixtures list for this season covers every club match "
        "with kickoff times and travel notes for away grounds",
    ),
    (
        "d05",
        "http://ferns.example.org/",
        "Shade Fern Nursery",
        "a shade fern nursery guide with potting advice spore trays and misting "
        "schedules for fronds that prefer cool damp corners",
    ),
    (
        "d06",
        "http://jazz.example.org/",
        "Midnight Jazz Quartet",
        "the midnight jazz quartet plays standards and originals at small rooms "
        "around town with dates and tickets posted here each month",
    ),
    (
        "d07",
        "http://pottery.example.org/",
        "Ash Glaze Pottery",
        "an ash glaze pottery studio firing stoneware in a wood kiln with notes "
        "on slips oxides and cones for every batch",
    ),
    (
        "d08",
        "http://orchard.example.org/",
        "Apple Orchard Diary",
        "the apple orchard diary of a junction farm and its seasons with notes "
        "on cider pressing each autumn by the growers",
    ),
    (
        "d09",
        "http://press.example.org/",
        "aaaaaaaaaa",
        "the press of this town and its daily record in print as issued from "
        "founders over many years on end",
    ),
    (
        "d10",
        "http://quartz.example.org/",
        "quartz almanac",
        "the survey of seasons and the yearly charts in amber as kept for "
        "readers by the printer at dusk",
    ),
    (
        "d11",
        "http://metals.example.org/",
        "mmmmmmmmmm",
        f"{PADDING} {METALS}",
    ),
    (
        "d12",
        "http://ledger.example.org/",
        "Harbor Ledger",
        "the harbor ledger of tides and cargo kept by the master at every quay "
        "with entries for each season",
    ),
    (
        "d13",
        "http://collider1.example.org/",
        COLLIDING_TITLE,
        "the club flies paper kites over dunes and trades plans for box frames "
        "with string and careful knots",
    ),
    (
        "d14",
        "http://collider2.example.org/",
        COLLIDING_TITLE,
        "a guide to cedar canoes on quiet rivers with portage advice and paddle "
        "care from seasoned trippers everywhere",
    ),
    (
        "d15",
        "http://collider3.example.org/",
        COLLIDING_TITLE,
        "our beekeeping circle keeps hives behind the meadow and posts honey "
        "harvest dates with frames wax and smoker tips",
    ),
    (
        "d16",
        "http://collider4.example.org/",
        COLLIDING_TITLE,
        "a fossil hunting log from chalk cliffs and quarries with ammonites "
        "shark teeth and echinoids in labeled trays",
    ),
    (
        "d17",
        "http://collider5.example.org/",
        COLLIDING_TITLE,
        "the lantern collectors page about railway lamps wicks and globes with "
        "restoration notes and swap meets twice a year",
    ),
    (
        "d18",
        "http://spoiler.example.org/",
        "Grand Welcome Website Directory",
        "welcome welcome welcome welcome welcome website website website website "
        "website the grand directory of sites lists anything and everything for everyone",
    ),
    (
        "d19",
        "http://untitled.example.org/",
        None,
        "a plain page of short notes kept here for friends with lists of chores "
        "and errands from our week in town",
    ),
    (
        "d20",
        "http://stub.example.org/",
        "Tiny Stub",
        "almost nothing to see over here",
    ),
]

SNAPSHOT_STAMPS = [
    "2009-02-05T12:00:00Z",
    "2008-08-05T12:00:00Z",
    "2008-02-05T12:00:00Z",
    "2007-08-05T12:00:00Z",
    "2007-02-05T12:00:00Z",
    "2006-08-05T12:00:00Z",
]

# d09: title drifts a little further in each older window; body never changes.
RETITLED = ["aaaaaaaaab", "aaaaaaaabb", "aaaaaaabbb", "aaaaaabbbb", "aaaaabbbbb", "aaaabbbbbb"]

REWRITTEN_BODY = (
    "it was winter on that bay near dawn when every pier froze over while "
    "gulls circled above silent water"
)

CONFIG_TEXT = """\
# bundled fixture configuration
min_terms = 20
window_anchor = 2009-02
window_count = 6
stop_title_path = stop_titles.txt
"""


def corpus_html(doc_id: str) -> str:
    for did, _, title, body in CORPUS:
        if did == doc_id:
            return page(title, body)
    raise KeyError(doc_id)


def snapshot_html(doc_id: str, window_idx: int) -> str | None:
    """The archived copy of a page for one time window; None when none is stored."""
    if doc_id == "d08":
        return corpus_html("d08")
    if doc_id == "d09":
        _, _, _, body = next(row for row in CORPUS if row[0] == "d09")
        return page(RETITLED[window_idx], body)
    if doc_id == "d10":
        return page("quartz almanac", REWRITTEN_BODY)
    if doc_id == "d11":
        return page("mmmmmmmmxx", f"{PADDING} {METALS_SNAPSHOT}")
    if doc_id == "d12":
        _, _, _, body = next(row for row in CORPUS if row[0] == "d12")
        return page(None, body)
    return None


def build(root: Path) -> None:
    corpus_dir = root / "corpus"
    snapshots_dir = root / "snapshots"
    for folder in (corpus_dir, snapshots_dir):
        if folder.exists():
            shutil.rmtree(folder)
    corpus_dir.mkdir(parents=True)

    entries = []
    for i, (doc_id, uri, title, body) in enumerate(CORPUS, start=1):
        (corpus_dir / f"{doc_id}.html").write_text(page(title, body), encoding="utf-8")
        fetched = parse_timestamp(f"2009-08-01T06:{i:02d}:00Z")
        entries.append(ManifestEntry(id=doc_id, uri=uri, fetched_at=fetched, path=f"{doc_id}.html"))
    write_manifest(entries, corpus_dir / "manifest.jsonl")

    store = SnapshotStore(snapshots_dir)
    for doc_id, uri, _, _ in CORPUS:
        for idx, stamp in enumerate(SNAPSHOT_STAMPS):
            html = snapshot_html(doc_id, idx)
            if html is not None:
                store.add(uri, parse_timestamp(stamp), html.encode("utf-8"))

    stop_lines = list(DEFAULT_STOP_TITLES) + ["welcome to my new website"]
    (root / "stop_titles.txt").write_text("\n".join(stop_lines) + "\n", encoding="utf-8")
    (root / "config.cfg").write_text(CONFIG_TEXT, encoding="utf-8")


def load_docs(root: Path) -> dict[str, PageDocument]:
    docs = {}
    for i, (doc_id, uri, title, body) in enumerate(CORPUS, start=1):
        fetched = parse_timestamp(f"2009-08-01T06:{i:02d}:00Z")
        docs[doc_id] = PageDocument.from_html(uri, fetched, page(title, body).encode("utf-8"))
    return docs


def verify(root: Path) -> None:
    docs = load_docs(root)

    # Admission: only the stub is rejected, and strictly for being short.
    for doc_id, doc in docs.items():
        report = admit(doc, min_terms=20)
        if doc_id == "d20":
            assert not report.kept and [r.value for r in report.reasons] == ["TooShort"], doc_id
        else:
            assert report.kept, (doc_id, report.reasons)
    admitted = [doc for doc_id, doc in docs.items() if doc_id != "d20"]
    assert len(admitted) == 19

    # Title retrieval: unique titles and the spoiler hit rank 1; colliders land 2..6.
    index = build_index(admitted)
    outcome = evaluate_corpus(admitted, index, Strategy.TITLE, provider=index)
    ranks = {uri: o.rank for uri, o in outcome.outcomes.items()}
    for doc_id in [f"d{n:02d}" for n in range(1, 13)] + ["d18"]:
        assert ranks[canonicalize_uri(docs[doc_id].uri)] == 1, doc_id
    collider_ranks = sorted(ranks[canonicalize_uri(docs[f"d{n}"].uri)] for n in range(13, 18))
    assert collider_ranks == [2, 3, 4, 5, 6], collider_ranks
    assert outcome.skipped_no_title == (canonicalize_uri(docs["d19"].uri),)

    # Quality: the colliding title is fine by default and bad with the bundled list.
    title = docs["d13"].title
    assert title is not None
    assert predict(title, StopTitleList.default()).predicted_good
    bundled = StopTitleList.from_file(root / "stop_titles.txt")
    verdict = predict(title, bundled)
    assert not verdict.predicted_good and verdict.rule.value == "ExactStopTitle"

    # Snapshot designs: drift and resemblance per window, then the whole grid.
    def snap_doc(doc_id: str, idx: int) -> PageDocument:
        html = snapshot_html(doc_id, idx)
        assert html is not None
        return PageDocument.from_html(docs[doc_id].uri, parse_timestamp(SNAPSHOT_STAMPS[idx]), html.encode("utf-8"))

    for idx, want in enumerate([0.1, 0.2, 0.3, 0.4, 0.5, 0.6]):
        snap = snap_doc("d09", idx)
        assert snap.title is not None and docs["d09"].title is not None
        drift = levenshtein_norm(docs["d09"].title.raw, snap.title.raw)
        assert abs(drift - want) < 1e-12, (idx, drift)
        r = resemblance(shingle_set(docs["d09"].terms, 5), shingle_set(snap.terms, 5))
        assert abs(r - 16 / 18) < 1e-12, r
    drift11 = snap_doc("d11", 0)
    assert drift11.title is not None and docs["d11"].title is not None
    assert levenshtein_norm(docs["d11"].title.raw, drift11.title.raw) == 0.2
    assert resemblance(shingle_set(docs["d11"].terms, 5), shingle_set(drift11.terms, 5)) == 0.5
    rewritten = snap_doc("d10", 0)
    assert resemblance(shingle_set(docs["d10"].terms, 5), shingle_set(rewritten.terms, 5)) == 0.0
    stable = snap_doc("d08", 0)
    assert resemblance(shingle_set(docs["d08"].terms, 5), shingle_set(stable.terms, 5)) == 1.0
    assert snap_doc("d12", 0).title is None

    windows = make_windows("2009-02", 6)
    store = SnapshotStore(root / "snapshots")
    series = []
    for doc_id in sorted(docs):
        if doc_id == "d20":
            continue
        series.append(store.load_series(docs[doc_id].uri, docs[doc_id]))
    for s in series:
        if s.snapshots:
            for window in windows:
                assert representative(s, window) is not None, (s.uri, window.label)
    grid = title_vs_content(series, windows)
    assert grid.points == ((0.0, 0.0, 1), (0.0, 1.0, 1), (0.2, 0.5, 1), (0.4, 0.1, 1)), grid.points
    assert grid.included == 4 and grid.skipped_no_window == 14 and grid.skipped_no_title == 1


def main() -> int:
    build(FIXTURES)
    verify(FIXTURES)
    print(f"fixtures rebuilt under {FIXTURES}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
