"""Corpus intake tests: extraction, tokenization, admission, manifest I/O."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relinker.corpus import (
    AdmissionReason,
    CorpusError,
    PageDocument,
    TitleRecord,
    admit,
    extract_text,
    extract_title,
    format_timestamp,
    load_documents,
    parse_timestamp,
    read_manifest,
    stopword_ratio,
    tokenize,
    write_manifest,
)
from relinker.stopwords import STOPWORDS

UTC = timezone.utc


def make_doc(
    *,
    uri: str = "http://example.com/",
    terms: tuple[str, ...] = (),
    title: str | None = None,
) -> PageDocument:
    return PageDocument(
        uri=uri,
        fetched_at=datetime(2009, 2, 1, tzinfo=UTC),
        raw_html=b"",
        title=TitleRecord.from_raw(title) if title is not None else None,
        terms=terms,
    )


def test_stopword_list_has_200_words() -> None:
    assert len(STOPWORDS) == 200
    assert all(w == w.lower() and w.isalpha() for w in STOPWORDS)


def test_extract_title_simple() -> None:
    html = b"<html><head><title> ACM   Hypertext 2006 </title></head><body>x</body></html>"
    title = extract_title(html)
    assert title is not None
    assert title.raw == "ACM Hypertext 2006"
    assert title.terms == ("acm", "hypertext", "2006")
    assert title.char_count == len("ACM Hypertext 2006")


def test_extract_title_missing_or_empty() -> None:
    assert extract_title(b"<html><body>no title here</body></html>") is None
    assert extract_title(b"<html><head><title>   </title></head></html>") is None
    assert extract_title(b"") is None


def test_extract_title_first_wins() -> None:
    html = b"<title>First</title><title>Second</title>"
    title = extract_title(html)
    assert title is not None and title.raw == "First"


def test_extract_title_outside_head_still_found() -> None:
    html = b"<html><body><p>x</p><title>Late Title</title></body></html>"
    title = extract_title(html)
    assert title is not None and title.raw == "Late Title"


def test_extract_title_decodes_entities() -> None:
    html = b"<title>Toys &amp; Cameras &#8212; Shop</title>"
    title = extract_title(html)
    assert title is not None
    assert title.raw == "Toys & Cameras — Shop"


def test_extract_title_unclosed_degrades() -> None:
    # Unterminated title: whatever data follows inside it is still just text.
    title = extract_title(b"<html><head><title>Partial")
    assert title is not None and title.raw == "Partial"


def test_extract_title_never_raises_on_junk() -> None:
    assert extract_title(b"\x00\xff<<<>>>&&&<title") is None


def test_extract_text_strips_tags() -> None:
    assert extract_text(b"<p>Vertical <b>Radio</b></p>") == "Vertical Radio"


def test_extract_text_drops_script_style_comments() -> None:
    html = (
        b"<html><head><style>p{color:red}</style>"
        b"<script>var x = '<p>not text</p>';</script></head>"
        b"<body><!-- hidden note -->Visible <i>words</i> only</body></html>"
    )
    assert extract_text(html) == "Visible words only"


def test_extract_text_decodes_entities_and_keeps_title_text() -> None:
    html = b"<head><title>Fish &amp; Chips</title></head><body>menu</body>"
    assert extract_text(html) == "Fish & Chips menu"


def test_extract_text_handles_lossy_utf8() -> None:
    # Invalid UTF-8 bytes decode with replacement rather than aborting.
    text = extract_text(b"<p>caf\xc3\xa9 \xff ok</p>")
    assert "café" in text and "ok" in text


def test_extract_text_nested_unclosed_fixture() -> None:
    html = b"<div><p>alpha <b>beta</p> gamma<br>delta"
    assert extract_text(html) == "alpha beta gamma delta"


@given(st.text(alphabet=st.characters(blacklist_characters="<>&"), max_size=80))
def test_extract_text_emits_no_markup_brackets(body: str) -> None:
    out = extract_text(f"<html><body><p>{body}</p></body></html>")
    assert "<" not in out and ">" not in out


def test_tokenize_examples() -> None:
    assert tokenize("Documentary Toy Camera Photography of Nic Nichols: Holga, Lomo and other Lo-Fi Cameras!") == (
        "documentary", "toy", "camera", "photography", "of", "nic", "nichols",
        "holga", "lomo", "and", "other", "lo", "fi", "cameras",
    )
    assert tokenize("index.html") == ("index", "html")
    assert tokenize("...") == ()
    assert tokenize("") == ()
    assert tokenize("a_b") == ("a", "b")
    assert tokenize("one one ONE") == ("one", "one", "one")


@given(st.text(max_size=120))
def test_tokenize_idempotent_and_lowercase(text: str) -> None:
    terms = tokenize(text)
    assert tokenize(" ".join(terms)) == terms
    assert all(t == t.lower() for t in terms)
    assert all(t for t in terms)


def test_title_record_char_count_counts_collapsed_raw() -> None:
    t = TitleRecord.from_raw("  Home   Page ")
    assert t.raw == "Home Page"
    assert t.char_count == 9
    assert t.terms == ("home", "page")


def english_filler(n: int) -> tuple[str, ...]:
    # Every third token is a stopword, comfortably above the 10% English bar.
    out = []
    for i in range(n):
        out.append("the" if i % 3 == 0 else f"word{i}")
    return tuple(out)


def test_admit_too_short_boundary() -> None:
    doc49 = make_doc(terms=english_filler(49), title="Fine Title")
    doc50 = make_doc(terms=english_filler(50), title="Fine Title")
    assert admit(doc49).kept is False
    assert AdmissionReason.TOO_SHORT in admit(doc49).reasons
    assert admit(doc50).kept is True
    assert admit(doc50).reasons == ()


def test_admit_not_english() -> None:
    pseudo = tuple(f"zumbra{i}" for i in range(60))  # no stopwords at all
    report = admit(make_doc(terms=pseudo, title="Zumbra"))
    assert report.kept is False
    assert AdmissionReason.NOT_ENGLISH in report.reasons
    assert AdmissionReason.TOO_SHORT not in report.reasons


def test_admit_missing_title_warns_but_keeps() -> None:
    report = admit(make_doc(terms=english_filler(60), title=None))
    assert report.kept is True
    assert report.reasons == (AdmissionReason.NO_TITLE,)


def test_admit_kept_docs_meet_minimum() -> None:
    for n in (0, 10, 49, 50, 51, 200):
        doc = make_doc(terms=english_filler(n), title="T")
        if admit(doc).kept:
            assert len(doc.terms) >= 50


def test_stopword_ratio_boundary() -> None:
    terms = ("the",) + tuple(f"x{i}" for i in range(9))  # exactly 10%
    assert stopword_ratio(terms) == pytest.approx(0.10)
    doc = make_doc(terms=terms * 6, title="T")
    assert AdmissionReason.NOT_ENGLISH not in admit(doc).reasons


def test_timestamp_round_trip() -> None:
    ts = parse_timestamp("2009-02-01T12:30:45Z")
    assert ts == datetime(2009, 2, 1, 12, 30, 45, tzinfo=UTC)
    assert format_timestamp(ts) == "2009-02-01T12:30:45Z"
    assert parse_timestamp("2009-02-01T12:30:45.999+00:00").microsecond == 0
    with pytest.raises(CorpusError):
        parse_timestamp("not a time")


def test_manifest_round_trip(tmp_path: Path) -> None:
    (tmp_path / "p1.html").write_bytes(b"<title>One</title><p>body one</p>")
    (tmp_path / "p2.html").write_bytes(b"<title>Two</title><p>body two</p>")
    manifest = tmp_path / "manifest.jsonl"
    entries = read_manifest_after_write(manifest)
    docs = load_documents(manifest)
    assert [e.id for e, _ in docs] == ["p1", "p2"]
    assert docs[0][1].title is not None and docs[0][1].title.raw == "One"
    assert docs[0][1].terms == ("one", "body", "one")
    assert entries[1].uri == "http://two.example.org/"


def read_manifest_after_write(manifest: Path):
    from relinker.corpus import ManifestEntry

    entries = [
        ManifestEntry(id="p1", uri="http://one.example.org/", fetched_at=datetime(2009, 2, 1, tzinfo=UTC), path="p1.html"),
        ManifestEntry(id="p2", uri="http://two.example.org/", fetched_at=datetime(2009, 2, 2, tzinfo=UTC), path="p2.html"),
    ]
    write_manifest(entries, manifest)
    return read_manifest(manifest)


def test_manifest_malformed_line(tmp_path: Path) -> None:
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text('{"id": "a", "uri": "http://a.org/", "fetched_at": "2009-01-01T00:00:00Z", "path": "a.html"}\nnot json\n')
    with pytest.raises(CorpusError, match="malformed"):
        read_manifest(manifest)


def test_manifest_missing_field(tmp_path: Path) -> None:
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text(json.dumps({"id": "a", "uri": "http://a.org/"}) + "\n")
    with pytest.raises(CorpusError, match="missing"):
        read_manifest(manifest)


def test_load_documents_missing_file(tmp_path: Path) -> None:
    manifest = tmp_path / "manifest.jsonl"
    manifest.write_text(
        json.dumps({"id": "a", "uri": "http://a.org/", "fetched_at": "2009-01-01T00:00:00Z", "path": "gone.html"}) + "\n"
    )
    with pytest.raises(CorpusError, match="cannot read page"):
        load_documents(manifest)
