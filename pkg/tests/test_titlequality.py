"""Stop-title cover, verdict rules, and confusion matrix tests."""

from __future__ import annotations

from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from relinker.corpus import TitleRecord
from relinker.titlequality import (
    DEFAULT_STOP_TITLES,
    ConfusionMatrix,
    KeyMismatchError,
    StopTitleList,
    VerdictRule,
    confusion,
    covered_positions,
    predict,
    stop_term_cover,
)


def title(raw: str) -> TitleRecord:
    return TitleRecord.from_raw(raw)


def test_default_list_contents() -> None:
    stop = StopTitleList.default()
    assert len(stop) == 8
    for phrase in ("home", "index", "home page", "untitled document", "welcome",
                   "main page", "default page", "index html"):
        assert phrase in stop
    assert "news" not in stop


def test_cover_matches_longest_phrase_first() -> None:
    stop = StopTitleList.default()
    assert stop_term_cover(title("home page news"), stop) == 2
    assert stop_term_cover(title("quarterly report 2008"), stop) == 0
    assert stop_term_cover(title("welcome"), stop) == 1
    assert stop_term_cover(title("index.html"), stop) == 2  # tokenizes to "index html"


def test_cover_is_non_overlapping() -> None:
    # "home page" consumes both terms; the trailing "page" position can't re-match "home".
    stop = StopTitleList(["home page", "home", "page"])
    assert covered_positions(("home", "page", "home"), stop) == (True, True, True)
    assert stop_term_cover(title("home page home"), stop) == 3


def test_cover_rejects_empty_title() -> None:
    with pytest.raises(ValueError):
        stop_term_cover(title("!!!"))


def test_predict_exact_stop_title() -> None:
    verdict = predict(title("Home"))
    assert verdict.predicted_good is False
    assert verdict.rule is VerdictRule.EXACT_STOP_TITLE
    assert verdict.term_ratio == 1.0
    assert verdict.char_ratio == 1.0


def test_predict_exact_is_case_and_punctuation_insensitive() -> None:
    assert predict(title("  HOME  ")).rule is VerdictRule.EXACT_STOP_TITLE
    assert predict(title("Index.html")).rule is VerdictRule.EXACT_STOP_TITLE


def test_predict_term_ratio_rule() -> None:
    verdict = predict(title("welcome home"))
    assert verdict.predicted_good is False
    assert verdict.rule is VerdictRule.TERM_RATIO
    assert verdict.term_ratio == 1.0


def test_predict_threshold_is_strict() -> None:
    # Cover 3 of 4 terms: exactly 0.75 on terms, 13/23 on characters; both fail the strict test.
    verdict = predict(title("home page index newsletter"))
    assert verdict.term_ratio == pytest.approx(0.75)
    assert verdict.char_ratio == pytest.approx(13 / 23)
    assert verdict.rule is VerdictRule.PASS
    assert verdict.predicted_good is True


def test_predict_char_ratio_rule() -> None:
    # One of five terms covered (0.2 on terms) but the covered term dominates characters:
    # "untitled document" = 16 chars of 20 total -> 0.8 > 0.75.
    verdict = predict(title("untitled document a b cd"))
    assert verdict.rule is VerdictRule.CHAR_RATIO
    assert verdict.term_ratio == pytest.approx(2 / 5)
    assert verdict.char_ratio == pytest.approx(16 / 20)
    assert verdict.predicted_good is False


def test_predict_descriptive_title_passes() -> None:
    verdict = predict(title("Documentary Toy Camera Photography of Nic Nichols: Holga, Lomo and other Lo-Fi Cameras!"))
    assert verdict.predicted_good is True
    assert verdict.rule is VerdictRule.PASS
    assert verdict.excessive_terms is False


def test_predict_flags_excessive_terms_without_rejecting() -> None:
    long_title = " ".join(f"word{i}" for i in range(25))
    verdict = predict(title(long_title))
    assert verdict.excessive_terms is True
    assert verdict.predicted_good is True  # flag only, never rejects


def test_predict_empty_title_raises() -> None:
    with pytest.raises(ValueError):
        predict(title("???"))


def test_predict_custom_threshold() -> None:
    # With threshold 0.5 the 0.75 term ratio becomes a rejection.
    verdict = predict(title("home page index newsletter"), threshold=0.5)
    assert verdict.rule is VerdictRule.TERM_RATIO
    assert verdict.predicted_good is False


def test_stop_title_list_from_file(tmp_path: Path) -> None:
    listing = tmp_path / "stops.txt"
    listing.write_text("home\n\nwelcome to my new website\nindex html\n")
    stop = StopTitleList.from_file(listing)
    assert len(stop) == 3
    assert predict(title("Welcome to my new website!"), stop).rule is VerdictRule.EXACT_STOP_TITLE


def test_stop_title_list_rejects_empty() -> None:
    with pytest.raises(ValueError):
        StopTitleList(["", "   ", "!!!"])


def test_exact_rule_monotone_in_list() -> None:
    base = StopTitleList.default()
    extended = StopTitleList(DEFAULT_STOP_TITLES + ("welcome to my new website",))
    t = title("Welcome to my new website!")
    assert predict(t, base).predicted_good is True
    assert predict(t, extended).predicted_good is False  # extension can only add exact matches


@given(st.lists(st.sampled_from(["alpha", "beta", "gamma", "delta"]), min_size=1, max_size=8))
def test_adding_disjoint_phrase_never_changes_verdict(terms: list[str]) -> None:
    # A phrase sharing no vocabulary with the title cannot affect greedy matching.
    t = title(" ".join(terms))
    base = StopTitleList.default()
    extended = StopTitleList(DEFAULT_STOP_TITLES + ("zzz yyy",))
    assert predict(t, base) == predict(t, extended)


def test_greedy_preemption_is_expected_behavior() -> None:
    # Greedy longest-first can cover fewer terms after a phrase is added: the new
    # "a b" match at position 0 preempts the longer "b c d e" match.
    t = title("a b c d e")
    small = StopTitleList(["b c d e"])
    assert stop_term_cover(t, small) == 4
    assert predict(t, small).rule is VerdictRule.TERM_RATIO  # 0.8 > 0.75
    grown = StopTitleList(["b c d e", "a b"])
    assert stop_term_cover(t, grown) == 2
    assert predict(t, grown).rule is VerdictRule.PASS


def test_confusion_simple_quarters() -> None:
    predictions = {"u1": True, "u2": True, "u3": False, "u4": False}
    actuals = {"u1": True, "u2": False, "u3": True, "u4": False}
    m = confusion(predictions, actuals)
    assert m == ConfusionMatrix(25.0, 25.0, 25.0, 25.0, total=4)
    assert sum(m.cells().values()) == pytest.approx(100.0, abs=0.01)


def test_confusion_single_cell() -> None:
    m = confusion({"u": True}, {"u": True})
    assert m.found_found == 100.0
    assert m.found_notfound == m.notfound_found == m.notfound_notfound == 0.0


def test_confusion_orientation() -> None:
    # actually discovered but predicted bad lands in found_notfound, not the transpose
    m = confusion({"u": False}, {"u": True})
    assert m.found_notfound == 100.0
    assert m.notfound_found == 0.0


def test_confusion_key_mismatch() -> None:
    with pytest.raises(KeyMismatchError, match="u2"):
        confusion({"u1": True}, {"u1": True, "u2": False})


def test_confusion_empty_rejected() -> None:
    with pytest.raises(ValueError):
        confusion({}, {})


@given(
    st.dictionaries(
        st.sampled_from([f"http://u{i}.org/" for i in range(10)]),
        st.tuples(st.booleans(), st.booleans()),
        min_size=1,
    )
)
def test_confusion_cells_are_count_multiples(assignments: dict[str, tuple[bool, bool]]) -> None:
    predictions = {k: v[0] for k, v in assignments.items()}
    actuals = {k: v[1] for k, v in assignments.items()}
    m = confusion(predictions, actuals)
    n = len(assignments)
    for value in m.cells().values():
        # every cell is an integer count scaled by 100/n
        assert (value * n / 100.0) == pytest.approx(round(value * n / 100.0))
    assert sum(m.cells().values()) == pytest.approx(100.0, abs=0.01)
