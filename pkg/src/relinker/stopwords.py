"""Bundled 200-word English stopword list shared by tokenized pipelines."""

from __future__ import annotations

from importlib import resources

__all__ = ["STOPWORDS", "load_stopwords"]


def load_stopwords() -> frozenset[str]:
    """Read the bundled stopword list (one lowercase word per line)."""
    text = resources.files("relinker.data").joinpath("english_stopwords.txt").read_text("utf-8")
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


STOPWORDS: frozenset[str] = load_stopwords()
