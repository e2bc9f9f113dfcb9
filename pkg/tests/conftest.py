"""Shared fixtures: a disposable copy of the bundled corpus and archive."""

from __future__ import annotations

import shutil
from pathlib import Path

import pytest

FIXTURES = Path(__file__).resolve().parent / "fixtures"
GOLDEN = FIXTURES / "golden"


@pytest.fixture
def fixture_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    """Copy of the bundled fixture inputs, with cwd pinned so relative paths resolve."""
    for name in ("corpus", "snapshots"):
        shutil.copytree(FIXTURES / name, tmp_path / name)
    for name in ("config.cfg", "stop_titles.txt"):
        shutil.copy(FIXTURES / name, tmp_path / name)
    monkeypatch.delenv("RELINKER_CONFIG", raising=False)
    monkeypatch.delenv("RELINKER_SERVER", raising=False)
    monkeypatch.chdir(tmp_path)
    return tmp_path
