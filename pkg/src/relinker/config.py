"""Runtime tunables: defaults, a flat key=value file format, and override merging."""

from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Any, Callable, Mapping

CONFIG_ENV_VAR = "RELINKER_CONFIG"
SERVER_ENV_VAR = "RELINKER_SERVER"


class ConfigError(ValueError):
    """Raised when a config file is unreadable or a value is out of range."""


@dataclass(frozen=True)
class Config:
    """Every tunable in one place; defaults are load-bearing, do not edit casually."""

    min_terms: int = 50
    ls_k: tuple[int, ...] = (5, 7)
    shingle_w: int = 5
    quality_threshold: float = 0.75
    minor_change_threshold: float = 0.3
    max_results: int = 100
    discovered_depth: int = 10
    index_size_estimate: int | None = None
    stop_title_path: str | None = None
    window_anchor: str = "2009-02"
    window_count: int = 27

    def __post_init__(self) -> None:
        if self.min_terms < 0:
            raise ConfigError("min_terms must be >= 0")
        if not self.ls_k or any(k < 1 for k in self.ls_k):
            raise ConfigError("ls_k needs at least one positive size")
        if self.shingle_w < 1:
            raise ConfigError("shingle_w must be >= 1")
        for name in ("quality_threshold", "minor_change_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must be within [0, 1]")
        if self.max_results < 1:
            raise ConfigError("max_results must be >= 1")
        if self.discovered_depth < 1:
            raise ConfigError("discovered_depth must be >= 1")
        if self.index_size_estimate is not None and self.index_size_estimate < 1:
            raise ConfigError("index_size_estimate must be >= 1 when set")
        if self.window_count < 1:
            raise ConfigError("window_count must be >= 1")

    def to_dict(self) -> dict[str, Any]:
        """JSON-friendly echo of the effective configuration."""
        out: dict[str, Any] = {}
        for field in fields(self):
            value = getattr(self, field.name)
            out[field.name] = list(value) if isinstance(value, tuple) else value
        return out


def _parse_int(raw: str) -> int:
    return int(raw, 10)


def _parse_float(raw: str) -> float:
    return float(raw)


def _parse_int_list(raw: str) -> tuple[int, ...]:
    parts = [piece.strip() for piece in raw.split(",") if piece.strip()]
    return tuple(int(piece, 10) for piece in parts)


def _parse_optional_int(raw: str) -> int | None:
    return None if raw.lower() in ("", "none") else int(raw, 10)


def _parse_optional_str(raw: str) -> str | None:
    return raw or None


def _parse_str(raw: str) -> str:
    return raw


_VALUE_PARSERS: dict[str, Callable[[str], Any]] = {
    "min_terms": _parse_int,
    "ls_k": _parse_int_list,
    "shingle_w": _parse_int,
    "quality_threshold": _parse_float,
    "minor_change_threshold": _parse_float,
    "max_results": _parse_int,
    "discovered_depth": _parse_int,
    "index_size_estimate": _parse_optional_int,
    "stop_title_path": _parse_optional_str,
    "window_anchor": _parse_str,
    "window_count": _parse_int,
}


def parse_config_text(text: str, source: str = "<config>") -> dict[str, Any]:
    """Parse `key = value` lines into typed overrides; # starts a comment line."""
    overrides: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        key, sep, raw_value = stripped.partition("=")
        if not sep:
            raise ConfigError(f"{source}:{lineno}: expected key=value, got {stripped!r}")
        key = key.strip()
        parser = _VALUE_PARSERS.get(key)
        if parser is None:
            raise ConfigError(f"{source}:{lineno}: unknown config key {key!r}")
        try:
            overrides[key] = parser(raw_value.strip())
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}") from exc
    return overrides


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text, source=str(path))


def resolve_config(
    path: str | Path | None = None,
    overrides: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
) -> Config:
    """Defaults, then the config file (explicit path beats RELINKER_CONFIG), then flags."""
    environ = os.environ if env is None else env
    merged: dict[str, Any] = {}
    chosen = str(path) if path is not None else environ.get(CONFIG_ENV_VAR)
    if chosen:
        merged.update(load_config_file(chosen))
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return replace(Config(), **merged)
    except TypeError as exc:
        raise ConfigError(f"unknown config key: {exc}") from exc
