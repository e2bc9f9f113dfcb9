"""Request and response bodies for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

from relinker.config import Config


class ConfigModel(BaseModel):
    """Wire form of the effective configuration; defaults mirror Config exactly."""

    min_terms: int = 50
    ls_k: list[int] = Field(default_factory=lambda: [5, 7])
    shingle_w: int = 5
    quality_threshold: float = 0.75
    minor_change_threshold: float = 0.3
    max_results: int = 100
    discovered_depth: int = 10
    index_size_estimate: int | None = None
    stop_title_path: str | None = None
    window_anchor: str = "2009-02"
    window_count: int = 27

    def to_config(self) -> Config:
        data = self.model_dump()
        data["ls_k"] = tuple(data["ls_k"])
        return Config(**data)


def _default_config() -> ConfigModel:
    return ConfigModel()


class PageBody(BaseModel):
    uri: str
    html: str
    fetched_at: str = "2009-02-01T00:00:00Z"


class ManifestRequest(BaseModel):
    manifest: str
    config: ConfigModel = Field(default_factory=_default_config)


class IndexBuildRequest(ManifestRequest):
    index_path: str


class IndexStatsRequest(BaseModel):
    index_path: str
    config: ConfigModel = Field(default_factory=_default_config)


class TitleRequest(BaseModel):
    page: PageBody
    config: ConfigModel = Field(default_factory=_default_config)


class QualityRequest(BaseModel):
    """Exactly one of `titles` (keyed text) or `manifest` (corpus path) must be set."""

    titles: dict[str, str] | None = None
    manifest: str | None = None
    config: ConfigModel = Field(default_factory=_default_config)


class SimRequest(BaseModel):
    a: PageBody
    b: PageBody
    config: ConfigModel = Field(default_factory=_default_config)


class StrategyRequest(ManifestRequest):
    index_path: str
    strategy: Literal["title", "ls5", "ls7"] = "title"


class ArchiveRequest(ManifestRequest):
    snapshots: str


class EvalRequest(BaseModel):
    predictions: dict[str, bool]
    actuals: dict[str, bool]
    config: ConfigModel = Field(default_factory=_default_config)


class ConfigEcho(BaseModel):
    config: dict[str, Any]


class Health(BaseModel):
    status: Literal["ok"] = "ok"


class IngestResponse(ConfigEcho):
    manifest: str
    total: int
    admitted: list[dict[str, Any]]
    rejected: list[dict[str, Any]]
    warnings: list[dict[str, Any]]


class IndexBuildResponse(ConfigEcho):
    index_path: str
    admitted: int
    rejected: int
    stats: dict[str, int | None]


class IndexStatsResponse(ConfigEcho):
    index_path: str
    stats: dict[str, int | None]


class TitleResponse(ConfigEcho):
    uri: str
    canonical_uri: str
    term_count: int
    title: dict[str, Any] | None


class LexsigResponse(ConfigEcho):
    signatures: dict[str, list[dict[str, Any]]]


class QualityResponse(ConfigEcho):
    verdicts: dict[str, dict[str, Any]]
    skipped_empty: list[str]
    skipped_no_title: list[str] = Field(default_factory=list)


class SimResponse(ConfigEcho):
    a: dict[str, Any]
    b: dict[str, Any]
    title_distance: float | None
    term_overlap: float
    resemblance: float


class RediscoverResponse(ConfigEcho):
    strategy: str
    outcomes: dict[str, dict[str, Any]]
    counts: dict[str, int]
    fractions: dict[str, float]
    evaluated: int
    skipped_no_title: list[str]
    errors: dict[str, str]
    summary_tsv: str


class RelevanceResponse(ConfigEcho):
    strategy: str
    relevance: dict[str, dict[str, Any]]
    skipped_no_title: list[str]
    errors: dict[str, str]
    csv: str


class EvolveResponse(ConfigEcho):
    windows: list[dict[str, Any]]
    csv: str


class CorrelateResponse(ConfigEcho):
    points: list[list[Any]]
    included: int
    skipped_no_window: int
    skipped_no_title: int
    csv: str


class EvalResponse(ConfigEcho):
    cells: dict[str, float]
    total: int
    tsv: str


class ErrorBody(BaseModel):
    code: Literal["usage", "data"]
    message: str


class ErrorResponse(BaseModel):
    error: ErrorBody
