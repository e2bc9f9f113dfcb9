"""FastAPI application exposing every pipeline run over HTTP."""

from __future__ import annotations

import argparse
import functools
from typing import Callable, TypeVar

from fastapi import FastAPI
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from relinker import __version__, pipeline
from relinker.config import ConfigError
from relinker.corpus import PageDocument, parse_timestamp
from relinker.rediscovery import Strategy
from relinker.service import schemas

F = TypeVar("F", bound=Callable)

_ERROR_RESPONSES = {400: {"model": schemas.ErrorResponse}}


def _api_errors(fn: F) -> F:
    """Turn library errors into a 400 with a usage/data code the CLI maps to exits."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, RuntimeError, OSError) as exc:
            body = {"error": {"code": pipeline.classify_error(exc), "message": str(exc)}}
            return JSONResponse(status_code=400, content=body)

    return wrapper  # type: ignore[return-value]


def _page(body: schemas.PageBody) -> PageDocument:
    return PageDocument.from_html(body.uri, parse_timestamp(body.fetched_at), body.html.encode("utf-8"))


def create_app() -> FastAPI:
    app = FastAPI(title="relinker", version=__version__)

    @app.exception_handler(RequestValidationError)
    def invalid_request(request, exc):  # noqa: ANN001 - fastapi handler signature
        body = {"error": {"code": "usage", "message": str(exc)}}
        return JSONResponse(status_code=422, content=body)

    @app.get("/healthz", response_model=schemas.Health)
    def healthz():
        return {"status": "ok"}

    @app.post("/ingest", response_model=schemas.IngestResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def ingest(req: schemas.ManifestRequest):
        return pipeline.ingest_run(req.manifest, req.config.to_config())

    @app.post("/index/build", response_model=schemas.IndexBuildResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def index_build(req: schemas.IndexBuildRequest):
        return pipeline.index_build_run(req.manifest, req.index_path, req.config.to_config())

    @app.post("/index/stats", response_model=schemas.IndexStatsResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def index_stats(req: schemas.IndexStatsRequest):
        return pipeline.index_stats_run(req.index_path, req.config.to_config())

    @app.post("/title", response_model=schemas.TitleResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def title(req: schemas.TitleRequest):
        config = req.config.to_config()
        return pipeline.title_run(
            req.page.uri, req.page.html.encode("utf-8"), req.page.fetched_at, config
        )

    @app.post("/lexsig", response_model=schemas.LexsigResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def lexsig(req: schemas.IndexBuildRequest):
        return pipeline.lexsig_run(req.manifest, req.index_path, req.config.to_config())

    @app.post("/quality", response_model=schemas.QualityResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def quality(req: schemas.QualityRequest):
        if (req.titles is None) == (req.manifest is None):
            raise ConfigError("provide exactly one of titles or manifest")
        if req.manifest is not None:
            return pipeline.quality_manifest_run(req.manifest, req.config.to_config())
        return pipeline.quality_run(req.titles, req.config.to_config())

    @app.post("/sim", response_model=schemas.SimResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def sim(req: schemas.SimRequest):
        return pipeline.sim_run(_page(req.a), _page(req.b), req.config.to_config())

    @app.post("/rediscover", response_model=schemas.RediscoverResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def rediscover(req: schemas.StrategyRequest):
        payload, tsv = pipeline.rediscover_run(
            req.manifest, req.index_path, Strategy(req.strategy), req.config.to_config()
        )
        payload["summary_tsv"] = tsv
        return payload

    @app.post("/relevance", response_model=schemas.RelevanceResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def relevance(req: schemas.StrategyRequest):
        payload, csv = pipeline.relevance_run(
            req.manifest, req.index_path, Strategy(req.strategy), req.config.to_config()
        )
        payload["csv"] = csv
        return payload

    @app.post("/evolve", response_model=schemas.EvolveResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def evolve(req: schemas.ArchiveRequest):
        payload, csv = pipeline.evolve_run(req.manifest, req.snapshots, req.config.to_config())
        payload["csv"] = csv
        return payload

    @app.post("/correlate", response_model=schemas.CorrelateResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def correlate(req: schemas.ArchiveRequest):
        payload, csv = pipeline.correlate_run(req.manifest, req.snapshots, req.config.to_config())
        payload["csv"] = csv
        return payload

    @app.post("/eval", response_model=schemas.EvalResponse, responses=_ERROR_RESPONSES)
    @_api_errors
    def eval_matrix(req: schemas.EvalRequest):
        payload, tsv = pipeline.eval_run(req.predictions, req.actuals, req.config.to_config())
        payload["tsv"] = tsv
        return payload

    return app


def run_server(argv: list[str] | None = None) -> None:
    """Entry point for the `relinker-api` script."""
    import uvicorn

    parser = argparse.ArgumentParser(prog="relinker-api", description="HTTP service for the toolkit")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run(create_app(), host=args.host, port=args.port)
