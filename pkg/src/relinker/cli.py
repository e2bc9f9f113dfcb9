"""Command line front end; every subcommand is a client of the HTTP service.

By default the service app runs in-process; `--server` (or RELINKER_SERVER)
points the same calls at a remote instance instead.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any, Callable, Mapping

from relinker.config import (
    CONFIG_ENV_VAR,
    SERVER_ENV_VAR,
    Config,
    ConfigError,
    load_config_file,
    parse_config_text,
)

PROG = "relinker"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

# flag name -> config key; values are passed through the config file parser
_CONFIG_FLAGS = (
    ("--min-terms", "min_terms"),
    ("--ls-k", "ls_k"),
    ("--shingle-w", "shingle_w"),
    ("--quality-threshold", "quality_threshold"),
    ("--minor-change-threshold", "minor_change_threshold"),
    ("--max-results", "max_results"),
    ("--discovered-depth", "discovered_depth"),
    ("--index-size-estimate", "index_size_estimate"),
    ("--stop-titles", "stop_title_path"),
    ("--window-anchor", "window_anchor"),
    ("--window-count", "window_count"),
)


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage problems; this toolkit reserves 2 for data errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(message: str, code: int) -> int:
    print(f"{PROG}: error: {message}", file=sys.stderr)
    return code


class ServiceClient:
    """POST requests either to the in-process app or to a remote server."""

    def __init__(self, server: str | None) -> None:
        if server:
            import httpx

            self._client: Any = httpx.Client(base_url=server, timeout=60.0)
        else:
            import warnings

            with warnings.catch_warnings():
                # starlette warns about its test-client transport on import; not actionable here
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from relinker.service.app import create_app

            self._client = TestClient(create_app())

    def post(self, path: str, body: Mapping[str, Any]) -> tuple[int, Any]:
        response = self._client.post(path, json=dict(body))
        try:
            decoded = response.json()
        except ValueError:
            decoded = {"error": {"code": "data", "message": response.text.strip()}}
        return response.status_code, decoded


def resolve_cli_config(args: argparse.Namespace) -> Config:
    """Defaults, then the config file, then whichever mirror flags were given."""
    overrides: dict[str, Any] = {}
    flag_lines = []
    for flag, key in _CONFIG_FLAGS:
        value = getattr(args, key, None)
        if value is not None:
            flag_lines.append(f"{key}={value}")
    if flag_lines:
        overrides = parse_config_text("\n".join(flag_lines), source="<flags>")
    merged: dict[str, Any] = {}
    config_path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update(overrides)
    return Config(**merged)  # type: ignore[arg-type]


def _write_json(body: Mapping[str, Any], out: str | None) -> None:
    text = json.dumps(body, indent=2, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _write_table(text: str, path: str | None) -> None:
    """Tables go to their file when asked for, otherwise serve as the stderr summary."""
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stderr.write(text)


def _note(message: str) -> None:
    print(message, file=sys.stderr)


def _dispatch(
    client: ServiceClient,
    path: str,
    body: Mapping[str, Any],
    out: str | None,
    tables: tuple[tuple[str, str | None], ...] = (),
    human: Callable[[Mapping[str, Any]], str] | None = None,
) -> int:
    status, decoded = client.post(path, body)
    if status != 200:
        error = decoded.get("error", {}) if isinstance(decoded, dict) else {}
        message = error.get("message", f"service answered HTTP {status}")
        code = EXIT_USAGE if error.get("code") == "usage" or status == 422 else EXIT_DATA
        return _fail(message, code)
    for field, table_path in tables:
        _write_table(decoded.pop(field, ""), table_path)
    _write_json(decoded, out)
    if human is not None:
        _note(human(decoded))
    return EXIT_OK


def _read_page(path: str) -> str:
    try:
        return Path(path).read_bytes().decode("utf-8", errors="replace")
    except OSError as exc:
        raise FileNotFoundError(f"cannot read page {path}: {exc}") from exc


def _read_json_file(path: str) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileNotFoundError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def _bool_map(payload: Any, field: str, inner_key: str, source: str) -> dict[str, bool]:
    """Pull {uri: bool} out of a payload written by quality or rediscover."""
    if not isinstance(payload, dict) or not isinstance(payload.get(field), dict):
        raise ValueError(f"{source} lacks the expected {field!r} object")
    rows = payload[field]
    out: dict[str, bool] = {}
    for uri, row in rows.items():
        if not isinstance(row, dict) or inner_key not in row:
            raise ValueError(f"{source}: entry {uri!r} lacks {inner_key!r}")
        out[uri] = bool(row[inner_key])
    return out


def cmd_ingest(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {"manifest": args.manifest, "config": config.to_dict()}
    return _dispatch(
        client,
        "/ingest",
        body,
        args.out,
        human=lambda d: f"ingest: total={d['total']} admitted={len(d['admitted'])} rejected={len(d['rejected'])}",
    )


def cmd_index_build(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {"manifest": args.manifest, "index_path": args.index, "config": config.to_dict()}
    return _dispatch(
        client,
        "/index/build",
        body,
        args.out,
        human=lambda d: f"index build: documents={d['stats']['documents']} terms={d['stats']['distinct_terms']}",
    )


def cmd_index_stats(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {"index_path": args.index, "config": config.to_dict()}
    return _dispatch(
        client,
        "/index/stats",
        body,
        args.out,
        human=lambda d: f"index stats: documents={d['stats']['documents']} postings={d['stats']['postings']}",
    )


def cmd_title(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    try:
        html = _read_page(args.page)
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_DATA)
    body = {
        "page": {"uri": args.uri, "html": html, "fetched_at": args.fetched_at},
        "config": config.to_dict(),
    }
    return _dispatch(
        client,
        "/title",
        body,
        args.out,
        human=lambda d: f"title: {d['title']['raw']!r}" if d["title"] else "title: none found",
    )


def cmd_lexsig(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {"manifest": args.manifest, "index_path": args.index, "config": config.to_dict()}
    return _dispatch(
        client,
        "/lexsig",
        body,
        args.out,
        human=lambda d: f"lexsig: signatures for {len(d['signatures'])} pages",
    )


def cmd_quality(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body: dict[str, Any] = {"config": config.to_dict()}
    if args.title is not None:
        body["titles"] = {"arg:1": args.title}
    elif args.titles is not None:
        try:
            lines = Path(args.titles).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            return _fail(f"cannot read titles file {args.titles}: {exc}", EXIT_DATA)
        body["titles"] = {f"line:{i:06d}": line for i, line in enumerate(lines, start=1)}
    else:
        body["manifest"] = args.manifest
    return _dispatch(
        client,
        "/quality",
        body,
        args.out,
        human=lambda d: "quality: {good} good / {total} judged".format(
            good=sum(1 for v in d["verdicts"].values() if v["predicted_good"]),
            total=len(d["verdicts"]),
        ),
    )


def cmd_sim(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    try:
        html_a, html_b = _read_page(args.a), _read_page(args.b)
    except FileNotFoundError as exc:
        return _fail(str(exc), EXIT_DATA)
    body = {
        "a": {"uri": args.uri_a, "html": html_a, "fetched_at": args.fetched_at},
        "b": {"uri": args.uri_b, "html": html_b, "fetched_at": args.fetched_at},
        "config": config.to_dict(),
    }
    return _dispatch(
        client,
        "/sim",
        body,
        args.out,
        human=lambda d: f"sim: overlap={d['term_overlap']} resemblance={d['resemblance']}",
    )


def cmd_rediscover(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {
        "manifest": args.manifest,
        "index_path": args.index,
        "strategy": args.strategy,
        "config": config.to_dict(),
    }
    return _dispatch(
        client,
        "/rediscover",
        body,
        args.out,
        tables=(("summary_tsv", args.summary),),
        human=lambda d: f"rediscover: strategy={d['strategy']} evaluated={d['evaluated']} "
        f"top={d['counts']['Top']} undiscovered={d['counts']['Undiscovered']}",
    )


def cmd_relevance(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {
        "manifest": args.manifest,
        "index_path": args.index,
        "strategy": args.strategy,
        "config": config.to_dict(),
    }
    return _dispatch(
        client,
        "/relevance",
        body,
        args.out,
        tables=(("csv", args.csv),),
        human=lambda d: f"relevance: strategy={d['strategy']} pages={len(d['relevance'])}",
    )


def cmd_evolve(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {"manifest": args.manifest, "snapshots": args.snapshots, "config": config.to_dict()}
    return _dispatch(
        client,
        "/evolve",
        body,
        args.out,
        tables=(("csv", args.csv),),
        human=lambda d: f"evolve: windows={len(d['windows'])}",
    )


def cmd_correlate(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    body = {"manifest": args.manifest, "snapshots": args.snapshots, "config": config.to_dict()}
    return _dispatch(
        client,
        "/correlate",
        body,
        args.out,
        tables=(("csv", args.csv),),
        human=lambda d: f"correlate: points={len(d['points'])} included={d['included']}",
    )


def cmd_eval(client: ServiceClient, args: argparse.Namespace, config: Config) -> int:
    try:
        verdict_payload = _read_json_file(args.verdicts)
        outcome_payload = _read_json_file(args.outcomes)
        predictions = _bool_map(verdict_payload, "verdicts", "predicted_good", args.verdicts)
        actuals = _bool_map(outcome_payload, "outcomes", "discovered", args.outcomes)
    except (FileNotFoundError, ValueError) as exc:
        return _fail(str(exc), EXIT_DATA)
    body = {"predictions": predictions, "actuals": actuals, "config": config.to_dict()}
    return _dispatch(
        client,
        "/eval",
        body,
        args.out,
        tables=(("tsv", args.tsv),),
        human=lambda d: f"eval: total={d['total']}",
    )


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="path to a key=value config file")
    parser.add_argument("--server", help="base URL of a running service (default: in-process)")
    group = parser.add_argument_group("config overrides")
    for flag, key in _CONFIG_FLAGS:
        group.add_argument(flag, dest=key, metavar="VALUE")


def build_parser() -> _Parser:
    parser = _Parser(prog=PROG, description="Rediscover lost web pages by their titles and lexical signatures")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def add(name: str, help_text: str, func: Callable) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        _add_config_flags(p)
        p.add_argument("--out", help="write the JSON payload here instead of stdout")
        return p

    p = add("ingest", "load a corpus manifest and report admissions", cmd_ingest)
    p.add_argument("--manifest", required=True)

    index = sub.add_parser("index", help="build or inspect the inverted index")
    index_sub = index.add_subparsers(dest="index_command", required=True, metavar="action")
    p = index_sub.add_parser("build", help="index the admitted corpus into one file")
    p.set_defaults(func=cmd_index_build)
    _add_config_flags(p)
    p.add_argument("--out", help="write the JSON payload here instead of stdout")
    p.add_argument("--manifest", required=True)
    p.add_argument("--index", required=True)
    p = index_sub.add_parser("stats", help="show stored index statistics")
    p.set_defaults(func=cmd_index_stats)
    _add_config_flags(p)
    p.add_argument("--out", help="write the JSON payload here instead of stdout")
    p.add_argument("--index", required=True)

    p = add("title", "extract the title and terms of one page", cmd_title)
    p.add_argument("--page", required=True, help="path to an HTML file")
    p.add_argument("--uri", default="http://example.invalid/page")
    p.add_argument("--fetched-at", default="2009-02-01T00:00:00Z")

    p = add("lexsig", "generate lexical signatures for the corpus", cmd_lexsig)
    p.add_argument("--manifest", required=True)
    p.add_argument("--index", required=True)

    p = add("quality", "judge titles against the stop-title rules", cmd_quality)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--title", help="judge a single title given inline")
    mode.add_argument("--titles", help="file with one title per line")
    mode.add_argument("--manifest", help="judge every admitted page title in a corpus")

    p = add("sim", "compare two pages (titles, term overlap, shingles)", cmd_sim)
    p.add_argument("--a", required=True, help="path to the first HTML file")
    p.add_argument("--b", required=True, help="path to the second HTML file")
    p.add_argument("--uri-a", default="http://a.invalid/page")
    p.add_argument("--uri-b", default="http://b.invalid/page")
    p.add_argument("--fetched-at", default="2009-02-01T00:00:00Z")

    p = add("rediscover", "query each page's title or signature and rank the page", cmd_rediscover)
    p.add_argument("--manifest", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--strategy", choices=["title", "ls5", "ls7"], default="title")
    p.add_argument("--summary", help="write the category summary TSV here")

    p = add("relevance", "score top hits against each origin page", cmd_relevance)
    p.add_argument("--manifest", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--strategy", choices=["title", "ls5", "ls7"], default="title")
    p.add_argument("--csv", help="write the rank-by-class CSV here")

    p = add("evolve", "histogram title drift across archive time windows", cmd_evolve)
    p.add_argument("--manifest", required=True)
    p.add_argument("--snapshots", required=True, help="snapshot store root directory")
    p.add_argument("--csv", help="write the per-window CSV here")

    p = add("correlate", "relate title drift to content change", cmd_correlate)
    p.add_argument("--manifest", required=True)
    p.add_argument("--snapshots", required=True, help="snapshot store root directory")
    p.add_argument("--csv", help="write the grid CSV here")

    p = add("eval", "cross title verdicts with retrieval outcomes", cmd_eval)
    p.add_argument("--verdicts", required=True, help="JSON payload from a quality run")
    p.add_argument("--outcomes", required=True, help="JSON payload from a rediscover run")
    p.add_argument("--tsv", help="write the 2x2 percentage TSV here")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_cli_config(args)
    except ConfigError as exc:
        return _fail(str(exc), EXIT_USAGE)
    server = getattr(args, "server", None) or os.environ.get(SERVER_ENV_VAR)
    client = ServiceClient(server)
    try:
        return args.func(client, args, config)
    except ConnectionError as exc:
        return _fail(f"cannot reach service: {exc}", EXIT_DATA)
    except Exception as exc:  # transport failures from a remote --server
        if type(exc).__module__.startswith("httpx"):
            return _fail(f"cannot reach service: {exc}", EXIT_DATA)
        raise


if __name__ == "__main__":
    sys.exit(main())
