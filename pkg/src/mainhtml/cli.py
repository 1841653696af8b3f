"""Command-line entry point: extract, eval, overhead, inspect."""

from __future__ import annotations

import argparse
import json
import logging
import shlex
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from mainhtml.dom import normalize_ws
from mainhtml.errors import ExtractionError
from mainhtml.evalkit.bench import BenchmarkRecord, load_benchmark
from mainhtml.evalkit.runner import (
    EvalOptions,
    OracleExtractor,
    OverheadConfig,
    evaluate_run,
    overhead_report,
)
from mainhtml.labeler.fsm import DEFAULT_CONTEXT_LIMIT, ConstrainedClassifier
from mainhtml.labeler.heuristic import HeuristicClassifier
from mainhtml.labeler.labels import Classifier
from mainhtml.labeler.models import HeuristicModel
from mainhtml.labeler.remote import RemoteClassifier, RemoteConfig
from mainhtml.postprocess import ExtractionResult, ExtractOptions, extract
from mainhtml.preprocess import SimplifyConfig, build_document_pair

log = logging.getLogger("mainhtml")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_OVERSIZE = 2

CLASSIFIERS = ("heuristic", "remote", "mock")
FORMATS = ("markdown", "main_html", "labels", "json")


@dataclass
class RunOptions:
    classifier: str = "heuristic"
    context_limit: int = DEFAULT_CONTEXT_LIMIT
    fallback: bool = False
    fallback_cmd: Optional[list[str]] = None
    config_path: Optional[str] = None
    output_format: str = "markdown"
    simplify: SimplifyConfig = field(default_factory=SimplifyConfig)
    remote: RemoteConfig = field(default_factory=RemoteConfig)

    def __post_init__(self) -> None:
        if self.context_limit < 1:
            raise ValueError("context limit must be >= 1")
        if self.classifier not in CLASSIFIERS:
            raise ValueError(f"unknown classifier {self.classifier!r}")
        if self.output_format not in FORMATS:
            raise ValueError(f"unknown format {self.output_format!r}")

    def extract_options(self) -> ExtractOptions:
        return ExtractOptions(
            context_limit=self.context_limit,
            fallback=self.fallback,
            fallback_cmd=self.fallback_cmd,
            simplify=self.simplify,
        )


def make_classifier(opts: RunOptions) -> Classifier:
    if opts.classifier == "remote":
        return RemoteClassifier(opts.remote)
    if opts.classifier == "mock":
        model = HeuristicModel(item_attribute_name=opts.simplify.item_attribute_name)
        return ConstrainedClassifier(model, opts.context_limit)
    return HeuristicClassifier()


class CliExtractor:
    """Record extractor that builds its classifier lazily in each process."""

    def __init__(self, opts: RunOptions) -> None:
        self.opts = opts
        self._classifier: Optional[Classifier] = None

    def __getstate__(self) -> dict:
        return {"opts": self.opts, "_classifier": None}

    def __call__(self, record: BenchmarkRecord) -> ExtractionResult:
        if self._classifier is None:
            self._classifier = make_classifier(self.opts)
        return extract(record.html, self._classifier, self.opts.extract_options())


def _load_config(path: Optional[str]) -> dict[str, Any]:
    if not path:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ExtractionError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ExtractionError(f"config {path} is not a JSON object")
    return data


def options_from_args(args: argparse.Namespace) -> RunOptions:
    config = _load_config(args.config)
    simplify = SimplifyConfig.from_mapping(config.get("simplify", {}))
    remote = RemoteConfig.from_mapping(config.get("remote", {}))
    if args.endpoint:
        remote.endpoint = args.endpoint
    if args.model:
        remote.model = args.model
    context_limit = args.context_limit or config.get("context_limit") or DEFAULT_CONTEXT_LIMIT
    fallback_cmd = args.fallback_cmd or config.get("fallback_cmd")
    if isinstance(fallback_cmd, str):
        fallback_cmd = shlex.split(fallback_cmd)
    return RunOptions(
        classifier=args.classifier,
        context_limit=int(context_limit),
        fallback=args.fallback or bool(args.fallback_cmd),
        fallback_cmd=fallback_cmd,
        config_path=args.config,
        output_format=getattr(args, "format", "markdown"),
        simplify=simplify,
        remote=remote,
    )


def _read_input(source: str) -> bytes:
    if source == "-":
        return sys.stdin.buffer.read()
    return Path(source).read_bytes()


def render_result(result: ExtractionResult, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(result.to_dict(), ensure_ascii=False, indent=2)
    if fmt == "main_html":
        return result.main_html
    if fmt == "labels":
        return result.labels.to_json()
    return result.markdown


def _emit(text: str) -> None:
    sys.stdout.write(text)
    if text and not text.endswith("\n"):
        sys.stdout.write("\n")


def _batch_sources(source: str) -> Optional[list[tuple[str, Any]]]:
    path = Path(source)
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in (".html", ".htm") and p.is_file())
        return [(str(p), p) for p in files]
    if path.suffix.lower() == ".jsonl":
        return [(r.track_id or f"#{i}", r.html) for i, r in enumerate(load_benchmark(path), start=1)]
    return None


def _extract_one(job: tuple[str, Any, RunOptions]) -> dict[str, Any]:
    name, payload, opts = job
    try:
        raw = payload.read_bytes() if isinstance(payload, Path) else payload
        result = extract(raw, make_classifier(opts), opts.extract_options())
    except (ExtractionError, ValueError, OSError) as exc:
        return {"source": name, "error": f"{type(exc).__name__}: {exc}"}
    row = {"source": name}
    row.update(result.to_dict())
    return row


def cmd_extract(args: argparse.Namespace) -> int:
    opts = options_from_args(args)
    batch = None if args.input == "-" else _batch_sources(args.input)
    if batch is not None:
        jobs = [(name, payload, opts) for name, payload in batch]
        if args.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                rows = pool.map(_extract_one, jobs)
                code = _write_rows(rows)
        else:
            code = _write_rows(map(_extract_one, jobs))
        return code

    raw = _read_input(args.input)
    result = extract(raw, make_classifier(opts), opts.extract_options())
    for note in result.diagnostics:
        log.info("%s", note)
    if result.oversize and not result.used_fallback:
        print("oversize: page exceeds the context limit and fallback is off", file=sys.stderr)
        return EXIT_OVERSIZE
    _emit(render_result(result, opts.output_format))
    return EXIT_OK


def _write_rows(rows) -> int:
    code = EXIT_OK
    for row in rows:
        if "error" in row:
            log.error("%s: %s", row["source"], row["error"])
            code = EXIT_ERROR
        elif row["oversize"] and not row["used_fallback"] and code == EXIT_OK:
            code = EXIT_OVERSIZE
        sys.stdout.write(json.dumps(row, ensure_ascii=False) + "\n")
    return code


def cmd_eval(args: argparse.Namespace) -> int:
    opts = options_from_args(args)
    records = load_benchmark(args.benchmark)
    extractor = OracleExtractor() if args.oracle else CliExtractor(opts)
    report = evaluate_run(records, extractor, EvalOptions(jobs=args.jobs))
    if records.skipped:
        log.warning("%d records skipped", records.skipped)
    _emit(json.dumps(report.to_dict(), ensure_ascii=False, indent=2) if args.json else report.to_text())
    return EXIT_OK


def cmd_overhead(args: argparse.Namespace) -> int:
    opts = options_from_args(args)
    records = load_benchmark(args.benchmark)
    config = OverheadConfig(simplify=opts.simplify, classifier=make_classifier(opts))
    report = overhead_report(records, config)
    _emit(json.dumps(report.to_dict(), indent=2) if args.json else report.to_text())
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    opts = options_from_args(args)
    pair = build_document_pair(_read_input(args.input), opts.simplify)
    labels = make_classifier(opts).classify(pair)
    if args.html:
        _emit(pair.simplified_html)
    for block, label in zip(pair.blocks, labels):
        preview = normalize_ws(pair.simplified_text(block))[:80]
        line = f"{block.id} [{block.tag}] {preview} → {label.value}"
        if block.truncated:
            line += " truncated=true"
        _emit(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--classifier", choices=CLASSIFIERS, default="heuristic")
    common.add_argument("--context-limit", type=int, default=None, help=f"token limit (default {DEFAULT_CONTEXT_LIMIT})")
    common.add_argument("--fallback", action="store_true", help="use the fallback extractor when gated or empty")
    common.add_argument("--fallback-cmd", type=shlex.split, default=None, help="external fallback command; reads HTML on stdin")
    common.add_argument("--config", default=None, help="JSON config with 'simplify' and 'remote' sections")
    common.add_argument("--endpoint", default=None, help="chat-completion base URL for --classifier remote")
    common.add_argument("--model", default=None, help="model name for --classifier remote")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="mainhtml", description="Main-content extraction from HTML pages.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", parents=[common], help="extract one page, a directory or a JSONL file")
    p.add_argument("input", nargs="?", default="-", help="file, directory, .jsonl, or - for stdin")
    p.add_argument("--format", choices=FORMATS, default="markdown")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("eval", parents=[common], help="score a benchmark with ROUGE-5 F1")
    p.add_argument("benchmark")
    p.add_argument("--json", action="store_true")
    p.add_argument("--oracle", action="store_true", help="replay convert_main_content")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("overhead", parents=[common], help="token and cost comparison table")
    p.add_argument("benchmark")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_overhead)

    p = sub.add_parser("inspect", parents=[common], help="dump blocks and labels")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--html", action="store_true", help="also print the simplified HTML")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    if args.context_limit is not None and args.context_limit < 1:
        parser.error("--context-limit must be >= 1")
    try:
        return args.func(args)
    except (ExtractionError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
