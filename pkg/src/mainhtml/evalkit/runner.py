"""Benchmark scoring and computational-overhead reports."""

from __future__ import annotations

import logging
import statistics
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Optional, Union

from mainhtml.errors import ExtractionError
from mainhtml.evalkit.bench import BenchmarkRecord
from mainhtml.evalkit.complexity import complexity_profile, finalize_profiles, rich_content_tags
from mainhtml.evalkit.cost import DEFAULT_HIDDEN, DEFAULT_LAYERS, cost
from mainhtml.evalkit.rouge import rouge_n_f1
from mainhtml.labeler.heuristic import HeuristicClassifier
from mainhtml.labeler.labels import Classifier
from mainhtml.postprocess import ExtractionResult, ExtractOptions, extract
from mainhtml.preprocess import SimplifyConfig, build_document_pair
from mainhtml.tokens import ApproxTokenizer, Tokenizer, count_tokens

log = logging.getLogger(__name__)

STRATA = ("all", "simple", "mid", "hard", "table", "code", "equation", "conversational")
RICH_FLAGS = ("table", "code", "equation")

Extractor = Callable[[BenchmarkRecord], Union[ExtractionResult, str]]


@dataclass
class PipelineExtractor:
    """Runs :func:`extract` on a record's HTML. Picklable when its parts are."""

    classifier: Optional[Classifier] = None
    options: ExtractOptions = field(default_factory=ExtractOptions)

    def __call__(self, record: BenchmarkRecord) -> ExtractionResult:
        return extract(record.html, self.classifier or HeuristicClassifier(), self.options)


class OracleExtractor:
    """Replays the ground-truth Markdown."""

    def __call__(self, record: BenchmarkRecord) -> str:
        return record.convert_main_content


@dataclass
class EvalOptions:
    n: int = 5
    jobs: int = 1


@dataclass
class RecordScore:
    track_id: str
    f1: float
    precision: float
    recall: float
    status: str
    level: Optional[str]
    flags: dict[str, bool]
    conversational: bool
    diagnostics: list[str] = field(default_factory=list)
    profile: Any = field(default=None, repr=False)


@dataclass
class RunReport:
    records: list[RecordScore]
    strata: dict[str, tuple[int, float]]
    n: int = 5
    skipped: int = 0

    @property
    def overall(self) -> float:
        return self.strata["all"][1]

    def to_dict(self) -> dict[str, Any]:
        rows = []
        for r in self.records:
            row = asdict(r)
            row.pop("profile")
            rows.append(row)
        return {
            "metric": f"rouge-{self.n}-f1",
            "overall": self.overall,
            "strata": {k: {"count": c, "mean_f1": m} for k, (c, m) in self.strata.items()},
            "skipped": self.skipped,
            "records": rows,
        }

    def to_text(self) -> str:
        header = ["stratum", "count", f"ROUGE-{self.n} F1"]
        body = [[name, str(c), f"{m:.4f}"] for name, (c, m) in self.strata.items()]
        return _table([header] + body)


def _table(rows: Sequence[Sequence[str]]) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for j, row in enumerate(rows):
        cells = [cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
        if j == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def _score_record(args: tuple[BenchmarkRecord, Extractor, int]) -> RecordScore:
    record, extractor, n = args
    notes: list[str] = []
    status = "ok"
    markdown = ""
    try:
        out = extractor(record)
        if isinstance(out, ExtractionResult):
            notes.extend(out.diagnostics)
            if out.oversize and not out.used_fallback:
                status = "oversize"
            else:
                markdown = out.markdown
                status = "fallback" if out.used_fallback else "ok"
        else:
            markdown = out or ""
    except (ExtractionError, ValueError, OSError) as exc:
        status = "error"
        notes.append(f"{type(exc).__name__}: {exc}")
    score = rouge_n_f1(markdown, record.convert_main_content, n)

    flags = {}
    for name in RICH_FLAGS:
        flags[name] = record.has(name)
    profile = None
    if None in flags.values() or record.level is None:
        try:
            detected = rich_content_tags(record.html)
            profile = complexity_profile(record.html) if record.level is None else None
        except (ExtractionError, ValueError) as exc:
            detected = dict.fromkeys(RICH_FLAGS, False)
            notes.append(f"metadata: {exc}")
        flags = {k: detected[k] if v is None else v for k, v in flags.items()}
    return RecordScore(
        track_id=record.track_id,
        f1=score.f1,
        precision=score.precision,
        recall=score.recall,
        status=status,
        level=record.level,
        flags=flags,
        conversational=record.conversational,
        diagnostics=notes,
        profile=profile,
    )


def _mean(values: list[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def evaluate_run(
    records: Iterable[BenchmarkRecord],
    extractor: Extractor,
    options: Optional[EvalOptions] = None,
) -> RunReport:
    """Score every record with ROUGE-N F1; failed or gated records count as 0."""
    options = options or EvalOptions()
    items = [(record, extractor, options.n) for record in records]
    if options.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=options.jobs) as pool:
            scores = list(pool.map(_score_record, items, chunksize=4))
    else:
        scores = [_score_record(item) for item in items]

    # levels for unannotated records come from the corpus-level complexity cut
    unlabeled = [s for s in scores if s.level is None and s.profile is not None]
    if unlabeled:
        for s, p in zip(unlabeled, finalize_profiles([s.profile for s in unlabeled])):
            s.level = p.level

    strata: dict[str, tuple[int, float]] = {}
    for name in STRATA:
        if name == "all":
            members = scores
        elif name in ("simple", "mid", "hard"):
            members = [s for s in scores if s.level == name]
        elif name == "conversational":
            members = [s for s in scores if s.conversational]
        else:
            members = [s for s in scores if s.flags.get(name)]
        strata[name] = (len(members), _mean([s.f1 for s in members]))
    return RunReport(scores, strata, options.n, getattr(records, "skipped", 0))


# -- overhead -------------------------------------------------------------


@dataclass
class OverheadConfig:
    tokenizer: Tokenizer = field(default_factory=ApproxTokenizer)
    simplify: SimplifyConfig = field(default_factory=SimplifyConfig)
    classifier: Optional[Classifier] = None
    layers: int = DEFAULT_LAYERS
    hidden: int = DEFAULT_HIDDEN


@dataclass
class OverheadRow:
    input_mean: float
    input_median: float
    output_mean: float
    output_median: float
    cost_mean: float
    cost_median: float

    def values(self) -> tuple[float, ...]:
        return (
            self.input_mean,
            self.input_median,
            self.output_mean,
            self.output_median,
            self.cost_mean,
            self.cost_median,
        )


COLUMNS = ("input_mean", "input_median", "output_mean", "output_median", "cost_mean", "cost_median")


def _row(inputs: list[float], outputs: list[float], costs: list[float]) -> OverheadRow:
    if not inputs:
        return OverheadRow(0, 0, 0, 0, 0, 0)
    return OverheadRow(
        statistics.fmean(inputs),
        statistics.median(inputs),
        statistics.fmean(outputs),
        statistics.median(outputs),
        statistics.fmean(costs),
        statistics.median(costs),
    )


@dataclass
class OverheadReport:
    without: OverheadRow
    with_: OverheadRow
    ratio: OverheadRow
    records: int
    skipped: int = 0
    per_record: list[dict[str, float]] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "columns": list(COLUMNS),
            "without": asdict(self.without),
            "with": asdict(self.with_),
            "ratio": asdict(self.ratio),
            "records": self.records,
            "skipped": self.skipped,
        }

    def to_text(self) -> str:
        header = ["Pre-process", "input mean", "input median", "output mean", "output median", "cost mean", "cost median"]

        def fmt(row: OverheadRow) -> list[str]:
            v = row.values()
            return [f"{v[0]:.1f}", f"{v[1]:.1f}", f"{v[2]:.1f}", f"{v[3]:.1f}", f"{v[4]:.3e}", f"{v[5]:.3e}"]

        ratio = [f"{100 * v:.2f}%" for v in self.ratio.values()]
        return _table([header, ["Without"] + fmt(self.without), ["With"] + fmt(self.with_), ["Ratio"] + ratio])


def overhead_report(records: Iterable[BenchmarkRecord], config: Optional[OverheadConfig] = None) -> OverheadReport:
    """Token and cost comparison of raw-HTML generation against block labelling.

    Without preprocessing: input is the raw page, output the ground-truth
    Markdown. With it: input is the simplified page, output the label JSON.
    Costs are computed per record, then aggregated.
    """
    config = config or OverheadConfig()
    classifier = config.classifier or HeuristicClassifier()
    tok = config.tokenizer
    raw_in: list[float] = []
    raw_out: list[float] = []
    raw_cost: list[float] = []
    simp_in: list[float] = []
    simp_out: list[float] = []
    simp_cost: list[float] = []
    per_record = []
    skipped = 0
    for record in records:
        try:
            pair = build_document_pair(record.html, config.simplify, tok)
            labels = classifier.classify(pair)
        except (ExtractionError, ValueError) as exc:
            log.warning("overhead: skipping %s: %s", record.track_id, exc)
            skipped += 1
            continue
        n_raw = count_tokens(tok, record.html)
        m_raw = count_tokens(tok, record.convert_main_content)
        n_simp = pair.simplified_token_count
        m_simp = count_tokens(tok, labels.to_json())
        c_raw = cost(n_raw, m_raw, config.layers, config.hidden)
        c_simp = cost(n_simp, m_simp, config.layers, config.hidden)
        raw_in.append(n_raw)
        raw_out.append(m_raw)
        raw_cost.append(c_raw)
        simp_in.append(n_simp)
        simp_out.append(m_simp)
        simp_cost.append(c_simp)
        per_record.append(
            {"track_id": record.track_id, "raw_input": n_raw, "raw_output": m_raw, "raw_cost": c_raw,
             "input": n_simp, "output": m_simp, "cost": c_simp}
        )
    without = _row(raw_in, raw_out, raw_cost)
    with_ = _row(simp_in, simp_out, simp_cost)
    ratio = OverheadRow(*(w / o if o else 0.0 for w, o in zip(with_.values(), without.values())))
    return OverheadReport(without, with_, ratio, len(per_record), skipped + getattr(records, "skipped", 0), per_record)
