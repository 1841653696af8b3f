from mainhtml.evalkit.bench import BenchmarkRecord, load_benchmark
from mainhtml.evalkit.complexity import (
    ComplexityProfile,
    complexity_profile,
    finalize_profiles,
    rich_content_tags,
)
from mainhtml.evalkit.cost import CostParams, estimate_cost
from mainhtml.evalkit.rouge import RougeScore, rouge_n_f1, rouge_tokenize
from mainhtml.evalkit.runner import (
    EvalOptions,
    OracleExtractor,
    OverheadConfig,
    PipelineExtractor,
    RunReport,
    evaluate_run,
    overhead_report,
)

__all__ = [
    "BenchmarkRecord",
    "ComplexityProfile",
    "CostParams",
    "EvalOptions",
    "OracleExtractor",
    "OverheadConfig",
    "PipelineExtractor",
    "RougeScore",
    "RunReport",
    "complexity_profile",
    "estimate_cost",
    "evaluate_run",
    "finalize_profiles",
    "load_benchmark",
    "overhead_report",
    "rich_content_tags",
    "rouge_n_f1",
    "rouge_tokenize",
]
