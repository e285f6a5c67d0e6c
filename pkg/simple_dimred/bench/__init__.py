"""
Benchmark harness: config-driven reducer × SVM comparisons, reports and timing
"""

from .config import (
    BENCH_METHODS,
    CvConfig,
    DatasetConfig,
    ExperimentConfig,
    MethodConfig,
    SamplingConfig,
    TimingConfig,
    config_schema,
    derive_seed,
    load_config,
    parse_config,
)
from .report import CellResult, EvalReport, emit_roc, render_table, write_report
from .runner import embedder, fit_method, load_dataset, make_reducer, run_experiment
from .timing import (
    COMPLEXITY,
    TimingRow,
    TimingTable,
    loglog_slope,
    run_timing,
    timing_data,
    write_timing,
)

__all__ = [
    "BENCH_METHODS",
    "CvConfig",
    "DatasetConfig",
    "ExperimentConfig",
    "MethodConfig",
    "SamplingConfig",
    "TimingConfig",
    "config_schema",
    "derive_seed",
    "load_config",
    "parse_config",
    "CellResult",
    "EvalReport",
    "emit_roc",
    "render_table",
    "write_report",
    "embedder",
    "fit_method",
    "load_dataset",
    "make_reducer",
    "run_experiment",
    "COMPLEXITY",
    "TimingRow",
    "TimingTable",
    "loglog_slope",
    "run_timing",
    "timing_data",
    "write_timing",
]
