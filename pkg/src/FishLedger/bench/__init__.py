"""Benchmark harness and reports."""
from .harness import BenchConfig, BenchmarkHarness
from .report import (
    REFERENCE_FIGURES,
    BenchReport,
    Sample,
    append_report,
    build_report,
    load_reports,
    report_table,
)

__all__ = [
    "BenchConfig",
    "BenchmarkHarness",
    "REFERENCE_FIGURES",
    "BenchReport",
    "Sample",
    "append_report",
    "build_report",
    "load_reports",
    "report_table",
]
