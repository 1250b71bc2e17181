"""Benchmark reports: latency percentiles, throughput and scaling buckets."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from ..utils.common import ensure_path, to_json
from ..utils.dataframe_io import dataframe_to_table, read_jsonl

# Baseline figures printed next to measured results.
REFERENCE_FIGURES: Dict[str, Any] = {
    "write_latency_s": 7.3,
    "read_latency_s": 6.9,
    "throughput_tx_per_min": [7, 8],
}


@dataclass(frozen=True)
class Sample:
    """One benchmarked operation; ``index`` is the 1-based record number."""

    index: int
    name: str
    ok: bool
    latency_ms: float
    wall_ms: float
    error: str = ""
    block_num: Optional[int] = None


@dataclass
class BenchReport:
    kind: str
    count: int = 0
    ok: int = 0
    failed: int = 0
    p50_ms: Optional[float] = None
    p95_ms: Optional[float] = None
    mean_ms: Optional[float] = None
    wall_p50_ms: Optional[float] = None
    wall_p95_ms: Optional[float] = None
    wall_mean_ms: Optional[float] = None
    duration_ms: float = 0.0
    wall_duration_s: float = 0.0
    throughput_tx_per_min: Optional[float] = None
    bucket_size: int = 1000
    buckets: List[Dict[str, Any]] = field(default_factory=list)
    errors: Dict[str, int] = field(default_factory=dict)
    reference: Dict[str, Any] = field(default_factory=lambda: dict(REFERENCE_FIGURES))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def _ratio(self, column: str) -> Optional[float]:
        if len(self.buckets) < 2 or not self.buckets[0].get(column):
            return None
        return self.buckets[-1][column] / self.buckets[0][column]

    @property
    def bucket_ratio(self) -> Optional[float]:
        """Mean network-clock latency of the last bucket over the first one."""
        return self._ratio("mean_ms")

    @property
    def wall_bucket_ratio(self) -> Optional[float]:
        """Same ratio on host wall-clock time, which tracks per-operation cost."""
        return self._ratio("wall_mean_ms")


def samples_frame(samples: Sequence[Sample]) -> pd.DataFrame:
    columns = ["index", "name", "ok", "latency_ms", "wall_ms", "error", "block_num"]
    return pd.DataFrame([asdict(s) for s in samples], columns=columns)


def build_report(
    kind: str,
    samples: Sequence[Sample],
    duration_ms: float,
    wall_duration_s: float = 0.0,
    bucket_size: int = 1000,
) -> BenchReport:
    """Summarize samples; latency figures cover successful operations only."""
    report = BenchReport(kind=kind, bucket_size=bucket_size)
    if not samples:
        return report
    df = samples_frame(samples)
    ok = df[df["ok"]]
    report.count = len(df)
    report.ok = len(ok)
    report.failed = report.count - report.ok
    report.duration_ms = float(duration_ms)
    report.wall_duration_s = float(wall_duration_s)
    report.errors = {str(k): int(v) for k, v in df.loc[~df["ok"], "error"].value_counts().items()}
    if ok.empty:
        return report

    latency = ok["latency_ms"].to_numpy(dtype=float)
    wall = ok["wall_ms"].to_numpy(dtype=float)
    report.p50_ms, report.p95_ms = (float(v) for v in np.percentile(latency, [50, 95]))
    report.mean_ms = float(latency.mean())
    report.wall_p50_ms, report.wall_p95_ms = (float(v) for v in np.percentile(wall, [50, 95]))
    report.wall_mean_ms = float(wall.mean())
    if duration_ms > 0:
        report.throughput_tx_per_min = report.ok / (duration_ms / 60_000.0)

    bucket = (ok["index"] - 1) // bucket_size
    grouped = ok.groupby(bucket)
    summary = pd.DataFrame(
        {
            "first_index": grouped["index"].min(),
            "last_index": grouped["index"].max(),
            "records": grouped["index"].count(),
            "mean_ms": grouped["latency_ms"].mean(),
            "p95_ms": grouped["latency_ms"].quantile(0.95),
            "wall_mean_ms": grouped["wall_ms"].mean(),
        }
    )
    report.buckets = [
        {
            "bucket": int(row.Index),
            "first_index": int(row.first_index),
            "last_index": int(row.last_index),
            "records": int(row.records),
            "mean_ms": float(row.mean_ms),
            "p95_ms": float(row.p95_ms),
            "wall_mean_ms": float(row.wall_mean_ms),
        }
        for row in summary.itertuples()
    ]
    return report


def report_table(report: BenchReport) -> str:
    """ASCII rendering: a summary block followed by the bucket table."""
    rows = [
        ("operations", report.count),
        ("succeeded", report.ok),
        ("failed", report.failed),
        ("p50 latency (ms)", report.p50_ms),
        ("p95 latency (ms)", report.p95_ms),
        ("mean latency (ms)", report.mean_ms),
        ("wall p50 (ms)", report.wall_p50_ms),
        ("throughput (tx/min)", report.throughput_tx_per_min),
        ("reference write latency (s)", report.reference["write_latency_s"]),
        ("reference read latency (s)", report.reference["read_latency_s"]),
    ]
    # Format before building the frame so None does not become NaN
    summary = pd.DataFrame(
        [(metric, "-" if value is None else _fmt(value)) for metric, value in rows],
        columns=["metric", "value"],
    )
    lines = [f"{report.kind} benchmark", dataframe_to_table(summary)]
    if report.buckets:
        lines.append("")
        lines.append(dataframe_to_table(pd.DataFrame(report.buckets)))
    return "\n".join(lines)


def _fmt(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.3f}"
    return str(value)


def append_report(path: Union[str, Path], report: BenchReport) -> str:
    """Append one report as a JSON line."""
    path = ensure_path(path)
    with open(path, "a", encoding="utf-8") as f:
        f.write(to_json(report.to_dict()))
        f.write("\n")
    return str(path)


def load_reports(path: Union[str, Path]) -> List[BenchReport]:
    return [BenchReport(**row) for row in read_jsonl(Path(path))]
