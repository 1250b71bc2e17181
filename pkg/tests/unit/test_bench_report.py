# tests/unit/test_bench_report.py

import pytest

from FishLedger.bench.report import (
    BenchReport,
    Sample,
    append_report,
    build_report,
    load_reports,
    report_table,
)


def samples(latencies, start=1):
    return [
        Sample(index=i, name=f"record-{i:06d}", ok=True, latency_ms=lat, wall_ms=lat / 10)
        for i, lat in enumerate(latencies, start=start)
    ]


class TestBuildReport:
    def test_empty(self):
        report = build_report("write", [], duration_ms=0)
        assert report.count == 0
        assert report.p50_ms is None
        assert report.throughput_tx_per_min is None
        assert report.bucket_ratio is None

    def test_percentiles_and_mean(self):
        report = build_report("write", samples(range(1, 101)), duration_ms=60_000)
        assert report.count == report.ok == 100
        assert report.p50_ms == pytest.approx(50.5)
        assert report.p95_ms == pytest.approx(95.05)
        assert report.mean_ms == pytest.approx(50.5)
        assert report.wall_mean_ms == pytest.approx(5.05)
        assert report.throughput_tx_per_min == pytest.approx(100.0)

    def test_failures_excluded_from_latency(self):
        data = samples([10.0, 20.0]) + [
            Sample(index=3, name="record-000003", ok=False, latency_ms=9999.0, wall_ms=1.0,
                   error="ValidationFailed"),
            Sample(index=4, name="record-000004", ok=False, latency_ms=1.0, wall_ms=1.0,
                   error="ValidationFailed"),
        ]
        report = build_report("write", data, duration_ms=1000)
        assert (report.ok, report.failed) == (2, 2)
        assert report.mean_ms == pytest.approx(15.0)
        assert report.errors == {"ValidationFailed": 2}

    def test_all_failed(self):
        data = [Sample(index=1, name="r", ok=False, latency_ms=5.0, wall_ms=1.0, error="NotFound")]
        report = build_report("read", data, duration_ms=10)
        assert report.failed == 1
        assert report.mean_ms is None
        assert report.buckets == []

    def test_buckets(self):
        report = build_report("write", samples([10.0] * 4 + [15.0] * 4), 1000, bucket_size=4)
        assert [(b["first_index"], b["last_index"], b["records"]) for b in report.buckets] == [
            (1, 4, 4),
            (5, 8, 4),
        ]
        assert report.bucket_ratio == pytest.approx(1.5)
        assert [b["wall_mean_ms"] for b in report.buckets] == pytest.approx([1.0, 1.5])
        assert report.wall_bucket_ratio == pytest.approx(1.5)

    def test_wall_ratio_follows_wall_time_only(self):
        # Flat network latency but slower lookups in the last bucket
        rows = [
            Sample(index=i, name=f"record-{i:06d}", ok=True, latency_ms=4.0, wall_ms=0.2 if i <= 3 else 0.6)
            for i in range(1, 7)
        ]
        report = build_report("read", rows, 100, bucket_size=3)
        assert report.bucket_ratio == pytest.approx(1.0)
        assert report.wall_bucket_ratio == pytest.approx(3.0)

    def test_wall_ratio_missing_in_older_reports(self):
        report = BenchReport(
            kind="read",
            buckets=[{"bucket": 0, "mean_ms": 1.0}, {"bucket": 1, "mean_ms": 2.0}],
        )
        assert report.bucket_ratio == pytest.approx(2.0)
        assert report.wall_bucket_ratio is None

    def test_partial_last_bucket(self):
        report = build_report("write", samples([1.0] * 5), 1000, bucket_size=2)
        assert [b["records"] for b in report.buckets] == [2, 2, 1]


class TestReportOutput:
    def test_table_marks_missing_values(self):
        table = report_table(BenchReport(kind="read"))
        assert table.splitlines()[0] == "read benchmark"
        p50 = next(line for line in table.splitlines() if "p50 latency" in line)
        assert p50.rstrip().endswith("-")

    def test_table_includes_buckets(self):
        report = build_report("write", samples([1.0, 2.0, 3.0]), 1000, bucket_size=2)
        table = report_table(report)
        assert "first_index" in table
        assert "2.000" in table

    def test_append_and_load(self, temp_dir):
        path = temp_dir / "reports" / "bench.jsonl"
        first = build_report("write", samples([1.0, 2.0]), 100)
        second = build_report("read", samples([3.0]), 100)
        append_report(path, first)
        append_report(path, second)
        assert load_reports(path) == [first, second]
