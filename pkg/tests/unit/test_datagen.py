# tests/unit/test_datagen.py

import math

import pytest

from FishLedger.chaincode.records import PRIVATE_FIELDS, PUBLIC_FIELDS
from FishLedger.core.base import BadRange
from FishLedger.datagen import (
    DEFAULT_RANGES,
    NAME_FORMAT,
    GeneratorConfig,
    generate_frame,
    generate_records,
    generate_to_file,
    read_records,
    record_means,
)


class TestGenerateRecords:
    def test_same_seed_same_records(self):
        cfg = GeneratorConfig(seed=42, count=50)
        assert generate_records(cfg) == generate_records(cfg)

    def test_different_seed_differs(self):
        a = generate_records(GeneratorConfig(seed=1, count=10))
        b = generate_records(GeneratorConfig(seed=2, count=10))
        assert a != b

    def test_names_follow_format(self):
        pairs = generate_records(GeneratorConfig(seed=0, count=3))
        assert [pub.name for pub, _ in pairs] == [NAME_FORMAT.format(i) for i in (1, 2, 3)]
        assert all(pub.name == priv.name for pub, priv in pairs)

    def test_values_within_ranges(self):
        df = generate_frame(GeneratorConfig(seed=5, count=500))
        assert list(df.columns) == ["name", *PUBLIC_FIELDS, *PRIVATE_FIELDS]
        for field, (lo, hi) in DEFAULT_RANGES.items():
            assert df[field].between(lo, hi).all(), field

    def test_default_records_pass_validation(self):
        for _, private in generate_records(GeneratorConfig(seed=8, count=200)):
            private.validate()

    def test_decimals_respected(self):
        for pub, priv in generate_records(GeneratorConfig(seed=3, count=20, decimals=1)):
            assert pub.windspeed.as_tuple().exponent == -1
            assert priv.ph.as_tuple().exponent == -1

    def test_means_near_interval_midpoint(self):
        pairs = generate_records(GeneratorConfig(seed=42, count=10_000))
        means = record_means(pairs)
        for field, (lo, hi) in DEFAULT_RANGES.items():
            midpoint = (lo + hi) / 2
            # Fields starting at zero need an absolute tolerance
            assert math.isclose(means[field], midpoint, rel_tol=0.05, abs_tol=0.05 * (hi - lo))


class TestRanges:
    def test_override_single_field(self):
        cfg = GeneratorConfig(seed=1, count=100, ranges={"ph": (7.0, 7.0)})
        assert generate_frame(cfg)["ph"].eq(7.0).all()

    def test_out_of_range_override_reaches_records(self):
        pairs = generate_records(GeneratorConfig(seed=1, count=5, ranges={"ph": (15, 16)}))
        assert all(priv.ph >= 15 for _, priv in pairs)

    @pytest.mark.parametrize(
        "ranges",
        [
            {"ph": (9.0, 6.0)},
            {"depth": (0, 1)},
            {"ph": ("low", "high")},
            {"ph": (0, float("inf"))},
            {"ph": (1,)},
        ],
    )
    def test_bad_ranges(self, ranges):
        with pytest.raises(BadRange):
            generate_frame(GeneratorConfig(seed=1, count=1, ranges=ranges))

    @pytest.mark.parametrize("count", [0, -3])
    def test_bad_count(self, count):
        with pytest.raises(BadRange):
            generate_frame(GeneratorConfig(seed=1, count=count))


class TestRecordFiles:
    def test_write_and_read(self, temp_dir):
        cfg = GeneratorConfig(seed=9, count=25)
        path = generate_to_file(cfg, temp_dir / "records.jsonl")
        assert read_records(path) == generate_records(cfg)

    def test_one_line_per_record(self, temp_dir):
        path = generate_to_file(GeneratorConfig(seed=9, count=7), temp_dir / "records.jsonl")
        with open(path) as f:
            assert len(f.read().splitlines()) == 7
