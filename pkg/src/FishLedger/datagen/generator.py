"""Synthetic fish-farm sensor records."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
import pandas as pd

from ..chaincode.records import (
    PRIVATE_FIELDS,
    PUBLIC_FIELDS,
    FishFarmPrivateRecord,
    FishFarmPublicRecord,
)
from ..core.base import BadRange
from ..utils.dataframe_io import read_jsonl, write_jsonl
from ..utils.logging import get_logger

logger = get_logger("datagen")

NAME_FORMAT = "record-{:06d}"

# Closed [min, max] intervals; every default keeps records valid for CreateRecord.
DEFAULT_RANGES: Dict[str, Tuple[float, float]] = {
    "windspeed": (0.0, 25.0),
    "rainfall": (0.0, 30.0),
    "airpressure": (960.0, 1050.0),
    "temperature": (4.0, 20.0),
    "waveheight": (0.0, 6.0),
    "watercurrent": (0.0, 2.5),
    "fdom": (0.0, 100.0),
    "salinity": (25.0, 36.0),
    "ph": (6.0, 9.0),
    "turbidity": (0.0, 50.0),
    "algae": (0.0, 40.0),
    "orp": (150.0, 450.0),
    "nitrates": (0.0, 10.0),
}

RecordPair = Tuple[FishFarmPublicRecord, FishFarmPrivateRecord]


@dataclass(frozen=True)
class GeneratorConfig:
    """Seed, record count and per-field value ranges.

    ``ranges`` overrides individual entries of ``DEFAULT_RANGES``.
    """

    seed: int = 0
    count: int = 1
    ranges: Mapping[str, Tuple[float, float]] = field(default_factory=dict)
    decimals: int = 2

    def resolved_ranges(self) -> Dict[str, Tuple[float, float]]:
        unknown = set(self.ranges) - set(DEFAULT_RANGES)
        if unknown:
            raise BadRange(f"unknown fields: {', '.join(sorted(unknown))}")
        merged = dict(DEFAULT_RANGES)
        for name, bounds in self.ranges.items():
            try:
                lo, hi = (float(b) for b in bounds)
            except (TypeError, ValueError) as e:
                raise BadRange(f"{name}: range must be two numbers, got {bounds!r}") from e
            merged[name] = (lo, hi)
        for name, (lo, hi) in merged.items():
            if not (np.isfinite(lo) and np.isfinite(hi)):
                raise BadRange(f"{name}: range bounds must be finite")
            if lo > hi:
                raise BadRange(f"{name}: min {lo} exceeds max {hi}")
        return merged


def generate_frame(cfg: GeneratorConfig) -> pd.DataFrame:
    """One row per record: ``name`` followed by the 13 sensor fields.

    Raises:
        BadRange: If ``count`` < 1 or any range has min > max
    """
    if cfg.count < 1:
        raise BadRange(f"count must be at least 1, got {cfg.count}")
    ranges = cfg.resolved_ranges()
    rng = np.random.default_rng(cfg.seed)
    columns = {"name": [NAME_FORMAT.format(i) for i in range(1, cfg.count + 1)]}
    for name in PUBLIC_FIELDS + PRIVATE_FIELDS:
        lo, hi = ranges[name]
        values = rng.uniform(lo, hi, size=cfg.count)
        # Rounding may step outside a narrow interval; clip back.
        columns[name] = np.clip(np.round(values, cfg.decimals), lo, hi)
    return pd.DataFrame(columns)


def generate_records(cfg: GeneratorConfig) -> List[RecordPair]:
    """Deterministic (public, private) record pairs for ``cfg.seed``.

    Records are built without contract validation, so deliberately
    out-of-range configurations reach ``CreateRecord`` and fail there.
    """
    df = generate_frame(cfg)
    pairs: List[RecordPair] = []
    for row in df.itertuples(index=False):
        data = row._asdict()
        public = FishFarmPublicRecord(
            name=data["name"],
            **{f: _decimal(data[f], cfg.decimals) for f in PUBLIC_FIELDS},
        )
        private = FishFarmPrivateRecord(
            name=data["name"],
            **{f: _decimal(data[f], cfg.decimals) for f in PRIVATE_FIELDS},
        )
        pairs.append((public, private))
    logger.debug(f"Generated {len(pairs)} records (seed {cfg.seed})")
    return pairs


def _decimal(value: float, decimals: int) -> Decimal:
    return Decimal(f"{float(value):.{decimals}f}")


def write_records(path: Union[str, Path], pairs: List[RecordPair]) -> str:
    """One JSON object per line: ``{"public": {...}, "private": {...}}``."""
    rows = ({"public": pub.to_dict(), "private": priv.to_dict()} for pub, priv in pairs)
    written = write_jsonl(Path(path), rows)
    logger.info(f"Wrote {len(pairs)} records to {written}")
    return written


def read_records(path: Union[str, Path]) -> List[RecordPair]:
    """Load pairs written by ``write_records``; documents are validated."""
    pairs = []
    for row in read_jsonl(Path(path)):
        public = row["public"]
        private = row["private"]
        pairs.append(
            (
                FishFarmPublicRecord.from_fields(public["name"], public),
                FishFarmPrivateRecord.from_fields(private["name"], private),
            )
        )
    return pairs


def generate_to_file(cfg: GeneratorConfig, path: Union[str, Path]) -> str:
    return write_records(path, generate_records(cfg))


def record_means(pairs: List[RecordPair], fields: Optional[List[str]] = None) -> Dict[str, float]:
    """Per-field sample means, used for uniformity checks."""
    fields = fields or list(PUBLIC_FIELDS + PRIVATE_FIELDS)
    rows = [{**pub.to_dict(), **priv.to_dict()} for pub, priv in pairs]
    df = pd.DataFrame(rows)[fields].astype(float)
    return {name: float(value) for name, value in df.mean().items()}
