from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Iterable, List

import pandas as pd

from .common import ensure_path


def records_to_dataframe(records: Iterable[Dict[str, Any]]) -> pd.DataFrame:
    return pd.DataFrame(list(records))


def write_jsonl(path: Path, rows: Iterable[Dict[str, Any]], encoding: str = "utf-8") -> str:
    """Write pre-serialized dicts verbatim (no dtype inference)."""
    path = ensure_path(path)
    with open(path, "w", encoding=encoding) as f:
        for row in rows:
            f.write(json.dumps(row, separators=(",", ":")))
            f.write("\n")
    return str(path)


def read_jsonl(path: Path, encoding: str = "utf-8") -> List[Dict[str, Any]]:
    with open(path, "r", encoding=encoding) as f:
        return [json.loads(line) for line in f if line.strip()]


def dataframe_to_table(df: pd.DataFrame, float_format: str = "{:.3f}") -> str:
    """Render an ASCII table for terminal output."""
    if df.empty:
        return "(no rows)"
    return df.to_string(
        index=False, float_format=lambda v: float_format.format(v)
    )
