"""Delivery log of the simulated network."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

from ..core.enums import FrameType
from ..utils.dataframe_io import read_jsonl, records_to_dataframe, write_jsonl


@dataclass(frozen=True)
class TraceEntry:
    t: float
    src: str
    dst: str
    frame: str
    size: int
    src_org: str = ""
    dst_org: str = ""
    info: Tuple[Tuple[str, Any], ...] = ()

    def get(self, key: str, default: Any = None) -> Any:
        return dict(self.info).get(key, default)

    def to_dict(self) -> Dict[str, Any]:
        entry = asdict(self)
        entry["info"] = dict(self.info)
        return entry


def _frame_name(frame: Union[None, str, FrameType]) -> Optional[str]:
    if frame is None:
        return None
    return frame.value if isinstance(frame, FrameType) else frame


def filter_trace(
    entries: Iterable[TraceEntry],
    frame: Union[None, str, FrameType] = None,
    src: Optional[str] = None,
    dst: Optional[str] = None,
    src_org: Optional[str] = None,
    dst_org: Optional[str] = None,
    since: Optional[float] = None,
) -> Tuple[TraceEntry, ...]:
    """Entries matching every given criterion."""
    frame_name = _frame_name(frame)
    return tuple(
        e
        for e in entries
        if (frame_name is None or e.frame == frame_name)
        and (src is None or e.src == src)
        and (dst is None or e.dst == dst)
        and (src_org is None or e.src_org == src_org)
        and (dst_org is None or e.dst_org == dst_org)
        and (since is None or e.t >= since)
    )


def export_trace(path: Union[str, Path], entries: Iterable[TraceEntry]) -> str:
    """Write entries as JSON lines."""
    return write_jsonl(Path(path), (e.to_dict() for e in entries))


def load_trace(path: Union[str, Path]) -> List[TraceEntry]:
    return [
        TraceEntry(**{**row, "info": tuple(sorted(row.get("info", {}).items()))})
        for row in read_jsonl(Path(path))
    ]


def trace_frame_counts(entries: Iterable[TraceEntry]):
    """Frame counts per type as a DataFrame (frame, count, bytes)."""
    df = records_to_dataframe(e.to_dict() for e in entries)
    if df.empty:
        return df
    return (
        df.groupby("frame")
        .agg(count=("size", "size"), bytes=("size", "sum"))
        .reset_index()
        .sort_values("frame")
    )
