"""Durable RAFT state: current term, vote and log."""

from __future__ import annotations

from typing import List, Optional, Tuple

from ..core.base import BaseStorage
from ..core.codec import decode, encode
from ..storage.local import frame_record
from .messages import LogEntry

META_LOG = "raft_meta"
ENTRY_LOG = "raft_log"


class RaftStorage:
    """Term/vote records and log entries in two storage logs.

    The meta log is append-only and the last record wins; ``load`` rewrites
    it to that record. Entry ``i`` of the RAFT log (1-based) is record
    ``i - 1`` of the entry log.
    """

    def __init__(self, storage: BaseStorage):
        self.storage = storage
        self._count = 0

    def load(self) -> Tuple[int, Optional[str], List[LogEntry]]:
        term, voted_for = 0, None
        meta = list(self.storage.read_records(META_LOG))
        if meta:
            term, voted_for = decode(meta[-1])
        if len(meta) > 1:
            self.storage.write_bytes(META_LOG, frame_record(meta[-1]))
        entries = [LogEntry.decode(r) for r in self.storage.read_records(ENTRY_LOG)]
        self._count = len(entries)
        return term, voted_for, entries

    def save_meta(self, term: int, voted_for: Optional[str]) -> None:
        self.storage.append_record(META_LOG, encode([term, voted_for]))

    def truncate(self, length: int) -> None:
        """Keep entries 1..length."""
        if length < self._count:
            self.storage.truncate(ENTRY_LOG, length)
            self._count = length

    def append(self, entries: List[LogEntry]) -> None:
        for entry in entries:
            self.storage.append_record(ENTRY_LOG, entry.encode())
        self._count += len(entries)

    @property
    def length(self) -> int:
        return self._count
