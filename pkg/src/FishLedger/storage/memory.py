"""In-memory storage used by the network simulator.

The simulator keeps a node's storage object across crashes, so records
appended here behave like files on a disk that survives a process crash.
"""

from typing import Any, Dict, Iterator, List, Optional

from ..core.base import BaseStorage
from .local import frame_record, iter_framed


class MemoryStorage(BaseStorage):
    def __init__(self, config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self._logs: Dict[str, List[bytes]] = {}
        # Raw overrides written through write_bytes (tamper tests)
        self._raw: Dict[str, bytes] = {}

    def _materialize(self, log_name: str) -> None:
        if log_name in self._raw:
            raw = self._raw.pop(log_name)
            self._logs[log_name] = list(iter_framed(raw, log_name))

    def append_record(self, log_name: str, record: bytes) -> int:
        if log_name in self._raw:
            self._raw[log_name] += frame_record(record)
            return -1
        records = self._logs.setdefault(log_name, [])
        records.append(bytes(record))
        return len(records) - 1

    def read_records(self, log_name: str) -> Iterator[bytes]:
        if log_name in self._raw:
            return iter_framed(self._raw[log_name], log_name)
        return iter(list(self._logs.get(log_name, [])))

    def read_bytes(self, log_name: str) -> bytes:
        if log_name in self._raw:
            return self._raw[log_name]
        return b"".join(frame_record(r) for r in self._logs.get(log_name, []))

    def write_bytes(self, log_name: str, content: bytes) -> None:
        self._logs.pop(log_name, None)
        self._raw[log_name] = bytes(content)

    def truncate(self, log_name: str, n_records: int) -> None:
        if log_name in self._raw:
            kept = []
            try:
                for record in iter_framed(self._raw[log_name], log_name):
                    if len(kept) == n_records:
                        break
                    kept.append(record)
            except Exception:
                pass
            self._raw.pop(log_name)
            self._logs[log_name] = kept
            return
        records = self._logs.get(log_name, [])
        del records[n_records:]

    def exists(self, log_name: str) -> bool:
        return log_name in self._logs or log_name in self._raw

    def delete(self, log_name: str) -> bool:
        existed = self.exists(log_name)
        self._logs.pop(log_name, None)
        self._raw.pop(log_name, None)
        return existed
