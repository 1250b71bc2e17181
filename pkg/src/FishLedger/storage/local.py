"""Local filesystem storage implementation."""

import struct
from pathlib import Path
from typing import Any, Dict, Iterator, Optional, Union

from ..core.base import BaseStorage, StorageOperationError
from ..utils.common import ensure_path

_LENGTH = struct.Struct(">I")


def frame_record(record: bytes) -> bytes:
    return _LENGTH.pack(len(record)) + record


def iter_framed(content: bytes, log_name: str) -> Iterator[bytes]:
    """Split length-prefixed records; raises on damaged framing."""
    pos = 0
    while pos < len(content):
        if pos + 4 > len(content):
            raise StorageOperationError(
                f"Truncated record header in {log_name} at offset {pos}"
            )
        (length,) = _LENGTH.unpack_from(content, pos)
        start = pos + 4
        end = start + length
        if end > len(content):
            raise StorageOperationError(
                f"Record at offset {pos} in {log_name} overruns the log"
            )
        yield content[start:end]
        pos = end


class LocalStorage(BaseStorage):
    """Local filesystem storage implementation.

    Each log is a file ``<root>/<log_name>.log`` of length-prefixed records.
    """

    def __init__(self, root: Union[str, Path], config: Optional[Dict[str, Any]] = None):
        super().__init__(config)
        self.root = Path(root)
        self._counts: Dict[str, int] = {}

    def _path(self, log_name: str) -> Path:
        return self.root / f"{log_name}.log"

    def _count(self, log_name: str) -> int:
        if log_name not in self._counts:
            self._counts[log_name] = (
                sum(1 for _ in self.read_records(log_name))
                if self.exists(log_name)
                else 0
            )
        return self._counts[log_name]

    def append_record(self, log_name: str, record: bytes) -> int:
        try:
            index = self._count(log_name)
            path = ensure_path(self._path(log_name))
            with open(path, "ab") as f:
                f.write(frame_record(record))
            self._counts[log_name] = index + 1
            return index
        except StorageOperationError:
            raise
        except Exception as e:
            raise StorageOperationError(f"Failed to append to {log_name}: {e}") from e

    def read_records(self, log_name: str) -> Iterator[bytes]:
        return iter_framed(self.read_bytes(log_name), log_name)

    def read_bytes(self, log_name: str) -> bytes:
        path = self._path(log_name)
        if not path.exists():
            return b""
        try:
            return path.read_bytes()
        except Exception as e:
            raise StorageOperationError(f"Failed to read {log_name}: {e}") from e

    def write_bytes(self, log_name: str, content: bytes) -> None:
        try:
            path = ensure_path(self._path(log_name))
            staged = path.with_suffix(".tmp")
            staged.write_bytes(content)
            staged.replace(path)
            self._counts.pop(log_name, None)
        except Exception as e:
            raise StorageOperationError(f"Failed to write {log_name}: {e}") from e

    def truncate(self, log_name: str, n_records: int) -> None:
        content = self.read_bytes(log_name)
        pos = 0
        kept = 0
        while kept < n_records and pos + 4 <= len(content):
            (length,) = _LENGTH.unpack_from(content, pos)
            if pos + 4 + length > len(content):
                break
            pos += 4 + length
            kept += 1
        self.write_bytes(log_name, content[:pos])
        self._counts[log_name] = kept

    def exists(self, log_name: str) -> bool:
        return self._path(log_name).exists()

    def delete(self, log_name: str) -> bool:
        try:
            path = self._path(log_name)
            self._counts.pop(log_name, None)
            if path.exists():
                path.unlink()
                return True
            return False
        except Exception as e:
            raise StorageOperationError(f"Failed to delete {log_name}: {e}") from e
