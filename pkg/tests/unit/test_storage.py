# tests/unit/test_storage.py

import pytest

from FishLedger.core.base import StorageOperationError
from FishLedger.storage.local import LocalStorage, frame_record, iter_framed
from FishLedger.storage.memory import MemoryStorage


@pytest.fixture(params=["local", "memory"])
def storage(request, temp_dir):
    if request.param == "local":
        return LocalStorage(temp_dir / "node")
    return MemoryStorage()


class TestRecordLogs:
    """Both backends behave the same for append-only logs."""

    def test_append_returns_index(self, storage):
        assert storage.append_record("log", b"a") == 0
        assert storage.append_record("log", b"bb") == 1
        assert list(storage.read_records("log")) == [b"a", b"bb"]

    def test_missing_log_is_empty(self, storage):
        assert not storage.exists("nothing")
        assert storage.read_bytes("nothing") == b""
        assert list(storage.read_records("nothing")) == []

    def test_truncate(self, storage):
        for i in range(5):
            storage.append_record("log", bytes([i]))
        storage.truncate("log", 2)
        assert list(storage.read_records("log")) == [b"\x00", b"\x01"]
        storage.append_record("log", b"x")
        assert list(storage.read_records("log"))[-1] == b"x"

    def test_raw_bytes_round_trip(self, storage):
        storage.append_record("log", b"abc")
        raw = storage.read_bytes("log")
        assert raw == frame_record(b"abc")
        storage.write_bytes("log", raw + frame_record(b"def"))
        assert list(storage.read_records("log")) == [b"abc", b"def"]

    def test_truncate_after_damage_keeps_good_prefix(self, storage):
        storage.append_record("log", b"one")
        storage.append_record("log", b"two")
        storage.write_bytes("log", storage.read_bytes("log")[:-1])
        storage.truncate("log", 1)
        assert list(storage.read_records("log")) == [b"one"]

    def test_delete(self, storage):
        storage.append_record("log", b"a")
        assert storage.delete("log") is True
        assert storage.delete("log") is False
        assert not storage.exists("log")


class TestFraming:
    def test_overrun_detected(self):
        with pytest.raises(StorageOperationError, match="overruns"):
            list(iter_framed(frame_record(b"abcdef")[:-2], "log"))

    def test_truncated_header_detected(self):
        with pytest.raises(StorageOperationError, match="header"):
            list(iter_framed(frame_record(b"a") + b"\x00\x00", "log"))

    def test_local_log_survives_reopen(self, temp_dir):
        LocalStorage(temp_dir).append_record("blocks", b"persisted")
        reopened = LocalStorage(temp_dir)
        assert reopened.append_record("blocks", b"next") == 1
        assert (temp_dir / "blocks.log").exists()
