"""Append-only block log.

Each log record is the canonical block encoding (validation codes included)
followed by its 32-byte SHA-256 checksum. The checksum covers the codes,
which the header hashes do not.
"""

from __future__ import annotations

from typing import List, Optional, Tuple, Union

from ..core.base import (
    BaseStorage,
    HashChainBreak,
    HeightMismatch,
    MalformedBlock,
    StorageOperationError,
)
from ..core.codec import ZERO_HASH, decode, sha256
from ..core.types import ChainInfo, FirstBreak
from ..storage.local import iter_framed
from ..utils.logging import get_logger
from .blocks import Block

BLOCK_LOG = "blocks"
CHECKSUM_BYTES = 32

logger = get_logger("blockstore")


def _seal(block: Block) -> bytes:
    payload = block.encoded
    return payload + sha256(payload)


def _unseal(record: bytes, expected_number: int) -> Block:
    if len(record) < CHECKSUM_BYTES:
        raise MalformedBlock(f"record {expected_number} shorter than its checksum")
    payload, checksum = record[:-CHECKSUM_BYTES], record[-CHECKSUM_BYTES:]
    if sha256(payload) != checksum:
        raise MalformedBlock(f"record {expected_number} checksum mismatch")
    return Block.from_wire(decode(payload))


class BlockStore:
    """Blocks of one node, backed by a storage log.

    Args:
        storage: Backend holding the ``blocks`` log
        log_name: Name of the log within the backend
    """

    def __init__(self, storage: BaseStorage, log_name: str = BLOCK_LOG):
        self.storage = storage
        self.log_name = log_name
        self._blocks: List[Block] = []

    @property
    def height(self) -> int:
        return len(self._blocks)

    def load(self) -> Union[bool, FirstBreak]:
        """Read the log into memory, stopping at the first damaged record."""
        self._blocks = []
        result = verify_chain(self, collect=self._blocks)
        if result is not True:
            logger.warning(
                f"Block log {self.log_name} breaks at block {result.block_num}: {result.reason}"
            )
        return result

    def append(self, block: Block) -> int:
        """Append a block carrying validation codes; returns the new height.

        Raises:
            HeightMismatch: If block.number != height
            HashChainBreak: If prev_hash is not the hash of the last header
            MalformedBlock: If the data hash or codes are inconsistent
        """
        if block.number != self.height:
            raise HeightMismatch(f"block {block.number} offered at height {self.height}")
        expected_prev = self._blocks[-1].header.hash if self._blocks else ZERO_HASH
        if block.header.prev_hash != expected_prev:
            raise HashChainBreak(f"block {block.number} prev_hash does not match block {block.number - 1}")
        if block.validation_codes is None:
            raise MalformedBlock(f"block {block.number} has no validation codes")
        block.check_well_formed()
        try:
            self.storage.append_record(self.log_name, _seal(block))
        except Exception as e:
            raise StorageOperationError(f"Failed to append block {block.number}: {e}") from e
        self._blocks.append(block)
        return self.height

    def get_block(self, number: int) -> Block:
        if not 0 <= number < self.height:
            raise IndexError(f"block {number} not in chain of height {self.height}")
        return self._blocks[number]

    def blocks(self, start: int = 0) -> List[Block]:
        return self._blocks[start:]

    def chain_info(self) -> ChainInfo:
        current = self._blocks[-1].header.hash if self._blocks else ZERO_HASH
        previous = self._blocks[-1].header.prev_hash if self._blocks else ZERO_HASH
        return ChainInfo(height=self.height, current_hash=current, previous_hash=previous)

    def truncate(self, height: int) -> None:
        """Drop blocks from ``height`` on, both in memory and in the log."""
        self.storage.truncate(self.log_name, height)
        del self._blocks[height:]
        logger.info(f"Block log {self.log_name} truncated to height {height}")

    def record_spans(self) -> List[Tuple[int, int]]:
        """(offset, length) of each record body within the raw log."""
        spans = []
        raw = self.storage.read_bytes(self.log_name)
        pos = 0
        while pos + 4 <= len(raw):
            length = int.from_bytes(raw[pos : pos + 4], "big")
            if pos + 4 + length > len(raw):
                break
            spans.append((pos + 4, length))
            pos += 4 + length
        return spans

    def tamper(self, block_num: int, byte_offset: int) -> int:
        """Flip one byte of a stored block; returns the absolute log offset.

        Test-only. The in-memory copy is left untouched, as on a real disk
        edited behind the process's back.
        """
        spans = self.record_spans()
        if not 0 <= block_num < len(spans):
            raise IndexError(f"no stored block {block_num}")
        start, length = spans[block_num]
        offset = start + (byte_offset % length)
        raw = bytearray(self.storage.read_bytes(self.log_name))
        raw[offset] ^= 0xFF
        self.storage.write_bytes(self.log_name, bytes(raw))
        logger.warning(f"Tampered {self.log_name}: block {block_num} byte {byte_offset}")
        return offset


def verify_chain(
    chain: BlockStore, collect: Optional[List[Block]] = None
) -> Union[bool, FirstBreak]:
    """Re-read a block log from storage and check every link.

    Returns True, or FirstBreak naming the first block whose record,
    data hash or prev_hash is inconsistent.
    """
    raw = chain.storage.read_bytes(chain.log_name)
    expected_prev = ZERO_HASH
    number = 0
    records = iter_framed(raw, chain.log_name)
    while True:
        try:
            record = next(records)
        except StopIteration:
            return True
        except StorageOperationError as e:
            return FirstBreak(number, str(e))
        try:
            block = _unseal(record, number)
        except MalformedBlock as e:
            return FirstBreak(number, str(e))
        if block.number != number:
            return FirstBreak(number, f"record holds block {block.number}")
        if block.header.prev_hash != expected_prev:
            return FirstBreak(number, "prev_hash mismatch")
        if not block.data_hash_ok():
            return FirstBreak(number, "data_hash mismatch")
        if block.validation_codes is None or len(block.validation_codes) != len(block.transactions):
            return FirstBreak(number, "validation codes missing")
        if collect is not None:
            collect.append(block)
        expected_prev = block.header.hash
        number += 1
