"""Batching of envelopes into blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from ..core.types import ChainInfo
from ..ledger.blocks import Block
from ..ledger.transaction import Envelope


@dataclass(frozen=True)
class BlockCutterConfig:
    max_message_count: int = 10
    batch_timeout_ms: float = 250.0

    def __post_init__(self):
        if self.max_message_count < 1:
            raise ValueError("max_message_count must be >= 1")
        if self.batch_timeout_ms <= 0:
            raise ValueError("batch_timeout_ms must be > 0")


def cut_block(pending: List[Envelope], cfg: BlockCutterConfig, chain_info: ChainInfo) -> Block:
    """Next block over ``pending`` (at most ``cfg.max_message_count`` envelopes)."""
    if not pending:
        raise ValueError("cannot cut an empty block")
    batch = pending[: cfg.max_message_count]
    return Block.create(chain_info.height, chain_info.current_hash, batch)


class BlockCutter:
    """Pending envelopes of a leader.

    ``ordered`` returns the batches that are complete after adding an
    envelope. Config envelopes always travel alone.
    """

    def __init__(self, config: BlockCutterConfig):
        self.config = config
        self.pending: List[Envelope] = []

    def ordered(self, env: Envelope) -> Tuple[List[List[Envelope]], bool]:
        """Add an envelope; returns (complete batches, pending non-empty)."""
        batches: List[List[Envelope]] = []
        if env.is_config:
            if self.pending:
                batches.append(self.cut())
            batches.append([env])
            return batches, False
        self.pending.append(env)
        if len(self.pending) >= self.config.max_message_count:
            batches.append(self.cut())
        return batches, bool(self.pending)

    def cut(self) -> List[Envelope]:
        batch, self.pending = self.pending, []
        return batch

    def clear(self) -> int:
        dropped = len(self.pending)
        self.pending = []
        return dropped
