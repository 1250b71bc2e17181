"""A peer's ledger: block log, world state and the current network policy."""

from __future__ import annotations

from typing import List, Optional, Set, Tuple, Union

from ..core.base import BaseStorage, ChainIntegrityError, HeightMismatch
from ..core.enums import ValidationCode
from ..core.types import ChainInfo, CommitReceipt, FirstBreak, Version
from ..identity.msp import MembershipRegistry
from ..policy.network import NetworkPolicy
from ..utils.logging import get_logger
from .blocks import Block, genesis_policy
from .blockstore import BlockStore, verify_chain
from .state import StateStore
from .validation import apply_block_state, commit_block, validate_block


class Ledger:
    """Block store plus the state derived from it.

    State is never persisted on its own: ``open`` rebuilds it by replaying
    the VALID writes of every stored block, so a crash between appending a
    block and applying it cannot leave state ahead of or behind the chain.

    Args:
        storage: Backend holding the block log
        name: Owner name, used for logging
    """

    def __init__(self, storage: BaseStorage, name: str = "ledger"):
        self.name = name
        self.logger = get_logger(f"ledger.{name}")
        self.chain = BlockStore(storage)
        self.state = StateStore()
        self.policy: Optional[NetworkPolicy] = None
        self.tx_ids: Set[str] = set()
        self.tx_locations: dict = {}
        self.broken: Optional[FirstBreak] = None

    @property
    def height(self) -> int:
        return self.chain.height

    def open(self, genesis: Optional[Block] = None) -> Union[bool, FirstBreak]:
        """Load and verify the block log, then replay state.

        When the log is empty and ``genesis`` is given, the genesis block is
        committed first. A damaged log is loaded up to the break and the
        ledger is marked broken.
        """
        result = self.chain.load()
        self.broken = None if result is True else result
        self.state = StateStore()
        self.tx_ids = set()
        self.tx_locations = {}
        self.policy = None
        for block in self.chain.blocks():
            self._absorb(block)
        if self.chain.height == 0 and genesis is not None and self.broken is None:
            self.commit_genesis(genesis)
        self.logger.debug(f"Opened ledger at height {self.height}")
        return result

    def ensure_intact(self) -> None:
        if self.broken is not None:
            raise ChainIntegrityError(
                f"{self.name}: block log broken at block {self.broken.block_num}",
                self.broken.block_num,
            )

    def _absorb(self, block: Block) -> Tuple[int, int]:
        if block.number == 0:
            self.policy = genesis_policy(block)
        else:
            for env, code in zip(block.transactions, block.validation_codes):
                if env.is_config and code is ValidationCode.VALID:
                    self.policy = env.config_update.proposed
        for tx_index, env in enumerate(block.transactions):
            self.tx_ids.add(env.tx_id)
            self.tx_locations.setdefault(env.tx_id, (block.number, tx_index))
        return apply_block_state(block, self.state)

    def commit_genesis(self, genesis: Block) -> CommitReceipt:
        if self.height != 0:
            raise HeightMismatch(f"genesis offered at height {self.height}")
        block = genesis if genesis.validation_codes is not None else genesis.with_codes(
            [ValidationCode.VALID] * len(genesis.transactions)
        )
        self.chain.append(block)
        self._absorb(block)
        return CommitReceipt(height=self.height, n_valid=len(block.transactions), n_invalid=0)

    def validate(self, block: Block, registry: MembershipRegistry) -> List[ValidationCode]:
        return validate_block(block, self.policy, registry, self.state, self.tx_ids)

    def process_block(
        self, block: Block, registry: MembershipRegistry
    ) -> Tuple[Block, CommitReceipt]:
        """Validate and commit the next block; returns the stored block and receipt."""
        self.ensure_intact()
        if block.number != self.height:
            raise HeightMismatch(f"block {block.number} offered at height {self.height}")
        codes = self.validate(block, registry)
        stored = block.with_codes(codes)
        receipt = commit_block(stored, self.state, self.chain)
        for tx_index, (env, code) in enumerate(zip(stored.transactions, codes)):
            self.tx_ids.add(env.tx_id)
            self.tx_locations.setdefault(env.tx_id, (stored.number, tx_index))
            if env.is_config and code is ValidationCode.VALID:
                self.policy = env.config_update.proposed
        return stored, receipt

    def get_state(self, namespace: str, key: str) -> Optional[Tuple[bytes, Version]]:
        return self.state.get_state(namespace, key)

    def get_block(self, number: int) -> Block:
        return self.chain.get_block(number)

    def get_chain_info(self) -> ChainInfo:
        return self.chain.chain_info()

    def tx_status(self, tx_id: str) -> Optional[Tuple[int, ValidationCode]]:
        location = self.tx_locations.get(tx_id)
        if location is None:
            return None
        block_num, tx_index = location
        return block_num, self.chain.get_block(block_num).validation_codes[tx_index]

    def verify(self) -> Union[bool, FirstBreak]:
        return verify_chain(self.chain)

    def repair(self, genesis: Optional[Block] = None) -> int:
        """Truncate the log at its first break and reload; returns the new height."""
        result = verify_chain(self.chain)
        if result is not True:
            self.chain.truncate(result.block_num)
        self.open(genesis)
        return self.height
