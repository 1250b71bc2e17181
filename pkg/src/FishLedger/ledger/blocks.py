"""Hash-chained blocks."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional, Sequence, Tuple

from ..core.base import MalformedBlock
from ..core.codec import ZERO_HASH, digest_of, encode
from ..core.enums import ValidationCode
from ..identity.certificates import SigningIdentity
from ..policy.network import NetworkPolicy
from .transaction import ConfigUpdate, Envelope


def compute_data_hash(transactions: Iterable[Envelope]) -> bytes:
    return digest_of([env.to_wire() for env in transactions])


@dataclass(frozen=True)
class BlockHeader:
    number: int
    prev_hash: bytes
    data_hash: bytes

    def to_wire(self) -> list:
        return [self.number, self.prev_hash, self.data_hash]

    @classmethod
    def from_wire(cls, wire: list) -> "BlockHeader":
        return cls(int(wire[0]), bytes(wire[1]), bytes(wire[2]))

    @cached_property
    def hash(self) -> bytes:
        return digest_of(self.to_wire())


@dataclass(frozen=True)
class Block:
    """A batch of envelopes; validation codes are filled in by peers."""

    header: BlockHeader
    transactions: Tuple[Envelope, ...]
    validation_codes: Optional[Tuple[ValidationCode, ...]] = field(default=None, compare=False)

    @property
    def number(self) -> int:
        return self.header.number

    @classmethod
    def create(cls, number: int, prev_hash: bytes, transactions: Sequence[Envelope]) -> "Block":
        transactions = tuple(transactions)
        return cls(
            header=BlockHeader(number, bytes(prev_hash), compute_data_hash(transactions)),
            transactions=transactions,
        )

    def with_codes(self, codes: Sequence[ValidationCode]) -> "Block":
        if len(codes) != len(self.transactions):
            raise MalformedBlock(
                f"block {self.number}: {len(codes)} codes for {len(self.transactions)} transactions"
            )
        return replace(self, validation_codes=tuple(codes))

    def data_hash_ok(self) -> bool:
        return compute_data_hash(self.transactions) == self.header.data_hash

    def check_well_formed(self) -> None:
        """Raises MalformedBlock when the data hash disagrees with the payload."""
        if not self.data_hash_ok():
            raise MalformedBlock(f"block {self.number}: data hash does not match transactions")
        if self.number == 0 and self.header.prev_hash != ZERO_HASH:
            raise MalformedBlock("genesis block must have a zero prev_hash")

    def to_wire(self) -> list:
        return [
            self.header.to_wire(),
            [env.to_wire() for env in self.transactions],
            None
            if self.validation_codes is None
            else [c.value for c in self.validation_codes],
        ]

    @classmethod
    def from_wire(cls, wire: list) -> "Block":
        try:
            return cls(
                header=BlockHeader.from_wire(wire[0]),
                transactions=tuple(Envelope.from_wire(e) for e in wire[1]),
                validation_codes=None
                if wire[2] is None
                else tuple(ValidationCode(c) for c in wire[2]),
            )
        except MalformedBlock:
            raise
        except Exception as e:
            raise MalformedBlock(f"cannot decode block: {e}") from e

    @cached_property
    def encoded(self) -> bytes:
        return encode(self.to_wire())

    def summary(self) -> dict:
        return {
            "number": self.number,
            "prev_hash": self.header.prev_hash.hex(),
            "data_hash": self.header.data_hash.hex(),
            "hash": self.header.hash.hex(),
            "transactions": [
                {
                    "tx_id": env.tx_id,
                    "kind": env.kind.value,
                    "function": env.proposal.function,
                    "code": None
                    if self.validation_codes is None
                    else self.validation_codes[i].value,
                }
                for i, env in enumerate(self.transactions)
            ],
        }


def make_genesis_block(
    policy: NetworkPolicy, identity: SigningIdentity, timestamp: int
) -> Block:
    """Block 0: one config envelope carrying the initial network policy."""
    envelope = Envelope.config(
        identity,
        ConfigUpdate(proposed=policy),
        nonce=digest_of(["genesis", policy.to_wire()])[:16],
        timestamp=timestamp,
    )
    return Block.create(0, ZERO_HASH, [envelope]).with_codes([ValidationCode.VALID])


def genesis_policy(block: Block) -> NetworkPolicy:
    if block.number != 0 or not block.transactions or block.transactions[0].config_update is None:
        raise MalformedBlock("block 0 does not carry a network policy")
    return block.transactions[0].config_update.proposed
