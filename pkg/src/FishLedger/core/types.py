from dataclasses import dataclass
from typing import List, Optional


@dataclass(frozen=True, order=True)
class Version:
    """Height of the transaction that last wrote a key."""

    block_num: int
    tx_index: int

    def to_wire(self) -> List[int]:
        return [self.block_num, self.tx_index]

    @classmethod
    def from_wire(cls, wire: Optional[List[int]]) -> Optional["Version"]:
        if wire is None:
            return None
        return cls(int(wire[0]), int(wire[1]))


@dataclass(frozen=True)
class CommitReceipt:
    height: int
    n_valid: int
    n_invalid: int


@dataclass(frozen=True)
class ChainInfo:
    height: int
    current_hash: bytes
    previous_hash: bytes


@dataclass(frozen=True)
class FirstBreak:
    """First block at which a chain fails verification."""

    block_num: int
    reason: str = ""

    def __bool__(self) -> bool:
        return False
