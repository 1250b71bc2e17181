"""Network policy: endorsement rules plus collection definitions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Tuple

from ..core.base import InsufficientApprovals, UnknownCollection, VersionMismatch
from ..privatedata.collections import CollectionConfig
from ..utils.logging import get_logger
from .expressions import EndorsementPolicy, evaluate_policy, parse_policy, print_policy

logger = get_logger("policy")


@dataclass(frozen=True)
class NetworkPolicy:
    channel_policy: EndorsementPolicy
    chaincode_policy: EndorsementPolicy
    collections: Tuple[CollectionConfig, ...] = field(default_factory=tuple)
    version: int = 0

    def __post_init__(self):
        names = [c.name for c in self.collections]
        if len(names) != len(set(names)):
            raise ValueError(f"duplicate collection names in {names}")

    @property
    def collections_by_name(self) -> Dict[str, CollectionConfig]:
        return {c.name: c for c in self.collections}

    def collection(self, name: str) -> CollectionConfig:
        for c in self.collections:
            if c.name == name:
                return c
        raise UnknownCollection(f"collection {name} is not defined")

    def to_wire(self) -> list:
        return [
            print_policy(self.channel_policy),
            print_policy(self.chaincode_policy),
            [c.to_config() for c in self.collections],
            self.version,
        ]

    @classmethod
    def from_wire(cls, wire: list) -> "NetworkPolicy":
        return cls(
            channel_policy=parse_policy(wire[0]),
            chaincode_policy=parse_policy(wire[1]),
            collections=tuple(CollectionConfig.from_config(c) for c in wire[2]),
            version=int(wire[3]),
        )

    def to_config(self) -> dict:
        """Human-readable form used by ``policy show``."""
        return {
            "version": self.version,
            "channel_policy": print_policy(self.channel_policy),
            "chaincode_policy": print_policy(self.chaincode_policy),
            "collections": [c.to_config() for c in self.collections],
        }

    @classmethod
    def from_config(cls, config: Mapping, version: int = 0) -> "NetworkPolicy":
        return cls(
            channel_policy=parse_policy(config["channel_policy"]),
            chaincode_policy=parse_policy(config["chaincode_policy"]),
            collections=tuple(
                CollectionConfig.from_config(c) for c in config.get("collections", [])
            ),
            version=version,
        )


def update_policy(
    current: NetworkPolicy, proposed: NetworkPolicy, approvals: Iterable
) -> NetworkPolicy:
    """Replace the network policy when the current channel policy approves.

    Raises:
        VersionMismatch: If proposed.version is not current.version + 1
        InsufficientApprovals: If approvals do not satisfy the channel policy
    """
    if proposed.version != current.version + 1:
        raise VersionMismatch(
            f"proposed version {proposed.version}, expected {current.version + 1}"
        )
    if not evaluate_policy(current.channel_policy, approvals):
        raise InsufficientApprovals(
            f"approvals do not satisfy {print_policy(current.channel_policy)}"
        )
    logger.info(f"Network policy updated to version {proposed.version}")
    return proposed
