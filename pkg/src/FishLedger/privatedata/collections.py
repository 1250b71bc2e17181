"""Collection definitions and salted hash commitments."""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass, field
from typing import FrozenSet, Mapping, Optional

from ..core.base import UnknownCollection
from ..core.codec import encode, sha256

SALT_BYTES = 16


@dataclass(frozen=True)
class CollectionConfig:
    name: str
    member_orgs: FrozenSet[str]
    required_peer_count: int = 1

    def __post_init__(self):
        if not self.name:
            raise ValueError("collection name must be non-empty")
        if not self.member_orgs:
            raise ValueError(f"collection {self.name} has no member organizations")
        if self.required_peer_count < 0:
            raise ValueError("required_peer_count must be >= 0")

    def to_config(self) -> dict:
        return {
            "name": self.name,
            "member_orgs": sorted(self.member_orgs),
            "required_peer_count": self.required_peer_count,
        }

    @classmethod
    def from_config(cls, entry: Mapping) -> "CollectionConfig":
        return cls(
            name=entry["name"],
            member_orgs=frozenset(entry["member_orgs"]),
            required_peer_count=int(entry.get("required_peer_count", 1)),
        )


def collection_access(c: CollectionConfig, org: str) -> bool:
    return org in c.member_orgs


def compute_digest(key: str, plaintext: bytes, salt: bytes) -> bytes:
    """Commitment over key, plaintext and salt (length-prefixed)."""
    return sha256(encode([key, bytes(plaintext), bytes(salt)]))


@dataclass(frozen=True)
class PrivateWrite:
    collection: str
    key: str
    value_digest: bytes
    plaintext: Optional[bytes] = field(default=None, repr=False)
    salt: Optional[bytes] = field(default=None, repr=False)

    @property
    def is_revealed(self) -> bool:
        return self.plaintext is not None and self.salt is not None

    def sealed_only(self) -> "PrivateWrite":
        """Copy without plaintext or salt, safe for non-members."""
        return PrivateWrite(self.collection, self.key, self.value_digest)

    def to_wire(self) -> list:
        return [self.collection, self.key, self.value_digest, self.plaintext, self.salt]

    @classmethod
    def from_wire(cls, wire: list) -> "PrivateWrite":
        return cls(
            collection=wire[0],
            key=wire[1],
            value_digest=bytes(wire[2]),
            plaintext=None if wire[3] is None else bytes(wire[3]),
            salt=None if wire[4] is None else bytes(wire[4]),
        )


def seal_private_write(
    collection: str,
    key: str,
    plaintext: bytes,
    rng: Optional[random.Random] = None,
    collections: Optional[Mapping[str, CollectionConfig]] = None,
) -> PrivateWrite:
    """Bind key and plaintext under a fresh 16-byte salt.

    Raises:
        UnknownCollection: If ``collections`` is given and lacks ``collection``
    """
    if collections is not None and collection not in collections:
        raise UnknownCollection(f"collection {collection} is not defined")
    salt = rng.randbytes(SALT_BYTES) if rng is not None else secrets.token_bytes(SALT_BYTES)
    plaintext = bytes(plaintext)
    return PrivateWrite(
        collection=collection,
        key=key,
        value_digest=compute_digest(key, plaintext, salt),
        plaintext=plaintext,
        salt=salt,
    )


def verify_private(pw: PrivateWrite) -> bool:
    if not pw.is_revealed:
        return False
    return compute_digest(pw.key, pw.plaintext, pw.salt) == pw.value_digest
