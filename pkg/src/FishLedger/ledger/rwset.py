"""Read-write sets produced by simulated chaincode execution."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Tuple

from ..core.codec import digest_of
from ..core.types import Version

PUBLIC_NAMESPACE = "public"


def hash_namespace(collection: str) -> str:
    """State namespace holding the on-ledger digests of a private collection."""
    return f"{collection}$hash"


@dataclass(frozen=True)
class KVRead:
    namespace: str
    key: str
    version: Optional[Version]

    def to_wire(self) -> list:
        return [self.namespace, self.key, None if self.version is None else self.version.to_wire()]

    @classmethod
    def from_wire(cls, wire: list) -> "KVRead":
        return cls(wire[0], wire[1], Version.from_wire(wire[2]))


@dataclass(frozen=True)
class KVWrite:
    """A public write; ``value`` None is a delete tombstone."""

    namespace: str
    key: str
    value: Optional[bytes]

    @property
    def is_delete(self) -> bool:
        return self.value is None

    def to_wire(self) -> list:
        return [self.namespace, self.key, self.value]

    @classmethod
    def from_wire(cls, wire: list) -> "KVWrite":
        return cls(wire[0], wire[1], None if wire[2] is None else bytes(wire[2]))


@dataclass(frozen=True)
class PrivateDigestWrite:
    collection: str
    key: str
    value_digest: bytes

    def to_wire(self) -> list:
        return [self.collection, self.key, self.value_digest]

    @classmethod
    def from_wire(cls, wire: list) -> "PrivateDigestWrite":
        return cls(wire[0], wire[1], bytes(wire[2]))


@dataclass(frozen=True)
class ReadWriteSet:
    reads: Tuple[KVRead, ...] = field(default_factory=tuple)
    public_writes: Tuple[KVWrite, ...] = field(default_factory=tuple)
    private_writes: Tuple[PrivateDigestWrite, ...] = field(default_factory=tuple)

    def __post_init__(self):
        for label, keys in (
            ("reads", [(r.namespace, r.key) for r in self.reads]),
            ("public_writes", [(w.namespace, w.key) for w in self.public_writes]),
            ("private_writes", [(w.collection, w.key) for w in self.private_writes]),
        ):
            if len(keys) != len(set(keys)):
                raise ValueError(f"duplicate keys in {label}")

    def to_wire(self) -> list:
        return [
            [r.to_wire() for r in self.reads],
            [w.to_wire() for w in self.public_writes],
            [w.to_wire() for w in self.private_writes],
        ]

    @classmethod
    def from_wire(cls, wire: list) -> "ReadWriteSet":
        return cls(
            reads=tuple(KVRead.from_wire(r) for r in wire[0]),
            public_writes=tuple(KVWrite.from_wire(w) for w in wire[1]),
            private_writes=tuple(PrivateDigestWrite.from_wire(w) for w in wire[2]),
        )

    @cached_property
    def hash(self) -> bytes:
        return digest_of(self.to_wire())

    @property
    def is_empty(self) -> bool:
        return not (self.reads or self.public_writes or self.private_writes)
