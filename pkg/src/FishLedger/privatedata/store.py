"""Per-peer store of private plaintext."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

from ..core.base import (
    BaseStorage,
    DigestMismatch,
    NotFound,
    PermissionDenied,
    UnknownCollection,
)
from ..core.codec import decode, encode
from ..core.types import Version
from ..utils.logging import get_logger
from .collections import CollectionConfig, PrivateWrite, collection_access, compute_digest

PRIVATE_LOG = "private"

CollectionsProvider = Callable[[], Mapping[str, CollectionConfig]]
DigestLookup = Callable[[str, str], Optional[Tuple[bytes, Version]]]


@dataclass(frozen=True)
class PrivateEntry:
    plaintext: bytes
    salt: bytes
    version: Version

    def digest(self, key: str) -> bytes:
        return compute_digest(key, self.plaintext, self.salt)


class PrivateStore:
    """Committed private entries plus per-transaction staging.

    Plaintext arrives at endorsement time (from the transient map or from
    dissemination) and is staged under its tx_id. When the transaction
    commits VALID, entries whose digest matches the on-ledger digest move
    into the committed map and are appended to the ``private`` log.
    Staging that no block claims within a retention window is dropped by
    ``expire_staged``.

    Args:
        org_id: Organization of the owning peer
        collections: Returns the collections currently defined
        digest_lookup: Returns the committed (digest, Version) for a key
        storage: Backend persisting committed entries
    """

    def __init__(
        self,
        org_id: str,
        collections: CollectionsProvider,
        digest_lookup: DigestLookup,
        storage: Optional[BaseStorage] = None,
    ):
        self.org_id = org_id
        self._collections = collections
        self._digest_lookup = digest_lookup
        self.storage = storage
        self.logger = get_logger(f"privatedata.{org_id}")
        self.entries: Dict[Tuple[str, str], PrivateEntry] = {}
        self._staging: Dict[str, Dict[Tuple[str, str], PrivateWrite]] = {}
        self._staged_at: Dict[str, int] = {}

    def _collection(self, name: str) -> CollectionConfig:
        collection = self._collections().get(name)
        if collection is None:
            raise UnknownCollection(f"collection {name} is not defined")
        return collection

    def is_member(self, collection: str) -> bool:
        try:
            return collection_access(self._collection(collection), self.org_id)
        except UnknownCollection:
            return False

    def load(self, max_height: int) -> int:
        """Reload persisted entries written at or below the chain height."""
        self.entries = {}
        self._staging = {}
        self._staged_at = {}
        if self.storage is None or not self.storage.exists(PRIVATE_LOG):
            return 0
        for record in self.storage.read_records(PRIVATE_LOG):
            collection, key, plaintext, salt, version = decode(record)
            version = Version.from_wire(version)
            if version.block_num < max_height:
                self.entries[(collection, key)] = PrivateEntry(bytes(plaintext), bytes(salt), version)
        return len(self.entries)

    def stage(self, tx_id: str, pw: PrivateWrite, height: int = 0) -> bool:
        """Hold revealed plaintext until its transaction commits.

        ``height`` is the staging peer's chain height, the start of the
        retention window.

        Returns False for sealed-only writes or writes whose digest does
        not verify.

        Raises:
            PermissionDenied: If this peer's org is not a collection member
        """
        if not self.is_member(pw.collection):
            raise PermissionDenied(f"{self.org_id} is not a member of {pw.collection}")
        if not pw.is_revealed or compute_digest(pw.key, pw.plaintext, pw.salt) != pw.value_digest:
            return False
        self._staging.setdefault(tx_id, {})[(pw.collection, pw.key)] = pw
        self._staged_at.setdefault(tx_id, height)
        return True

    def staged(self, tx_id: str) -> Dict[Tuple[str, str], PrivateWrite]:
        return dict(self._staging.get(tx_id, {}))

    def discard(self, tx_id: str) -> None:
        self._staging.pop(tx_id, None)
        self._staged_at.pop(tx_id, None)

    def expire_staged(self, height: int, retention_blocks: int) -> int:
        """Drop staging held for ``retention_blocks`` blocks without a commit."""
        expired = [t for t, at in self._staged_at.items() if height - at >= retention_blocks]
        for tx_id in expired:
            self.discard(tx_id)
        if expired:
            self.logger.debug(f"Expired staged plaintext of {len(expired)} transactions")
        return len(expired)

    @property
    def staged_count(self) -> int:
        return len(self._staging)

    def commit_tx(self, tx_id: str, digest_writes: Iterable, version: Version) -> int:
        """Move staged plaintext matching committed digests into the store."""
        staged = self._staging.pop(tx_id, {})
        self._staged_at.pop(tx_id, None)
        moved = 0
        for write in digest_writes:
            if not self.is_member(write.collection):
                continue
            pw = staged.get((write.collection, write.key))
            if pw is None or pw.value_digest != write.value_digest:
                self.logger.warning(
                    f"No matching plaintext for {write.collection}/{write.key} in tx {tx_id[:12]}"
                )
                continue
            entry = PrivateEntry(pw.plaintext, pw.salt, version)
            self.entries[(write.collection, write.key)] = entry
            if self.storage is not None:
                self.storage.append_record(
                    PRIVATE_LOG,
                    encode([write.collection, write.key, pw.plaintext, pw.salt, version.to_wire()]),
                )
            moved += 1
        return moved

    def get_private_data(self, collection: str, key: str, requester) -> bytes:
        """Plaintext for a member requester, checked against the ledger digest.

        Raises:
            PermissionDenied: Requester's org or this peer's org is not a member
            NotFound: No committed entry
            DigestMismatch: Local plaintext no longer matches the ledger
        """
        config = self._collection(collection)
        if not collection_access(config, requester.org_id):
            raise PermissionDenied(f"{requester.org_id} may not read {collection}")
        if not collection_access(config, self.org_id):
            raise PermissionDenied(f"peer of {self.org_id} holds no data for {collection}")
        entry = self.entries.get((collection, key))
        committed = self._digest_lookup(collection, key)
        if entry is None or committed is None:
            raise NotFound(f"{collection}/{key} not found")
        digest, version = committed
        if entry.digest(key) != digest or entry.version != version:
            raise DigestMismatch(f"{collection}/{key} does not match the committed digest")
        return entry.plaintext

    def store_hash(self) -> bytes:
        h = hashlib.sha256()
        for (collection, key) in sorted(self.entries):
            entry = self.entries[(collection, key)]
            h.update(encode([collection, key, entry.plaintext, entry.salt, entry.version.to_wire()]))
        return h.digest()

    def __len__(self) -> int:
        return len(self.entries)
