"""Simulated execution against a peer's committed state."""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Tuple

from ..chaincode.base import ChaincodeStub
from ..core.base import ChaincodeError, MalformedBlock, NotFound, PermissionDenied
from ..core.codec import decode
from ..core.types import Version
from ..identity.msp import ValidatedIdentity
from ..ledger.rwset import KVRead, KVWrite, PrivateDigestWrite, ReadWriteSet, hash_namespace
from ..ledger.state import StateStore
from ..ledger.transaction import Proposal
from ..policy.network import NetworkPolicy
from ..privatedata.collections import PrivateWrite, collection_access
from ..privatedata.store import PrivateStore


class SimulationStub(ChaincodeStub):
    """Records reads with their committed versions and buffers writes.

    Reads of keys the simulation already wrote return the buffered value and
    are not recorded. Committed state is never touched.

    Args:
        proposal: Proposal being executed, transient map included
        creator: MSP-validated proposal creator
        state: Committed state of the executing peer
        policy: Network policy in force (collection definitions)
        private_store: The executing peer's private store
    """

    def __init__(
        self,
        proposal: Proposal,
        creator: ValidatedIdentity,
        state: StateStore,
        policy: NetworkPolicy,
        private_store: PrivateStore,
    ):
        self.proposal = proposal
        self.creator = creator
        self.state = state
        self.policy = policy
        self.private_store = private_store
        self._reads: Dict[Tuple[str, str], Optional[Version]] = {}
        self._writes: Dict[Tuple[str, str], Optional[bytes]] = {}
        self._private: Dict[Tuple[str, str], PrivateWrite] = {}

    # Proposal context

    def get_function_and_parameters(self) -> Tuple[str, List[str]]:
        return self.proposal.function, list(self.proposal.args)

    def get_txid(self) -> str:
        return self.proposal.tx_id

    def get_creator(self) -> ValidatedIdentity:
        return self.creator

    def get_transient(self) -> Dict[str, bytes]:
        return dict(self.proposal.transient)

    def get_private_transient(self, key: str) -> Optional[PrivateWrite]:
        raw = self.proposal.transient.get(key)
        if raw is None:
            return None
        try:
            return PrivateWrite.from_wire(decode(raw))
        except (MalformedBlock, IndexError, TypeError) as e:
            raise ChaincodeError(f"transient entry {key} is not a sealed private write") from e

    # Public state

    def _record_read(self, namespace: str, key: str) -> Optional[bytes]:
        entry = self.state.get_state(namespace, key)
        self._reads.setdefault((namespace, key), None if entry is None else entry[1])
        return None if entry is None else entry[0]

    def get_state(self, namespace: str, key: str) -> Optional[bytes]:
        if (namespace, key) in self._writes:
            return self._writes[(namespace, key)]
        return self._record_read(namespace, key)

    def put_state(self, namespace: str, key: str, value: bytes) -> None:
        if not key:
            raise ChaincodeError("state key must be non-empty")
        self._writes[(namespace, key)] = bytes(value)

    def delete_state(self, namespace: str, key: str) -> None:
        self._writes[(namespace, key)] = None

    def get_state_by_range(
        self, namespace: str, start_key: str, end_key: Optional[str]
    ) -> Iterator[Tuple[str, bytes]]:
        """Committed keys in [start_key, end_key) overlaid with buffered writes."""
        merged: Dict[str, Optional[bytes]] = {}
        for key, (value, version) in self.state.range_scan(namespace, start_key, end_key):
            self._reads.setdefault((namespace, key), version)
            merged[key] = value
        for (ns, key), value in self._writes.items():
            if ns == namespace and key >= start_key and (end_key is None or key < end_key):
                merged[key] = value
        for key in sorted(merged):
            if merged[key] is not None:
                yield key, merged[key]

    # Private data

    def check_collection_access(self, collection: str) -> None:
        config = self.policy.collection(collection)
        if not collection_access(config, self.creator.org_id):
            raise PermissionDenied(f"{self.creator.org_id} is not a member of {collection}")

    def get_private_data(self, collection: str, key: str) -> bytes:
        self.check_collection_access(collection)
        pending = self._private.get((collection, key))
        if pending is not None and pending.is_revealed:
            return pending.plaintext
        if self._record_read(hash_namespace(collection), key) is None:
            raise NotFound(f"{collection}/{key} not found")
        return self.private_store.get_private_data(collection, key, self.creator)

    def put_private_data(self, collection: str, write: PrivateWrite) -> None:
        self.policy.collection(collection)
        if write.collection != collection:
            raise ChaincodeError(f"write sealed for {write.collection}, not {collection}")
        self._private[(collection, write.key)] = write

    # Results

    @property
    def private_writes(self) -> List[PrivateWrite]:
        return [self._private[k] for k in sorted(self._private)]

    def rwset(self) -> ReadWriteSet:
        """Read-write set in key order, identical on every peer for equal state."""
        return ReadWriteSet(
            reads=tuple(KVRead(ns, key, v) for (ns, key), v in sorted(self._reads.items())),
            public_writes=tuple(
                KVWrite(ns, key, value) for (ns, key), value in sorted(self._writes.items())
            ),
            private_writes=tuple(
                PrivateDigestWrite(w.collection, w.key, w.value_digest) for w in self.private_writes
            ),
        )
