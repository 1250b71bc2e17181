"""Blocks, world state, validation and commit."""
from .blocks import Block, BlockHeader, compute_data_hash, genesis_policy, make_genesis_block
from .blockstore import BlockStore, verify_chain
from .ledger import Ledger
from .rwset import (
    PUBLIC_NAMESPACE,
    KVRead,
    KVWrite,
    PrivateDigestWrite,
    ReadWriteSet,
    hash_namespace,
)
from .state import StateStore
from .transaction import (
    Approval,
    ConfigUpdate,
    Endorsement,
    Envelope,
    Proposal,
    compute_tx_id,
)
from .validation import commit_block, validate_block

__all__ = [
    "Block",
    "BlockHeader",
    "compute_data_hash",
    "genesis_policy",
    "make_genesis_block",
    "BlockStore",
    "verify_chain",
    "Ledger",
    "PUBLIC_NAMESPACE",
    "KVRead",
    "KVWrite",
    "PrivateDigestWrite",
    "ReadWriteSet",
    "hash_namespace",
    "StateStore",
    "Approval",
    "ConfigUpdate",
    "Endorsement",
    "Envelope",
    "Proposal",
    "compute_tx_id",
    "commit_block",
    "validate_block",
]
