"""Block validation and commit.

Transactions are checked in block order. For each one the first failing
check names the code: creator identity and signatures, then the endorsement
(or channel) policy, then tx_id uniqueness, then read versions. Writes of
earlier VALID transactions in the same block shadow committed state.
"""

from __future__ import annotations

from typing import Container, Dict, List, Optional, Tuple

from ..core.base import IdentityError, MspValidationError
from ..core.enums import ValidationCode
from ..core.types import CommitReceipt, Version
from ..identity.msp import MembershipRegistry, ValidatedIdentity
from ..policy.expressions import evaluate_policy
from ..policy.network import NetworkPolicy, update_policy
from ..utils.logging import get_logger
from .blocks import Block
from .blockstore import BlockStore
from .rwset import hash_namespace
from .state import StateStore
from .transaction import Envelope

logger = get_logger("validation")

# Marker for keys deleted earlier in the block
_DELETED = object()


def _validate_creator(env: Envelope, registry: MembershipRegistry) -> bool:
    try:
        registry.validate(env.creator, now=env.proposal.timestamp)
    except IdentityError as e:
        logger.warning(f"tx {env.tx_id[:12]}: creator rejected ({type(e).__name__})")
        return False
    return (
        env.proposal.tx_id_matches()
        and env.proposal.verify_signature()
        and env.verify_creator_signature()
    )


def endorsing_identities(
    env: Envelope, registry: MembershipRegistry
) -> List[ValidatedIdentity]:
    """Identities whose endorsement binds this envelope's proposal and rwset."""
    identities = []
    proposal_hash = env.proposal.hash
    rwset_hash = env.rwset.hash
    for endorsement in env.endorsements:
        if endorsement.proposal_hash != proposal_hash or endorsement.rwset_hash != rwset_hash:
            continue
        if not endorsement.verify():
            continue
        try:
            identities.append(
                registry.validate(endorsement.endorser, now=env.proposal.timestamp)
            )
        except MspValidationError:
            continue
    return identities


def approving_identities(
    env: Envelope, registry: MembershipRegistry
) -> List[ValidatedIdentity]:
    identities = []
    update = env.config_update
    for approval in update.approvals:
        if not approval.verify(update.proposed):
            continue
        try:
            identities.append(registry.validate(approval.approver, now=env.proposal.timestamp))
        except MspValidationError:
            continue
    return identities


def validate_block(
    b: Block,
    policy: NetworkPolicy,
    msp: MembershipRegistry,
    state: StateStore,
    committed_tx_ids: Container[str] = (),
) -> List[ValidationCode]:
    """Assign a validation code to every transaction of a block.

    Raises:
        MalformedBlock: When the block's data hash is inconsistent
    """
    b.check_well_formed()
    codes: List[ValidationCode] = []
    shadow: Dict[Tuple[str, str], object] = {}
    seen_in_block = set()
    current = policy

    def current_version(namespace: str, key: str) -> Optional[Version]:
        entry = shadow.get((namespace, key))
        if entry is _DELETED:
            return None
        if entry is not None:
            return entry
        return state.get_version(namespace, key)

    for tx_index, env in enumerate(b.transactions):
        code = ValidationCode.VALID
        if not _validate_creator(env, msp):
            code = ValidationCode.BAD_SIGNATURE
        elif env.is_config:
            approvers = approving_identities(env, msp)
            if not evaluate_policy(current.channel_policy, approvers):
                code = ValidationCode.ENDORSEMENT_FAILURE
        else:
            endorsers = endorsing_identities(env, msp)
            collections = current.collections_by_name
            if not evaluate_policy(current.chaincode_policy, endorsers):
                code = ValidationCode.ENDORSEMENT_FAILURE
            elif any(w.collection not in collections for w in env.rwset.private_writes):
                code = ValidationCode.ENDORSEMENT_FAILURE

        if code is ValidationCode.VALID and (
            env.tx_id in seen_in_block or env.tx_id in committed_tx_ids
        ):
            code = ValidationCode.DUPLICATE_TXID

        if code is ValidationCode.VALID:
            if env.is_config:
                if env.config_update.proposed.version != current.version + 1:
                    code = ValidationCode.MVCC_CONFLICT
            else:
                for read in env.rwset.reads:
                    if current_version(read.namespace, read.key) != read.version:
                        code = ValidationCode.MVCC_CONFLICT
                        break

        seen_in_block.add(env.tx_id)
        if code is ValidationCode.VALID:
            version = Version(b.number, tx_index)
            if env.is_config:
                current = update_policy(current, env.config_update.proposed, approving_identities(env, msp))
            for write in env.rwset.public_writes:
                shadow[(write.namespace, write.key)] = _DELETED if write.is_delete else version
            for write in env.rwset.private_writes:
                shadow[(hash_namespace(write.collection), write.key)] = version
        else:
            logger.debug(f"block {b.number} tx {tx_index} ({env.tx_id[:12]}): {code.value}")
        codes.append(code)
    return codes


def apply_block_state(b: Block, state: StateStore) -> Tuple[int, int]:
    """Apply the writes of VALID transactions; returns (n_valid, n_invalid)."""
    n_valid = 0
    for tx_index, (env, code) in enumerate(zip(b.transactions, b.validation_codes)):
        if code is not ValidationCode.VALID:
            continue
        n_valid += 1
        version = Version(b.number, tx_index)
        for write in env.rwset.public_writes:
            if write.is_delete:
                state.delete(write.namespace, write.key)
            else:
                state.put(write.namespace, write.key, write.value, version)
        for write in env.rwset.private_writes:
            state.put(hash_namespace(write.collection), write.key, write.value_digest, version)
    state.height = b.number + 1
    return n_valid, len(b.transactions) - n_valid


def commit_block(b: Block, state: StateStore, chain: BlockStore) -> CommitReceipt:
    """Append a validated block, then apply its VALID writes.

    The append comes first; a crash before the state update is repaired by
    replaying the log on startup.

    Raises:
        HeightMismatch, HashChainBreak
    """
    chain.append(b)
    n_valid, n_invalid = apply_block_state(b, state)
    return CommitReceipt(height=chain.height, n_valid=n_valid, n_invalid=n_invalid)
