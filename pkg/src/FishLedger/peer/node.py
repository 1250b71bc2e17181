"""Peer node: endorses proposals, serves queries, validates and commits blocks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple

from ..chaincode.base import Contract
from ..chaincode.fishfarm import FishFarmContract
from ..core.base import (
    BaseStorage,
    ChaincodeError,
    ChainIntegrityError,
    HeightMismatch,
    IdentityError,
    IdentityRejected,
    LedgerError,
    PermissionDenied,
)
from ..core.enums import ValidationCode
from ..core.types import CommitReceipt, Version
from ..identity.certificates import Certificate, SigningIdentity
from ..identity.msp import MembershipRegistry, ValidatedIdentity
from ..ledger.blocks import Block
from ..ledger.ledger import Ledger
from ..ledger.rwset import ReadWriteSet, hash_namespace
from ..ledger.transaction import Endorsement, Proposal
from ..netsim.node import Node
from ..ordering.messages import Deliver, DeliverRequest
from ..privatedata.collections import PrivateWrite
from ..privatedata.dissemination import (
    DisseminationSession,
    Disseminator,
    PrivateAck,
    PrivatePlaintext,
)
from ..privatedata.store import PrivateStore
from .messages import ProposalMessage, ProposalResponse, TxStatus, WatchTx
from .stub import SimulationStub


@dataclass(frozen=True)
class PeerConfig:
    dissemination_timeout_ms: float = 500.0
    deliver_poll_ms: float = 200.0
    max_buffered_blocks: int = 256
    staging_retention_blocks: int = 20


def default_contracts() -> Dict[str, Contract]:
    contract = FishFarmContract()
    return {contract.name: contract}


class PeerNode(Node):
    """A peer of one organization.

    The ledger and private store are rebuilt from storage on every start, so
    a restarted peer resumes at its persisted height and catches up through
    deliver requests. A peer whose block log fails verification is
    quarantined: it refuses proposals, queries and blocks until repaired.

    Args:
        name: Peer name, also the subject of its certificate
        org_id: Organization of the peer
        identity: Signing identity used for endorsements
        registry: MSPs and CRLs this peer validates against
        genesis: Block 0 of the channel
        orderers: Orderers to poll for missing blocks
        org_peers: Peer names per organization, used for dissemination
        contracts: Installed chaincode by name
        config: Timers and limits
        storage: Persistence for the block log and private store
    """

    kind = "peer"

    def __init__(
        self,
        name: str,
        org_id: str,
        identity: SigningIdentity,
        registry: MembershipRegistry,
        genesis: Block,
        orderers: Sequence[str],
        org_peers: Mapping[str, Sequence[str]],
        contracts: Optional[Mapping[str, Contract]] = None,
        config: Optional[PeerConfig] = None,
        storage: Optional[BaseStorage] = None,
    ):
        super().__init__(name, org_id, storage)
        self.identity = identity
        self.registry = registry
        self.genesis = genesis
        self.orderers = list(orderers)
        self.org_peers = {org: list(names) for org, names in org_peers.items()}
        self.contracts: Dict[str, Contract] = dict(contracts or default_contracts())
        self.config = config or PeerConfig()
        self.ledger = Ledger(self.storage, name)
        self.private_store = self._make_private_store()
        self.disseminator = Disseminator(self, self.config.dissemination_timeout_ms)
        self._buffered: Dict[int, Block] = {}
        self._watchers: Dict[str, Set[str]] = {}
        self._poll_cursor = 0
        self._poll_timer = None
        self._last_block_at = 0.0

        self.on(ProposalMessage, self._on_proposal)
        self.on(PrivatePlaintext, self._on_private_plaintext)
        self.on(PrivateAck, self._on_private_ack)
        self.on(Deliver, self._on_deliver)
        self.on(WatchTx, self._on_watch)

    def _make_private_store(self) -> PrivateStore:
        return PrivateStore(
            self.org_id,
            lambda: self.ledger.policy.collections_by_name if self.ledger.policy else {},
            self._committed_digest,
            self.storage,
        )

    def _committed_digest(self, collection: str, key: str) -> Optional[Tuple[bytes, Version]]:
        return self.ledger.get_state(hash_namespace(collection), key)

    @property
    def height(self) -> int:
        return self.ledger.height

    @property
    def quarantined(self) -> bool:
        return self.ledger.broken is not None

    def collection_required(self, collection: str) -> int:
        return self.ledger.policy.collection(collection).required_peer_count

    # Lifecycle

    def on_start(self) -> None:
        result = self.ledger.open(self.genesis)
        self.private_store = self._make_private_store()
        loaded = self.private_store.load(self.ledger.height)
        self.disseminator = Disseminator(self, self.config.dissemination_timeout_ms)
        self._buffered = {}
        self._watchers = {}
        self._last_block_at = self.now
        if result is not True:
            self.logger.warning(
                f"Block log broken at block {result.block_num} ({result.reason}); peer quarantined"
            )
        else:
            self.logger.debug(
                f"Started at height {self.ledger.height} with {loaded} private entries"
            )
        self._poll_timer = self.set_timer(self.config.deliver_poll_ms, self._on_poll)

    def on_crash(self) -> None:
        self.logger.info(f"Crashed at height {self.ledger.height}")

    def repair(self) -> int:
        """Truncate the block log at its first break and resume catch-up."""
        height = self.ledger.repair(self.genesis)
        self.private_store.load(height)
        self._buffered = {}
        self.logger.info(f"Repaired block log; resuming from height {height}")
        self._request_blocks()
        return height

    # Endorsement

    def _validate_proposal(self, proposal: Proposal) -> ValidatedIdentity:
        try:
            creator = self.registry.validate(proposal.creator, now=self.clock())
        except IdentityError as e:
            self.logger.warning(
                f"Rejected proposal {proposal.tx_id[:12]} from {proposal.creator.subject}: "
                f"{type(e).__name__}"
            )
            raise IdentityRejected(f"{type(e).__name__}: {e}", reason=e) from e
        if not proposal.tx_id_matches() or not proposal.verify_signature():
            self.logger.warning(f"Rejected proposal {proposal.tx_id[:12]}: bad signature")
            raise IdentityRejected(f"proposal {proposal.tx_id[:12]} signature invalid")
        return creator

    def _contract(self, chaincode: str) -> Contract:
        contract = self.contracts.get(chaincode)
        if contract is None:
            raise ChaincodeError(f"chaincode {chaincode} is not installed on {self.name}")
        return contract

    def _execute(self, proposal: Proposal, creator: ValidatedIdentity) -> Tuple[SimulationStub, bytes]:
        contract = self._contract(proposal.chaincode)
        stub = SimulationStub(
            proposal, creator, self.ledger.state, self.ledger.policy, self.private_store
        )
        return stub, contract.invoke(stub)

    def simulate_proposal(self, p: Proposal) -> Tuple[ReadWriteSet, bytes, Endorsement]:
        """Execute a proposal against committed state and endorse the result.

        Revealed private writes for collections this peer belongs to are
        staged until their transaction commits.

        Raises:
            IdentityRejected: Creator fails MSP validation or signature checks
            ChaincodeError: Raised by the contract
            ChainIntegrityError: Peer is quarantined
        """
        self.ledger.ensure_intact()
        creator = self._validate_proposal(p)
        stub, payload = self._execute(p, creator)
        rwset = stub.rwset()
        for write in stub.private_writes:
            if write.is_revealed and self.private_store.is_member(write.collection):
                self.private_store.stage(p.tx_id, write, self.height)
        endorsement = Endorsement.create(self.identity, p.hash, rwset.hash)
        self.logger.debug(
            f"Endorsed {p.function} tx {p.tx_id[:12]} rwset {rwset.hash.hex()[:12]}"
        )
        return rwset, payload, endorsement

    def query_local(
        self, chaincode: str, function: str, args: Sequence[str], requester: Certificate
    ) -> bytes:
        """Read-only execution at this peer's current height.

        Raises:
            IdentityRejected, ChaincodeError, PermissionDenied, NotFound,
            ChainIntegrityError
        """
        self.ledger.ensure_intact()
        try:
            creator = self.registry.validate(requester, now=self.clock())
        except IdentityError as e:
            raise IdentityRejected(f"{type(e).__name__}: {e}", reason=e) from e
        contract = self._contract(chaincode)
        if not contract.is_read_only(function):
            raise ChaincodeError(f"{function} is not a query")
        query = Proposal(
            tx_id="",
            chaincode=chaincode,
            function=function,
            args=tuple(str(a) for a in args),
            creator=requester,
            nonce=b"",
            timestamp=self.clock(),
        )
        _, payload = self._execute(query, creator)
        return payload

    def _dissemination_targets(self, writes: Sequence[PrivateWrite]) -> List[str]:
        policy = self.ledger.policy
        targets: List[str] = []
        for write in writes:
            for org in sorted(policy.collection(write.collection).member_orgs):
                for peer in self.org_peers.get(org, ()):
                    if peer != self.name and peer not in targets:
                        targets.append(peer)
        return targets

    def _on_proposal(self, src: str, msg: ProposalMessage) -> None:
        if msg.evaluate:
            try:
                p = msg.proposal
                self._validate_proposal(p)
                payload = self.query_local(p.chaincode, p.function, p.args, p.creator)
            except LedgerError as e:
                self.send(src, _error_response(msg.request_id, e))
                return
            self.send(src, ProposalResponse(msg.request_id, True, payload=payload))
            return

        try:
            rwset, payload, endorsement = self.simulate_proposal(msg.proposal)
        except LedgerError as e:
            self.send(src, _error_response(msg.request_id, e))
            return
        response = ProposalResponse(
            msg.request_id, True, payload=payload, rwset=rwset, endorsement=endorsement
        )
        revealed = list(self.private_store.staged(msg.proposal.tx_id).values())
        if not revealed:
            self.send(src, response)
            return

        def finished(session: DisseminationSession) -> None:
            if session.failed:
                self.private_store.discard(session.tx_id)
                self.send(
                    src,
                    ProposalResponse(
                        msg.request_id,
                        False,
                        error_name="InsufficientDissemination",
                        message=f"{session.ack_count()} acks for tx {session.tx_id[:12]}",
                    ),
                )
            else:
                self.send(src, response)

        required = {w.collection: self.collection_required(w.collection) for w in revealed}
        self.disseminator.start(
            msg.proposal.tx_id,
            revealed,
            self._dissemination_targets(revealed),
            required,
            finished,
        )

    def _on_private_plaintext(self, src: str, msg: PrivatePlaintext) -> None:
        try:
            ok = not self.quarantined and self.private_store.stage(
                msg.tx_id, msg.write, self.height
            )
        except PermissionDenied:
            ok = False
        self.send(
            src, PrivateAck(msg.session_id, msg.tx_id, msg.write.collection, msg.write.key, ok)
        )

    def _on_private_ack(self, src: str, ack: PrivateAck) -> None:
        self.disseminator.on_ack(src, ack)

    # Commit

    def on_block(self, b: Block) -> CommitReceipt:
        """Validate and commit the next block.

        Private plaintext staged for VALID transactions moves into the
        private store; staging of invalid transactions is dropped.
        Staging older than ``staging_retention_blocks`` is dropped as well.

        Raises:
            HeightMismatch: ``b`` is not the next block
            ChainIntegrityError: Peer is quarantined
        """
        stored, receipt = self.ledger.process_block(b, self.registry)
        for tx_index, (env, code) in enumerate(zip(stored.transactions, stored.validation_codes)):
            if code is ValidationCode.VALID and env.rwset.private_writes:
                self.private_store.commit_tx(
                    env.tx_id, env.rwset.private_writes, Version(stored.number, tx_index)
                )
            else:
                self.private_store.discard(env.tx_id)
            if code is not ValidationCode.VALID:
                self.logger.warning(f"tx {env.tx_id[:12]} in block {stored.number}: {code.value}")
            for watcher in self._watchers.pop(env.tx_id, ()):
                self.send(watcher, TxStatus(env.tx_id, stored.number, code))
        self.private_store.expire_staged(self.height, self.config.staging_retention_blocks)
        self._last_block_at = self.now
        self.logger.debug(
            f"Committed block {stored.number}: {receipt.n_valid} valid, {receipt.n_invalid} invalid"
        )
        return receipt

    def _on_deliver(self, src: str, msg: Deliver) -> None:
        if self.quarantined:
            return
        block = msg.block
        if block.number < self.height:
            return
        if block.number > self.height:
            if len(self._buffered) < self.config.max_buffered_blocks:
                self._buffered[block.number] = block
            self._request_blocks(src)
            return
        self._commit_in_order(block)

    def _commit_in_order(self, block: Block) -> None:
        while block is not None:
            try:
                self.on_block(block)
            except (HeightMismatch, ChainIntegrityError) as e:
                self.logger.warning(f"Dropped block {block.number}: {e}")
                return
            except LedgerError as e:
                self.logger.warning(f"Rejected block {block.number}: {type(e).__name__}: {e}")
                return
            block = self._buffered.pop(self.height, None)
        for number in [n for n in self._buffered if n < self.height]:
            del self._buffered[number]

    def _request_blocks(self, orderer: Optional[str] = None) -> None:
        if not self.orderers:
            return
        if orderer is None or orderer not in self.orderers:
            orderer = self.orderers[self._poll_cursor % len(self.orderers)]
            self._poll_cursor += 1
        self.send(orderer, DeliverRequest(self.height))

    def _on_poll(self) -> None:
        if not self.quarantined and (
            self._buffered or self.now - self._last_block_at >= self.config.deliver_poll_ms
        ):
            self._request_blocks()
        self._poll_timer = self.set_timer(self.config.deliver_poll_ms, self._on_poll)

    # Commit events

    def _on_watch(self, src: str, msg: WatchTx) -> None:
        status = self.ledger.tx_status(msg.tx_id)
        if status is not None:
            block_num, code = status
            self.send(src, TxStatus(msg.tx_id, block_num, code))
            return
        self._watchers.setdefault(msg.tx_id, set()).add(src)

    def status(self) -> dict:
        info = self.ledger.get_chain_info() if self.ledger.height else None
        return {
            "name": self.name,
            "org": self.org_id,
            "alive": self.alive,
            "height": self.ledger.height - 1,
            "blocks": self.ledger.height,
            "current_hash": info.current_hash.hex() if info else "",
            "state_hash": self.ledger.state.state_hash().hex(),
            "private_entries": len(self.private_store),
            "quarantined": self.quarantined,
        }


def _error_response(request_id: str, error: LedgerError) -> ProposalResponse:
    return ProposalResponse(
        request_id, False, error_name=type(error).__name__, message=str(error)
    )
