"""Client library: collects endorsements, submits envelopes, tracks commits.

The client is itself a node on the network. Every request is asynchronous
and represented by a ``TxHandle`` or ``QueryHandle``; the blocking helpers
drive the network until the handle completes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from ..core.base import (
    IdentityRejected,
    LedgerError,
    MspValidationError,
    OrderingUnavailable,
    PeerUnavailable,
    PolicyUnsatisfied,
    TransactionInvalid,
    error_from_name,
)
from ..core.codec import encode
from ..core.enums import SubmitStatus, ValidationCode
from ..identity.certificates import SigningIdentity
from ..identity.msp import MembershipRegistry
from ..ledger.rwset import ReadWriteSet
from ..ledger.transaction import ConfigUpdate, Endorsement, Envelope, Proposal
from ..netsim.node import Node
from ..ordering.messages import Submit, SubmitResponse
from ..policy.expressions import evaluate_policy
from ..policy.network import NetworkPolicy
from ..privatedata.collections import PrivateWrite, seal_private_write
from .messages import ProposalMessage, ProposalResponse, TxStatus, WatchTx

NONCE_BYTES = 16


@dataclass(frozen=True)
class ClientConfig:
    endorse_timeout_ms: float = 2_000.0
    submit_timeout_ms: float = 1_000.0
    submit_retries: int = 5
    retry_backoff_ms: float = 100.0
    commit_timeout_ms: float = 5_000.0
    query_timeout_ms: float = 2_000.0


@dataclass(frozen=True)
class PrivateInput:
    """Plaintext to seal into a collection and pass under a transient key."""

    transient_key: str
    collection: str
    key: str
    plaintext: bytes


@dataclass
class TxHandle:
    tx_id: str
    proposal: Proposal
    started_at: float
    endorsers: List[str]
    private_writes: List[PrivateWrite] = field(default_factory=list)
    responses: Dict[str, ProposalResponse] = field(default_factory=dict)
    endorsements: List[Endorsement] = field(default_factory=list)
    rwset: Optional[ReadWriteSet] = None
    payload: bytes = b""
    envelope: Optional[Envelope] = None
    status: str = "endorsing"
    attempts: int = 0
    orderer: Optional[str] = None
    submitted_at: Optional[float] = None
    committed_at: Optional[float] = None
    block_num: Optional[int] = None
    code: Optional[ValidationCode] = None
    error: Optional[LedgerError] = None
    next_endorser: int = 0
    request_id: Optional[str] = None
    timer: object = None

    @property
    def done(self) -> bool:
        return self.status in ("committed", "failed")

    @property
    def latency_ms(self) -> Optional[float]:
        if self.committed_at is None:
            return None
        return self.committed_at - self.started_at


@dataclass
class QueryHandle:
    request_id: str
    peer: str
    started_at: float
    payload: bytes = b""
    error: Optional[LedgerError] = None
    finished_at: Optional[float] = None
    timer: object = None

    @property
    def done(self) -> bool:
        return self.finished_at is not None

    @property
    def latency_ms(self) -> Optional[float]:
        return None if self.finished_at is None else self.finished_at - self.started_at


class ClientNode(Node):
    """Application client acting for one enrolled identity.

    Args:
        identity: Client signing identity
        registry: MSPs used for the endorsement-policy precheck
        policy_provider: Returns the network policy in force
        endorsing_peers: Peers asked for endorsements, in order
        event_peer: Peer reporting commit status
        orderers: Ordering nodes, tried in order
        config: Timeouts and retry budget
        name: Node name, ``client:<subject>`` by default
    """

    kind = "client"

    def __init__(
        self,
        identity: SigningIdentity,
        registry: MembershipRegistry,
        policy_provider: Callable[[], NetworkPolicy],
        endorsing_peers: Sequence[str],
        event_peer: str,
        orderers: Sequence[str],
        config: Optional[ClientConfig] = None,
        name: Optional[str] = None,
    ):
        super().__init__(name or f"client:{identity.subject}", identity.org_id)
        self.identity = identity
        self.registry = registry
        self.policy_provider = policy_provider
        self.endorsing_peers = list(endorsing_peers)
        self.event_peer = event_peer
        self.orderers = list(orderers)
        self.config = config or ClientConfig()
        self.peer_orgs: Dict[str, str] = {}
        self.leader_hint: Optional[str] = None
        # Unfinished transactions only; finished handles belong to the caller
        self.in_flight: Dict[str, TxHandle] = {}
        self._by_request: Dict[str, Tuple[str, object]] = {}
        self._transients: Dict[str, Dict[str, Dict[str, bytes]]] = {}
        self._counter = 0

        self.on(ProposalResponse, self._on_proposal_response)
        self.on(SubmitResponse, self._on_submit_response)
        self.on(TxStatus, self._on_tx_status)

    def _request_id(self) -> str:
        self._counter += 1
        return f"{self.name}/{self._counter}"

    def _org_of(self, peer: str) -> str:
        if peer in self.peer_orgs:
            return self.peer_orgs[peer]
        node = self.network.nodes.get(peer) if self.network is not None else None
        return node.org_id if node is not None else ""

    # Endorsement

    def invoke(
        self,
        chaincode: str,
        function: str,
        args: Sequence[str],
        private: Sequence[PrivateInput] = (),
        endorsing_peers: Optional[Sequence[str]] = None,
        nonce: Optional[bytes] = None,
    ) -> TxHandle:
        """Start a transaction: endorse, precheck, submit, await commit.

        Private inputs are sealed here with fresh salts. Endorsers of member
        organizations receive plaintext and salt, others only the digest.
        """
        policy = self.policy_provider()
        nonce = nonce if nonce is not None else self.rng.randbytes(NONCE_BYTES)
        writes = [
            (p.transient_key, seal_private_write(p.collection, p.key, p.plaintext, self.rng))
            for p in private
        ]
        proposal = Proposal.create(
            self.identity, chaincode, function, args, nonce, self.clock()
        )
        handle = TxHandle(
            tx_id=proposal.tx_id,
            proposal=proposal,
            started_at=self.now,
            endorsers=list(endorsing_peers or self.endorsing_peers),
            private_writes=[w for _, w in writes],
        )
        handle_transients: Dict[str, Dict[str, bytes]] = {}
        for peer in handle.endorsers:
            org = self._org_of(peer)
            transient = {}
            for transient_key, write in writes:
                members = policy.collection(write.collection).member_orgs
                shown = write if org in members else write.sealed_only()
                transient[transient_key] = encode(shown.to_wire())
            handle_transients[peer] = transient
        self._transients[handle.tx_id] = handle_transients
        self.in_flight[handle.tx_id] = handle
        self.logger.debug(f"Invoking {function} as tx {handle.tx_id[:12]}")
        self._endorse_next(handle)
        return handle

    def _endorse_next(self, handle: TxHandle) -> None:
        if handle.done:
            self._finish(handle)
            return
        if handle.next_endorser >= len(handle.endorsers):
            self._transients.pop(handle.tx_id, None)
            self._after_endorsement(handle)
            return
        peer = handle.endorsers[handle.next_endorser]
        handle.next_endorser += 1
        request_id = self._request_id()
        self._by_request[request_id] = ("endorse", (handle, peer))
        handle.request_id = request_id
        proposal = handle.proposal.with_transient(self._transients[handle.tx_id][peer])
        self.send(peer, ProposalMessage(request_id, proposal))
        handle.timer = self.set_timer(
            self.config.endorse_timeout_ms, lambda: self._endorse_timeout(request_id)
        )

    def _endorse_timeout(self, request_id: str) -> None:
        entry = self._by_request.pop(request_id, None)
        if entry is None:
            return
        handle, peer = entry[1]
        self.logger.warning(f"No endorsement from {peer} for tx {handle.tx_id[:12]}")
        self._endorse_next(handle)

    def _on_proposal_response(self, src: str, resp: ProposalResponse) -> None:
        entry = self._by_request.pop(resp.request_id, None)
        if entry is None:
            return
        kind, target = entry
        if kind == "query":
            self._finish_query(target, resp)
            return
        handle, peer = target
        if handle.timer is not None:
            handle.timer.cancel()
        if handle.done:
            return
        if not resp.ok:
            self._fail(handle, error_from_name(resp.error_name, resp.message))
            return
        handle.responses[peer] = resp
        if handle.rwset is None:
            handle.rwset = resp.rwset
            handle.payload = resp.payload
        if resp.rwset.hash != handle.rwset.hash:
            self.logger.warning(
                f"Endorsement from {peer} for tx {handle.tx_id[:12]} has a divergent rwset"
            )
        else:
            handle.endorsements.append(resp.endorsement)
        self._endorse_next(handle)

    def endorser_identities(self, endorsements: Sequence[Endorsement]) -> list:
        identities = []
        for endorsement in endorsements:
            if not endorsement.verify():
                continue
            try:
                identities.append(self.registry.validate(endorsement.endorser, now=self.clock()))
            except MspValidationError:
                continue
        return identities

    def _after_endorsement(self, handle: TxHandle) -> None:
        try:
            self.assemble_and_submit(handle.proposal, handle.endorsements, handle.rwset, handle)
        except LedgerError as e:
            self._fail(handle, e)

    # Ordering

    def assemble_and_submit(
        self,
        p: Proposal,
        endorsements: Sequence[Endorsement],
        rwset: Optional[ReadWriteSet],
        handle: Optional[TxHandle] = None,
    ) -> str:
        """Check the chaincode policy, wrap the envelope and hand it to ordering.

        Raises:
            PolicyUnsatisfied: Endorsements do not satisfy the chaincode policy
        """
        policy = self.policy_provider()
        if rwset is None or not evaluate_policy(
            policy.chaincode_policy, self.endorser_identities(endorsements)
        ):
            raise PolicyUnsatisfied(
                f"{len(endorsements)} endorsements do not satisfy "
                f"{policy.to_config()['chaincode_policy']}"
            )
        envelope = Envelope.assemble(self.identity, p, rwset, endorsements)
        if handle is None:
            handle = TxHandle(p.tx_id, p, self.now, [])
            self.in_flight[p.tx_id] = handle
        handle.envelope = envelope
        return self.submit_envelope(handle)

    def submit_config(
        self, update: ConfigUpdate, nonce: Optional[bytes] = None
    ) -> TxHandle:
        nonce = nonce if nonce is not None else self.rng.randbytes(NONCE_BYTES)
        envelope = Envelope.config(self.identity, update, nonce, self.clock())
        handle = TxHandle(envelope.tx_id, envelope.proposal, self.now, [])
        handle.envelope = envelope
        self.in_flight[handle.tx_id] = handle
        self.submit_envelope(handle)
        return handle

    def submit_envelope(self, handle: TxHandle) -> str:
        handle.status = "submitting"
        self.send(self.event_peer, WatchTx(handle.tx_id))
        self._send_submit(handle, self.leader_hint or self.orderers[0])
        return handle.tx_id

    def _send_submit(self, handle: TxHandle, orderer: str) -> None:
        if handle.attempts > self.config.submit_retries:
            self._fail(
                handle,
                OrderingUnavailable(
                    f"tx {handle.tx_id[:12]} not accepted after {handle.attempts} attempts"
                ),
            )
            return
        handle.attempts += 1
        handle.orderer = orderer
        request_id = self._request_id()
        self._by_request[request_id] = ("submit", handle)
        handle.request_id = request_id
        self.send(orderer, Submit(request_id, handle.envelope))
        handle.timer = self.set_timer(
            self.config.submit_timeout_ms, lambda: self._submit_timeout(request_id)
        )

    def _next_orderer(self, current: Optional[str]) -> str:
        if current not in self.orderers:
            return self.orderers[0]
        return self.orderers[(self.orderers.index(current) + 1) % len(self.orderers)]

    def _retry_later(self, handle: TxHandle) -> None:
        backoff = self.config.retry_backoff_ms * (2 ** max(0, handle.attempts - 1))
        target = self._next_orderer(handle.orderer)
        handle.timer = self.set_timer(backoff, lambda: self._send_submit(handle, target))

    def _submit_timeout(self, request_id: str) -> None:
        entry = self._by_request.pop(request_id, None)
        if entry is None:
            return
        handle = entry[1]
        if handle.done:
            return
        if self.leader_hint == handle.orderer:
            self.leader_hint = None
        self._retry_later(handle)

    def _on_submit_response(self, src: str, resp: SubmitResponse) -> None:
        entry = self._by_request.pop(resp.request_id, None)
        if entry is None:
            return
        handle = entry[1]
        if handle.timer is not None:
            handle.timer.cancel()
        if handle.done:
            return
        if resp.status is SubmitStatus.ACK:
            self.leader_hint = src
            handle.status = "submitted"
            handle.submitted_at = self.now
            handle.timer = self.set_timer(
                self.config.commit_timeout_ms, lambda: self._commit_timeout(handle)
            )
        elif resp.status is SubmitStatus.REDIRECT and resp.leader_id:
            self.leader_hint = resp.leader_id
            self._send_submit(handle, resp.leader_id)
        elif resp.status is SubmitStatus.REJECTED:
            self._fail(handle, IdentityRejected(f"ordering rejected tx: {resp.message}"))
        else:
            self._retry_later(handle)

    def _commit_timeout(self, handle: TxHandle) -> None:
        if handle.done:
            return
        self.logger.info(f"tx {handle.tx_id[:12]} not committed yet; resubmitting")
        self.leader_hint = None
        self.send(self.event_peer, WatchTx(handle.tx_id))
        self._send_submit(handle, self._next_orderer(handle.orderer))

    def _on_tx_status(self, src: str, status: TxStatus) -> None:
        handle = self.in_flight.get(status.tx_id)
        if handle is None or handle.done:
            return
        if handle.timer is not None:
            handle.timer.cancel()
        handle.block_num = status.block_num
        handle.code = status.code
        handle.committed_at = self.now
        if status.code is ValidationCode.VALID:
            handle.status = "committed"
            self._finish(handle)
            self.logger.debug(f"tx {handle.tx_id[:12]} committed in block {status.block_num}")
        else:
            self._fail(handle, TransactionInvalid(handle.tx_id, status.code.value))

    def _finish(self, handle: TxHandle) -> None:
        if handle.timer is not None:
            handle.timer.cancel()
        self.in_flight.pop(handle.tx_id, None)
        self._transients.pop(handle.tx_id, None)
        if handle.request_id is not None:
            self._by_request.pop(handle.request_id, None)

    def _fail(self, handle: TxHandle, error: LedgerError) -> None:
        handle.status = "failed"
        handle.error = error
        self._finish(handle)
        self.logger.debug(f"tx {handle.tx_id[:12]} failed: {type(error).__name__}: {error}")

    # Queries

    def query(self, peer: str, chaincode: str, function: str, args: Sequence[str]) -> QueryHandle:
        request_id = self._request_id()
        proposal = Proposal.create(
            self.identity, chaincode, function, args, self.rng.randbytes(NONCE_BYTES), self.clock()
        )
        handle = QueryHandle(request_id, peer, self.now)
        self._by_request[request_id] = ("query", handle)
        self.send(peer, ProposalMessage(request_id, proposal, evaluate=True))
        handle.timer = self.set_timer(
            self.config.query_timeout_ms, lambda: self._query_timeout(handle)
        )
        return handle

    def _finish_query(self, handle: QueryHandle, resp: ProposalResponse) -> None:
        if handle.timer is not None:
            handle.timer.cancel()
        handle.finished_at = self.now
        if resp.ok:
            handle.payload = resp.payload
        else:
            handle.error = error_from_name(resp.error_name, resp.message)

    def _query_timeout(self, handle: QueryHandle) -> None:
        if handle.done:
            return
        self._by_request.pop(handle.request_id, None)
        handle.finished_at = self.now
        handle.error = PeerUnavailable(f"peer {handle.peer} did not answer")

    def abandon(self, handle, error: LedgerError) -> None:
        """Stop tracking an unfinished transaction or query; late replies are ignored."""
        if handle.done:
            return
        if isinstance(handle, TxHandle):
            self._fail(handle, error)
            return
        if handle.timer is not None:
            handle.timer.cancel()
        self._by_request.pop(handle.request_id, None)
        handle.finished_at = self.now
        handle.error = error

    # Blocking helpers

    def wait(self, handle, max_wait_ms: Optional[float] = None):
        """Drive the network until ``handle`` is done; raise its error if any."""
        limit = max_wait_ms
        if limit is None:
            limit = (
                self.config.endorse_timeout_ms * max(1, len(getattr(handle, "endorsers", ())))
                + (self.config.submit_retries + 2)
                * (self.config.submit_timeout_ms + self.config.commit_timeout_ms)
            )
        self.network.run_until(predicate=lambda: handle.done, max_time=self.network.now + limit)
        if not handle.done:
            error = OrderingUnavailable(f"request did not complete within {limit:.0f} ms")
            self.abandon(handle, error)
            raise error
        if handle.error is not None:
            raise handle.error
        return handle

    def submit_transaction(
        self,
        chaincode: str,
        function: str,
        args: Sequence[str],
        private: Sequence[PrivateInput] = (),
        **kwargs,
    ) -> TxHandle:
        return self.wait(self.invoke(chaincode, function, args, private, **kwargs))

    def evaluate_transaction(
        self, peer: str, chaincode: str, function: str, args: Sequence[str]
    ) -> bytes:
        return self.wait(self.query(peer, chaincode, function, args)).payload
