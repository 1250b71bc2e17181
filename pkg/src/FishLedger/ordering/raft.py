"""RAFT ordering node.

Each orderer is a single-threaded state machine driven by frames and
timers. The leader cuts blocks from submitted envelopes; every replicated
log entry is one whole block (or a no-op a new leader appends to commit
entries of earlier terms). Committed blocks are delivered to peers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from ..core.base import BaseStorage, HeightMismatch, IdentityError
from ..core.codec import ZERO_HASH
from ..core.enums import RaftRole, SubmitStatus
from ..core.types import ChainInfo
from ..identity.msp import MembershipRegistry
from ..ledger.blocks import Block
from ..ledger.transaction import Envelope
from ..netsim.node import Node
from .cutter import BlockCutter, BlockCutterConfig, cut_block
from .messages import (
    AppendEntries,
    AppendEntriesResponse,
    Deliver,
    DeliverRequest,
    LogEntry,
    RequestVote,
    RequestVoteResponse,
    Submit,
    SubmitResponse,
)
from .storage import RaftStorage


@dataclass(frozen=True)
class OrderingConfig:
    cutter: BlockCutterConfig = field(default_factory=BlockCutterConfig)
    election_timeout_ms: Tuple[float, float] = (150.0, 300.0)
    heartbeat_ms: float = 50.0
    max_entries_per_append: int = 64
    max_deliver_batch: int = 10

    def __post_init__(self):
        lo, hi = self.election_timeout_ms
        if not 0 < lo <= hi:
            raise ValueError(f"invalid election timeout range {self.election_timeout_ms}")
        if not 0 < self.heartbeat_ms < lo:
            raise ValueError("heartbeat must be positive and shorter than the election timeout")


@dataclass
class RaftState:
    current_term: int = 0
    voted_for: Optional[str] = None
    log: List[LogEntry] = field(default_factory=list)
    commit_index: int = 0
    last_applied: int = 0
    role: RaftRole = RaftRole.FOLLOWER
    leader_id: Optional[str] = None
    next_index: Dict[str, int] = field(default_factory=dict)
    match_index: Dict[str, int] = field(default_factory=dict)

    @property
    def last_log_index(self) -> int:
        return len(self.log)

    @property
    def last_log_term(self) -> int:
        return self.log[-1].term if self.log else 0

    def term_at(self, index: int) -> int:
        if index <= 0 or index > len(self.log):
            return 0
        return self.log[index - 1].term


class OrdererNode(Node):
    """One member of the RAFT ordering cluster.

    Args:
        name: Orderer name
        org_id: Organization of the orderer
        cluster: Names of all orderers, this one included
        peers: Peers receiving delivered blocks
        registry: MSPs used to check submitters
        genesis: Block 0, shared by every node
        config: Timers and batching
        storage: Persistence for term, vote and log
    """

    kind = "orderer"

    def __init__(
        self,
        name: str,
        org_id: str,
        cluster: Sequence[str],
        peers: Sequence[str],
        registry: MembershipRegistry,
        genesis: Block,
        config: Optional[OrderingConfig] = None,
        storage: Optional[BaseStorage] = None,
    ):
        super().__init__(name, org_id, storage)
        self.cluster = list(cluster)
        self.others = [n for n in self.cluster if n != name]
        self.peers = list(peers)
        self.registry = registry
        self.genesis = genesis
        self.config = config or OrderingConfig()
        self.raft_storage = RaftStorage(self.storage)
        self.raft = RaftState()
        self.cutter = BlockCutter(self.config.cutter)
        self.applied_blocks: List[Block] = [genesis]
        # Instrumentation for safety checks; survives crashes
        self.terms_led: List[int] = []
        self._election_timer = None
        self._heartbeat_timer = None
        self._batch_timer = None
        self._votes: set = set()

        self.on(RequestVote, self._on_request_vote)
        self.on(RequestVoteResponse, self._on_vote_response)
        self.on(AppendEntries, self._on_append_entries)
        self.on(AppendEntriesResponse, self._on_append_response)
        self.on(Submit, self._on_submit)
        self.on(DeliverRequest, self._on_deliver_request)

    @property
    def majority(self) -> int:
        return len(self.cluster) // 2 + 1

    @property
    def is_leader(self) -> bool:
        return self.alive and self.raft.role is RaftRole.LEADER

    @property
    def height(self) -> int:
        """Number of committed blocks, genesis included."""
        return len(self.applied_blocks)

    # Lifecycle

    def on_start(self) -> None:
        term, voted_for, entries = self.raft_storage.load()
        self.raft = RaftState(current_term=term, voted_for=voted_for, log=entries)
        self.cutter = BlockCutter(self.config.cutter)
        self.applied_blocks = [self.genesis]
        self._votes = set()
        self._election_timer = self._heartbeat_timer = self._batch_timer = None
        self.logger.debug(f"Started at term {term} with {len(entries)} log entries")
        self._reset_election_timer()

    def on_crash(self) -> None:
        self.logger.info(f"Crashed in term {self.raft.current_term} as {self.raft.role.value}")

    # Timers

    def _reset_election_timer(self) -> None:
        if self._election_timer is not None:
            self._election_timer.cancel()
        lo, hi = self.config.election_timeout_ms
        self._election_timer = self.set_timer(self.rng.uniform(lo, hi), self._on_election_timeout)

    def _on_election_timeout(self) -> None:
        self._election_timer = None
        if self.raft.role is RaftRole.LEADER:
            return
        self._start_election()

    def _start_election(self) -> None:
        raft = self.raft
        raft.current_term += 1
        raft.role = RaftRole.CANDIDATE
        raft.voted_for = self.name
        raft.leader_id = None
        self.raft_storage.save_meta(raft.current_term, raft.voted_for)
        self._votes = {self.name}
        self.logger.debug(f"Starting election for term {raft.current_term}")
        self._reset_election_timer()
        if len(self._votes) >= self.majority:
            self._become_leader()
            return
        request = RequestVote(raft.current_term, self.name, raft.last_log_index, raft.last_log_term)
        for other in self.others:
            self.send(other, request)

    def _become_leader(self) -> None:
        raft = self.raft
        raft.role = RaftRole.LEADER
        raft.leader_id = self.name
        raft.next_index = {o: raft.last_log_index + 1 for o in self.others}
        raft.match_index = {o: 0 for o in self.others}
        if self._election_timer is not None:
            self._election_timer.cancel()
            self._election_timer = None
        self.terms_led.append(raft.current_term)
        self.logger.info(f"Leader elected for term {raft.current_term}")
        self._append_local([LogEntry(raft.current_term)])
        self._broadcast_append()
        self._heartbeat_timer = self.set_timer(self.config.heartbeat_ms, self._on_heartbeat)

    def _on_heartbeat(self) -> None:
        if self.raft.role is not RaftRole.LEADER:
            return
        self._broadcast_append()
        self._heartbeat_timer = self.set_timer(self.config.heartbeat_ms, self._on_heartbeat)

    def _step_down(self, term: int) -> None:
        raft = self.raft
        was_leader = raft.role is RaftRole.LEADER
        if term > raft.current_term:
            raft.current_term = term
            raft.voted_for = None
            self.raft_storage.save_meta(raft.current_term, raft.voted_for)
        raft.role = RaftRole.FOLLOWER
        if was_leader:
            dropped = self.cutter.clear()
            if self._heartbeat_timer is not None:
                self._heartbeat_timer.cancel()
                self._heartbeat_timer = None
            if self._batch_timer is not None:
                self._batch_timer.cancel()
                self._batch_timer = None
            self.logger.info(f"Stepped down in term {term}; dropped {dropped} pending envelopes")
        self._reset_election_timer()

    # Log

    def _append_local(self, entries: List[LogEntry]) -> None:
        self.raft.log.extend(entries)
        self.raft_storage.append(entries)
        if len(self.cluster) == 1 and self.raft.role is RaftRole.LEADER:
            self._advance_commit()

    def _truncate_local(self, length: int) -> None:
        del self.raft.log[length:]
        self.raft_storage.truncate(length)

    def _log_tip(self) -> Tuple[int, bytes]:
        """(next block number, hash of the last block header) over the log."""
        for entry in reversed(self.raft.log):
            if entry.block is not None:
                return entry.block.number + 1, entry.block.header.hash
        return 1, self.genesis.header.hash

    # RequestVote

    def handle_request_vote(self, req: RequestVote) -> RequestVoteResponse:
        """Grant iff the term is current, no other vote was cast this term,
        and the candidate's log is at least as up to date."""
        raft = self.raft
        if req.term > raft.current_term:
            self._step_down(req.term)
        up_to_date = (req.last_log_term, req.last_log_index) >= (
            raft.last_log_term,
            raft.last_log_index,
        )
        granted = (
            req.term == raft.current_term
            and raft.voted_for in (None, req.candidate_id)
            and up_to_date
        )
        if granted:
            raft.voted_for = req.candidate_id
            self.raft_storage.save_meta(raft.current_term, raft.voted_for)
            self._reset_election_timer()
        return RequestVoteResponse(raft.current_term, granted)

    def _on_request_vote(self, src: str, req: RequestVote) -> None:
        self.send(src, self.handle_request_vote(req))

    def _on_vote_response(self, src: str, resp: RequestVoteResponse) -> None:
        raft = self.raft
        if resp.term > raft.current_term:
            self._step_down(resp.term)
            return
        if raft.role is not RaftRole.CANDIDATE or resp.term != raft.current_term:
            return
        if resp.vote_granted:
            self._votes.add(src)
            if len(self._votes) >= self.majority:
                self._become_leader()

    # AppendEntries

    def handle_append_entries(self, req: AppendEntries) -> AppendEntriesResponse:
        """RAFT log matching: reject stale terms and prev-entry mismatches,
        replace any conflicting suffix, then follow the leader's commit."""
        raft = self.raft
        if req.term < raft.current_term:
            return AppendEntriesResponse(raft.current_term, False, 0, raft.last_log_index + 1)
        if req.term > raft.current_term or raft.role is not RaftRole.FOLLOWER:
            self._step_down(req.term)
        else:
            self._reset_election_timer()
        raft.leader_id = req.leader_id

        if req.prev_log_index > raft.last_log_index:
            return AppendEntriesResponse(raft.current_term, False, 0, raft.last_log_index + 1)
        if raft.term_at(req.prev_log_index) != req.prev_log_term:
            conflict_term = raft.term_at(req.prev_log_index)
            hint = req.prev_log_index
            while hint > 1 and raft.term_at(hint - 1) == conflict_term:
                hint -= 1
            return AppendEntriesResponse(raft.current_term, False, 0, hint)

        for offset, entry in enumerate(req.entries):
            index = req.prev_log_index + 1 + offset
            if index <= raft.last_log_index:
                if raft.term_at(index) == entry.term:
                    continue
                self._truncate_local(index - 1)
            self._append_local(list(req.entries[offset:]))
            break

        last_new = req.prev_log_index + len(req.entries)
        # A stale request may cover less than is already committed
        committed = min(req.leader_commit, last_new)
        if committed > raft.commit_index:
            raft.commit_index = committed
            self._apply_committed()
        return AppendEntriesResponse(raft.current_term, True, last_new, last_new + 1)

    def _on_append_entries(self, src: str, req: AppendEntries) -> None:
        self.send(src, self.handle_append_entries(req))

    def _send_append(self, follower: str) -> None:
        raft = self.raft
        next_index = raft.next_index.get(follower, raft.last_log_index + 1)
        prev = next_index - 1
        entries = raft.log[prev : prev + self.config.max_entries_per_append]
        self.send(
            follower,
            AppendEntries(
                raft.current_term, self.name, prev, raft.term_at(prev), entries, raft.commit_index
            ),
        )

    def _broadcast_append(self) -> None:
        for follower in self.others:
            self._send_append(follower)

    def _on_append_response(self, src: str, resp: AppendEntriesResponse) -> None:
        raft = self.raft
        if resp.term > raft.current_term:
            self._step_down(resp.term)
            return
        if raft.role is not RaftRole.LEADER or resp.term != raft.current_term:
            return
        if resp.success:
            if resp.match_index > raft.match_index.get(src, 0):
                raft.match_index[src] = resp.match_index
            raft.next_index[src] = raft.match_index[src] + 1
            self._advance_commit()
            if raft.next_index[src] <= raft.last_log_index:
                self._send_append(src)
        else:
            current = raft.next_index.get(src, raft.last_log_index + 1)
            raft.next_index[src] = max(1, min(current - 1, resp.match_hint))
            self._send_append(src)

    def _advance_commit(self) -> None:
        raft = self.raft
        for n in range(raft.last_log_index, raft.commit_index, -1):
            if raft.term_at(n) != raft.current_term:
                break
            replicas = 1 + sum(1 for m in raft.match_index.values() if m >= n)
            if replicas >= self.majority:
                raft.commit_index = n
                self._apply_committed()
                break

    def _apply_committed(self) -> None:
        raft = self.raft
        while raft.last_applied < raft.commit_index:
            raft.last_applied += 1
            entry = raft.log[raft.last_applied - 1]
            if entry.block is None:
                continue
            if entry.block.number != len(self.applied_blocks):
                raise HeightMismatch(
                    f"{self.name}: committed block {entry.block.number} at height {len(self.applied_blocks)}"
                )
            self.applied_blocks.append(entry.block)
            if raft.role is RaftRole.LEADER:
                self.logger.debug(f"Committed block {entry.block.number}")
                for peer in self.peers:
                    self.send(peer, Deliver(entry.block))

    # Submit and deliver

    def submit_envelope(self, env: Envelope) -> SubmitResponse:
        """Accept an envelope into the pending batch, or redirect.

        Only the submitter's MSP validity and signature are checked here;
        orderers never execute chaincode.
        """
        raft = self.raft
        if raft.role is not RaftRole.LEADER:
            if raft.leader_id and raft.leader_id != self.name:
                return SubmitResponse("", SubmitStatus.REDIRECT, raft.leader_id)
            return SubmitResponse("", SubmitStatus.UNAVAILABLE)
        try:
            self.registry.validate(env.creator, now=env.proposal.timestamp)
        except IdentityError as e:
            return SubmitResponse("", SubmitStatus.REJECTED, self.name, f"{type(e).__name__}: {e}")
        if not env.verify_creator_signature():
            return SubmitResponse("", SubmitStatus.REJECTED, self.name, "BadSignature: envelope signature")
        batches, pending = self.cutter.ordered(env)
        for batch in batches:
            self._propose_block(batch)
        if pending and self._batch_timer is None:
            self._batch_timer = self.set_timer(
                self.config.cutter.batch_timeout_ms, self._on_batch_timeout
            )
        elif not pending and self._batch_timer is not None:
            self._batch_timer.cancel()
            self._batch_timer = None
        return SubmitResponse("", SubmitStatus.ACK, self.name)

    def _on_submit(self, src: str, msg: Submit) -> None:
        response = self.submit_envelope(msg.envelope)
        response.request_id = msg.request_id
        self.send(src, response)

    def _on_batch_timeout(self) -> None:
        self._batch_timer = None
        if self.raft.role is RaftRole.LEADER and self.cutter.pending:
            self._propose_block(self.cutter.cut())

    def _propose_block(self, batch: List[Envelope]) -> Block:
        number, prev_hash = self._log_tip()
        block = cut_block(
            batch, self.config.cutter, ChainInfo(height=number, current_hash=prev_hash, previous_hash=ZERO_HASH)
        )
        self.logger.debug(f"Cut block {number} with {len(batch)} envelopes")
        self._append_local([LogEntry(self.raft.current_term, block)])
        self._broadcast_append()
        return block

    def _on_deliver_request(self, src: str, req: DeliverRequest) -> None:
        start = max(1, req.from_height)
        end = min(len(self.applied_blocks), start + min(req.max_blocks, self.config.max_deliver_batch))
        for number in range(start, end):
            self.send(src, Deliver(self.applied_blocks[number]))

    def status(self) -> dict:
        raft = self.raft
        return {
            "name": self.name,
            "alive": self.alive,
            "role": raft.role.value,
            "term": raft.current_term,
            "leader": raft.leader_id,
            "log_length": raft.last_log_index,
            "commit_index": raft.commit_index,
            "height": self.height - 1,
            "blocks": self.height,
        }
