"""Orderer wire messages."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from ..core.codec import decode, encode
from ..core.enums import FrameType, SubmitStatus
from ..core.frames import Message
from ..ledger.blocks import Block
from ..ledger.transaction import Envelope


@dataclass(frozen=True)
class LogEntry:
    """One replicated log slot: a whole block, or a no-op marking a new term."""

    term: int
    block: Optional[Block] = None

    @property
    def is_noop(self) -> bool:
        return self.block is None

    def to_wire(self) -> list:
        return [self.term, None if self.block is None else self.block.to_wire()]

    @classmethod
    def from_wire(cls, wire: list) -> "LogEntry":
        return cls(int(wire[0]), None if wire[1] is None else Block.from_wire(wire[1]))

    def encode(self) -> bytes:
        return encode(self.to_wire())

    @classmethod
    def decode(cls, data: bytes) -> "LogEntry":
        return cls.from_wire(decode(data))


@dataclass
class RequestVote(Message):
    term: int
    candidate_id: str
    last_log_index: int
    last_log_term: int

    frame_type = FrameType.REQUEST_VOTE

    def to_body(self) -> Dict[str, Any]:
        return {
            "term": self.term,
            "candidate_id": self.candidate_id,
            "last_log_index": self.last_log_index,
            "last_log_term": self.last_log_term,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "RequestVote":
        return cls(body["term"], body["candidate_id"], body["last_log_index"], body["last_log_term"])

    def trace_info(self) -> Dict[str, Any]:
        return {"term": self.term}


@dataclass
class RequestVoteResponse(Message):
    term: int
    vote_granted: bool

    frame_type = FrameType.REQUEST_VOTE_RESPONSE

    def to_body(self) -> Dict[str, Any]:
        return {"term": self.term, "vote_granted": self.vote_granted}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "RequestVoteResponse":
        return cls(body["term"], body["vote_granted"])


@dataclass
class AppendEntries(Message):
    term: int
    leader_id: str
    prev_log_index: int
    prev_log_term: int
    entries: List[LogEntry] = field(default_factory=list)
    leader_commit: int = 0

    frame_type = FrameType.APPEND_ENTRIES

    def to_body(self) -> Dict[str, Any]:
        return {
            "term": self.term,
            "leader_id": self.leader_id,
            "prev_log_index": self.prev_log_index,
            "prev_log_term": self.prev_log_term,
            "entries": [e.to_wire() for e in self.entries],
            "leader_commit": self.leader_commit,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "AppendEntries":
        return cls(
            body["term"],
            body["leader_id"],
            body["prev_log_index"],
            body["prev_log_term"],
            [LogEntry.from_wire(e) for e in body["entries"]],
            body["leader_commit"],
        )

    def trace_info(self) -> Dict[str, Any]:
        return {"term": self.term, "entries": len(self.entries)}


@dataclass
class AppendEntriesResponse(Message):
    term: int
    success: bool
    match_index: int = 0
    match_hint: int = 0

    frame_type = FrameType.APPEND_ENTRIES_RESPONSE

    def to_body(self) -> Dict[str, Any]:
        return {
            "term": self.term,
            "success": self.success,
            "match_index": self.match_index,
            "match_hint": self.match_hint,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "AppendEntriesResponse":
        return cls(body["term"], body["success"], body["match_index"], body["match_hint"])


@dataclass
class Submit(Message):
    request_id: str
    envelope: Envelope

    frame_type = FrameType.SUBMIT

    def to_body(self) -> Dict[str, Any]:
        return {"request_id": self.request_id, "envelope": self.envelope.to_wire()}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "Submit":
        return cls(body["request_id"], Envelope.from_wire(body["envelope"]))


@dataclass
class SubmitResponse(Message):
    request_id: str
    status: SubmitStatus
    leader_id: Optional[str] = None
    message: str = ""

    frame_type = FrameType.SUBMIT_RESPONSE

    def to_body(self) -> Dict[str, Any]:
        return {
            "request_id": self.request_id,
            "status": self.status.value,
            "leader_id": self.leader_id,
            "message": self.message,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "SubmitResponse":
        return cls(
            body["request_id"], SubmitStatus(body["status"]), body["leader_id"], body["message"]
        )

    def trace_info(self) -> Dict[str, Any]:
        return {"status": self.status.value}


@dataclass
class Deliver(Message):
    block: Block

    frame_type = FrameType.DELIVER

    def to_body(self) -> Dict[str, Any]:
        return {"block": self.block.to_wire()}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "Deliver":
        return cls(Block.from_wire(body["block"]))

    def trace_info(self) -> Dict[str, Any]:
        return {"block": self.block.number}


@dataclass
class DeliverRequest(Message):
    from_height: int
    max_blocks: int = 10

    frame_type = FrameType.DELIVER_REQUEST

    def to_body(self) -> Dict[str, Any]:
        return {"from_height": self.from_height, "max_blocks": self.max_blocks}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "DeliverRequest":
        return cls(body["from_height"], body["max_blocks"])
