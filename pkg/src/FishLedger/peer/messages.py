"""Peer wire messages: proposals, responses and commit events."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Optional

from ..core.enums import FrameType, ValidationCode
from ..core.frames import Message
from ..ledger.rwset import ReadWriteSet
from ..ledger.transaction import Endorsement, Proposal


@dataclass
class ProposalMessage(Message):
    """A signed proposal with its transient map; ``evaluate`` asks for a query."""

    request_id: str
    proposal: Proposal
    evaluate: bool = False

    frame_type = FrameType.PROPOSAL

    def to_body(self) -> Dict[str, Any]:
        return {
            "request_id": self.request_id,
            "proposal": self.proposal.to_wire(include_transient=True),
            "evaluate": self.evaluate,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "ProposalMessage":
        return cls(body["request_id"], Proposal.from_wire(body["proposal"]), body["evaluate"])

    def trace_info(self) -> Dict[str, Any]:
        return {"tx_id": self.proposal.tx_id, "function": self.proposal.function}


@dataclass
class ProposalResponse(Message):
    request_id: str
    ok: bool
    payload: bytes = b""
    rwset: Optional[ReadWriteSet] = None
    endorsement: Optional[Endorsement] = None
    error_name: str = ""
    message: str = ""

    frame_type = FrameType.PROPOSAL_RESPONSE

    def to_body(self) -> Dict[str, Any]:
        return {
            "request_id": self.request_id,
            "ok": self.ok,
            "payload": self.payload,
            "rwset": None if self.rwset is None else self.rwset.to_wire(),
            "endorsement": None if self.endorsement is None else self.endorsement.to_wire(),
            "error_name": self.error_name,
            "message": self.message,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "ProposalResponse":
        return cls(
            request_id=body["request_id"],
            ok=body["ok"],
            payload=bytes(body["payload"]),
            rwset=None if body["rwset"] is None else ReadWriteSet.from_wire(body["rwset"]),
            endorsement=(
                None if body["endorsement"] is None else Endorsement.from_wire(body["endorsement"])
            ),
            error_name=body["error_name"],
            message=body["message"],
        )

    def trace_info(self) -> Dict[str, Any]:
        return {"ok": self.ok, "error": self.error_name}


@dataclass
class WatchTx(Message):
    tx_id: str

    frame_type = FrameType.WATCH_TX

    def to_body(self) -> Dict[str, Any]:
        return {"tx_id": self.tx_id}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "WatchTx":
        return cls(body["tx_id"])


@dataclass
class TxStatus(Message):
    """Commit event for a watched transaction."""

    tx_id: str
    block_num: int
    code: ValidationCode

    frame_type = FrameType.TX_STATUS

    def to_body(self) -> Dict[str, Any]:
        return {"tx_id": self.tx_id, "block_num": self.block_num, "code": self.code.value}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "TxStatus":
        return cls(body["tx_id"], body["block_num"], ValidationCode(body["code"]))

    def trace_info(self) -> Dict[str, Any]:
        return {"tx_id": self.tx_id, "code": self.code.value}
