"""Push private plaintext to member-org peers before ordering."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Set

from ..core.base import InsufficientDissemination
from ..core.enums import FrameType
from ..core.frames import Message
from ..utils.logging import get_logger
from .collections import PrivateWrite

DEFAULT_TIMEOUT_MS = 500.0

logger = get_logger("dissemination")


@dataclass
class PrivatePlaintext(Message):
    session_id: str
    tx_id: str
    write: PrivateWrite

    frame_type = FrameType.PRIVATE_PLAINTEXT

    def to_body(self) -> Dict[str, Any]:
        return {"session": self.session_id, "tx_id": self.tx_id, "write": self.write.to_wire()}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "PrivatePlaintext":
        return cls(body["session"], body["tx_id"], PrivateWrite.from_wire(body["write"]))


@dataclass
class PrivateAck(Message):
    session_id: str
    tx_id: str
    collection: str
    key: str
    ok: bool

    frame_type = FrameType.PRIVATE_ACK

    def to_body(self) -> Dict[str, Any]:
        return {
            "session": self.session_id,
            "tx_id": self.tx_id,
            "collection": self.collection,
            "key": self.key,
            "ok": self.ok,
        }

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "PrivateAck":
        return cls(body["session"], body["tx_id"], body["collection"], body["key"], body["ok"])


@dataclass
class DisseminationSession:
    session_id: str
    tx_id: str
    writes: List[PrivateWrite]
    targets: List[str]
    required: Dict[str, int]
    on_done: Optional[Callable[["DisseminationSession"], None]] = None
    acks: Dict[tuple, Set[str]] = field(default_factory=dict)
    done: bool = False
    failed: bool = False
    timer: Any = None

    def ack_count(self) -> int:
        """Acks of the least-acknowledged write."""
        if not self.writes:
            return 0
        return min(len(self.acks.get((w.collection, w.key), ())) for w in self.writes)

    def satisfied(self) -> bool:
        return all(
            len(self.acks.get((w.collection, w.key), ())) >= self.required.get(w.collection, 1)
            for w in self.writes
        )


class Disseminator:
    """Dissemination sessions of one peer.

    The host supplies ``name``, ``send(dst, message)`` and
    ``set_timer(delay_ms, callback)``.
    """

    def __init__(self, host, timeout_ms: float = DEFAULT_TIMEOUT_MS):
        self.host = host
        self.timeout_ms = timeout_ms
        self.sessions: Dict[str, DisseminationSession] = {}
        self._counter = 0

    def start(
        self,
        tx_id: str,
        writes: Sequence[PrivateWrite],
        targets: Sequence[str],
        required: Dict[str, int],
        on_done: Optional[Callable[[DisseminationSession], None]] = None,
    ) -> DisseminationSession:
        """Send every write to every target and wait for the thresholds."""
        self._counter += 1
        session = DisseminationSession(
            session_id=f"{self.host.name}/{self._counter}",
            tx_id=tx_id,
            writes=list(writes),
            targets=list(targets),
            required=dict(required),
            on_done=on_done,
        )
        self.sessions[session.session_id] = session
        for target in session.targets:
            for write in session.writes:
                self.host.send(target, PrivatePlaintext(session.session_id, tx_id, write))
        if session.satisfied():
            self._finish(session)
        else:
            session.timer = self.host.set_timer(self.timeout_ms, lambda: self._timeout(session))
        return session

    def on_ack(self, src: str, ack: PrivateAck) -> None:
        session = self.sessions.get(ack.session_id)
        if session is None or session.done or not ack.ok:
            return
        session.acks.setdefault((ack.collection, ack.key), set()).add(src)
        if session.satisfied():
            self._finish(session)

    def _timeout(self, session: DisseminationSession) -> None:
        if session.done:
            return
        session.failed = not session.satisfied()
        if session.failed:
            logger.warning(
                f"{self.host.name}: dissemination of tx {session.tx_id[:12]} got "
                f"{session.ack_count()} acks"
            )
        self._finish(session)

    def _finish(self, session: DisseminationSession) -> None:
        session.done = True
        if session.timer is not None:
            session.timer.cancel()
        self.sessions.pop(session.session_id, None)
        if session.on_done is not None:
            session.on_done(session)


def disseminate(
    pw: PrivateWrite,
    members: Sequence[str],
    net,
    source: str,
    tx_id: str = "",
    required_peer_count: Optional[int] = None,
    max_wait_ms: float = 5_000.0,
) -> int:
    """Disseminate one write from ``source`` and return the ack count.

    Drives the simulated network until the session completes.

    Raises:
        InsufficientDissemination: If acks stay below the collection's
            required_peer_count
    """
    node = net.node(source)
    if required_peer_count is None:
        required_peer_count = node.collection_required(pw.collection)
    targets = [m for m in members if m != source]
    session = node.disseminator.start(
        tx_id or f"adhoc-{pw.collection}-{pw.key}",
        [pw],
        targets,
        {pw.collection: required_peer_count},
    )
    net.run_until(predicate=lambda: session.done, max_time=net.now + max_wait_ms)
    if session.failed or not session.done:
        raise InsufficientDissemination(
            f"{session.ack_count()} of {required_peer_count} required acks for {pw.collection}/{pw.key}"
        )
    return session.ack_count()
