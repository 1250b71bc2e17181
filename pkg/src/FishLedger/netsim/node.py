"""Base class for nodes attached to a network transport."""

from __future__ import annotations

import random
from abc import ABC
from typing import Any, Callable, Dict, Optional, Tuple, Type

from ..core.base import BaseStorage
from ..core.enums import FrameType
from ..core.frames import Frame, Message
from ..storage.memory import MemoryStorage
from ..utils.logging import get_logger


class Node(ABC):
    """A single-threaded state machine driven by frames and timers.

    Subclasses register handlers with ``self.on(MessageClass, handler)``.
    Volatile state is rebuilt in ``on_start``; anything in ``storage``
    survives a crash.

    Args:
        name: Unique node name
        org_id: Organization the node belongs to
        storage: Persistence backend (kept by the network across crashes)
    """

    kind = "node"

    def __init__(self, name: str, org_id: str, storage: Optional[BaseStorage] = None):
        self.name = name
        self.org_id = org_id
        self.storage = storage if storage is not None else MemoryStorage()
        self.network = None
        self.alive = False
        self.incarnation = 0
        self.rng = random.Random(0)
        self.logger = get_logger(f"{self.kind}.{name}")
        self._handlers: Dict[FrameType, Tuple[Type[Message], Callable[[str, Any], None]]] = {}

    def on(self, message_cls: Type[Message], handler: Callable[[str, Any], None]) -> None:
        self._handlers[message_cls.frame_type] = (message_cls, handler)

    def attach(self, network) -> None:
        self.network = network

    @property
    def now(self) -> float:
        return self.network.now

    def clock(self) -> int:
        """Wall-clock seconds used for certificate validity checks."""
        return int(self.network.epoch + self.network.now // 1000)

    def send(self, dst: str, message: Message) -> None:
        if not self.alive:
            return
        info = message.trace_info() if hasattr(message, "trace_info") else None
        self.network.send(self.name, dst, message.to_frame(), info)

    def set_timer(self, delay_ms: float, callback: Callable[[], None]):
        return self.network.set_timer(self.name, delay_ms, callback)

    def handle_frame(self, src: str, frame: Frame) -> None:
        entry = self._handlers.get(frame.type)
        if entry is None:
            self.logger.debug(f"Ignoring {frame.type.value} from {src}")
            return
        message_cls, handler = entry
        handler(src, message_cls.from_body(frame.body))

    # Lifecycle, driven by the network

    def start(self) -> None:
        self.alive = True
        self.incarnation += 1
        self.rng = self.network.node_rng(self.name, self.incarnation)
        self.on_start()

    def crash(self) -> None:
        self.alive = False
        self.on_crash()

    def on_start(self) -> None:
        pass

    def on_crash(self) -> None:
        pass
