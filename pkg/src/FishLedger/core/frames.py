"""Network frames.

A frame is a message type plus a body of wire values. On the wire it is the
canonical encoding of ``[type, body]``; nodes never share Python objects.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

from .base import MalformedBlock
from .codec import decode, encode
from .enums import FrameType


@dataclass(frozen=True)
class Frame:
    type: FrameType
    body: Dict[str, Any]

    def encode(self) -> bytes:
        return encode([self.type.value, self.body])

    @classmethod
    def decode(cls, data: bytes) -> "Frame":
        wire = decode(data)
        if not isinstance(wire, list) or len(wire) != 2 or not isinstance(wire[1], dict):
            raise MalformedBlock("frame is not a [type, body] pair")
        try:
            frame_type = FrameType(wire[0])
        except ValueError as e:
            raise MalformedBlock(f"unknown frame type {wire[0]!r}") from e
        return cls(frame_type, wire[1])


class Message:
    """Base for typed frame bodies.

    Subclasses set ``frame_type`` and implement ``to_body``/``from_body``.
    """

    frame_type: FrameType

    def to_body(self) -> Dict[str, Any]:
        raise NotImplementedError

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "Message":
        raise NotImplementedError

    def to_frame(self) -> Frame:
        return Frame(self.frame_type, self.to_body())
