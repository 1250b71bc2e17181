"""Timed fault scripts for the simulated network."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import yaml

from ..core.base import ConfigError

ACTIONS = ("crash", "restart", "partition", "heal", "delay")


@dataclass(frozen=True)
class FaultEvent:
    at: float
    action: str
    node: Optional[str] = None
    groups: Tuple[Tuple[str, ...], ...] = ()
    link: Optional[Tuple[str, str]] = None
    latency_ms: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValueError(f"unknown fault action {self.action!r}")
        if self.action in ("crash", "restart") and not self.node:
            raise ValueError(f"{self.action} needs a node")
        if self.action == "partition" and len(self.groups) < 2:
            raise ValueError("partition needs at least two groups")
        if self.action == "delay" and (self.link is None or self.latency_ms is None):
            raise ValueError("delay needs a link and a latency range")

    def to_config(self) -> Dict[str, Any]:
        entry: Dict[str, Any] = {"at": self.at, "action": self.action}
        if self.node:
            entry["node"] = self.node
        if self.groups:
            entry["groups"] = [list(g) for g in self.groups]
        if self.link:
            entry["link"] = list(self.link)
        if self.latency_ms:
            entry["latency_ms"] = list(self.latency_ms)
        return entry


@dataclass(frozen=True)
class FaultScript:
    events: Tuple[FaultEvent, ...] = field(default_factory=tuple)

    def __post_init__(self):
        # Stable sort keeps same-time events in script order
        object.__setattr__(self, "events", tuple(sorted(self.events, key=lambda e: e.at)))

    def __iter__(self):
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    @classmethod
    def build(cls) -> "FaultScriptBuilder":
        return FaultScriptBuilder()

    @classmethod
    def from_config(cls, entries: Iterable[Dict[str, Any]]) -> "FaultScript":
        events = []
        for i, entry in enumerate(entries or []):
            try:
                events.append(
                    FaultEvent(
                        at=float(entry.get("at", 0)),
                        action=entry["action"],
                        node=entry.get("node"),
                        groups=tuple(tuple(g) for g in entry.get("groups", [])),
                        link=tuple(entry["link"]) if entry.get("link") else None,
                        latency_ms=tuple(entry["latency_ms"]) if entry.get("latency_ms") else None,
                    )
                )
            except (KeyError, ValueError, TypeError) as e:
                raise ConfigError(f"fault event {i}: {e}") from e
        return cls(tuple(events))

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "FaultScript":
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or []
        if isinstance(data, dict):
            data = data.get("events", [])
        return cls.from_config(data)

    def to_config(self) -> List[Dict[str, Any]]:
        return [e.to_config() for e in self.events]


class FaultScriptBuilder:
    """Fluent construction for tests: ``FaultScript.build().crash("o1", 500).done()``."""

    def __init__(self):
        self._events: List[FaultEvent] = []

    def crash(self, node: str, at: float) -> "FaultScriptBuilder":
        self._events.append(FaultEvent(at=at, action="crash", node=node))
        return self

    def restart(self, node: str, at: float) -> "FaultScriptBuilder":
        self._events.append(FaultEvent(at=at, action="restart", node=node))
        return self

    def partition(self, groups: Sequence[Sequence[str]], at: float) -> "FaultScriptBuilder":
        self._events.append(
            FaultEvent(at=at, action="partition", groups=tuple(tuple(g) for g in groups))
        )
        return self

    def heal(self, at: float) -> "FaultScriptBuilder":
        self._events.append(FaultEvent(at=at, action="heal"))
        return self

    def delay(
        self, link: Tuple[str, str], latency_ms: Tuple[float, float], at: float = 0.0
    ) -> "FaultScriptBuilder":
        self._events.append(
            FaultEvent(at=at, action="delay", link=tuple(link), latency_ms=tuple(latency_ms))
        )
        return self

    def done(self) -> FaultScript:
        return FaultScript(tuple(self._events))
