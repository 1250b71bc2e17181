"""Deterministic discrete-event network.

Events (frame deliveries, timers, scripted faults) sit in a heap ordered by
(virtual time, sequence number). All randomness comes from RNGs derived
from the network seed, so the same topology, fault script and seed produce
the same trace.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from ..core.codec import seed_int
from ..core.frames import Frame
from ..utils.logging import get_logger
from .faults import FaultEvent, FaultScript
from .node import Node
from .trace import TraceEntry, filter_trace

DEFAULT_LATENCY_MS = (1.0, 5.0)

logger = get_logger("netsim")


@dataclass
class Timer:
    owner: str
    incarnation: int
    callback: Callable[[], None]
    cancelled: bool = False

    def cancel(self) -> None:
        self.cancelled = True


@dataclass(order=True)
class _Event:
    time: float
    seq: int
    kind: str = field(compare=False)
    payload: Any = field(compare=False)


class Network:
    """Simulated network connecting nodes.

    Args:
        seed: Seed for latencies and node RNGs
        latency_ms: Default one-way latency range [min, max]
        fault_script: Faults applied at their scripted times
        record_trace: Keep the delivery log (disable for long benchmarks)
        epoch: Unix time in seconds at virtual time zero
    """

    def __init__(
        self,
        seed: int = 0,
        latency_ms: Tuple[float, float] = DEFAULT_LATENCY_MS,
        fault_script: Optional[FaultScript] = None,
        record_trace: bool = True,
        epoch: int = 0,
    ):
        if latency_ms[0] < 0 or latency_ms[1] < latency_ms[0]:
            raise ValueError(f"invalid latency range {latency_ms}")
        self.seed = seed
        self.latency_ms = tuple(latency_ms)
        self.rng = random.Random(seed_int("netsim", seed))
        self.nodes: Dict[str, Node] = {}
        self.now = 0.0
        self.epoch = int(epoch)
        self.record_trace = record_trace
        self.trace: List[TraceEntry] = []
        self.dropped = 0
        self.events_processed = 0
        self._queue: List[_Event] = []
        self._seq = 0
        self._groups: Dict[str, int] = {}
        self._link_latency: Dict[Tuple[str, str], Tuple[float, float]] = {}
        if fault_script is not None:
            self.schedule_faults(fault_script)

    # Nodes

    def add_node(self, node: Node, start: bool = True) -> Node:
        if node.name in self.nodes:
            raise ValueError(f"node {node.name} already attached")
        self.nodes[node.name] = node
        node.attach(self)
        if start:
            node.start()
        return node

    def node(self, name: str) -> Node:
        return self.nodes[name]

    def node_rng(self, name: str, incarnation: int) -> random.Random:
        return random.Random(seed_int("node", self.seed, name, incarnation))

    def is_up(self, name: str) -> bool:
        node = self.nodes.get(name)
        return node is not None and node.alive

    def crash(self, name: str) -> None:
        node = self.nodes[name]
        if node.alive:
            node.crash()
            logger.info(f"t={self.now:.1f}ms crashed {name}")

    def restart(self, name: str) -> None:
        node = self.nodes[name]
        if not node.alive:
            node.start()
            logger.info(f"t={self.now:.1f}ms restarted {name}")

    def partition(self, groups: Sequence[Sequence[str]]) -> None:
        """Split the network; unlisted nodes share one extra group."""
        self._groups = {}
        for index, group in enumerate(groups, start=1):
            for name in group:
                self._groups[name] = index
        logger.info(f"t={self.now:.1f}ms partition {[list(g) for g in groups]}")

    def heal(self) -> None:
        self._groups = {}
        logger.info(f"t={self.now:.1f}ms partition healed")

    def set_link_latency(self, link: Tuple[str, str], latency_ms: Tuple[float, float]) -> None:
        a, b = link
        self._link_latency[(a, b)] = tuple(latency_ms)
        self._link_latency[(b, a)] = tuple(latency_ms)

    def connected(self, a: str, b: str) -> bool:
        return self._groups.get(a, 0) == self._groups.get(b, 0)

    # Scheduling

    def _push(self, time: float, kind: str, payload: Any) -> None:
        self._seq += 1
        heapq.heappush(self._queue, _Event(time, self._seq, kind, payload))

    def schedule_faults(self, script: FaultScript) -> None:
        for event in script:
            self._push(max(event.at, self.now), "fault", event)

    def set_timer(self, owner: str, delay_ms: float, callback: Callable[[], None]) -> Timer:
        node = self.nodes[owner]
        timer = Timer(owner, node.incarnation, callback)
        self._push(self.now + max(0.0, delay_ms), "timer", timer)
        return timer

    def send(self, src: str, dst: str, frame: Frame, info: Optional[Dict[str, Any]] = None) -> None:
        """Queue a frame; it is dropped if unreachable now or at delivery."""
        if dst not in self.nodes or not self.connected(src, dst):
            self.dropped += 1
            return
        data = frame.encode()
        lo, hi = self._link_latency.get((src, dst), self.latency_ms)
        delay = lo if hi == lo else self.rng.uniform(lo, hi)
        self._push(self.now + delay, "deliver", (src, dst, data, info))

    # Execution

    def _apply_fault(self, event: FaultEvent) -> None:
        if event.action == "crash":
            self.crash(event.node)
        elif event.action == "restart":
            self.restart(event.node)
        elif event.action == "partition":
            self.partition(event.groups)
        elif event.action == "heal":
            self.heal()
        elif event.action == "delay":
            self.set_link_latency(event.link, event.latency_ms)

    def _deliver(self, src: str, dst: str, data: bytes, info: Optional[Dict[str, Any]]) -> None:
        node = self.nodes.get(dst)
        if node is None or not node.alive or not self.connected(src, dst):
            self.dropped += 1
            return
        frame = Frame.decode(data)
        if self.record_trace:
            source = self.nodes.get(src)
            self.trace.append(
                TraceEntry(
                    t=self.now,
                    src=src,
                    dst=dst,
                    frame=frame.type.value,
                    size=len(data),
                    src_org=source.org_id if source is not None else "",
                    dst_org=node.org_id,
                    info=tuple(sorted((info or {}).items())),
                )
            )
        node.handle_frame(src, frame)

    def step(self) -> bool:
        """Process one event; False when the queue is empty."""
        while self._queue:
            event = heapq.heappop(self._queue)
            self.now = max(self.now, event.time)
            if event.kind == "timer":
                timer: Timer = event.payload
                owner = self.nodes.get(timer.owner)
                if (
                    timer.cancelled
                    or owner is None
                    or not owner.alive
                    or owner.incarnation != timer.incarnation
                ):
                    continue
                self.events_processed += 1
                timer.callback()
            elif event.kind == "deliver":
                self.events_processed += 1
                self._deliver(*event.payload)
            else:
                self.events_processed += 1
                self._apply_fault(event.payload)
            return True
        return False

    def run_until(
        self,
        t: Optional[float] = None,
        predicate: Optional[Callable[[], bool]] = None,
        max_time: Optional[float] = None,
        max_events: Optional[int] = None,
    ) -> Tuple[TraceEntry, ...]:
        """Run to virtual time ``t`` or until ``predicate()`` holds.

        ``max_time`` bounds predicate runs. Returns the trace entries
        appended during the run.
        """
        start_index = len(self.trace)
        deadline = t if t is not None else max_time
        processed = 0
        while True:
            if predicate is not None and predicate():
                break
            if not self._queue:
                break
            if deadline is not None and self._queue[0].time > deadline:
                self.now = max(self.now, deadline)
                break
            if max_events is not None and processed >= max_events:
                break
            self.step()
            processed += 1
        if t is not None and predicate is None:
            self.now = max(self.now, t)
        return tuple(self.trace[start_index:])

    def delivery_log(self, **criteria) -> Tuple[TraceEntry, ...]:
        """Immutable slice of the delivery log; see ``filter_trace`` for criteria."""
        return filter_trace(self.trace, **criteria)

    def alive_nodes(self, names: Optional[Iterable[str]] = None) -> List[str]:
        names = self.nodes if names is None else names
        return [n for n in names if self.is_up(n)]
