"""Loopback-socket transport for benchmark runs.

Same node state machines and frames as the simulator, but every node
listens on its own 127.0.0.1 TCP port and timers run on the real clock.
All nodes share one asyncio event loop, so handlers never run concurrently.
"""

from __future__ import annotations

import asyncio
import random
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

from ..core.codec import decode, encode, seed_int
from ..core.frames import Frame
from ..storage.local import frame_record
from ..utils.logging import get_logger
from .network import Timer
from .node import Node
from .trace import TraceEntry, filter_trace

HOST = "127.0.0.1"
_HEADER = 4

logger = get_logger("netsim.loopback")


class LoopbackNetwork:
    """Real-socket counterpart of ``Network`` with the interface nodes use.

    Args:
        seed: Seed for node RNGs
        epoch: Unix time in seconds at time zero
        record_trace: Keep a delivery log
        poll_interval_ms: How often ``run_until`` re-checks its predicate
    """

    def __init__(
        self,
        seed: int = 0,
        epoch: int = 0,
        record_trace: bool = False,
        poll_interval_ms: float = 0.5,
    ):
        self.seed = seed
        self.epoch = int(epoch)
        self.record_trace = record_trace
        self.poll_interval_ms = poll_interval_ms
        self.nodes: Dict[str, Node] = {}
        self.trace: List[TraceEntry] = []
        self.dropped = 0
        self.events_processed = 0
        self.loop = asyncio.new_event_loop()
        self._t0 = self.loop.time()
        self._ports: Dict[str, int] = {}
        self._servers: List[asyncio.AbstractServer] = []
        self._writers: Dict[Tuple[str, str], asyncio.StreamWriter] = {}
        self._ready = asyncio.Event()
        self._opened = False

    @property
    def now(self) -> float:
        return (self.loop.time() - self._t0) * 1000.0

    # Nodes

    def add_node(self, node: Node, start: bool = True) -> Node:
        if node.name in self.nodes:
            raise ValueError(f"node {node.name} already attached")
        self.nodes[node.name] = node
        node.attach(self)
        if self._opened:
            self.loop.run_until_complete(self._listen(node.name))
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

    def restart(self, name: str) -> None:
        node = self.nodes[name]
        if not node.alive:
            node.start()

    def connected(self, a: str, b: str) -> bool:
        return True

    def alive_nodes(self, names: Optional[Iterable[str]] = None) -> List[str]:
        names = self.nodes if names is None else names
        return [n for n in names if self.is_up(n)]

    # Sockets

    def open(self) -> None:
        if self._opened:
            return
        self._opened = True
        for name in list(self.nodes):
            self.loop.run_until_complete(self._listen(name))
        self._ready.set()
        logger.info(f"Loopback transport listening for {len(self._ports)} nodes")

    async def _listen(self, name: str) -> None:
        async def handle(reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
            try:
                while True:
                    header = await reader.readexactly(_HEADER)
                    body = await reader.readexactly(int.from_bytes(header, "big"))
                    src, data, info = decode(body)
                    self._deliver(src, name, bytes(data), info)
            except (asyncio.IncompleteReadError, ConnectionError):
                writer.close()

        server = await asyncio.start_server(handle, HOST, 0)
        self._ports[name] = server.sockets[0].getsockname()[1]
        self._servers.append(server)

    async def _write(self, src: str, dst: str, payload: bytes) -> None:
        await self._ready.wait()
        writer = self._writers.get((src, dst))
        if writer is None or writer.is_closing():
            _, writer = await asyncio.open_connection(HOST, self._ports[dst])
            self._writers[(src, dst)] = writer
        writer.write(frame_record(payload))
        await writer.drain()

    def send(self, src: str, dst: str, frame: Frame, info: Optional[Dict[str, Any]] = None) -> None:
        if dst not in self.nodes:
            self.dropped += 1
            return
        payload = encode([src, frame.encode(), info or {}])
        self.loop.create_task(self._write(src, dst, payload))

    def _deliver(self, src: str, dst: str, data: bytes, info: Dict[str, Any]) -> None:
        node = self.nodes.get(dst)
        if node is None or not node.alive:
            self.dropped += 1
            return
        frame = Frame.decode(data)
        self.events_processed += 1
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
                    info=tuple(sorted(info.items())),
                )
            )
        node.handle_frame(src, frame)

    # Timers

    def set_timer(self, owner: str, delay_ms: float, callback: Callable[[], None]) -> Timer:
        node = self.nodes[owner]
        timer = Timer(owner, node.incarnation, callback)

        def fire() -> None:
            current = self.nodes.get(owner)
            if (
                timer.cancelled
                or current is None
                or not current.alive
                or current.incarnation != timer.incarnation
            ):
                return
            self.events_processed += 1
            callback()

        self.loop.call_later(max(0.0, delay_ms) / 1000.0, fire)
        return timer

    # Execution

    async def _wait(self, predicate: Optional[Callable[[], bool]], deadline: Optional[float]) -> None:
        while True:
            if predicate is not None and predicate():
                return
            if deadline is not None and self.now >= deadline:
                return
            await asyncio.sleep(self.poll_interval_ms / 1000.0)

    def run_until(
        self,
        t: Optional[float] = None,
        predicate: Optional[Callable[[], bool]] = None,
        max_time: Optional[float] = None,
        max_events: Optional[int] = None,
    ) -> Tuple[TraceEntry, ...]:
        """Run the event loop until time ``t`` (ms) or ``predicate()`` holds."""
        self.open()
        start_index = len(self.trace)
        deadline = t if t is not None else max_time
        self.loop.run_until_complete(self._wait(predicate, deadline))
        return tuple(self.trace[start_index:])

    def delivery_log(self, **criteria) -> Tuple[TraceEntry, ...]:
        return filter_trace(self.trace, **criteria)

    def close(self) -> None:
        for writer in self._writers.values():
            writer.close()
        for server in self._servers:
            server.close()
        if self._servers:
            self.loop.run_until_complete(
                asyncio.gather(*(s.wait_closed() for s in self._servers), return_exceptions=True)
            )
        pending = [t for t in asyncio.all_tasks(self.loop) if not t.done()]
        for task in pending:
            task.cancel()
        if pending:
            self.loop.run_until_complete(asyncio.gather(*pending, return_exceptions=True))
        self.loop.close()
        self._servers = []
        self._writers = {}
