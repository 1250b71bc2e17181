"""Write and read benchmarks driven through a client node.

Latencies are measured on the network clock (virtual time in the simulator,
real time on the loopback transport) and on the host's wall clock.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from typing import Deque, Dict, List, Optional, Sequence, Tuple

from ..chaincode.fishfarm import CHAINCODE_NAME
from ..core.base import LedgerError, OrderingUnavailable
from ..core.enums import Role
from ..datagen.generator import RecordPair
from ..peer.client import ClientNode, QueryHandle, TxHandle
from ..peer.requests import create_record_request
from ..utils.logging import get_logger
from .report import BenchReport, Sample, build_report

logger = get_logger("bench")


@dataclass(frozen=True)
class BenchConfig:
    """Harness settings.

    Attributes:
        in_flight: Maximum concurrent transactions or queries
        bucket_size: Records per latency bucket in reports
        read_repeats: Each read is repeated; the fastest attempt counts
        max_wait_ms: Give up on an operation after this long
    """

    in_flight: int = 16
    bucket_size: int = 1000
    read_repeats: int = 3
    max_wait_ms: float = 60_000.0

    def __post_init__(self):
        if self.in_flight < 1:
            raise ValueError("in_flight must be at least 1")
        if self.bucket_size < 1:
            raise ValueError("bucket_size must be at least 1")
        if self.read_repeats < 1:
            raise ValueError("read_repeats must be at least 1")


class BenchmarkHarness:
    """Runs bounded-concurrency workloads against a ``LedgerNetwork``."""

    def __init__(self, ledger_network, config: Optional[BenchConfig] = None):
        self.net = ledger_network
        self.config = config or BenchConfig()

    @property
    def network(self):
        return self.net.network

    def _client(self, subject: str, role: Role) -> ClientNode:
        return self.net.client(subject, role=role)

    def _drive(self, pending: Dict[str, Tuple[int, str, object, float]]) -> None:
        """Run the network until at least one pending operation finishes."""
        if not pending:
            return
        self.network.run_until(
            predicate=lambda: any(h.done for _, _, h, _ in pending.values()),
            max_time=self.network.now + self.config.max_wait_ms,
        )

    # Writes

    def run_write(
        self,
        records: Sequence[RecordPair],
        subject: str,
        role: Role = Role.CLIENT,
        start_index: int = 1,
    ) -> BenchReport:
        """Submit ``CreateRecord`` for every pair, ``in_flight`` at a time."""
        client = self._client(subject, role)
        queue: Deque[Tuple[int, RecordPair]] = deque(
            (start_index + i, pair) for i, pair in enumerate(records)
        )
        pending: Dict[str, Tuple[int, str, TxHandle, float]] = {}
        samples: List[Sample] = []
        started = self.network.now
        wall_started = time.perf_counter()

        while queue or pending:
            while queue and len(pending) < self.config.in_flight:
                index, (public, private) = queue.popleft()
                args, private_inputs = create_record_request(public, private)
                handle = client.invoke(CHAINCODE_NAME, "CreateRecord", args, private_inputs)
                pending[handle.tx_id] = (index, public.name, handle, time.perf_counter())
            self._drive(pending)
            finished = self._collect_writes(pending, samples)
            if not finished:
                self._expire(client, pending, samples, "timeout")

        duration = self.network.now - started
        report = build_report(
            "write",
            sorted(samples, key=lambda s: s.index),
            duration,
            time.perf_counter() - wall_started,
            self.config.bucket_size,
        )
        logger.info(
            f"Write benchmark: {report.ok}/{report.count} committed, "
            f"{_fmt_rate(report.throughput_tx_per_min)} tx/min"
        )
        return report

    def _collect_writes(self, pending, samples: List[Sample]) -> int:
        finished = 0
        for tx_id in [t for t, (_, _, h, _) in pending.items() if h.done]:
            index, name, handle, wall_start = pending.pop(tx_id)
            wall_ms = (time.perf_counter() - wall_start) * 1000.0
            ok = handle.status == "committed"
            latency = handle.latency_ms if ok else self.network.now - handle.started_at
            samples.append(
                Sample(
                    index=index,
                    name=name,
                    ok=ok,
                    latency_ms=float(latency),
                    wall_ms=wall_ms,
                    error="" if ok else _error_name(handle.error),
                    block_num=handle.block_num,
                )
            )
            finished += 1
        return finished

    def _expire(
        self, client: ClientNode, pending, samples: List[Sample], reason: str
    ) -> None:
        """Record every stuck operation as failed and stop the client tracking it."""
        for index, name, handle, wall_start in list(pending.values()):
            client.abandon(handle, OrderingUnavailable(f"{name}: {reason}"))
            samples.append(
                Sample(
                    index=index,
                    name=name,
                    ok=False,
                    latency_ms=float(self.network.now - handle.started_at),
                    wall_ms=(time.perf_counter() - wall_start) * 1000.0,
                    error=reason,
                )
            )
        logger.warning(f"{len(pending)} operations did not finish within {self.config.max_wait_ms:.0f} ms")
        pending.clear()

    # Reads

    def run_read(
        self,
        names: Sequence[str],
        subject: str,
        peer: Optional[str] = None,
        role: Role = Role.CLIENT,
        function: str = "ReadRecord",
    ) -> BenchReport:
        """Query every record ``read_repeats`` times; report the fastest try.

        Records are indexed by position in ``names`` so buckets follow
        insertion order.
        """
        client = self._client(subject, role)
        peer = peer or client.event_peer
        best: Dict[int, Sample] = {}
        started = self.network.now
        wall_started = time.perf_counter()

        for _ in range(self.config.read_repeats):
            queue: Deque[Tuple[int, str]] = deque(enumerate(names, start=1))
            pending: Dict[str, Tuple[int, str, QueryHandle, float]] = {}
            samples: List[Sample] = []
            while queue or pending:
                while queue and len(pending) < self.config.in_flight:
                    index, name = queue.popleft()
                    handle = client.query(peer, CHAINCODE_NAME, function, [name])
                    pending[handle.request_id] = (index, name, handle, time.perf_counter())
                self._drive(pending)
                if not self._collect_reads(pending, samples):
                    self._expire(client, pending, samples, "timeout")
            for sample in samples:
                current = best.get(sample.index)
                if current is None or _better(sample, current):
                    best[sample.index] = sample

        duration = self.network.now - started
        report = build_report(
            "read",
            [best[i] for i in sorted(best)],
            duration,
            time.perf_counter() - wall_started,
            self.config.bucket_size,
        )
        logger.info(
            f"Read benchmark: {report.ok}/{report.count} succeeded, p50 {_fmt_rate(report.p50_ms)} ms"
        )
        return report

    def _collect_reads(self, pending, samples: List[Sample]) -> int:
        finished = 0
        for request_id in [r for r, (_, _, h, _) in pending.items() if h.done]:
            index, name, handle, wall_start = pending.pop(request_id)
            samples.append(
                Sample(
                    index=index,
                    name=name,
                    ok=handle.error is None,
                    latency_ms=float(handle.latency_ms),
                    wall_ms=(time.perf_counter() - wall_start) * 1000.0,
                    error=_error_name(handle.error),
                )
            )
            finished += 1
        return finished


def _better(candidate: Sample, current: Sample) -> bool:
    if candidate.ok != current.ok:
        return candidate.ok
    return (candidate.latency_ms, candidate.wall_ms) < (current.latency_ms, current.wall_ms)


def _error_name(error: Optional[LedgerError]) -> str:
    return "" if error is None else type(error).__name__


def _fmt_rate(value: Optional[float]) -> str:
    return "-" if value is None else f"{value:.1f}"
