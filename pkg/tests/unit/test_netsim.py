# tests/unit/test_netsim.py

from dataclasses import dataclass
from typing import Any, Dict

import pytest
import yaml

from FishLedger.core.base import BadTopology, ConfigError
from FishLedger.core.enums import FrameType
from FishLedger.core.frames import Message
from FishLedger.netsim import (
    FaultEvent,
    FaultScript,
    Network,
    Node,
    Topology,
    export_trace,
    filter_trace,
    load_trace,
)
from FishLedger.netsim.topology import FISHFARM_ORG, SENSORS_ORG
from FishLedger.netsim.trace import trace_frame_counts


@dataclass
class Ping(Message):
    hops: int

    frame_type = FrameType.WATCH_TX

    def to_body(self) -> Dict[str, Any]:
        return {"hops": self.hops}

    @classmethod
    def from_body(cls, body: Dict[str, Any]) -> "Ping":
        return cls(body["hops"])

    def trace_info(self) -> Dict[str, Any]:
        return {"hops": self.hops}


class EchoNode(Node):
    """Bounces pings back to the sender until ``limit`` hops."""

    kind = "echo"

    def __init__(self, name, org_id="a.org", limit=10):
        super().__init__(name, org_id)
        self.limit = limit
        self.received = []
        self.starts = 0
        self.on(Ping, self._on_ping)

    def on_start(self):
        self.starts += 1

    def _on_ping(self, src, ping):
        self.received.append((self.now, src, ping.hops))
        if ping.hops < self.limit:
            self.send(src, Ping(ping.hops + 1))


def ping_pong(seed, limit=20, latency_ms=(1.0, 5.0)):
    net = Network(seed=seed, latency_ms=latency_ms)
    a = net.add_node(EchoNode("a", limit=limit))
    b = net.add_node(EchoNode("b", "b.org", limit=limit))
    a.send("b", Ping(0))
    net.run_until(1_000)
    return net, a, b


class TestNetwork:
    def test_same_seed_same_trace(self):
        first, _, _ = ping_pong(seed=4)
        second, _, _ = ping_pong(seed=4)
        assert first.trace == second.trace
        assert len(first.trace) == 21

    def test_different_seed_different_timing(self):
        first, _, _ = ping_pong(seed=4)
        second, _, _ = ping_pong(seed=5)
        assert [e.t for e in first.trace] != [e.t for e in second.trace]

    def test_trace_records_orgs_and_info(self):
        net, _, _ = ping_pong(seed=1, limit=1)
        entry = net.trace[0]
        assert (entry.src, entry.dst, entry.frame) == ("a", "b", FrameType.WATCH_TX.value)
        assert (entry.src_org, entry.dst_org) == ("a.org", "b.org")
        assert entry.get("hops") == 0
        assert entry.size > 0

    def test_fixed_link_latency(self):
        net = Network(seed=1)
        a = net.add_node(EchoNode("a", limit=0))
        b = net.add_node(EchoNode("b", limit=0))
        net.set_link_latency(("a", "b"), (7.0, 7.0))
        a.send("b", Ping(0))
        net.run_until(100)
        assert b.received == [(7.0, "a", 0)]

    def test_empty_network(self):
        net = Network(seed=1)
        assert net.run_until(500) == ()
        assert net.now == 500
        assert net.trace == []

    def test_invalid_latency(self):
        with pytest.raises(ValueError):
            Network(latency_ms=(5.0, 1.0))

    def test_duplicate_node(self):
        net = Network()
        net.add_node(EchoNode("a"))
        with pytest.raises(ValueError):
            net.add_node(EchoNode("a"))

    def test_partition_drops_and_heal_restores(self):
        net = Network(seed=1)
        a = net.add_node(EchoNode("a", limit=0))
        b = net.add_node(EchoNode("b", limit=0))
        net.partition([["a"], ["b"]])
        assert not net.connected("a", "b")
        a.send("b", Ping(0))
        net.run_until(50)
        assert b.received == [] and net.dropped == 1
        net.heal()
        a.send("b", Ping(1))
        net.run_until(100)
        assert [hops for _, _, hops in b.received] == [1]

    def test_unlisted_nodes_share_a_group(self):
        net = Network()
        for name in "abc":
            net.add_node(EchoNode(name))
        net.partition([["a"], ["b"]])
        assert not net.connected("a", "c")
        assert not net.connected("b", "c")
        assert net.connected("c", "c")

    def test_crashed_node_neither_sends_nor_receives(self):
        net = Network(seed=1)
        a = net.add_node(EchoNode("a", limit=0))
        b = net.add_node(EchoNode("b", limit=0))
        net.crash("b")
        a.send("b", Ping(0))
        b.send("a", Ping(0))
        net.run_until(50)
        assert a.received == [] and b.received == []
        assert net.alive_nodes() == ["a"]

    def test_timers_of_previous_incarnation_are_discarded(self):
        net = Network(seed=1)
        a = net.add_node(EchoNode("a"))
        fired = []
        a.set_timer(10, lambda: fired.append("old"))
        net.crash("a")
        net.restart("a")
        a.set_timer(20, lambda: fired.append("new"))
        net.run_until(100)
        assert fired == ["new"]
        assert a.incarnation == 2 and a.starts == 2

    def test_cancelled_timer(self):
        net = Network()
        a = net.add_node(EchoNode("a"))
        fired = []
        timer = a.set_timer(5, lambda: fired.append(1))
        timer.cancel()
        net.run_until(10)
        assert fired == []

    def test_scripted_faults(self):
        script = FaultScript.build().restart("b", at=30).crash("b", at=10).done()
        net = Network(seed=1, fault_script=script)
        net.add_node(EchoNode("a"))
        net.add_node(EchoNode("b"))
        net.run_until(20)
        assert not net.is_up("b")
        net.run_until(40)
        assert net.is_up("b")

    def test_run_until_predicate(self):
        net = Network(seed=3)
        a = net.add_node(EchoNode("a", limit=100))
        b = net.add_node(EchoNode("b", limit=100))
        a.send("b", Ping(0))
        new = net.run_until(predicate=lambda: len(b.received) >= 3, max_time=10_000)
        assert len(b.received) == 3
        assert len(new) == 5

    def test_clock_follows_epoch(self):
        net = Network(epoch=1_700_000_000)
        a = net.add_node(EchoNode("a"))
        net.run_until(2_500)
        assert a.clock() == 1_700_000_002


class TestTrace:
    def test_filter(self):
        net, _, _ = ping_pong(seed=2, limit=5)
        assert len(net.delivery_log(src="a")) == 3
        assert len(net.delivery_log(dst_org="b.org")) == 3
        assert len(filter_trace(net.trace, frame=FrameType.WATCH_TX)) == 6
        assert net.delivery_log(frame=FrameType.DELIVER) == ()
        late = net.trace[3].t
        assert all(e.t >= late for e in net.delivery_log(since=late))

    def test_export_and_load(self, temp_dir):
        net, _, _ = ping_pong(seed=2, limit=5)
        path = export_trace(temp_dir / "trace.jsonl", net.trace)
        assert load_trace(path) == net.trace

    def test_frame_counts(self):
        net, _, _ = ping_pong(seed=2, limit=5)
        counts = trace_frame_counts(net.trace)
        assert counts["count"].tolist() == [6]
        assert trace_frame_counts([]).empty


class TestTopology:
    def test_default(self):
        topology = Topology.default()
        assert topology.orgs == (SENSORS_ORG, FISHFARM_ORG)
        assert len(topology.orderer_names) == 3
        assert topology.org_of("user.fishfarm.org") == FISHFARM_ORG
        assert topology.peers_of(SENSORS_ORG) == [
            "developers.sensorsprovider.org",
            "support.sensorsprovider.org",
        ]

    def test_config_round_trip(self):
        topology = Topology.default()
        assert Topology.from_config(topology.to_config()) == topology

    @pytest.mark.parametrize(
        "orgs, peers, orderers",
        [
            ((), (("p", "a"),), (("o", "a"),)),
            (("a", "a"), (("p", "a"),), (("o", "a"),)),
            (("a",), (("p", "a"), ("p", "a")), (("o", "a"),)),
            (("a",), (("p", "b"),), (("o", "a"),)),
            (("a",), (), (("o", "a"),)),
            (("a",), (("p", "a"),), ()),
            (("a",), (("p", "a"),), (("o1", "a"), ("o2", "a"))),
        ],
    )
    def test_invalid(self, orgs, peers, orderers):
        with pytest.raises(BadTopology):
            Topology(orgs, peers, orderers)


class TestFaultScript:
    def test_events_sorted_by_time(self):
        script = FaultScript.build().heal(50).crash("o1", 10).partition([["a"], ["b"]], 30).done()
        assert [e.at for e in script] == [10, 30, 50]
        assert len(script) == 3

    def test_from_config(self):
        script = FaultScript.from_config(
            [
                {"at": 500, "action": "restart", "node": "o1"},
                {"at": 100, "action": "crash", "node": "o1"},
                {"at": 0, "action": "delay", "link": ["a", "b"], "latency_ms": [10, 20]},
            ]
        )
        assert [e.action for e in script] == ["delay", "crash", "restart"]
        assert FaultScript.from_config(script.to_config()) == script

    @pytest.mark.parametrize(
        "entry",
        [
            {"at": 1, "action": "explode"},
            {"at": 1, "action": "crash"},
            {"at": 1, "action": "partition", "groups": [["a"]]},
            {"at": 1, "action": "delay", "link": ["a", "b"]},
            {"at": 1},
        ],
    )
    def test_bad_entries(self, entry):
        with pytest.raises(ConfigError):
            FaultScript.from_config([entry])

    def test_from_file(self, temp_dir):
        path = temp_dir / "faults.yaml"
        path.write_text(yaml.safe_dump({"events": [{"at": 5, "action": "heal"}]}))
        assert list(FaultScript.from_file(path)) == [FaultEvent(at=5.0, action="heal")]
