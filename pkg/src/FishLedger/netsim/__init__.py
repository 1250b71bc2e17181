"""Deterministic simulated network."""
from .faults import FaultEvent, FaultScript
from .loopback import LoopbackNetwork
from .network import Network, Timer
from .node import Node
from .topology import Topology, validate_topology
from .trace import TraceEntry, export_trace, filter_trace, load_trace

__all__ = [
    "FaultEvent",
    "FaultScript",
    "LoopbackNetwork",
    "Network",
    "Timer",
    "Node",
    "Topology",
    "validate_topology",
    "TraceEntry",
    "export_trace",
    "filter_trace",
    "load_trace",
]
