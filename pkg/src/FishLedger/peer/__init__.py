"""Peers and the client library that talks to them."""
from .client import ClientConfig, ClientNode, PrivateInput, QueryHandle, TxHandle
from .messages import ProposalMessage, ProposalResponse, TxStatus, WatchTx
from .node import PeerConfig, PeerNode, default_contracts
from .requests import create_record_request
from .stub import SimulationStub

__all__ = [
    "ClientConfig",
    "ClientNode",
    "PrivateInput",
    "QueryHandle",
    "TxHandle",
    "ProposalMessage",
    "ProposalResponse",
    "TxStatus",
    "WatchTx",
    "PeerConfig",
    "PeerNode",
    "default_contracts",
    "create_record_request",
    "SimulationStub",
]
