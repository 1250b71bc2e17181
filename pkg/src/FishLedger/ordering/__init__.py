"""RAFT ordering service."""
from .cutter import BlockCutter, BlockCutterConfig, cut_block
from .messages import (
    AppendEntries,
    AppendEntriesResponse,
    Deliver,
    DeliverRequest,
    LogEntry,
    RequestVote,
    RequestVoteResponse,
    Submit,
    SubmitResponse,
)
from .raft import OrdererNode, OrderingConfig, RaftState
from .storage import RaftStorage

__all__ = [
    "BlockCutter",
    "BlockCutterConfig",
    "cut_block",
    "AppendEntries",
    "AppendEntriesResponse",
    "Deliver",
    "DeliverRequest",
    "LogEntry",
    "RequestVote",
    "RequestVoteResponse",
    "Submit",
    "SubmitResponse",
    "OrdererNode",
    "OrderingConfig",
    "RaftState",
    "RaftStorage",
]
