# src/FishLedger/core/__init__.py
"""Core components for FishLedger."""
from .base import (
    BaseStorage,
    ConfigError,
    LedgerError,
    StorageError,
    StorageOperationError,
)
from .enums import ExitCode, FrameType, Role, ValidationCode
from .types import ChainInfo, CommitReceipt, FirstBreak, Version

__all__ = [
    "BaseStorage",
    "LedgerError",
    "ConfigError",
    "StorageError",
    "StorageOperationError",
    "ExitCode",
    "FrameType",
    "Role",
    "ValidationCode",
    "ChainInfo",
    "CommitReceipt",
    "FirstBreak",
    "Version",
]
