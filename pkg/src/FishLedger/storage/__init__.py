# src/FishLedger/storage/__init__.py
"""Storage implementations for FishLedger."""
from .local import LocalStorage
from .memory import MemoryStorage

__all__ = ["LocalStorage", "MemoryStorage"]
