# src/FishLedger/utils/__init__.py
"""Utility functions for FishLedger."""
from .common import ensure_path, to_json
from .logging import get_logger, set_network_clock, setup_logger

__all__ = ["setup_logger", "get_logger", "set_network_clock", "ensure_path", "to_json"]
