"""Version information."""

__version__ = "0.3.1"
__author__ = "FishLedger developers"
