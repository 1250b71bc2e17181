"""FishLedger package."""

from FishLedger.core.base import LedgerError
from FishLedger.core.enums import ExitCode, Role, ValidationCode
from FishLedger.core.fish_ledger import FishLedger
from FishLedger.netsim.builder import LedgerNetwork, create_network
from FishLedger.netsim.topology import Topology
from FishLedger.version import __author__, __version__

__all__ = [
    "FishLedger",
    "LedgerError",
    "LedgerNetwork",
    "ExitCode",
    "Role",
    "ValidationCode",
    "Topology",
    "create_network",
    "__version__",
    "__author__",
]
