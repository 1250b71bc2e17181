"""Who runs where: organizations, peers and orderers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Tuple

from ..core.base import BadTopology

SENSORS_ORG = "sensorsprovider.org"
FISHFARM_ORG = "fishfarm.org"

DEFAULT_PEERS: Tuple[Tuple[str, str], ...] = (
    ("developers.sensorsprovider.org", SENSORS_ORG),
    ("support.sensorsprovider.org", SENSORS_ORG),
    ("admin.fishfarm.org", FISHFARM_ORG),
    ("user.fishfarm.org", FISHFARM_ORG),
)

DEFAULT_ORDERERS: Tuple[Tuple[str, str], ...] = (
    ("orderer1.fishfarm.org", FISHFARM_ORG),
    ("orderer2.sensorsprovider.org", SENSORS_ORG),
    ("orderer3.fishfarm.org", FISHFARM_ORG),
)


@dataclass(frozen=True)
class Topology:
    orgs: Tuple[str, ...]
    peers: Tuple[Tuple[str, str], ...]
    orderers: Tuple[Tuple[str, str], ...]

    def __post_init__(self):
        validate_topology(self)

    @property
    def peer_names(self) -> List[str]:
        return [name for name, _ in self.peers]

    @property
    def orderer_names(self) -> List[str]:
        return [name for name, _ in self.orderers]

    def org_of(self, name: str) -> str:
        for node, org in self.peers + self.orderers:
            if node == name:
                return org
        raise KeyError(name)

    def peers_of(self, org_id: str) -> List[str]:
        return [name for name, org in self.peers if org == org_id]

    @classmethod
    def default(cls) -> "Topology":
        return cls(
            orgs=(SENSORS_ORG, FISHFARM_ORG),
            peers=DEFAULT_PEERS,
            orderers=DEFAULT_ORDERERS,
        )

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "Topology":
        """Build from the ``organizations`` and ``orderers`` config sections."""
        orgs = []
        peers = []
        for org in config.get("organizations", []):
            orgs.append(org["org_id"])
            peers.extend((peer, org["org_id"]) for peer in org.get("peers", []))
        orderers = [(o["name"], o["org"]) for o in config.get("orderers", [])]
        return cls(orgs=tuple(orgs), peers=tuple(peers), orderers=tuple(orderers))

    def to_config(self) -> Dict[str, Any]:
        return {
            "organizations": [
                {"org_id": org, "peers": self.peers_of(org)} for org in self.orgs
            ],
            "orderers": [{"name": n, "org": o} for n, o in self.orderers],
        }


def validate_topology(topology: Topology) -> None:
    """Raises BadTopology on duplicate names or unknown organizations."""
    if not topology.orgs:
        raise BadTopology("topology has no organizations")
    if len(set(topology.orgs)) != len(topology.orgs):
        raise BadTopology(f"duplicate organizations in {list(topology.orgs)}")
    names = [n for n, _ in topology.peers] + [n for n, _ in topology.orderers]
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise BadTopology(f"duplicate node names: {', '.join(duplicates)}")
    for name, org in topology.peers + topology.orderers:
        if org not in topology.orgs:
            raise BadTopology(f"{name} belongs to unknown organization {org}")
    if not topology.peers:
        raise BadTopology("topology has no peers")
    if len(topology.orderers) < 1 or len(topology.orderers) % 2 == 0:
        raise BadTopology(
            f"orderer count must be odd and at least 1, got {len(topology.orderers)}"
        )
