"""Assemble a complete simulated network from a topology."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

from ..chaincode.fishfarm import PRIVATE_COLLECTION, PUBLIC_COLLECTION
from ..core.base import BadTopology, BaseStorage, OrderingUnavailable
from ..core.codec import seed_int
from ..core.enums import Role
from ..identity.certificates import CertificateAuthority, SigningIdentity, ca_init
from ..identity.msp import MembershipRegistry, MspConfig
from ..ledger.blocks import Block, make_genesis_block
from ..ordering.raft import OrdererNode, OrderingConfig
from ..peer.client import ClientConfig, ClientNode
from ..peer.node import PeerConfig, PeerNode
from ..policy.expressions import all_of, signature
from ..policy.network import NetworkPolicy
from ..privatedata.collections import CollectionConfig
from ..storage.memory import MemoryStorage
from ..utils.logging import get_logger
from .faults import FaultScript
from .network import DEFAULT_LATENCY_MS, Network
from .topology import FISHFARM_ORG, Topology, validate_topology

DEFAULT_EPOCH = 1_700_000_000
ALL_ROLES = frozenset(Role)

StorageFactory = Callable[[str], BaseStorage]

logger = get_logger("netsim.builder")


def admin_subject(org_id: str) -> str:
    return f"Admin@{org_id}"


def default_policy(topology: Topology) -> NetworkPolicy:
    """Both organizations sign config changes and endorse transactions.

    The public collection is open to every organization; private details
    belong to the fish farm when it is part of the topology.
    """
    orgs = list(topology.orgs)
    private_members = [FISHFARM_ORG] if FISHFARM_ORG in orgs else orgs[:1]
    return NetworkPolicy(
        channel_policy=all_of(*(signature(f"{org}.admin") for org in orgs)),
        chaincode_policy=all_of(*(signature(f"{org}.peer") for org in orgs)),
        collections=(
            CollectionConfig(PUBLIC_COLLECTION, frozenset(orgs), required_peer_count=0),
            CollectionConfig(PRIVATE_COLLECTION, frozenset(private_members), required_peer_count=1),
        ),
        version=0,
    )


@dataclass
class LedgerNetwork:
    """Handle on a running network: nodes, identities and the event loop."""

    network: Network
    topology: Topology
    cas: Dict[str, CertificateAuthority]
    identities: Dict[Tuple[str, Role], SigningIdentity]
    msps: List[MspConfig]
    genesis: Block
    peers: Dict[str, PeerNode]
    orderers: Dict[str, OrdererNode]
    client_config: ClientConfig = field(default_factory=ClientConfig)
    clients: Dict[str, ClientNode] = field(default_factory=dict)

    @property
    def now(self) -> float:
        return self.network.now

    def identity(self, subject: str, role: Role = Role.CLIENT) -> SigningIdentity:
        try:
            return self.identities[(subject, role)]
        except KeyError:
            raise KeyError(f"no {role.value} identity for {subject}") from None

    def subjects(self, role: Optional[Role] = None) -> List[str]:
        return [s for (s, r) in self.identities if role is None or r is role]

    @property
    def policy(self) -> NetworkPolicy:
        """Policy in force on the most advanced live peer."""
        live = [p for p in self.peers.values() if p.alive and p.ledger.policy is not None]
        if not live:
            live = list(self.peers.values())
        return max(live, key=lambda p: p.ledger.height).ledger.policy

    def client(
        self,
        subject: str,
        endorsing_peers: Optional[Iterable[str]] = None,
        event_peer: Optional[str] = None,
        role: Role = Role.CLIENT,
    ) -> ClientNode:
        """Client node for an enrolled identity, attached on first use.

        By default the client asks one peer of each organization for an
        endorsement and watches commits on a peer of its own organization.
        """
        identity = self.identity(subject, role)
        name = f"client:{identity.subject}"
        if role is not Role.CLIENT:
            name = f"{name}#{role.value}"
        node = self.clients.get(name)
        if node is None:
            own = self.topology.peers_of(identity.org_id) or self.topology.peer_names
            node = ClientNode(
                identity,
                self._registry(),
                lambda: self.policy,
                list(endorsing_peers or self.default_endorsers(identity.org_id)),
                event_peer or own[0],
                self.topology.orderer_names,
                self.client_config,
                name=name,
            )
            node.peer_orgs = {n: o for n, o in self.topology.peers}
            self.network.add_node(node)
            self.clients[name] = node
        return node

    def default_endorsers(self, org_id: str) -> List[str]:
        """One peer per organization, preferring the client's own peers."""
        endorsers = []
        for org in self.topology.orgs:
            peers = self.topology.peers_of(org)
            if peers:
                endorsers.append(peers[0])
        own = self.topology.peers_of(org_id)
        if own and own[0] in endorsers:
            endorsers.remove(own[0])
            endorsers.insert(0, own[0])
        return endorsers

    def _registry(self) -> MembershipRegistry:
        return MembershipRegistry(self.msps, [ca.crl for ca in self.cas.values()])

    # Identity administration

    def revoke(self, subject: str, role: Role = Role.CLIENT) -> int:
        """Revoke an identity and push the new CRL to every node."""
        identity = self.identity(subject, role)
        crl = self.cas[identity.org_id].revoke_certificate(identity.certificate.serial)
        self.push_crl(crl)
        return identity.certificate.serial

    def push_crl(self, crl) -> None:
        for node in list(self.peers.values()) + list(self.orderers.values()) + list(
            self.clients.values()
        ):
            node.registry.update_crl(crl)

    # Observation

    def leader(self) -> Optional[str]:
        leaders = [o for o in self.orderers.values() if o.is_leader]
        if not leaders:
            return None
        return max(leaders, key=lambda o: o.raft.current_term).name

    def wait_for_leader(self, max_wait_ms: float = 5_000.0) -> str:
        self.network.run_until(
            predicate=lambda: self.leader() is not None, max_time=self.now + max_wait_ms
        )
        leader = self.leader()
        if leader is None:
            raise OrderingUnavailable(f"no orderer leader within {max_wait_ms:.0f} ms")
        return leader

    def peer_heights(self) -> Dict[str, int]:
        return {name: peer.height for name, peer in self.peers.items()}

    def wait_for_height(
        self, height: int, peers: Optional[Iterable[str]] = None, max_wait_ms: float = 10_000.0
    ) -> bool:
        names = list(peers or self.peers)
        self.network.run_until(
            predicate=lambda: all(self.peers[n].height >= height for n in names),
            max_time=self.now + max_wait_ms,
        )
        return all(self.peers[n].height >= height for n in names)

    def settle(self, max_wait_ms: float = 10_000.0) -> bool:
        """Run until every live peer reaches the ordering service's height."""
        target = max((o.height for o in self.orderers.values() if o.alive), default=1)
        return self.wait_for_height(
            target, [n for n, p in self.peers.items() if p.alive], max_wait_ms
        )

    def chain_hashes(self) -> Dict[str, str]:
        return {
            name: peer.ledger.get_chain_info().current_hash.hex()
            for name, peer in self.peers.items()
        }

    def state_hashes(self) -> Dict[str, str]:
        return {name: peer.ledger.state.state_hash().hex() for name, peer in self.peers.items()}

    def private_hashes(self, org_id: str = FISHFARM_ORG) -> Dict[str, str]:
        return {
            name: peer.private_store.store_hash().hex()
            for name, peer in self.peers.items()
            if peer.org_id == org_id
        }

    def status(self) -> dict:
        policy = self.policy
        return {
            "time_ms": self.now,
            "leader": self.leader(),
            "policy_version": policy.version if policy else None,
            "peers": [p.status() for p in self.peers.values()],
            "orderers": [o.status() for o in self.orderers.values()],
        }


def create_network(
    topology: Optional[Topology] = None,
    fault_script: Optional[FaultScript] = None,
    seed: int = 0,
    policy: Optional[NetworkPolicy] = None,
    ordering: Optional[OrderingConfig] = None,
    peer_config: Optional[PeerConfig] = None,
    client_config: Optional[ClientConfig] = None,
    latency_ms: Tuple[float, float] = DEFAULT_LATENCY_MS,
    epoch: int = DEFAULT_EPOCH,
    admitted_roles: Optional[Mapping[str, Iterable[Role]]] = None,
    storage_factory: Optional[StorageFactory] = None,
    record_trace: bool = True,
    crls: Iterable = (),
    network: Optional[Network] = None,
    validity_days: Optional[int] = None,
) -> LedgerNetwork:
    """Instantiate CAs, identities, genesis block and every node.

    CA keys derive from ``seed``, so two calls with the same arguments give
    the same certificates, genesis block and event trace.

    A pre-built transport such as ``LoopbackNetwork`` may be passed as
    ``network``; latency, fault script and trace settings then come from it.

    Raises:
        BadTopology: If the topology is invalid
    """
    topology = topology or Topology.default()
    validate_topology(topology)
    storage_factory = storage_factory or (lambda name: MemoryStorage())

    ca_options = {} if validity_days is None else {"validity_seconds": int(validity_days) * 86_400}
    cas = {org: ca_init(org, seed_int("ca", seed, org), **ca_options) for org in topology.orgs}
    for crl in crls:
        if crl.issuer_id in cas:
            cas[crl.issuer_id].restore_crl(crl)
    identities: Dict[Tuple[str, Role], SigningIdentity] = {}
    for org in topology.orgs:
        ca = cas[org]
        identities[(admin_subject(org), Role.ADMIN)] = ca.enroll(admin_subject(org), Role.ADMIN)
        for peer in topology.peers_of(org):
            identities[(peer, Role.PEER)] = ca.enroll(peer, Role.PEER)
            identities[(peer, Role.CLIENT)] = ca.enroll(peer, Role.CLIENT)
        for name, orderer_org in topology.orderers:
            if orderer_org == org:
                identities[(name, Role.ORDERER)] = ca.enroll(name, Role.ORDERER)

    roles = admitted_roles or {}
    msps = [cas[org].msp_config(roles.get(org, ALL_ROLES)) for org in topology.orgs]
    policy = policy or default_policy(topology)
    for collection in policy.collections:
        unknown = set(collection.member_orgs) - set(topology.orgs)
        if unknown:
            raise BadTopology(f"collection {collection.name} names unknown orgs {sorted(unknown)}")
    first_org = topology.orgs[0]
    genesis = make_genesis_block(policy, identities[(admin_subject(first_org), Role.ADMIN)], epoch)

    if network is None:
        network = Network(
            seed=seed,
            latency_ms=latency_ms,
            fault_script=fault_script,
            record_trace=record_trace,
            epoch=epoch,
        )

    def registry() -> MembershipRegistry:
        return MembershipRegistry(msps, [ca.crl for ca in cas.values()])

    org_peers = {org: topology.peers_of(org) for org in topology.orgs}
    orderers: Dict[str, OrdererNode] = {}
    for name, org in topology.orderers:
        orderers[name] = OrdererNode(
            name,
            org,
            topology.orderer_names,
            topology.peer_names,
            registry(),
            genesis,
            ordering,
            storage_factory(name),
        )
    peers: Dict[str, PeerNode] = {}
    for name, org in topology.peers:
        peers[name] = PeerNode(
            name,
            org,
            identities[(name, Role.PEER)],
            registry(),
            genesis,
            topology.orderer_names,
            org_peers,
            config=peer_config,
            storage=storage_factory(name),
        )
    for node in list(orderers.values()) + list(peers.values()):
        network.add_node(node)

    logger.info(
        f"Network up: {len(peers)} peers, {len(orderers)} orderers, {len(cas)} CAs (seed {seed})"
    )
    return LedgerNetwork(
        network=network,
        topology=topology,
        cas=cas,
        identities=identities,
        msps=msps,
        genesis=genesis,
        peers=peers,
        orderers=orderers,
        client_config=client_config or ClientConfig(),
    )
