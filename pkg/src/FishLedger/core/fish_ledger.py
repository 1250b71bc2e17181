"""Main FishLedger implementation."""

import json
import logging
import shutil
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import yaml

from ..bench.harness import BenchConfig, BenchmarkHarness
from ..bench.report import BenchReport, append_report
from ..chaincode.fishfarm import CHAINCODE_NAME
from ..chaincode.records import split_record
from ..config import data_home, deep_merge, load_config, validate_config
from ..core.base import (
    ConfigError,
    IdentityRejected,
    LedgerError,
    NetworkDown,
    PolicyError,
)
from ..core.codec import seed_int
from ..core.enums import Role
from ..datagen.generator import GeneratorConfig, generate_records, generate_to_file
from ..identity.certificates import RevocationList
from ..ledger.transaction import Approval, ConfigUpdate
from ..netsim.builder import LedgerNetwork, create_network
from ..netsim.faults import FaultScript
from ..netsim.loopback import LoopbackNetwork
from ..netsim.network import Network
from ..netsim.topology import Topology
from ..ordering.cutter import BlockCutterConfig
from ..ordering.raft import OrderingConfig
from ..peer.client import ClientConfig
from ..peer.node import PeerConfig
from ..peer.requests import create_record_request
from ..policy.expressions import parse_policy
from ..policy.network import NetworkPolicy
from ..privatedata.collections import CollectionConfig
from ..storage.local import LocalStorage
from ..utils.common import ensure_path
from ..utils.logging import set_network_clock, setup_logger

STATE_FILE = "network.yaml"
CRL_FILE = "crl.txt"
SESSION_FILE = "session"
NODES_DIR = "nodes"
REPORT_FILE = "reports/bench.jsonl"


def network_settings(config: Mapping[str, Any]) -> Dict[str, Any]:
    """Translate a validated configuration into ``create_network`` arguments.

    Raises:
        ConfigError: For policies that do not parse or an invalid topology
    """
    try:
        topology = Topology.from_config(config)
    except LedgerError as e:
        raise ConfigError(f"Invalid topology: {e}") from e
    try:
        policy = NetworkPolicy(
            channel_policy=parse_policy(config["channel_policy"]),
            chaincode_policy=parse_policy(config["chaincode_policy"]),
            collections=tuple(CollectionConfig.from_config(c) for c in config.get("collections", [])),
            version=0,
        )
    except (PolicyError, ValueError) as e:
        raise ConfigError(f"Invalid policy: {e}") from e

    admitted = {
        org["org_id"]: [Role(r) for r in org["admitted_roles"]]
        for org in config.get("organizations", [])
        if "admitted_roles" in org
    }
    ordering_cfg = config.get("ordering", {})
    netsim_cfg = config.get("netsim", {})
    client_cfg = config.get("client", {})
    try:
        ordering = OrderingConfig(
            cutter=BlockCutterConfig(
                max_message_count=int(ordering_cfg.get("max_message_count", 10)),
                batch_timeout_ms=float(ordering_cfg.get("batch_timeout_ms", 250.0)),
            ),
            election_timeout_ms=tuple(ordering_cfg.get("election_timeout_ms", (150.0, 300.0))),
            heartbeat_ms=float(ordering_cfg.get("heartbeat_ms", 50.0)),
        )
    except ValueError as e:
        raise ConfigError(f"Invalid ordering settings: {e}") from e

    fault_script = None
    if netsim_cfg.get("fault_script"):
        fault_script = FaultScript.from_file(netsim_cfg["fault_script"])

    return {
        "topology": topology,
        "policy": policy,
        "ordering": ordering,
        "admitted_roles": admitted,
        "latency_ms": tuple(netsim_cfg.get("latency_ms", (1.0, 5.0))),
        "fault_script": fault_script,
        "peer_config": PeerConfig(
            dissemination_timeout_ms=float(client_cfg.get("dissemination_timeout_ms", 500.0)),
            deliver_poll_ms=float(client_cfg.get("deliver_poll_ms", 200.0)),
            staging_retention_blocks=int(client_cfg.get("staging_retention_blocks", 20)),
        ),
        "client_config": ClientConfig(
            submit_retries=int(client_cfg.get("submit_retries", 5)),
            retry_backoff_ms=float(client_cfg.get("retry_backoff_ms", 100.0)),
            commit_timeout_ms=float(client_cfg.get("commit_timeout_ms", 5000.0)),
        ),
        "validity_days": config.get("identity", {}).get("validity_days"),
    }


def _decode_document(payload: bytes) -> Dict[str, Any]:
    return json.loads(payload.decode("utf-8"))


class FishLedger:
    """Operator-facing handle on a network persisted under a data directory."""

    def __init__(
        self,
        home: Optional[Union[str, Path]] = None,
        config_file: Optional[Union[str, Path]] = None,
        quiet: bool = False,
        log_level: Optional[Union[str, int]] = None,
        config_override: Optional[Dict[str, Any]] = None,
        transport: Optional[str] = None,
    ):
        """Initialize FishLedger.

        Args:
            home: Data directory; defaults to ``FISHLEDGER_HOME`` or ``./.fishledger``
            config_file: Network configuration file, used by ``up``
            quiet: If True, suppress all logging except CRITICAL errors.
                   Useful for structured output (JSON).
            log_level: Logging level (string like "INFO" or logging constant
                      like logging.INFO). If provided, overrides 'quiet' parameter.
            config_override: Optional dictionary to override any config values
            transport: ``simulated`` or ``loopback``; overrides ``netsim.transport``

        Note:
            Parameter priority: log_level > quiet > default (INFO)
        """
        if log_level is not None:
            effective_level = log_level
        elif quiet:
            effective_level = logging.CRITICAL
        else:
            effective_level = None

        self.home = data_home(home)
        self.config_file = config_file
        self.config_override = config_override or {}
        self.transport = transport
        self.config = self._load_configuration()

        log_cfg = self.config.get("logging", {})
        log_file = None
        if log_cfg.get("file_logging"):
            log_file = ensure_path(self.home / log_cfg.get("log_directory", "logs") / "fishledger.log")
        self.logger = setup_logger(
            "FishLedger",
            effective_level if effective_level is not None else self.config.get("logging_level"),
            log_file,
            log_cfg.get("format"),
            log_cfg.get("date_format"),
        )
        self._net: Optional[LedgerNetwork] = None

    # Configuration

    def _load_configuration(self) -> Dict[str, Any]:
        """Saved network config when one is up, otherwise file or defaults."""
        state = self.home / STATE_FILE
        if state.exists() and not self.config_file:
            config = load_config(state)
        elif self.config_file:
            config = load_config(self.config_file)
        else:
            config = load_config()
        if self.config_override:
            config = deep_merge(config, self.config_override)
            validate_config(config)
        if self.transport:
            config = deep_merge(config, {"netsim": {"transport": self.transport}})
        return config

    @property
    def is_up(self) -> bool:
        return (self.home / STATE_FILE).exists()

    # Lifecycle

    def up(self) -> Dict[str, Any]:
        """Bring the network up and persist its configuration.

        Raises:
            ConfigError: If a different network already lives in the data directory
        """
        state = self.home / STATE_FILE
        network_config = dict(self.config)
        if state.exists():
            saved = load_config(state)
            if Topology.from_config(saved) != Topology.from_config(network_config):
                raise ConfigError(
                    f"{self.home} already holds a different network; run 'net down --purge' first"
                )
        network_settings(network_config)
        ensure_path(state)
        with open(state, "w", encoding="utf-8") as f:
            yaml.safe_dump(network_config, f, sort_keys=False)
        net = self.network
        net.wait_for_leader()
        net.settle()
        self.logger.info(f"Network up in {self.home}")
        return self.status()

    def down(self, purge: bool = False) -> Dict[str, Any]:
        """Stop the network; ``purge`` also deletes its data directory."""
        self.close()
        existed = (self.home / STATE_FILE).exists()
        if purge and self.home.exists():
            shutil.rmtree(self.home)
        elif existed:
            (self.home / STATE_FILE).unlink()
        self.logger.info(f"Network down ({'purged' if purge else 'data kept'})")
        return {"down": existed, "purged": purge}

    def close(self) -> None:
        """Let live peers catch up, then release the transport."""
        if self._net is None:
            return
        try:
            self._net.settle(max_wait_ms=5_000.0)
        finally:
            if isinstance(self._net.network, LoopbackNetwork):
                self._net.network.close()
            self._net = None
            set_network_clock(None)

    def __enter__(self) -> "FishLedger":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self.close()

    def _next_session(self) -> int:
        path = self.home / SESSION_FILE
        session = int(path.read_text().strip() or 0) + 1 if path.exists() else 1
        ensure_path(path).write_text(str(session))
        return session

    def _load_crls(self) -> List[RevocationList]:
        path = self.home / CRL_FILE
        if not path.exists():
            return []
        lines = path.read_text(encoding="utf-8").splitlines()
        orgs = {line.split()[0] for line in lines if line.strip()}
        return [RevocationList.from_lines(org, lines) for org in sorted(orgs)]

    @property
    def network(self) -> LedgerNetwork:
        """The booted network, rebuilt from the data directory on first use.

        Raises:
            NetworkDown: If ``up`` has not been run for this data directory
        """
        if self._net is not None:
            return self._net
        if not (self.home / STATE_FILE).exists():
            raise NetworkDown(f"no network in {self.home}; run 'net up' first")
        settings = network_settings(self.config)
        seed = int(self.config.get("seed", 0))
        epoch = int(self.config.get("genesis_time", 0))
        session_seed = seed_int("session", seed, self._next_session())
        if self.config.get("netsim", {}).get("transport") == "loopback":
            transport = LoopbackNetwork(seed=session_seed, epoch=epoch)
        else:
            transport = Network(
                seed=session_seed,
                latency_ms=settings["latency_ms"],
                fault_script=settings["fault_script"],
                record_trace=False,
                epoch=epoch,
            )
        nodes_dir = self.home / NODES_DIR
        self._net = create_network(
            topology=settings["topology"],
            seed=seed,
            policy=settings["policy"],
            ordering=settings["ordering"],
            peer_config=settings["peer_config"],
            client_config=settings["client_config"],
            epoch=epoch,
            admitted_roles=settings["admitted_roles"],
            storage_factory=lambda name: LocalStorage(nodes_dir / name),
            crls=self._load_crls(),
            network=transport,
            validity_days=settings["validity_days"],
        )
        self._check_pinned_keys(self._net)
        set_network_clock(lambda net=self._net: net.now)
        self._net.wait_for_leader()
        self._net.settle()
        return self._net

    def _check_pinned_keys(self, net: LedgerNetwork) -> None:
        pinned = {
            org["org_id"]: org["root_public_key"].lower()
            for org in self.config.get("organizations", [])
            if org.get("root_public_key")
        }
        for msp in net.msps:
            expected = pinned.get(msp.org_id)
            if expected is not None and msp.root_ca_public_key.hex() != expected:
                raise ConfigError(f"root key of {msp.org_id} does not match the pinned key")

    def status(self) -> Dict[str, Any]:
        status = self.network.status()
        status["nodes"] = len(status["peers"]) + len(status["orderers"])
        status["healthy"] = all(
            p["alive"] and not p["quarantined"] for p in status["peers"]
        ) and all(o["alive"] for o in status["orderers"])
        return status

    # Identities

    def resolve_identity(self, who: str) -> Tuple[str, Role]:
        """Map a CLI identity name to an enrolled (subject, role).

        ``Admin@<org>`` names an organization admin; peer names double as
        client identities of their organization.
        """
        net = self.network
        for role in (Role.CLIENT, Role.ADMIN):
            if (who, role) in net.identities:
                return who, role
        raise IdentityRejected(f"unknown identity {who!r}")

    def _client(self, who: str):
        subject, role = self.resolve_identity(who)
        return self.network.client(subject, role=role)

    def revoke(self, who: str) -> Dict[str, Any]:
        """Revoke an identity and append it to the CRL export file."""
        subject, role = self.resolve_identity(who)
        net = self.network
        serial = net.revoke(subject, role)
        org = net.identity(subject, role).org_id
        path = ensure_path(self.home / CRL_FILE)
        with open(path, "a", encoding="utf-8") as f:
            f.write(f"{org} {serial}\n")
        self.logger.info(f"Revoked {subject} ({role.value}), serial {serial}")
        return {"identity": subject, "role": role.value, "serial": serial, "org": org}

    # Transactions

    def create_record(self, who: str, record: Mapping[str, Any]) -> Dict[str, Any]:
        """Submit ``CreateRecord`` and wait for commit.

        Range checks on the private part are left to the contract.
        """
        public, private = split_record(record, validate=False)
        args, private_inputs = create_record_request(public, private)
        client = self._client(who)
        handle = client.submit_transaction(CHAINCODE_NAME, "CreateRecord", args, private_inputs)
        return {
            "tx_id": handle.tx_id,
            "status": handle.code.value if handle.code else handle.status,
            "block": handle.block_num,
            "record": public.to_dict(),
        }

    def _query(self, who: str, function: str, name: str, peer: Optional[str]) -> bytes:
        client = self._client(who)
        return client.evaluate_transaction(
            peer or client.event_peer, CHAINCODE_NAME, function, [name]
        )

    def read_record(self, who: str, name: str, peer: Optional[str] = None) -> Dict[str, Any]:
        return _decode_document(self._query(who, "ReadRecord", name, peer))

    def read_private(self, who: str, name: str, peer: Optional[str] = None) -> Dict[str, Any]:
        return _decode_document(self._query(who, "ReadPrivateDetails", name, peer))

    # Benchmarks

    def _harness(self) -> BenchmarkHarness:
        bench = self.config.get("bench", {})
        return BenchmarkHarness(
            self.network,
            BenchConfig(
                in_flight=int(bench.get("in_flight", 16)),
                bucket_size=int(bench.get("bucket_size", 1000)),
                read_repeats=int(bench.get("read_repeats", 3)),
            ),
        )

    def bench_write(self, count: int, seed: int = 0, who: str = "admin.fishfarm.org") -> BenchReport:
        harness = self._harness()
        if count < 1:
            report = BenchReport(kind="write", bucket_size=harness.config.bucket_size)
        else:
            subject, role = self.resolve_identity(who)
            records = generate_records(GeneratorConfig(seed=seed, count=count))
            report = harness.run_write(records, subject, role)
        append_report(self.home / REPORT_FILE, report)
        return report

    def bench_read(
        self, count: int, who: str = "admin.fishfarm.org", peer: Optional[str] = None
    ) -> BenchReport:
        harness = self._harness()
        if count < 1:
            report = BenchReport(kind="read", bucket_size=harness.config.bucket_size)
        else:
            subject, role = self.resolve_identity(who)
            names = [f"record-{i:06d}" for i in range(1, count + 1)]
            report = harness.run_read(names, subject, peer=peer, role=role)
        append_report(self.home / REPORT_FILE, report)
        return report

    # Integrity

    def verify_chain(self, peer: Optional[str] = None, repair: bool = False) -> Dict[str, Any]:
        """Re-read block logs from disk; ``repair`` truncates at the first break."""
        net = self.network
        names = [peer] if peer else list(net.peers)
        results: Dict[str, Any] = {}
        for name in names:
            node = net.peers[name]
            result = node.ledger.verify()
            if result is True:
                results[name] = {"status": "OK", "height": node.height}
                continue
            entry = {"status": "FirstBreak", "block": result.block_num, "reason": result.reason}
            if repair:
                entry["repaired_height"] = node.repair()
            results[name] = entry
        if repair:
            net.settle()
            for name in names:
                results[name]["height"] = net.peers[name].height
        ok = all(r["status"] == "OK" for r in results.values())
        return {"ok": ok, "peers": results}

    def tamper(self, block: int, byte: int, peer: Optional[str] = None) -> Dict[str, Any]:
        """Flip one stored byte, then restart the peer so it re-verifies its log."""
        net = self.network
        name = peer or net.topology.peer_names[0]
        node = net.peers[name]
        offset = node.ledger.chain.tamper(block, byte)
        net.network.crash(name)
        net.network.restart(name)
        return {
            "peer": name,
            "block": block,
            "byte": byte,
            "offset": offset,
            "quarantined": node.quarantined,
        }

    # Policy

    def policy_show(self) -> Dict[str, Any]:
        return self.network.policy.to_config()

    def policy_update(
        self,
        approvers: Sequence[str],
        chaincode_policy: Optional[str] = None,
        channel_policy: Optional[str] = None,
        collections: Optional[Sequence[Mapping[str, Any]]] = None,
    ) -> Dict[str, Any]:
        """Order a config transaction carrying the approvers' signatures.

        The first approver submits it. Peers adopt the new policy when the
        current channel policy is satisfied.
        """
        if not approvers:
            raise IdentityRejected("a policy update needs at least one approving admin")
        net = self.network
        current = net.policy
        proposed = replace(current, version=current.version + 1)
        if chaincode_policy:
            proposed = replace(proposed, chaincode_policy=parse_policy(chaincode_policy))
        if channel_policy:
            proposed = replace(proposed, channel_policy=parse_policy(channel_policy))
        if collections is not None:
            proposed = replace(
                proposed, collections=tuple(CollectionConfig.from_config(c) for c in collections)
            )
        approvals = []
        for who in approvers:
            subject, role = self.resolve_identity(who)
            approvals.append(Approval.create(net.identity(subject, role), proposed))
        submitter = self._client(approvers[0])
        handle = submitter.wait(submitter.submit_config(ConfigUpdate(proposed, tuple(approvals))))
        net.settle()
        self.logger.info(f"Policy version {proposed.version} committed in block {handle.block_num}")
        return {"tx_id": handle.tx_id, "block": handle.block_num, "policy": net.policy.to_config()}

    # Data

    def generate_data(
        self,
        seed: int,
        count: int,
        out: Union[str, Path],
        ranges: Optional[Mapping[str, Tuple[float, float]]] = None,
    ) -> Dict[str, Any]:
        path = generate_to_file(GeneratorConfig(seed=seed, count=count, ranges=ranges or {}), out)
        return {"path": path, "count": count, "seed": seed}


__all__ = ["FishLedger", "network_settings"]
