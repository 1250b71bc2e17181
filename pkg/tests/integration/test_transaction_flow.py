# tests/integration/test_transaction_flow.py

"""End-to-end fish-farm transactions on the default two-organization network."""

import json
from dataclasses import replace

import pytest

from conftest import FULL_ACCEPTANCE
from FishLedger.bench import BenchmarkHarness
from FishLedger.chaincode.fishfarm import CHAINCODE_NAME
from FishLedger.chaincode.records import PRIVATE_FIELDS, split_record
from FishLedger.core.base import (
    AlreadyExists,
    IdentityRejected,
    InsufficientDissemination,
    NotFound,
    OrderingUnavailable,
    PermissionDenied,
    PolicyUnsatisfied,
    TransactionInvalid,
    ValidationFailed,
)
from FishLedger.core.enums import Role, ValidationCode
from FishLedger.datagen import GeneratorConfig, generate_records
from FishLedger.ledger import Approval, ConfigUpdate
from FishLedger.netsim.builder import create_network
from FishLedger.peer.node import PeerConfig
from FishLedger.peer.requests import create_record_request
from FishLedger.policy import parse_policy

FISHFARM_CLIENT = "admin.fishfarm.org"
SENSORS_CLIENT = "developers.sensorsprovider.org"
ACCESS_COUNT = 100 if FULL_ACCEPTANCE else 25
SCAN_COUNT = 1000 if FULL_ACCEPTANCE else 100

# (subject, role, peer queried)
FISHFARM_READERS = (
    ("admin.fishfarm.org", Role.CLIENT, "admin.fishfarm.org"),
    ("user.fishfarm.org", Role.CLIENT, "user.fishfarm.org"),
    ("Admin@fishfarm.org", Role.ADMIN, "user.fishfarm.org"),
)
SENSORS_READERS = (
    ("developers.sensorsprovider.org", Role.CLIENT, "developers.sensorsprovider.org"),
    ("support.sensorsprovider.org", Role.CLIENT, "admin.fishfarm.org"),
)


def read(net, subject, function, name, peer=None):
    client = net.client(subject)
    return client.evaluate_transaction(peer or client.event_peer, CHAINCODE_NAME, function, [name])


def record_named(sample_record, name, **values):
    return dict(sample_record, name=name, **values)


def bulk_load(net, count, seed):
    records = generate_records(GeneratorConfig(seed=seed, count=count))
    report = BenchmarkHarness(net).run_write(records, FISHFARM_CLIENT, Role.CLIENT)
    assert report.ok == count
    assert net.settle()
    return records


def query(net, subject, role, peer, function, name):
    client = net.client(subject, role=role)
    return client.evaluate_transaction(peer, CHAINCODE_NAME, function, [name])


@pytest.mark.integration
class TestCreateAndRead:
    def test_create_then_read_public_and_private(self, ledger_network, write_record, sample_record):
        handle = write_record(ledger_network, sample_record)
        assert handle.code is ValidationCode.VALID
        assert handle.block_num >= 1

        public = json.loads(read(ledger_network, FISHFARM_CLIENT, "ReadRecord", "r1"))
        private = json.loads(read(ledger_network, FISHFARM_CLIENT, "ReadPrivateDetails", "r1"))
        assert public["windspeed"] == "5.2"
        assert "salinity" not in public
        assert private["salinity"] == "34.2"
        assert "windspeed" not in private

    def test_sensors_provider_reads_public_part(self, ledger_network, write_record, sample_record):
        write_record(ledger_network, sample_record)
        ledger_network.settle()
        document = json.loads(read(ledger_network, SENSORS_CLIENT, "ReadRecord", "r1"))
        assert document["airpressure"] == "1013.25"

    @pytest.mark.parametrize("peer", [None, "admin.fishfarm.org"])
    def test_sensors_provider_denied_private_part(
        self, ledger_network, write_record, sample_record, peer
    ):
        write_record(ledger_network, sample_record)
        ledger_network.settle()
        with pytest.raises(PermissionDenied):
            read(ledger_network, SENSORS_CLIENT, "ReadPrivateDetails", "r1", peer=peer)

    def test_read_missing_record(self, ledger_network):
        with pytest.raises(NotFound):
            read(ledger_network, FISHFARM_CLIENT, "ReadRecord", "nope")

    def test_create_twice(self, ledger_network, write_record, sample_record):
        write_record(ledger_network, sample_record)
        ledger_network.settle()
        with pytest.raises(AlreadyExists):
            write_record(ledger_network, sample_record)

    def test_ph_out_of_range_rejected_at_endorsement(
        self, ledger_network, write_record, sample_record
    ):
        with pytest.raises(ValidationFailed, match="ph"):
            write_record(ledger_network, record_named(sample_record, "r9", ph="15"))
        with pytest.raises(NotFound):
            read(ledger_network, FISHFARM_CLIENT, "ReadRecord", "r9")


@pytest.mark.integration
class TestAccessControl:
    def test_private_details_by_organization(self, ledger_network):
        records = bulk_load(ledger_network, ACCESS_COUNT, seed=17)
        for public, private in records:
            for subject, role, peer in FISHFARM_READERS:
                doc = json.loads(
                    query(ledger_network, subject, role, peer, "ReadPrivateDetails", public.name)
                )
                assert set(doc) == {"name", *PRIVATE_FIELDS}
                assert doc == private.to_dict()
            for subject, role, peer in SENSORS_READERS:
                with pytest.raises(PermissionDenied):
                    query(ledger_network, subject, role, peer, "ReadPrivateDetails", public.name)
                doc = json.loads(query(ledger_network, subject, role, peer, "ReadRecord", public.name))
                assert doc == public.to_dict()


@pytest.mark.integration
class TestConcurrency:
    def test_conflicting_creates_one_wins(self, ledger_network, write_record, sample_record):
        first = write_record(ledger_network, sample_record, wait=False)
        second = write_record(ledger_network, sample_record, subject="user.fishfarm.org", wait=False)
        ledger_network.network.run_until(
            predicate=lambda: first.done and second.done, max_time=ledger_network.now + 30_000
        )
        codes = sorted([first.code.value, second.code.value])
        assert codes == [ValidationCode.MVCC_CONFLICT.value, ValidationCode.VALID.value]
        loser = first if first.code is ValidationCode.MVCC_CONFLICT else second
        assert isinstance(loser.error, TransactionInvalid)

    def test_many_records_distinct_names(self, ledger_network, write_record, sample_record):
        handles = [
            write_record(ledger_network, record_named(sample_record, f"r{i}"), wait=False)
            for i in range(12)
        ]
        ledger_network.network.run_until(
            predicate=lambda: all(h.done for h in handles), max_time=ledger_network.now + 30_000
        )
        assert all(h.code is ValidationCode.VALID for h in handles)
        # Batches of at most max_message_count transactions
        assert len({h.block_num for h in handles}) >= 2


@pytest.mark.integration
class TestEndorsementPolicy:
    def _args(self, sample_record):
        public, private = split_record(sample_record)
        return create_record_request(public, private)

    def test_single_org_endorsement_rejected(self, ledger_network, sample_record):
        args, private = self._args(sample_record)
        client = ledger_network.client(FISHFARM_CLIENT)
        with pytest.raises(PolicyUnsatisfied):
            client.submit_transaction(
                CHAINCODE_NAME, "CreateRecord", args, private, endorsing_peers=["admin.fishfarm.org"]
            )

    def test_policy_update_through_config_transaction(self, ledger_network, sample_record):
        net = ledger_network
        current = net.policy
        proposed = replace(
            current,
            chaincode_policy=parse_policy("Sig('fishfarm.org.peer')"),
            version=current.version + 1,
        )
        approvals = tuple(
            Approval.create(net.identity(f"Admin@{org}", Role.ADMIN), proposed)
            for org in ("fishfarm.org", "sensorsprovider.org")
        )
        admin = net.client("Admin@fishfarm.org", role=Role.ADMIN)
        handle = admin.wait(admin.submit_config(ConfigUpdate(proposed, approvals)))
        assert handle.code is ValidationCode.VALID
        net.settle()
        assert {p.ledger.policy.version for p in net.peers.values()} == {1}

        args, private = self._args(sample_record)
        client = net.client(FISHFARM_CLIENT)
        committed = client.submit_transaction(
            CHAINCODE_NAME, "CreateRecord", args, private, endorsing_peers=["admin.fishfarm.org"]
        )
        assert committed.code is ValidationCode.VALID

    def test_policy_update_needs_both_admins(self, ledger_network):
        net = ledger_network
        proposed = replace(net.policy, version=net.policy.version + 1)
        approvals = (Approval.create(net.identity("Admin@fishfarm.org", Role.ADMIN), proposed),)
        admin = net.client("Admin@fishfarm.org", role=Role.ADMIN)
        with pytest.raises(TransactionInvalid):
            admin.wait(admin.submit_config(ConfigUpdate(proposed, approvals)))
        net.settle()
        assert net.policy.version == 0


@pytest.mark.integration
class TestUnfinishedTransactions:
    def test_staging_of_unordered_transaction_expires(self, write_record, sample_record):
        net = create_network(seed=7, peer_config=PeerConfig(staging_retention_blocks=2))
        net.wait_for_leader()
        net.settle()
        public, private = split_record(sample_record)
        args, private_inputs = create_record_request(public, private)
        client = net.client(FISHFARM_CLIENT)
        with pytest.raises(PolicyUnsatisfied):
            client.submit_transaction(
                CHAINCODE_NAME,
                "CreateRecord",
                args,
                private_inputs,
                endorsing_peers=["admin.fishfarm.org"],
            )
        fishfarm = [p for p in net.peers.values() if p.org_id == "fishfarm.org"]
        assert [p.private_store.staged_count for p in fishfarm] == [1, 1]

        write_record(net, record_named(sample_record, "r2"))
        write_record(net, record_named(sample_record, "r3"))
        assert net.settle()
        for peer in fishfarm:
            assert peer.private_store.staged_count == 0
            assert len(peer.private_store) == 2
        with pytest.raises(NotFound):
            read(net, FISHFARM_CLIENT, "ReadPrivateDetails", "r1")

    def test_failed_dissemination_drops_staging(self, ledger_network, write_record, sample_record):
        ledger_network.network.partition([["user.fishfarm.org"]])
        with pytest.raises(InsufficientDissemination):
            write_record(ledger_network, sample_record)
        assert ledger_network.peers["admin.fishfarm.org"].private_store.staged_count == 0

    def test_finished_handles_are_released(self, ledger_network, write_record, sample_record):
        client = ledger_network.client(FISHFARM_CLIENT)
        write_record(ledger_network, sample_record)
        assert client.in_flight == {}
        ledger_network.settle()
        with pytest.raises(AlreadyExists):
            write_record(ledger_network, sample_record)
        assert client.in_flight == {}
        assert client._transients == {}

    def test_abandoned_transaction_is_released(self, ledger_network, write_record, sample_record):
        net = ledger_network
        for name in net.orderers:
            net.network.crash(name)
        client = net.client(FISHFARM_CLIENT)
        handle = write_record(net, sample_record, wait=False)
        with pytest.raises(OrderingUnavailable):
            client.wait(handle, max_wait_ms=3_000.0)
        assert handle.status == "failed"
        assert isinstance(handle.error, OrderingUnavailable)
        assert client.in_flight == {}

        for name in net.orderers:
            net.network.restart(name)
        net.wait_for_leader()
        net.settle()
        assert handle.status == "failed"
        with pytest.raises(NotFound):
            read(net, FISHFARM_CLIENT, "ReadRecord", "r1")


@pytest.mark.integration
class TestRevocation:
    def test_revoked_client_rejected(self, ledger_network, write_record, sample_record):
        write_record(ledger_network, sample_record)
        ledger_network.revoke(FISHFARM_CLIENT, Role.CLIENT)
        with pytest.raises(IdentityRejected):
            write_record(ledger_network, record_named(sample_record, "r2"))
        with pytest.raises(IdentityRejected):
            read(ledger_network, FISHFARM_CLIENT, "ReadRecord", "r1")

    def test_other_identities_unaffected(self, ledger_network, write_record, sample_record):
        ledger_network.revoke(FISHFARM_CLIENT, Role.CLIENT)
        handle = write_record(ledger_network, sample_record, subject="user.fishfarm.org")
        assert handle.code is ValidationCode.VALID


@pytest.mark.integration
class TestLedgerContents:
    PRIVATE_MARKERS = tuple(f'"{name}"'.encode() for name in PRIVATE_FIELDS)

    def test_block_logs_never_hold_private_fields(self, ledger_network):
        records = bulk_load(ledger_network, SCAN_COUNT, seed=23)
        documents = [private.to_document() for _, private in records]
        for peer in ledger_network.peers.values():
            blocks = list(peer.storage.read_records("blocks"))
            assert len(blocks) == peer.height
            for raw in blocks:
                for marker in self.PRIVATE_MARKERS:
                    assert marker not in raw
                for document in documents:
                    assert document not in raw

    def test_peers_converge(self, ledger_network, write_record, sample_record):
        for i in range(6):
            write_record(ledger_network, record_named(sample_record, f"r{i}"))
        assert ledger_network.settle()
        assert len(set(ledger_network.chain_hashes().values())) == 1
        assert len(set(ledger_network.state_hashes().values())) == 1
        fishfarm = ledger_network.private_hashes("fishfarm.org")
        assert len(fishfarm) == 2
        assert len(set(fishfarm.values())) == 1
        for peer in ledger_network.peers.values():
            expected = 6 if peer.org_id == "fishfarm.org" else 0
            assert len(peer.private_store) == expected

    def test_same_seed_same_chain(self, write_record, sample_record):
        from FishLedger.netsim.builder import create_network

        hashes = []
        for _ in range(2):
            net = create_network(seed=21)
            net.wait_for_leader()
            for i in range(3):
                write_record(net, record_named(sample_record, f"r{i}"))
            net.settle()
            hashes.append(net.chain_hashes())
        assert hashes[0] == hashes[1]
