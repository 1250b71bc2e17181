# tests/conftest.py

import os
import sys
import tempfile
from pathlib import Path

import pytest  # noqa: E402
import yaml  # noqa: E402

# Add the src directory to Python path
pkg_root = str(Path(__file__).parent.parent / "src")
if pkg_root not in sys.path:
    sys.path.insert(0, pkg_root)

# Full-size acceptance runs (100k records, 1000 RAFT trials) are opt-in
FULL_ACCEPTANCE = os.environ.get("FISHLEDGER_FULL_ACCEPTANCE") == "1"

SAMPLE_RECORD = {
    "name": "r1",
    "windspeed": "5.2",
    "rainfall": "0.4",
    "airpressure": "1013.25",
    "temperature": "11.5",
    "waveheight": "1.2",
    "watercurrent": "0.35",
    "fdom": "12.1",
    "salinity": "34.2",
    "ph": "7.8",
    "turbidity": "3.1",
    "algae": "2.4",
    "orp": "320",
    "nitrates": "0.9",
}


@pytest.fixture
def temp_dir():
    """Create temporary directory for tests."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


@pytest.fixture
def sample_record():
    """A valid flat 14-field record."""
    return dict(SAMPLE_RECORD)


@pytest.fixture
def sample_config(temp_dir):
    """Create sample configuration (single orderer, fast batching)."""
    config = {
        "seed": 3,
        "orderers": [{"name": "orderer1.fishfarm.org", "org": "fishfarm.org"}],
        "ordering": {"max_message_count": 10, "batch_timeout_ms": 50},
        "netsim": {"latency_ms": [1, 2]},
    }
    config_path = temp_dir / "network.yaml"
    with open(config_path, "w") as f:
        yaml.dump(config, f)
    return config_path


@pytest.fixture
def fishfarm_ca():
    from FishLedger.identity.certificates import ca_init

    return ca_init("fishfarm.org", 42)


@pytest.fixture
def ledger_network():
    """Default topology booted with a leader and all peers at genesis."""
    from FishLedger.netsim.builder import create_network

    net = create_network(seed=7)
    net.wait_for_leader()
    net.settle()
    return net


@pytest.fixture
def write_record():
    """Returns a helper that creates a record and waits for its commit."""
    from FishLedger.chaincode.fishfarm import CHAINCODE_NAME
    from FishLedger.chaincode.records import split_record
    from FishLedger.core.enums import Role
    from FishLedger.peer.requests import create_record_request

    def _write(net, record, subject="admin.fishfarm.org", role=Role.CLIENT, wait=True):
        public, private = split_record(record, validate=False)
        args, private_inputs = create_record_request(public, private)
        client = net.client(subject, role=role)
        if not wait:
            return client.invoke(CHAINCODE_NAME, "CreateRecord", args, private_inputs)
        return client.submit_transaction(CHAINCODE_NAME, "CreateRecord", args, private_inputs)

    return _write


@pytest.fixture
def fish_ledger(temp_dir, sample_config):
    """FishLedger facade with a network already up under temp_dir."""
    from FishLedger import FishLedger

    fl = FishLedger(home=temp_dir / "home", config_file=sample_config, quiet=True)
    fl.up()
    yield fl
    fl.close()


LEDGER_TIMESTAMP = 1_700_000_000


class LedgerWorld:
    """Two organizations, their identities and a genesis block, without a network."""

    def __init__(self, seed: int = 1):
        from FishLedger.core.enums import Role
        from FishLedger.identity import MembershipRegistry, ca_init
        from FishLedger.ledger import make_genesis_block
        from FishLedger.policy import NetworkPolicy

        roles = list(Role)
        self.fishfarm = ca_init("fishfarm.org", seed)
        self.sensors = ca_init("sensorsprovider.org", seed)
        self.registry = MembershipRegistry(
            [self.fishfarm.msp_config(roles), self.sensors.msp_config(roles)]
        )
        self.fishfarm_peer = self.fishfarm.enroll("admin.fishfarm.org", Role.PEER)
        self.sensors_peer = self.sensors.enroll("developers.sensorsprovider.org", Role.PEER)
        self.client = self.fishfarm.enroll("admin.fishfarm.org", Role.CLIENT)
        self.fishfarm_admin = self.fishfarm.enroll("Admin@fishfarm.org", Role.ADMIN)
        self.sensors_admin = self.sensors.enroll("Admin@sensorsprovider.org", Role.ADMIN)
        self.policy = NetworkPolicy.from_config(
            {
                "channel_policy": "And(Sig('fishfarm.org.admin'), Sig('sensorsprovider.org.admin'))",
                "chaincode_policy": "And(Sig('fishfarm.org.peer'), Sig('sensorsprovider.org.peer'))",
                "collections": [
                    {
                        "name": "collectionFishFarm",
                        "member_orgs": ["fishfarm.org", "sensorsprovider.org"],
                    },
                    {"name": "collectionFishFarmPrivateDetails", "member_orgs": ["fishfarm.org"]},
                ],
            }
        )
        self.genesis = make_genesis_block(self.policy, self.fishfarm_admin, LEDGER_TIMESTAMP)
        self._nonce = 0

    @property
    def endorsers(self):
        return (self.fishfarm_peer, self.sensors_peer)

    def envelope(self, reads=(), writes=(), private_writes=(), endorsers=None, creator=None, nonce=None):
        """A signed envelope carrying the given read-write set."""
        from FishLedger.ledger import Endorsement, Envelope, Proposal, ReadWriteSet

        if nonce is None:
            self._nonce += 1
            nonce = f"nonce-{self._nonce}".encode()
        creator = creator or self.client
        proposal = Proposal.create(creator, "fishfarm", "Put", [], nonce, LEDGER_TIMESTAMP)
        rwset = ReadWriteSet(
            reads=tuple(reads), public_writes=tuple(writes), private_writes=tuple(private_writes)
        )
        signers = self.endorsers if endorsers is None else endorsers
        endorsements = [Endorsement.create(s, proposal.hash, rwset.hash) for s in signers]
        return Envelope.assemble(creator, proposal, rwset, endorsements)

    def ledger(self, storage=None, name="test"):
        """A ledger opened at genesis."""
        from FishLedger.ledger import Ledger
        from FishLedger.storage.memory import MemoryStorage

        ledger = Ledger(storage if storage is not None else MemoryStorage(), name)
        ledger.open(self.genesis)
        return ledger

    def next_block(self, ledger, envelopes):
        from FishLedger.ledger import Block

        return Block.create(ledger.height, ledger.get_chain_info().current_hash, envelopes)

    def commit(self, ledger, envelopes):
        """Validate and commit one block; returns its validation codes."""
        stored, _ = ledger.process_block(self.next_block(ledger, envelopes), self.registry)
        return list(stored.validation_codes)


@pytest.fixture(scope="session")
def ledger_world():
    return LedgerWorld()
