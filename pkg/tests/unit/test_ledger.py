# tests/unit/test_ledger.py

import random
from dataclasses import replace

import pytest

from conftest import FULL_ACCEPTANCE, LEDGER_TIMESTAMP, LedgerWorld
from FishLedger.core.base import HashChainBreak, HeightMismatch, MalformedBlock
from FishLedger.core.enums import ValidationCode
from FishLedger.core.types import Version
from FishLedger.ledger import (
    PUBLIC_NAMESPACE,
    Approval,
    Block,
    BlockHeader,
    ConfigUpdate,
    Envelope,
    KVRead,
    KVWrite,
    Ledger,
    PrivateDigestWrite,
    ReadWriteSet,
    StateStore,
    genesis_policy,
    hash_namespace,
    validate_block,
)
from FishLedger.policy import NetworkPolicy, parse_policy
from FishLedger.storage.memory import MemoryStorage

VALID = ValidationCode.VALID
NS = PUBLIC_NAMESPACE


def write(key, value=b"v"):
    return KVWrite(NS, key, value)


def read(key, version=None):
    return KVRead(NS, key, version)


class TestReadWriteSet:
    def test_duplicate_reads_rejected(self):
        with pytest.raises(ValueError, match="reads"):
            ReadWriteSet(reads=(read("k"), read("k")))

    def test_duplicate_writes_rejected(self):
        with pytest.raises(ValueError, match="public_writes"):
            ReadWriteSet(public_writes=(write("k"), write("k", b"x")))

    def test_same_key_in_different_namespaces(self):
        rwset = ReadWriteSet(public_writes=(KVWrite("a", "k", b"1"), KVWrite("b", "k", b"2")))
        assert len(rwset.public_writes) == 2

    def test_hash_depends_on_content(self):
        assert ReadWriteSet(public_writes=(write("k"),)).hash != ReadWriteSet().hash

    def test_hash_namespace(self):
        assert hash_namespace("collectionFishFarmPrivateDetails") == "collectionFishFarmPrivateDetails$hash"


class TestVersion:
    def test_lexicographic_order(self):
        assert Version(1, 9) < Version(2, 0) < Version(2, 1)

    def test_wire(self):
        assert Version.from_wire(None) is None
        assert Version.from_wire(Version(3, 4).to_wire()) == Version(3, 4)


class TestStateStore:
    def test_unknown_key_is_absent(self):
        assert StateStore().get_state(NS, "missing") is None

    def test_put_then_delete(self):
        state = StateStore()
        state.put(NS, "k", b"v", Version(1, 0))
        assert state.get_state(NS, "k") == (b"v", Version(1, 0))
        state.delete(NS, "k")
        assert state.get_state(NS, "k") is None

    def test_range_scan_half_open(self):
        state = StateStore()
        for key in ["b", "a", "d", "c"]:
            state.put(NS, key, key.encode(), Version(1, 0))
        assert [k for k, _ in state.range_scan(NS, "b", "d")] == ["b", "c"]
        assert [k for k, _ in state.range_scan(NS)] == ["a", "b", "c", "d"]

    def test_range_scan_sees_new_keys(self):
        state = StateStore()
        state.put(NS, "b", b"1", Version(1, 0))
        list(state.range_scan(NS))
        state.put(NS, "a", b"2", Version(1, 1))
        assert [k for k, _ in state.range_scan(NS)] == ["a", "b"]

    def test_state_hash_tracks_content(self):
        a, b = StateStore(), StateStore()
        a.put(NS, "k", b"v", Version(1, 0))
        b.put(NS, "k", b"v", Version(1, 0))
        assert a.state_hash() == b.state_hash()
        b.put(NS, "k", b"v", Version(2, 0))
        assert a.state_hash() != b.state_hash()

    def test_lookup_at_scale(self):
        state = StateStore()
        for i in range(1, 100_001):
            state.put(NS, f"record-{i:06d}", str(i).encode(), Version(i, 0))
        assert state.get_state(NS, "record-000001") == (b"1", Version(1, 0))
        assert state.get_state(NS, "record-100000") == (b"100000", Version(100000, 0))
        assert len(state) == 100_000


class TestValidateBlock:
    def test_independent_keys_all_valid(self, ledger_world):
        ledger = ledger_world.ledger()
        envs = [ledger_world.envelope(writes=[write(f"k{i}")]) for i in range(5)]
        assert ledger_world.commit(ledger, envs) == [VALID] * 5

    def test_in_block_write_shadows_later_read(self, ledger_world):
        ledger = ledger_world.ledger()
        ledger_world.commit(ledger, [ledger_world.envelope(writes=[write("K")])])
        v = Version(1, 0)
        tx1 = ledger_world.envelope(reads=[read("K", v)], writes=[write("K", b"1")])
        tx2 = ledger_world.envelope(reads=[read("K", v)], writes=[write("K", b"2")])
        assert ledger_world.commit(ledger, [tx1, tx2]) == [VALID, ValidationCode.MVCC_CONFLICT]
        assert ledger.get_state(NS, "K") == (b"1", Version(2, 0))

    def test_absent_read_conflicts_when_key_exists(self, ledger_world):
        ledger = ledger_world.ledger()
        ledger_world.commit(ledger, [ledger_world.envelope(writes=[write("K")])])
        late = ledger_world.envelope(reads=[read("K", None)], writes=[write("K", b"x")])
        assert ledger_world.commit(ledger, [late]) == [ValidationCode.MVCC_CONFLICT]

    def test_one_org_under_and_of_two(self, ledger_world):
        ledger = ledger_world.ledger()
        env = ledger_world.envelope(writes=[write("k")], endorsers=[ledger_world.fishfarm_peer])
        assert ledger_world.commit(ledger, [env]) == [ValidationCode.ENDORSEMENT_FAILURE]
        assert ledger.get_state(NS, "k") is None

    def test_endorsement_over_other_rwset_is_ignored(self, ledger_world):
        ledger = ledger_world.ledger()
        honest = ledger_world.envelope(writes=[write("k", b"honest")])
        forged = Envelope.assemble(
            ledger_world.client,
            honest.proposal,
            ReadWriteSet(public_writes=(write("k", b"forged"),)),
            honest.endorsements,
        )
        assert ledger_world.commit(ledger, [forged]) == [ValidationCode.ENDORSEMENT_FAILURE]

    def test_bad_creator_signature(self, ledger_world):
        ledger = ledger_world.ledger()
        env = ledger_world.envelope(writes=[write("k")])
        broken = replace(env, creator_signature=bytes(64))
        assert ledger_world.commit(ledger, [broken]) == [ValidationCode.BAD_SIGNATURE]

    def test_revoked_creator(self):
        world = LedgerWorld(seed=9)
        ledger = world.ledger()
        env = world.envelope(writes=[write("k")])
        world.registry.update_crl(world.fishfarm.revoke_certificate(world.client.certificate.serial))
        assert world.commit(ledger, [env]) == [ValidationCode.BAD_SIGNATURE]

    def test_duplicate_txid_in_block_and_across_blocks(self, ledger_world):
        ledger = ledger_world.ledger()
        env = ledger_world.envelope(writes=[write("k")])
        assert ledger_world.commit(ledger, [env, env]) == [VALID, ValidationCode.DUPLICATE_TXID]
        assert ledger_world.commit(ledger, [env]) == [ValidationCode.DUPLICATE_TXID]

    def test_unknown_collection_fails_endorsement(self, ledger_world):
        ledger = ledger_world.ledger()
        env = ledger_world.envelope(private_writes=[PrivateDigestWrite("nope", "k", bytes(32))])
        assert ledger_world.commit(ledger, [env]) == [ValidationCode.ENDORSEMENT_FAILURE]

    def test_private_digest_lands_in_hash_namespace(self, ledger_world):
        ledger = ledger_world.ledger()
        digest = b"\x11" * 32
        env = ledger_world.envelope(
            private_writes=[PrivateDigestWrite("collectionFishFarmPrivateDetails", "k", digest)]
        )
        assert ledger_world.commit(ledger, [env]) == [VALID]
        assert ledger.get_state(hash_namespace("collectionFishFarmPrivateDetails"), "k") == (
            digest,
            Version(1, 0),
        )

    def test_inconsistent_data_hash(self, ledger_world):
        ledger = ledger_world.ledger()
        env = ledger_world.envelope(writes=[write("k")])
        block = Block(
            header=BlockHeader(1, ledger.get_chain_info().current_hash, bytes(32)),
            transactions=(env,),
        )
        with pytest.raises(MalformedBlock):
            validate_block(block, ledger.policy, ledger_world.registry, ledger.state)


class TestConfigTransactions:
    def _update(self, world, ledger, version, approvers):
        proposed = NetworkPolicy(
            channel_policy=ledger.policy.channel_policy,
            chaincode_policy=parse_policy("Sig('fishfarm.org.peer')"),
            collections=ledger.policy.collections,
            version=version,
        )
        update = ConfigUpdate(proposed, tuple(Approval.create(a, proposed) for a in approvers))
        return Envelope.config(world.fishfarm_admin, update, f"cfg-{version}-{len(approvers)}".encode(), LEDGER_TIMESTAMP)

    def test_approved_update_changes_policy(self, ledger_world):
        ledger = ledger_world.ledger()
        env = self._update(ledger_world, ledger, 1, [ledger_world.fishfarm_admin, ledger_world.sensors_admin])
        assert ledger_world.commit(ledger, [env]) == [VALID]
        assert ledger.policy.version == 1
        single = ledger_world.envelope(writes=[write("k")], endorsers=[ledger_world.fishfarm_peer])
        assert ledger_world.commit(ledger, [single]) == [VALID]

    def test_missing_approval(self, ledger_world):
        ledger = ledger_world.ledger()
        env = self._update(ledger_world, ledger, 1, [ledger_world.fishfarm_admin])
        assert ledger_world.commit(ledger, [env]) == [ValidationCode.ENDORSEMENT_FAILURE]
        assert ledger.policy.version == 0

    def test_stale_version(self, ledger_world):
        ledger = ledger_world.ledger()
        env = self._update(ledger_world, ledger, 2, [ledger_world.fishfarm_admin, ledger_world.sensors_admin])
        assert ledger_world.commit(ledger, [env]) == [ValidationCode.MVCC_CONFLICT]

    def test_genesis_carries_policy(self, ledger_world):
        assert genesis_policy(ledger_world.genesis) == ledger_world.policy


class TestCommit:
    def test_genesis_then_one_write(self, ledger_world):
        ledger = ledger_world.ledger()
        _, receipt = ledger.process_block(
            ledger_world.next_block(ledger, [ledger_world.envelope(writes=[write("k", b"doc")])]),
            ledger_world.registry,
        )
        assert receipt.height == 2 and receipt.n_valid == 1 and receipt.n_invalid == 0
        assert ledger.get_state(NS, "k") == (b"doc", Version(1, 0))
        assert ledger.verify() is True

    def test_write_then_delete(self, ledger_world):
        ledger = ledger_world.ledger()
        ledger_world.commit(ledger, [ledger_world.envelope(writes=[write("k")])])
        ledger_world.commit(ledger, [ledger_world.envelope(writes=[KVWrite(NS, "k", None)])])
        assert ledger.get_state(NS, "k") is None

    def test_invalid_transactions_are_stored(self, ledger_world):
        ledger = ledger_world.ledger()
        env = ledger_world.envelope(writes=[write("k")], endorsers=[])
        ledger_world.commit(ledger, [env])
        assert ledger.get_block(1).transactions == (env,)
        assert ledger.tx_status(env.tx_id) == (1, ValidationCode.ENDORSEMENT_FAILURE)

    def test_wrong_height(self, ledger_world):
        ledger = ledger_world.ledger()
        block = Block.create(5, ledger.get_chain_info().current_hash, [])
        with pytest.raises(HeightMismatch):
            ledger.process_block(block, ledger_world.registry)

    def test_wrong_prev_hash(self, ledger_world):
        ledger = ledger_world.ledger()
        block = Block.create(1, b"\x01" * 32, [ledger_world.envelope(writes=[write("k")])])
        with pytest.raises(HashChainBreak):
            ledger.process_block(block, ledger_world.registry)
        assert ledger.height == 1

    def test_reopen_replays_state(self, ledger_world):
        storage = MemoryStorage()
        ledger = ledger_world.ledger(storage)
        ledger_world.commit(ledger, [ledger_world.envelope(writes=[write("a"), write("b")])])
        ledger_world.commit(ledger, [ledger_world.envelope(writes=[KVWrite(NS, "a", None)])])
        reopened = Ledger(storage, "reopened")
        assert reopened.open() is True
        assert reopened.state.state_hash() == ledger.state.state_hash()
        assert reopened.height == 3

    def test_crash_between_append_and_apply(self, ledger_world):
        storage = MemoryStorage()
        ledger = ledger_world.ledger(storage)
        block = ledger_world.next_block(ledger, [ledger_world.envelope(writes=[write("k")])])
        codes = ledger.validate(block, ledger_world.registry)
        # Append only; the state update never happens
        ledger.chain.append(block.with_codes(codes))
        recovered = Ledger(storage, "recovered")
        recovered.open()
        assert recovered.height == 2
        assert recovered.state.height == recovered.height
        assert recovered.get_state(NS, "k") == (b"v", Version(1, 0))

    def test_two_ledgers_same_blocks_same_hashes(self, ledger_world):
        first, second = ledger_world.ledger(), ledger_world.ledger()
        envs = [ledger_world.envelope(writes=[write(f"k{i}", str(i).encode())]) for i in range(3)]
        block = ledger_world.next_block(first, envs)
        first.process_block(block, ledger_world.registry)
        second.process_block(block, ledger_world.registry)
        assert first.state.state_hash() == second.state.state_hash()
        assert first.get_chain_info() == second.get_chain_info()


def serial_execute(blocks):
    """Apply transactions one at a time, each only if its reads are current."""
    state = {}
    codes = []
    for block_num, txs in blocks:
        for tx_index, (reads, writes) in enumerate(txs):
            ok = all(state.get(k, (None, None))[1] == v for k, v in reads)
            codes.append(VALID if ok else ValidationCode.MVCC_CONFLICT)
            if not ok:
                continue
            for k, value in writes:
                if value is None:
                    state.pop(k, None)
                else:
                    state[k] = (value, Version(block_num, tx_index))
    return state, codes


def random_workload(world, rng, trial):
    """Up to 50 transactions over at most 8 keys, simulated against stale snapshots."""
    ledger = world.ledger(name=f"oracle-{trial}")
    keys = [f"k{i}" for i in range(rng.randint(1, 8))]
    remaining = rng.randint(1, 50)
    snapshots = [{}]
    plan, actual = [], []
    while remaining:
        size = min(remaining, rng.randint(1, 8))
        remaining -= size
        envs, txs = [], []
        for _ in range(size):
            snapshot = rng.choice(snapshots[-3:])
            reads = [(k, snapshot.get(k)) for k in rng.sample(keys, rng.randint(0, len(keys)))]
            writes = [
                (k, None if rng.random() < 0.2 else f"{trial}-{rng.random()}".encode())
                for k in rng.sample(keys, rng.randint(1, len(keys)))
            ]
            txs.append((reads, writes))
            envs.append(
                world.envelope(
                    reads=[read(k, v) for k, v in reads],
                    writes=[KVWrite(NS, k, value) for k, value in writes],
                )
            )
        plan.append((ledger.height, txs))
        actual.extend(world.commit(ledger, envs))
        snapshots.append({k: ledger.state.get_version(NS, k) for k in keys if ledger.state.get_version(NS, k)})
    return ledger, plan, actual


class TestSerialOracle:
    def test_block_validation_matches_serial_execution(self, ledger_world):
        rng = random.Random(99)
        trials = 500 if FULL_ACCEPTANCE else 25
        for trial in range(trials):
            ledger, plan, actual = random_workload(ledger_world, rng, trial)
            expected_state, expected_codes = serial_execute(plan)
            assert actual == expected_codes
            committed = {k: value for k, value in ledger.state.range_scan(NS)}
            assert committed == expected_state
