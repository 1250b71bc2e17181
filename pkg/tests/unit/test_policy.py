# tests/unit/test_policy.py

import itertools
import random

import pytest

from FishLedger.core.base import (
    ArityError,
    InsufficientApprovals,
    PolicySyntaxError,
    UnknownCollection,
    VersionMismatch,
)
from FishLedger.core.enums import Role
from FishLedger.identity import ValidatedIdentity
from FishLedger.policy import (
    NetworkPolicy,
    NOutOf,
    SignaturePolicy,
    all_of,
    any_of,
    evaluate_policy,
    majority,
    n_out_of,
    parse_policy,
    policy_depth,
    print_policy,
    signature,
    update_policy,
)
from FishLedger.policy.expressions import MAX_DEPTH
from FishLedger.privatedata import CollectionConfig

ORGS = ("a.org", "b.org", "c.org", "d.org")


def peer(org, subject=None):
    return ValidatedIdentity(subject=subject or f"peer0.{org}", org_id=org, role=Role.PEER)


def admin(org):
    return ValidatedIdentity(subject=f"Admin@{org}", org_id=org, role=Role.ADMIN)


class TestParsePolicy:
    def test_and_of_two_orgs(self):
        policy = parse_policy("And(Sig('fishfarm.org.peer'), Sig('sensorsprovider.org.peer'))")
        assert policy == NOutOf(
            2,
            (
                SignaturePolicy("fishfarm.org", Role.PEER),
                SignaturePolicy("sensorsprovider.org", Role.PEER),
            ),
        )

    def test_majority_of_three(self):
        policy = parse_policy("Majority(Sig('a.peer'), Sig('b.peer'), Sig('c.peer'))")
        assert isinstance(policy, NOutOf)
        assert policy.n == 2
        assert len(policy.children) == 3

    def test_or_is_one_out_of(self):
        assert parse_policy("Or(Sig('a.peer'), Sig('b.client'))").n == 1

    def test_outof_with_nested_children(self):
        policy = parse_policy("OutOf(1, And(Sig('a.peer'), Sig('b.peer')), Sig('c.admin'))")
        assert policy.children[1] == SignaturePolicy("c", Role.ADMIN)
        assert policy_depth(policy) == 3

    def test_double_quotes_and_whitespace(self):
        assert parse_policy('  Sig( "a.org.peer" ) ') == SignaturePolicy("a.org", Role.PEER)

    @pytest.mark.parametrize(
        "text",
        ["OutOf(3, Sig('a.peer'))", "OutOf(0, Sig('a.peer'))", "OutOf(2, Sig('a.peer'))"],
    )
    def test_arity_errors(self, text):
        with pytest.raises(ArityError):
            parse_policy(text)

    @pytest.mark.parametrize(
        "text, position",
        [
            ("And(Sig('a.peer') Sig('b.peer'))", 18),
            ("Sig('a.peer'", 12),
            ("Or(#)", 3),
            ("Nope(Sig('a.peer'))", 0),
            ("Sig('a.peer') extra", 14),
            ("OutOf(Sig('a.peer'))", 6),
        ],
    )
    def test_syntax_error_positions(self, text, position):
        with pytest.raises(PolicySyntaxError) as excinfo:
            parse_policy(text)
        assert excinfo.value.position == position

    @pytest.mark.parametrize("literal", ["'peer'", "'a.boss'"])
    def test_bad_principal(self, literal):
        with pytest.raises(PolicySyntaxError):
            parse_policy(f"Sig({literal})")

    def test_depth_limit(self):
        inner = "Sig('a.peer')"
        ok = "And(" * (MAX_DEPTH - 1) + inner + ")" * (MAX_DEPTH - 1)
        assert policy_depth(parse_policy(ok)) == MAX_DEPTH
        too_deep = "And(" * MAX_DEPTH + inner + ")" * MAX_DEPTH
        with pytest.raises(PolicySyntaxError, match="deeper"):
            parse_policy(too_deep)


def random_policy(rng, depth):
    if depth == 1 or rng.random() < 0.3:
        return SignaturePolicy(rng.choice(ORGS), Role.PEER)
    children = [random_policy(rng, depth - 1) for _ in range(rng.randint(1, 4))]
    return n_out_of(rng.randint(1, len(children)), children)


def brute_force(policy, orgs):
    """Reference evaluation: count satisfied children directly."""
    if isinstance(policy, SignaturePolicy):
        return policy.org_id in orgs
    return sum(brute_force(c, orgs) for c in policy.children) >= policy.n


def subsets(items):
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


class TestEvaluatePolicy:
    def test_majority_of_two_needs_both(self):
        policy = majority(signature("a.org.peer"), signature("b.org.peer"))
        assert not evaluate_policy(policy, {peer("a.org")})
        assert evaluate_policy(policy, {peer("a.org"), peer("b.org")})

    def test_and_satisfied(self):
        policy = all_of(signature("a.org.peer"), signature("b.org.peer"))
        assert evaluate_policy(policy, [peer("a.org"), peer("b.org")])

    def test_role_must_match(self):
        policy = signature("a.org.peer")
        assert not evaluate_policy(policy, [admin("a.org")])

    def test_one_identity_satisfies_repeated_leaves(self):
        policy = all_of(signature("a.org.peer"), signature("a.org.peer"))
        assert evaluate_policy(policy, [peer("a.org")])

    def test_duplicates_count_once(self):
        policy = n_out_of(2, [signature("a.org.peer"), signature("b.org.peer")])
        twice = [peer("a.org"), peer("a.org")]
        assert evaluate_policy(policy, twice) == evaluate_policy(policy, [peer("a.org")]) is False

    def test_empty_endorsers(self):
        assert not evaluate_policy(any_of(signature("a.org.peer")), [])

    def test_matches_brute_force_over_all_subsets(self):
        rng = random.Random(11)
        for _ in range(200):
            policy = random_policy(rng, 3)
            assert policy_depth(policy) <= 3
            for orgs in subsets(ORGS):
                endorsers = {peer(o) for o in orgs}
                assert evaluate_policy(policy, endorsers) == brute_force(policy, set(orgs))

    def test_monotone(self):
        rng = random.Random(12)
        for _ in range(100):
            policy = random_policy(rng, 3)
            for orgs in subsets(ORGS):
                if evaluate_policy(policy, {peer(o) for o in orgs}):
                    for extra in ORGS:
                        assert evaluate_policy(policy, {peer(o) for o in orgs + (extra,)})

    def test_print_parse_round_trip(self):
        rng = random.Random(13)
        for _ in range(200):
            policy = random_policy(rng, 4)
            assert parse_policy(print_policy(policy)) == policy

    def test_print_uses_outof_form(self):
        policy = parse_policy("And(Sig('a.org.peer'), Sig('b.org.peer'))")
        assert print_policy(policy) == "OutOf(2, Sig('a.org.peer'), Sig('b.org.peer'))"


@pytest.fixture
def current_policy():
    both = "And(Sig('fishfarm.org.admin'), Sig('sensorsprovider.org.admin'))"
    return NetworkPolicy.from_config(
        {
            "channel_policy": both,
            "chaincode_policy": "And(Sig('fishfarm.org.peer'), Sig('sensorsprovider.org.peer'))",
            "collections": [
                {"name": "collectionFishFarm", "member_orgs": ["fishfarm.org", "sensorsprovider.org"]},
                {"name": "collectionFishFarmPrivateDetails", "member_orgs": ["fishfarm.org"]},
            ],
        },
        version=1,
    )


class TestNetworkPolicy:
    def test_collection_lookup(self, current_policy):
        private = current_policy.collection("collectionFishFarmPrivateDetails")
        assert private.member_orgs == frozenset({"fishfarm.org"})
        with pytest.raises(UnknownCollection):
            current_policy.collection("nope")

    def test_duplicate_collections_rejected(self, current_policy):
        c = CollectionConfig("x", frozenset({"a.org"}))
        with pytest.raises(ValueError):
            NetworkPolicy(current_policy.channel_policy, current_policy.chaincode_policy, (c, c))

    def test_config_round_trip(self, current_policy):
        config = current_policy.to_config()
        assert NetworkPolicy.from_config(config, version=config["version"]) == current_policy

    def test_wire_round_trip(self, current_policy):
        assert NetworkPolicy.from_wire(current_policy.to_wire()) == current_policy


class TestUpdatePolicy:
    def _proposed(self, current, version):
        return NetworkPolicy(
            channel_policy=current.channel_policy,
            chaincode_policy=parse_policy("Sig('fishfarm.org.peer')"),
            collections=current.collections,
            version=version,
        )

    def test_both_orgs_approve(self, current_policy):
        proposed = self._proposed(current_policy, 2)
        result = update_policy(
            current_policy, proposed, {admin("fishfarm.org"), admin("sensorsprovider.org")}
        )
        assert result is proposed

    def test_one_org_is_insufficient(self, current_policy):
        with pytest.raises(InsufficientApprovals):
            update_policy(current_policy, self._proposed(current_policy, 2), {admin("fishfarm.org")})

    @pytest.mark.parametrize("version", [1, 3, 0])
    def test_version_must_advance_by_one(self, current_policy, version):
        approvals = {admin("fishfarm.org"), admin("sensorsprovider.org")}
        with pytest.raises(VersionMismatch):
            update_policy(current_policy, self._proposed(current_policy, version), approvals)
