"""Endorsement policies and network policy updates."""
from .expressions import (
    EndorsementPolicy,
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
)
from .network import NetworkPolicy, update_policy

__all__ = [
    "EndorsementPolicy",
    "NOutOf",
    "SignaturePolicy",
    "all_of",
    "any_of",
    "majority",
    "n_out_of",
    "signature",
    "parse_policy",
    "print_policy",
    "policy_depth",
    "evaluate_policy",
    "NetworkPolicy",
    "update_policy",
]
