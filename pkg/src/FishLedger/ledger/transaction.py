"""Proposal, endorsement and envelope: the transaction as it flows.

A client signs a Proposal, endorsers sign (proposal_hash, rwset_hash), and the
client wraps everything into an Envelope it signs again for ordering. The
transient map travels with the proposal to endorsers only and never enters
the envelope.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Dict, Optional, Tuple

from ..core.codec import digest_of, encode, sha256
from ..core.enums import EnvelopeKind
from ..identity.certificates import Certificate, SigningIdentity, verify_signature
from ..policy.network import NetworkPolicy
from .rwset import ReadWriteSet

CONFIG_CHAINCODE = "_config"


def compute_tx_id(creator: Certificate, nonce: bytes) -> str:
    return sha256(encode(creator.to_wire()) + bytes(nonce)).hex()


@dataclass(frozen=True)
class Proposal:
    tx_id: str
    chaincode: str
    function: str
    args: Tuple[str, ...]
    creator: Certificate
    nonce: bytes
    timestamp: int
    transient: Dict[str, bytes] = field(default_factory=dict, compare=False, repr=False)
    signature: bytes = b""

    @classmethod
    def create(
        cls,
        identity: SigningIdentity,
        chaincode: str,
        function: str,
        args,
        nonce: bytes,
        timestamp: int,
        transient: Optional[Dict[str, bytes]] = None,
    ) -> "Proposal":
        unsigned = cls(
            tx_id=compute_tx_id(identity.certificate, nonce),
            chaincode=chaincode,
            function=function,
            args=tuple(str(a) for a in args),
            creator=identity.certificate,
            nonce=bytes(nonce),
            timestamp=int(timestamp),
            transient=dict(transient or {}),
        )
        return replace(unsigned, signature=identity.sign(unsigned.hash))

    def payload_wire(self) -> list:
        """Signed fields; the transient map is excluded."""
        return [
            self.tx_id,
            self.chaincode,
            self.function,
            list(self.args),
            self.creator.to_wire(),
            self.nonce,
            self.timestamp,
        ]

    @cached_property
    def hash(self) -> bytes:
        return digest_of(self.payload_wire())

    def tx_id_matches(self) -> bool:
        return self.tx_id == compute_tx_id(self.creator, self.nonce)

    def verify_signature(self) -> bool:
        return verify_signature(self.creator.public_key, self.signature, self.hash)

    def without_transient(self) -> "Proposal":
        return replace(self, transient={})

    def with_transient(self, transient: Dict[str, bytes]) -> "Proposal":
        return replace(self, transient=dict(transient))

    def to_wire(self, include_transient: bool = False) -> list:
        wire = self.payload_wire() + [self.signature]
        if include_transient:
            wire.append(dict(self.transient))
        return wire

    @classmethod
    def from_wire(cls, wire: list) -> "Proposal":
        return cls(
            tx_id=wire[0],
            chaincode=wire[1],
            function=wire[2],
            args=tuple(wire[3]),
            creator=Certificate.from_wire(wire[4]),
            nonce=bytes(wire[5]),
            timestamp=int(wire[6]),
            signature=bytes(wire[7]),
            transient={k: bytes(v) for k, v in wire[8].items()} if len(wire) > 8 else {},
        )


def endorsement_message(proposal_hash: bytes, rwset_hash: bytes) -> bytes:
    return bytes(proposal_hash) + bytes(rwset_hash)


@dataclass(frozen=True)
class Endorsement:
    proposal_hash: bytes
    rwset_hash: bytes
    endorser: Certificate
    signature: bytes

    @classmethod
    def create(
        cls, identity: SigningIdentity, proposal_hash: bytes, rwset_hash: bytes
    ) -> "Endorsement":
        return cls(
            proposal_hash=proposal_hash,
            rwset_hash=rwset_hash,
            endorser=identity.certificate,
            signature=identity.sign(endorsement_message(proposal_hash, rwset_hash)),
        )

    def verify(self) -> bool:
        return verify_signature(
            self.endorser.public_key,
            self.signature,
            endorsement_message(self.proposal_hash, self.rwset_hash),
        )

    def to_wire(self) -> list:
        return [self.proposal_hash, self.rwset_hash, self.endorser.to_wire(), self.signature]

    @classmethod
    def from_wire(cls, wire: list) -> "Endorsement":
        return cls(bytes(wire[0]), bytes(wire[1]), Certificate.from_wire(wire[2]), bytes(wire[3]))


@dataclass(frozen=True)
class Approval:
    """An admin's signature over a proposed network policy."""

    approver: Certificate
    signature: bytes

    @classmethod
    def create(cls, identity: SigningIdentity, proposed: NetworkPolicy) -> "Approval":
        return cls(identity.certificate, identity.sign(digest_of(proposed.to_wire())))

    def verify(self, proposed: NetworkPolicy) -> bool:
        return verify_signature(
            self.approver.public_key, self.signature, digest_of(proposed.to_wire())
        )

    def to_wire(self) -> list:
        return [self.approver.to_wire(), self.signature]

    @classmethod
    def from_wire(cls, wire: list) -> "Approval":
        return cls(Certificate.from_wire(wire[0]), bytes(wire[1]))


@dataclass(frozen=True)
class ConfigUpdate:
    proposed: NetworkPolicy
    approvals: Tuple[Approval, ...] = ()

    def to_wire(self) -> list:
        return [self.proposed.to_wire(), [a.to_wire() for a in self.approvals]]

    @classmethod
    def from_wire(cls, wire: list) -> "ConfigUpdate":
        return cls(
            NetworkPolicy.from_wire(wire[0]),
            tuple(Approval.from_wire(a) for a in wire[1]),
        )


@dataclass(frozen=True)
class Envelope:
    kind: EnvelopeKind
    proposal: Proposal
    rwset: ReadWriteSet = field(default_factory=ReadWriteSet)
    endorsements: Tuple[Endorsement, ...] = ()
    config_update: Optional[ConfigUpdate] = None
    creator_signature: bytes = b""

    @property
    def tx_id(self) -> str:
        return self.proposal.tx_id

    @property
    def creator(self) -> Certificate:
        return self.proposal.creator

    @property
    def is_config(self) -> bool:
        return self.kind is EnvelopeKind.CONFIG

    def payload_wire(self) -> list:
        return [
            self.kind.value,
            self.proposal.to_wire(),
            self.rwset.to_wire(),
            [e.to_wire() for e in self.endorsements],
            None if self.config_update is None else self.config_update.to_wire(),
        ]

    @cached_property
    def payload_hash(self) -> bytes:
        return digest_of(self.payload_wire())

    def verify_creator_signature(self) -> bool:
        return verify_signature(self.creator.public_key, self.creator_signature, self.payload_hash)

    def to_wire(self) -> list:
        return self.payload_wire() + [self.creator_signature]

    @cached_property
    def encoded(self) -> bytes:
        return encode(self.to_wire())

    @classmethod
    def from_wire(cls, wire: list) -> "Envelope":
        return cls(
            kind=EnvelopeKind(wire[0]),
            proposal=Proposal.from_wire(wire[1]),
            rwset=ReadWriteSet.from_wire(wire[2]),
            endorsements=tuple(Endorsement.from_wire(e) for e in wire[3]),
            config_update=None if wire[4] is None else ConfigUpdate.from_wire(wire[4]),
            creator_signature=bytes(wire[5]),
        )

    @classmethod
    def assemble(
        cls,
        identity: SigningIdentity,
        proposal: Proposal,
        rwset: ReadWriteSet,
        endorsements,
    ) -> "Envelope":
        unsigned = cls(
            kind=EnvelopeKind.ENDORSER,
            proposal=proposal.without_transient(),
            rwset=rwset,
            endorsements=tuple(endorsements),
        )
        return replace(unsigned, creator_signature=identity.sign(unsigned.payload_hash))

    @classmethod
    def config(
        cls,
        identity: SigningIdentity,
        update: ConfigUpdate,
        nonce: bytes,
        timestamp: int,
    ) -> "Envelope":
        proposal = Proposal.create(
            identity, CONFIG_CHAINCODE, "UpdatePolicy", [str(update.proposed.version)], nonce, timestamp
        )
        unsigned = cls(kind=EnvelopeKind.CONFIG, proposal=proposal, config_update=update)
        return replace(unsigned, creator_signature=identity.sign(unsigned.payload_hash))
