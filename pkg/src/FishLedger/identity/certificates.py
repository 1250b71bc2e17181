"""Certificate authority, certificates and revocation lists."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List, Optional

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from ..core.base import UnknownSerial
from ..core.codec import encode, seeded_bytes
from ..core.enums import Role
from ..utils.logging import get_logger

DEFAULT_NOT_BEFORE = 1_600_000_000
DEFAULT_VALIDITY_SECONDS = 10 * 365 * 24 * 3600

logger = get_logger("identity")


def _raw_public_key(private_key: Ed25519PrivateKey) -> bytes:
    return private_key.public_key().public_bytes(
        encoding=serialization.Encoding.Raw,
        format=serialization.PublicFormat.Raw,
    )


@lru_cache(maxsize=4096)
def _load_public_key(public_key: bytes) -> Optional[Ed25519PublicKey]:
    try:
        return Ed25519PublicKey.from_public_bytes(public_key)
    except Exception:
        return None


def verify_signature(public_key: bytes, signature: bytes, message: bytes) -> bool:
    """Ed25519 verification that never raises."""
    key = _load_public_key(bytes(public_key))
    if key is None:
        return False
    try:
        key.verify(bytes(signature), message)
        return True
    except (InvalidSignature, ValueError):
        return False


@dataclass(frozen=True)
class Certificate:
    """X.509-like identity document binding a subject to an organization."""

    serial: int
    subject: str
    org_id: str
    role: Role
    public_key: bytes
    not_before: int
    not_after: int
    issuer_id: str
    issuer_signature: bytes = b""

    def tbs_wire(self) -> list:
        """Signed fields in declaration order."""
        return [
            self.serial,
            self.subject,
            self.org_id,
            self.role.value,
            self.public_key,
            self.not_before,
            self.not_after,
            self.issuer_id,
        ]

    def tbs_bytes(self) -> bytes:
        return encode(self.tbs_wire())

    def to_wire(self) -> list:
        return self.tbs_wire() + [self.issuer_signature]

    @classmethod
    def from_wire(cls, wire: list) -> "Certificate":
        return cls(
            serial=int(wire[0]),
            subject=str(wire[1]),
            org_id=str(wire[2]),
            role=Role(wire[3]),
            public_key=bytes(wire[4]),
            not_before=int(wire[5]),
            not_after=int(wire[6]),
            issuer_id=str(wire[7]),
            issuer_signature=bytes(wire[8]),
        )


@dataclass
class SigningIdentity:
    """A certificate together with the private key it certifies."""

    certificate: Certificate
    private_key: Ed25519PrivateKey = field(repr=False)

    @property
    def subject(self) -> str:
        return self.certificate.subject

    @property
    def org_id(self) -> str:
        return self.certificate.org_id

    def sign(self, message: bytes) -> bytes:
        return self.private_key.sign(message)


@dataclass(frozen=True)
class RevocationList:
    issuer_id: str
    revoked_serials: FrozenSet[int] = frozenset()
    version: int = 0
    journal: tuple = ()

    def is_revoked(self, serial: int) -> bool:
        return serial in self.revoked_serials

    def with_revoked(self, serial: int) -> "RevocationList":
        # Re-revoking leaves the set unchanged but still bumps the version
        return RevocationList(
            issuer_id=self.issuer_id,
            revoked_serials=self.revoked_serials | {serial},
            version=self.version + 1,
            journal=self.journal + (serial,),
        )

    def export_lines(self) -> List[str]:
        """Ordered ``issuer_id serial`` pairs, one per revocation."""
        return [f"{self.issuer_id} {serial}" for serial in self.journal]

    @classmethod
    def from_lines(cls, issuer_id: str, lines: Iterable[str]) -> "RevocationList":
        crl = cls(issuer_id=issuer_id)
        for line in lines:
            line = line.strip()
            if not line:
                continue
            issuer, serial = line.split()
            if issuer == issuer_id:
                crl = crl.with_revoked(int(serial))
        return crl


class CertificateAuthority:
    """Per-organization CA with a deterministic signing key.

    Args:
        org_id: MSP id of the organization
        rng_seed: Seed from which the root key and subject keys derive
        not_before: Start of validity of issued certificates (epoch seconds)
        validity_seconds: Lifetime of issued certificates
    """

    def __init__(
        self,
        org_id: str,
        rng_seed: int,
        not_before: int = DEFAULT_NOT_BEFORE,
        validity_seconds: int = DEFAULT_VALIDITY_SECONDS,
    ):
        if not org_id:
            raise ValueError("org_id must be non-empty")
        if rng_seed < 0:
            raise ValueError(f"rng_seed must be non-negative, got {rng_seed}")
        self.org_id = org_id
        self.rng_seed = rng_seed
        self.not_before = not_before
        self.not_after = not_before + validity_seconds
        self._signing_key = Ed25519PrivateKey.from_private_bytes(
            seeded_bytes("ca", org_id, rng_seed)
        )
        self.public_key = _raw_public_key(self._signing_key)
        self._next_serial = 1
        self._issued: Dict[int, Certificate] = {}
        self.crl = RevocationList(issuer_id=org_id)
        self.root_certificate = self._sign(
            Certificate(
                serial=0,
                subject=f"ca.{org_id}",
                org_id=org_id,
                role=Role.ADMIN,
                public_key=self.public_key,
                not_before=self.not_before,
                not_after=self.not_after,
                issuer_id=org_id,
            )
        )

    def _sign(self, unsigned: Certificate) -> Certificate:
        signature = self._signing_key.sign(unsigned.tbs_bytes())
        return replace(unsigned, issuer_signature=signature)

    def _subject_key(self, subject: str, role: Role, serial: int) -> Ed25519PrivateKey:
        return Ed25519PrivateKey.from_private_bytes(
            seeded_bytes("subject", self.org_id, self.rng_seed, subject, role.value, serial)
        )

    @property
    def issued(self) -> Dict[int, Certificate]:
        return dict(self._issued)

    def issue_certificate(
        self, subject: str, role: Role, public_key: Optional[bytes] = None
    ) -> Certificate:
        """Issue a certificate with the next serial.

        When no public key is supplied one is derived for the subject.
        """
        serial = self._next_serial
        if public_key is None:
            public_key = _raw_public_key(self._subject_key(subject, role, serial))
        certificate = self._sign(
            Certificate(
                serial=serial,
                subject=subject,
                org_id=self.org_id,
                role=role,
                public_key=bytes(public_key),
                not_before=self.not_before,
                not_after=self.not_after,
                issuer_id=self.org_id,
            )
        )
        self._next_serial += 1
        self._issued[serial] = certificate
        logger.debug(f"{self.org_id} issued serial {serial} to {subject} ({role.value})")
        return certificate

    def enroll(self, subject: str, role: Role) -> SigningIdentity:
        """Generate a subject key pair and certify it."""
        private_key = self._subject_key(subject, role, self._next_serial)
        certificate = self.issue_certificate(
            subject, role, public_key=_raw_public_key(private_key)
        )
        return SigningIdentity(certificate=certificate, private_key=private_key)

    def revoke_certificate(self, serial: int) -> RevocationList:
        if serial not in self._issued:
            raise UnknownSerial(f"{self.org_id} never issued serial {serial}")
        self.crl = self.crl.with_revoked(serial)
        logger.info(f"{self.org_id} revoked serial {serial} (CRL v{self.crl.version})")
        return self.crl

    def restore_crl(self, crl: RevocationList) -> None:
        """Adopt a persisted CRL; versions never move backwards."""
        if crl.issuer_id != self.org_id:
            raise ValueError(f"CRL of {crl.issuer_id} cannot be restored into {self.org_id}")
        if crl.version >= self.crl.version:
            self.crl = crl

    def msp_config(self, admitted_roles: Iterable[Role]):
        from .msp import MspConfig

        return MspConfig(
            org_id=self.org_id,
            root_ca_public_key=self.public_key,
            admitted_roles=frozenset(admitted_roles),
        )


def ca_init(org_id: str, rng_seed: int, **kwargs) -> CertificateAuthority:
    """Create a CA with a fresh signing keypair and empty revocation list."""
    return CertificateAuthority(org_id, rng_seed, **kwargs)


def issue_certificate(ca: CertificateAuthority, subject: str, role: Role) -> Certificate:
    return ca.issue_certificate(subject, role)


def revoke_certificate(ca: CertificateAuthority, serial: int) -> RevocationList:
    return ca.revoke_certificate(serial)
