"""Membership service: which identities an organization admits."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, Optional, Tuple

from ..core.base import BadSignature, Expired, RoleNotAdmitted, Revoked, UnknownIssuer
from ..core.enums import Role
from ..utils.logging import get_logger
from .certificates import Certificate, RevocationList, verify_signature

logger = get_logger("msp")

VERIFY_CACHE_SIZE = 4096


@lru_cache(maxsize=VERIFY_CACHE_SIZE)
def issuer_signature_valid(root_public_key: bytes, signature: bytes, tbs: bytes) -> bool:
    """Memoized certificate signature check, shared by every registry."""
    return verify_signature(root_public_key, signature, tbs)


@dataclass(frozen=True)
class MspConfig:
    org_id: str
    root_ca_public_key: bytes
    admitted_roles: FrozenSet[Role]

    def to_config(self) -> dict:
        return {
            "org_id": self.org_id,
            "root_public_key": self.root_ca_public_key.hex(),
            "admitted_roles": sorted(r.value for r in self.admitted_roles),
        }


@dataclass(frozen=True)
class ValidatedIdentity:
    subject: str
    org_id: str
    role: Role
    serial: int = 0

    @property
    def principal(self) -> Tuple[str, Role]:
        return (self.org_id, self.role)


def msp_validate(
    cert: Certificate, msp: MspConfig, crl: RevocationList, now: int
) -> ValidatedIdentity:
    """Validate a certificate against one organization's MSP.

    Checks run in a fixed order so the error names the first failure:
    signature, validity window, revocation, role, issuer.

    Raises:
        BadSignature, Expired, Revoked, RoleNotAdmitted, UnknownIssuer
    """
    if not verify_signature(msp.root_ca_public_key, cert.issuer_signature, cert.tbs_bytes()):
        raise BadSignature(f"certificate {cert.subject}#{cert.serial} signature invalid")
    return _check_claims(cert, msp, crl, now)


def _check_claims(
    cert: Certificate, msp: MspConfig, crl: RevocationList, now: int
) -> ValidatedIdentity:
    if not (cert.not_before <= now <= cert.not_after):
        raise Expired(f"certificate {cert.subject}#{cert.serial} outside validity at {now}")
    if crl.issuer_id == cert.issuer_id and crl.is_revoked(cert.serial):
        raise Revoked(f"certificate {cert.subject}#{cert.serial} revoked")
    if cert.role not in msp.admitted_roles:
        raise RoleNotAdmitted(f"role {cert.role.value} not admitted by {msp.org_id}")
    if cert.issuer_id != msp.org_id or cert.org_id != msp.org_id:
        raise UnknownIssuer(f"issuer {cert.issuer_id} is not {msp.org_id}")
    return ValidatedIdentity(
        subject=cert.subject, org_id=cert.org_id, role=cert.role, serial=cert.serial
    )


class MembershipRegistry:
    """All MSPs and CRLs of a network, as seen by one node.

    Certificate signature checks go through a bounded cache shared by all
    registries; the expiry, revocation and role checks run on every call.
    """

    def __init__(
        self,
        msps: Iterable[MspConfig],
        crls: Optional[Iterable[RevocationList]] = None,
    ):
        self.msps: Dict[str, MspConfig] = {m.org_id: m for m in msps}
        self.crls: Dict[str, RevocationList] = {
            org: RevocationList(issuer_id=org) for org in self.msps
        }
        for crl in crls or ():
            self.update_crl(crl)

    @property
    def org_ids(self) -> Tuple[str, ...]:
        return tuple(self.msps)

    def update_crl(self, crl: RevocationList) -> bool:
        """Install a newer CRL; stale versions are ignored."""
        current = self.crls.get(crl.issuer_id)
        if current is not None and crl.version <= current.version:
            return False
        self.crls[crl.issuer_id] = crl
        return True

    def validate(self, cert: Certificate, now: int) -> ValidatedIdentity:
        msp = self.msps.get(cert.issuer_id)
        if msp is None:
            raise UnknownIssuer(f"no MSP registered for issuer {cert.issuer_id}")
        tbs = cert.tbs_bytes()
        if not issuer_signature_valid(
            bytes(msp.root_ca_public_key), bytes(cert.issuer_signature), tbs
        ):
            raise BadSignature(f"certificate {cert.subject}#{cert.serial} signature invalid")
        return _check_claims(cert, msp, self.crls[cert.issuer_id], now)

    def copy(self) -> "MembershipRegistry":
        return MembershipRegistry(self.msps.values(), self.crls.values())
