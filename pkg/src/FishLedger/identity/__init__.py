"""Certificate authorities and membership service providers."""
from .certificates import (
    Certificate,
    CertificateAuthority,
    RevocationList,
    SigningIdentity,
    ca_init,
    issue_certificate,
    revoke_certificate,
    verify_signature,
)
from .msp import MembershipRegistry, MspConfig, ValidatedIdentity, msp_validate

__all__ = [
    "Certificate",
    "CertificateAuthority",
    "RevocationList",
    "SigningIdentity",
    "ca_init",
    "issue_certificate",
    "revoke_certificate",
    "verify_signature",
    "MembershipRegistry",
    "MspConfig",
    "ValidatedIdentity",
    "msp_validate",
]
