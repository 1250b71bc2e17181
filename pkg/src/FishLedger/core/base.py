"""Base storage interface and the exception hierarchy."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Iterator, Optional


class LedgerError(Exception):
    """Base exception for all FishLedger errors."""

    pass


class ConfigError(LedgerError):
    """Invalid network configuration."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class StorageError(LedgerError):
    """Base exception for storage-related errors."""

    pass


class StorageOperationError(StorageError):
    """Storage operation failure."""

    pass


# Identity


class IdentityError(LedgerError):
    """Base exception for certificate authority and MSP errors."""

    pass


class UnknownSerial(IdentityError):
    """Revocation of a serial the CA never issued."""

    pass


class MspValidationError(IdentityError):
    """An identity was refused by the membership service."""

    pass


class BadSignature(MspValidationError):
    pass


class Expired(MspValidationError):
    pass


class Revoked(MspValidationError):
    pass


class RoleNotAdmitted(MspValidationError):
    pass


class UnknownIssuer(MspValidationError):
    pass


class IdentityRejected(LedgerError):
    """A proposal creator failed MSP validation at the endorsing peer."""

    def __init__(self, message: str, reason: Optional[MspValidationError] = None):
        super().__init__(message)
        self.reason = reason


# Policy


class PolicyError(LedgerError):
    pass


class PolicySyntaxError(PolicyError):
    """Unparseable policy expression."""

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class ArityError(PolicyError):
    pass


class InsufficientApprovals(PolicyError):
    pass


class VersionMismatch(PolicyError):
    pass


class PolicyUnsatisfied(PolicyError):
    pass


# Ledger


class BlockError(LedgerError):
    pass


class MalformedBlock(BlockError):
    pass


class HeightMismatch(BlockError):
    pass


class HashChainBreak(BlockError):
    pass


class ChainIntegrityError(BlockError):
    """A peer's block log failed verification; the peer refuses to serve."""

    def __init__(self, message: str, block_num: int):
        super().__init__(message)
        self.block_num = block_num


class TransactionInvalid(LedgerError):
    """A transaction was ordered but flagged invalid at commit."""

    def __init__(self, tx_id: str, code: str):
        super().__init__(f"transaction {tx_id} committed as {code}")
        self.tx_id = tx_id
        self.code = code


# Private data


class PrivateDataError(LedgerError):
    pass


class UnknownCollection(PrivateDataError):
    pass


class InsufficientDissemination(PrivateDataError):
    pass


class PermissionDenied(PrivateDataError):
    pass


class DigestMismatch(PrivateDataError):
    pass


class NotFound(LedgerError):
    pass


# Chaincode


class ChaincodeError(LedgerError):
    """Error raised by contract code; carried back in proposal responses."""

    pass


class AlreadyExists(ChaincodeError):
    pass


class MissingTransient(ChaincodeError):
    pass


class ValidationFailed(ChaincodeError):
    pass


# Ordering / network


class OrderingUnavailable(LedgerError):
    pass


class PeerUnavailable(LedgerError):
    """A peer did not answer within the client timeout."""

    pass


class NetworkDown(LedgerError):
    """No network has been brought up in the data directory."""

    pass


class BadTopology(LedgerError):
    pass


class BadRange(LedgerError):
    pass


ERRORS_BY_NAME: Dict[str, type] = {
    cls.__name__: cls
    for cls in (
        ChaincodeError,
        AlreadyExists,
        MissingTransient,
        ValidationFailed,
        NotFound,
        PermissionDenied,
        DigestMismatch,
        UnknownCollection,
        InsufficientDissemination,
        IdentityRejected,
        PolicyUnsatisfied,
        ChainIntegrityError,
    )
}


def error_from_name(name: str, message: str) -> LedgerError:
    """Rebuild an error carried across the network by class name."""
    cls = ERRORS_BY_NAME.get(name, ChaincodeError)
    if cls is IdentityRejected:
        return IdentityRejected(message)
    if cls is ChainIntegrityError:
        return ChainIntegrityError(message, block_num=-1)
    return cls(message)


class BaseStorage(ABC):
    """Abstract base class for node persistence.

    A storage holds named append-only record logs. Each record is an opaque
    byte string; framing is the backend's concern.

    Main methods:
        append_record: Append one record to a log
        read_records: Iterate the records of a log in append order
        read_bytes / write_bytes: Raw access to a log's backing bytes
        truncate: Drop every record from a given index on
    """

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}

    @abstractmethod
    def append_record(self, log_name: str, record: bytes) -> int:
        """Append a record and return its index within the log."""
        pass

    @abstractmethod
    def read_records(self, log_name: str) -> Iterator[bytes]:
        """Yield records in append order.

        Raises:
            StorageOperationError: If the log framing is damaged
        """
        pass

    @abstractmethod
    def read_bytes(self, log_name: str) -> bytes:
        pass

    @abstractmethod
    def write_bytes(self, log_name: str, content: bytes) -> None:
        """Replace the backing bytes of a log."""
        pass

    @abstractmethod
    def truncate(self, log_name: str, n_records: int) -> None:
        """Keep only the first n_records records."""
        pass

    @abstractmethod
    def exists(self, log_name: str) -> bool:
        pass

    @abstractmethod
    def delete(self, log_name: str) -> bool:
        pass
