"""Contract base class and the state-access interface chaincode runs against."""

from __future__ import annotations

import inspect
from abc import ABC, abstractmethod
from typing import Callable, Dict, Iterator, List, Optional, Tuple

from ..core.base import ChaincodeError
from ..privatedata.collections import PrivateWrite


class ChaincodeStub(ABC):
    """Narrow interface between contract code and a peer's ledger.

    Reads see the simulation's own buffered writes. Writes are never
    applied directly; they end up in the read-write set.
    """

    @abstractmethod
    def get_function_and_parameters(self) -> Tuple[str, List[str]]:
        pass

    @abstractmethod
    def get_txid(self) -> str:
        pass

    @abstractmethod
    def get_creator(self):
        """ValidatedIdentity of the proposal's creator."""

    @abstractmethod
    def get_transient(self) -> Dict[str, bytes]:
        pass

    @abstractmethod
    def get_private_transient(self, key: str) -> Optional[PrivateWrite]:
        """Sealed private write the client placed in the transient map."""

    @abstractmethod
    def get_state(self, namespace: str, key: str) -> Optional[bytes]:
        pass

    @abstractmethod
    def put_state(self, namespace: str, key: str, value: bytes) -> None:
        pass

    @abstractmethod
    def delete_state(self, namespace: str, key: str) -> None:
        pass

    @abstractmethod
    def get_state_by_range(
        self, namespace: str, start_key: str, end_key: Optional[str]
    ) -> Iterator[Tuple[str, bytes]]:
        pass

    @abstractmethod
    def get_private_data(self, collection: str, key: str) -> bytes:
        pass

    @abstractmethod
    def put_private_data(self, collection: str, write: PrivateWrite) -> None:
        pass

    @abstractmethod
    def check_collection_access(self, collection: str) -> None:
        """Raises PermissionDenied if the creator's org is not a member."""


def transaction(read_only: bool = False) -> Callable:
    """Mark a contract method as an invocable transaction."""

    def mark(fn: Callable) -> Callable:
        fn._transaction = {"read_only": read_only}
        return fn

    return mark


class Contract(ABC):
    """Smart contract: named transactions dispatched by function name.

    Methods decorated with ``@transaction()`` take the stub plus string
    arguments and return bytes.
    """

    name: str = ""

    def __init__(self):
        self._transactions: Dict[str, Callable] = {}
        for attr, member in inspect.getmembers(type(self), predicate=inspect.isfunction):
            if hasattr(member, "_transaction"):
                self._transactions[attr] = getattr(self, attr)

    @property
    def transactions(self) -> List[str]:
        return sorted(self._transactions)

    def is_read_only(self, function: str) -> bool:
        fn = self._transactions.get(function)
        return fn is not None and fn._transaction["read_only"]

    def invoke(self, stub: ChaincodeStub) -> bytes:
        function, args = stub.get_function_and_parameters()
        fn = self._transactions.get(function)
        if fn is None:
            raise ChaincodeError(f"{self.name} has no transaction {function}")
        expected = len(inspect.signature(fn).parameters) - 1
        if len(args) != expected:
            raise ChaincodeError(f"{function} takes {expected} arguments, got {len(args)}")
        result = fn(stub, *args)
        return result if isinstance(result, bytes) else str(result).encode("utf-8")
