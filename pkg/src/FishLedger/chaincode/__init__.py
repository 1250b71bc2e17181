"""Smart contracts run in-process by peers."""
from .base import ChaincodeStub, Contract, transaction
from .fishfarm import (
    CHAINCODE_NAME,
    PRIVATE_COLLECTION,
    PRIVATE_TRANSIENT_KEY,
    PUBLIC_COLLECTION,
    FishFarmContract,
)
from .records import (
    FIELD_UNITS,
    PRIVATE_FIELDS,
    PUBLIC_FIELDS,
    FishFarmPrivateRecord,
    FishFarmPublicRecord,
    split_record,
)

__all__ = [
    "ChaincodeStub",
    "Contract",
    "transaction",
    "CHAINCODE_NAME",
    "PRIVATE_COLLECTION",
    "PRIVATE_TRANSIENT_KEY",
    "PUBLIC_COLLECTION",
    "FishFarmContract",
    "FIELD_UNITS",
    "PRIVATE_FIELDS",
    "PUBLIC_FIELDS",
    "FishFarmPrivateRecord",
    "FishFarmPublicRecord",
    "split_record",
]
