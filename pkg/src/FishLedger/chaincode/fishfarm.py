"""Fish-farm data-sharing contract.

Public sensor readings go to ``collectionFishFarm``, readable by both
organizations. Farm-sensitive readings go to
``collectionFishFarmPrivateDetails`` as a salted digest on the ledger, with
the plaintext kept only by member peers. Both parts share the record name
as key.
"""

from __future__ import annotations

from ..core.base import AlreadyExists, MissingTransient, NotFound, ValidationFailed
from ..privatedata.collections import verify_private
from .base import ChaincodeStub, Contract, transaction
from .records import FishFarmPrivateRecord, FishFarmPublicRecord, PUBLIC_FIELDS

CHAINCODE_NAME = "fishfarm"
PUBLIC_COLLECTION = "collectionFishFarm"
PRIVATE_COLLECTION = "collectionFishFarmPrivateDetails"
PRIVATE_TRANSIENT_KEY = "private_details"


class FishFarmContract(Contract):
    name = CHAINCODE_NAME

    @transaction(read_only=True)
    def RecordExists(self, stub: ChaincodeStub, name: str) -> bytes:
        return b"true" if stub.get_state(PUBLIC_COLLECTION, name) is not None else b"false"

    @transaction()
    def CreateRecord(
        self,
        stub: ChaincodeStub,
        name: str,
        windspeed: str,
        rainfall: str,
        airpressure: str,
        temperature: str,
        waveheight: str,
        watercurrent: str,
    ) -> bytes:
        """Write the public part and the sealed private part of a record.

        The private part arrives in the transient map under
        ``private_details``. Member endorsers receive plaintext and salt and
        check the private document; others only see the digest.
        """
        stub.check_collection_access(PUBLIC_COLLECTION)
        if self.RecordExists(stub, name) == b"true":
            raise AlreadyExists(f"record {name} already exists")

        values = dict(
            zip(
                PUBLIC_FIELDS,
                (windspeed, rainfall, airpressure, temperature, waveheight, watercurrent),
            )
        )
        public = FishFarmPublicRecord.from_fields(name, values)

        write = stub.get_private_transient(PRIVATE_TRANSIENT_KEY)
        if write is None:
            raise MissingTransient(f"private details for {name} missing from transient map")
        if write.collection != PRIVATE_COLLECTION or write.key != name:
            raise ValidationFailed(
                f"private details sealed for {write.collection}/{write.key}, expected {name}"
            )
        if write.is_revealed:
            if not verify_private(write):
                raise ValidationFailed(f"private details for {name} do not match their digest")
            private = FishFarmPrivateRecord.from_document(write.plaintext)
            if private.name != name:
                raise ValidationFailed(f"private record names {private.name}, expected {name}")

        stub.put_state(PUBLIC_COLLECTION, name, public.to_document())
        stub.put_private_data(PRIVATE_COLLECTION, write)
        return stub.get_txid().encode("utf-8")

    @transaction(read_only=True)
    def ReadRecord(self, stub: ChaincodeStub, name: str) -> bytes:
        stub.check_collection_access(PUBLIC_COLLECTION)
        document = stub.get_state(PUBLIC_COLLECTION, name)
        if document is None:
            raise NotFound(f"record {name} does not exist")
        return document

    @transaction(read_only=True)
    def ReadPrivateDetails(self, stub: ChaincodeStub, name: str) -> bytes:
        return stub.get_private_data(PRIVATE_COLLECTION, name)
