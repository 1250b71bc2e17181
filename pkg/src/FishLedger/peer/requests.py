"""Argument builders for fish-farm contract calls."""

from __future__ import annotations

from typing import List, Tuple

from ..chaincode.fishfarm import (
    PRIVATE_COLLECTION,
    PRIVATE_TRANSIENT_KEY,
)
from ..chaincode.records import PUBLIC_FIELDS, FishFarmPrivateRecord, FishFarmPublicRecord
from .client import PrivateInput


def create_record_request(
    public: FishFarmPublicRecord, private: FishFarmPrivateRecord
) -> Tuple[List[str], List[PrivateInput]]:
    """``CreateRecord`` arguments plus the private details to seal."""
    args = [public.name] + [str(getattr(public, f)) for f in PUBLIC_FIELDS]
    sealed = PrivateInput(
        PRIVATE_TRANSIENT_KEY, PRIVATE_COLLECTION, private.name, private.to_document()
    )
    return args, [sealed]
