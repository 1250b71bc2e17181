"""Private data collections."""
from .collections import (
    CollectionConfig,
    PrivateWrite,
    collection_access,
    compute_digest,
    seal_private_write,
    verify_private,
)
from .dissemination import Disseminator, PrivateAck, PrivatePlaintext, disseminate
from .store import PrivateEntry, PrivateStore

__all__ = [
    "CollectionConfig",
    "PrivateWrite",
    "collection_access",
    "compute_digest",
    "seal_private_write",
    "verify_private",
    "Disseminator",
    "PrivateAck",
    "PrivatePlaintext",
    "disseminate",
    "PrivateEntry",
    "PrivateStore",
]
