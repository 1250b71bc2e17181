"""Versioned document state."""

from __future__ import annotations

import bisect
import hashlib
from typing import Dict, Iterator, List, Optional, Tuple

from ..core.codec import encode
from ..core.types import Version

StateValue = Tuple[bytes, Version]


class StateStore:
    """Map (namespace, key) -> (document bytes, Version).

    Lookups are dictionary lookups. Range scans keep a sorted key list per
    namespace, rebuilt lazily after writes.
    """

    def __init__(self):
        self._data: Dict[str, Dict[str, StateValue]] = {}
        self._sorted: Dict[str, List[str]] = {}
        self.height = 0

    def get_state(self, namespace: str, key: str) -> Optional[StateValue]:
        return self._data.get(namespace, {}).get(key)

    def get_version(self, namespace: str, key: str) -> Optional[Version]:
        entry = self.get_state(namespace, key)
        return None if entry is None else entry[1]

    def put(self, namespace: str, key: str, value: bytes, version: Version) -> None:
        ns = self._data.setdefault(namespace, {})
        if key not in ns:
            self._sorted.pop(namespace, None)
        ns[key] = (bytes(value), version)

    def delete(self, namespace: str, key: str) -> None:
        ns = self._data.get(namespace)
        if ns is not None and ns.pop(key, None) is not None:
            self._sorted.pop(namespace, None)

    def range_scan(
        self, namespace: str, start_key: str = "", end_key: Optional[str] = None
    ) -> Iterator[Tuple[str, StateValue]]:
        """Keys in [start_key, end_key) in lexical order."""
        ns = self._data.get(namespace, {})
        keys = self._sorted.get(namespace)
        if keys is None:
            keys = sorted(ns)
            self._sorted[namespace] = keys
        lo = bisect.bisect_left(keys, start_key)
        hi = len(keys) if end_key is None else bisect.bisect_left(keys, end_key)
        for key in keys[lo:hi]:
            yield key, ns[key]

    def namespaces(self) -> List[str]:
        return sorted(self._data)

    def __len__(self) -> int:
        return sum(len(ns) for ns in self._data.values())

    def state_hash(self, namespaces: Optional[List[str]] = None) -> bytes:
        """Digest over every entry in (namespace, key) order."""
        h = hashlib.sha256()
        for namespace in namespaces if namespaces is not None else self.namespaces():
            for key, (value, version) in self.range_scan(namespace):
                h.update(encode([namespace, key, value, version.to_wire()]))
        return h.digest()
