"""Common utility functions."""

import json
from pathlib import Path
from typing import Any, Union


def ensure_path(path: Union[str, Path]) -> Path:
    """Convert string to Path and ensure its parent exists."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def to_json(value: Any, pretty: bool = False) -> str:
    """Serialize CLI/report payloads; bytes are rendered as hex."""

    def _default(obj: Any) -> Any:
        if isinstance(obj, (bytes, bytearray)):
            return bytes(obj).hex()
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        if hasattr(obj, "value"):
            return obj.value
        raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")

    if pretty:
        return json.dumps(value, indent=2, default=_default)
    return json.dumps(value, default=_default)
