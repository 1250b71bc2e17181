"""Canonical, deterministic byte encoding.

Every value that is hashed or signed goes through ``encode``. The format is a
tag byte followed by a length-prefixed body, so two implementations that
agree on field order produce identical bytes:

    None   0x00
    False  0x01        True  0x02
    int    0x03 + 8-byte signed big-endian
    uint   0x08 + u32 length + minimal unsigned big-endian, ints above 2**63 - 1 only
    str    0x04 + u32 length + UTF-8
    bytes  0x05 + u32 length + raw
    list   0x06 + u32 count + items
    dict   0x07 + u32 count + (str key, value) pairs sorted by key

Floats are rejected; numeric documents travel as decimal strings.
"""

from __future__ import annotations

import hashlib
import struct
from typing import Any, List, Tuple

from .base import MalformedBlock

_NONE = 0x00
_FALSE = 0x01
_TRUE = 0x02
_INT = 0x03
_STR = 0x04
_BYTES = 0x05
_LIST = 0x06
_DICT = 0x07
_UINT = 0x08

_U32 = struct.Struct(">I")
_I64 = struct.Struct(">q")
_I64_MIN = -(2**63)
_I64_MAX = 2**63 - 1

ZERO_HASH = bytes(32)


def _encode_into(value: Any, out: List[bytes]) -> None:
    if value is None:
        out.append(b"\x00")
    elif value is True:
        out.append(b"\x02")
    elif value is False:
        out.append(b"\x01")
    elif isinstance(value, int):
        if value > _I64_MAX:
            raw = value.to_bytes((value.bit_length() + 7) // 8, "big")
            out.append(b"\x08")
            out.append(_U32.pack(len(raw)))
            out.append(raw)
        elif value < _I64_MIN:
            raise ValueError(f"integer {value} is below the signed 64-bit range")
        else:
            out.append(b"\x03")
            out.append(_I64.pack(value))
    elif isinstance(value, str):
        raw = value.encode("utf-8", "surrogatepass")
        out.append(b"\x04")
        out.append(_U32.pack(len(raw)))
        out.append(raw)
    elif isinstance(value, (bytes, bytearray, memoryview)):
        raw = bytes(value)
        out.append(b"\x05")
        out.append(_U32.pack(len(raw)))
        out.append(raw)
    elif isinstance(value, (list, tuple)):
        out.append(b"\x06")
        out.append(_U32.pack(len(value)))
        for item in value:
            _encode_into(item, out)
    elif isinstance(value, dict):
        out.append(b"\x07")
        out.append(_U32.pack(len(value)))
        for key in sorted(value):
            if not isinstance(key, str):
                raise TypeError(f"dict keys must be str, got {type(key).__name__}")
            _encode_into(key, out)
            _encode_into(value[key], out)
    else:
        raise TypeError(f"cannot canonically encode {type(value).__name__}")


def encode(value: Any) -> bytes:
    """Encode a tree of None/bool/int/str/bytes/list/dict values."""
    out: List[bytes] = []
    _encode_into(value, out)
    return b"".join(out)


def _decode_at(data: bytes, pos: int) -> Tuple[Any, int]:
    try:
        tag = data[pos]
    except IndexError:
        raise MalformedBlock(f"truncated encoding at offset {pos}") from None
    pos += 1
    if tag == _NONE:
        return None, pos
    if tag == _FALSE:
        return False, pos
    if tag == _TRUE:
        return True, pos
    if tag == _INT:
        if pos + 8 > len(data):
            raise MalformedBlock(f"truncated integer at offset {pos}")
        return _I64.unpack_from(data, pos)[0], pos + 8
    if tag == _UINT:
        if pos + 4 > len(data):
            raise MalformedBlock(f"truncated length at offset {pos}")
        (length,) = _U32.unpack_from(data, pos)
        pos += 4
        end = pos + length
        if end > len(data):
            raise MalformedBlock(f"length {length} overruns buffer at {pos}")
        value = int.from_bytes(data[pos:end], "big")
        if value <= _I64_MAX or data[pos] == 0:
            raise MalformedBlock(f"non-canonical integer at offset {pos}")
        return value, end
    if tag in (_STR, _BYTES, _LIST, _DICT):
        if pos + 4 > len(data):
            raise MalformedBlock(f"truncated length at offset {pos}")
        (length,) = _U32.unpack_from(data, pos)
        pos += 4
        if tag == _STR or tag == _BYTES:
            end = pos + length
            if end > len(data):
                raise MalformedBlock(f"length {length} overruns buffer at {pos}")
            raw = data[pos:end]
            if tag == _BYTES:
                return raw, end
            try:
                return raw.decode("utf-8", "surrogatepass"), end
            except UnicodeDecodeError as e:
                raise MalformedBlock(f"invalid UTF-8 at offset {pos}") from e
        if tag == _LIST:
            items = []
            for _ in range(length):
                item, pos = _decode_at(data, pos)
                items.append(item)
            return items, pos
        result = {}
        previous = None
        for _ in range(length):
            key, pos = _decode_at(data, pos)
            if not isinstance(key, str) or (previous is not None and key <= previous):
                raise MalformedBlock(f"non-canonical dict key at offset {pos}")
            previous = key
            result[key], pos = _decode_at(data, pos)
        return result, pos
    raise MalformedBlock(f"unknown tag 0x{tag:02x} at offset {pos - 1}")


def decode(data: bytes) -> Any:
    """Inverse of ``encode``; rejects trailing bytes and non-canonical input."""
    value, pos = _decode_at(bytes(data), 0)
    if pos != len(data):
        raise MalformedBlock(f"{len(data) - pos} trailing bytes after value")
    return value


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def digest_of(value: Any) -> bytes:
    """SHA-256 of the canonical encoding of ``value``."""
    return hashlib.sha256(encode(value)).digest()


def seeded_bytes(*parts: Any, length: int = 32) -> bytes:
    """Deterministic pseudo-random bytes derived from ``parts``."""
    material = encode(list(parts))
    out = b""
    counter = 0
    while len(out) < length:
        out += hashlib.sha256(material + counter.to_bytes(4, "big")).digest()
        counter += 1
    return out[:length]


def seed_int(*parts: Any) -> int:
    """Deterministic non-negative 63-bit seed derived from ``parts``."""
    return int.from_bytes(seeded_bytes(*parts, length=8), "big") >> 1
