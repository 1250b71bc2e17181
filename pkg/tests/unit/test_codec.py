# tests/unit/test_codec.py

import pytest

from FishLedger.core.base import MalformedBlock
from FishLedger.core.codec import decode, digest_of, encode, seed_int, seeded_bytes


class TestCanonicalEncoding:
    def test_dict_key_order_does_not_matter(self):
        assert encode({"b": 1, "a": [True, None]}) == encode({"a": [True, None], "b": 1})

    def test_nested_values_decode_back(self):
        value = {"k": [1, -2, "x", b"\x00\xff", None, False, {"z": True}]}
        assert decode(encode(value)) == value

    def test_tuples_encode_as_lists(self):
        assert encode((1, 2)) == encode([1, 2])

    def test_floats_rejected(self):
        with pytest.raises(TypeError):
            encode(1.5)

    def test_non_string_keys_rejected(self):
        with pytest.raises(TypeError):
            encode({1: "a"})

    def test_trailing_bytes_rejected(self):
        with pytest.raises(MalformedBlock):
            decode(encode(1) + b"\x00")

    def test_truncated_input_rejected(self):
        with pytest.raises(MalformedBlock):
            decode(encode("hello")[:-1])

    def test_unsorted_dict_rejected(self):
        raw = bytearray(encode({"a": 1, "b": 2}))
        # Swap the single-character keys in place
        a_at = raw.index(b"a")
        b_at = raw.index(b"b")
        raw[a_at], raw[b_at] = raw[b_at], raw[a_at]
        with pytest.raises(MalformedBlock):
            decode(bytes(raw))

    def test_unknown_tag(self):
        with pytest.raises(MalformedBlock, match="unknown tag"):
            decode(b"\x7f")


class TestSeeds:
    def test_digest_is_stable(self):
        assert digest_of(["a", 1]) == digest_of(("a", 1))
        assert len(digest_of("x")) == 32

    def test_seeded_bytes_length_and_determinism(self):
        assert seeded_bytes("ca", 1, length=70) == seeded_bytes("ca", 1, length=70)
        assert len(seeded_bytes("ca", 1, length=70)) == 70
        assert seeded_bytes("ca", 1) != seeded_bytes("ca", 2)

    def test_seed_int_fits_in_63_bits(self):
        for i in range(50):
            value = seed_int("node", i)
            assert 0 <= value < 2**63


class TestLargeIntegers:
    def test_u64_max_round_trips(self):
        assert decode(encode(2**64 - 1)) == 2**64 - 1
        assert decode(encode([2**63, -(2**63)])) == [2**63, -(2**63)]

    def test_i64_range_keeps_fixed_width(self):
        assert encode(2**63 - 1)[0] == 0x03
        assert len(encode(2**63 - 1)) == 9
        assert encode(2**63)[0] == 0x08

    def test_large_seed_derives_bytes(self):
        assert seeded_bytes("ca", "fishfarm.org", 2**64 - 1) != seeded_bytes(
            "ca", "fishfarm.org", 2**64 - 2
        )

    def test_non_canonical_unsigned_rejected(self):
        # Values that fit the signed form must use it
        with pytest.raises(MalformedBlock, match="non-canonical integer"):
            decode(b"\x08\x00\x00\x00\x01\x05")
        with pytest.raises(MalformedBlock, match="non-canonical integer"):
            decode(b"\x08\x00\x00\x00\x09\x00" + (2**63).to_bytes(8, "big"))

    def test_below_signed_range_rejected(self):
        with pytest.raises(ValueError):
            encode(-(2**63) - 1)
