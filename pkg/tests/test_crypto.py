from __future__ import annotations

import hashlib
import json
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordsig import crypto
from wordsig.errors import MalformedKeyError

VECTORS = json.loads(
    (Path(__file__).parent / "vectors" / "ecdsa_rfc6979.json").read_text()
)

TEST_KEY = crypto.generate_keypair(hashlib.sha256(b"wordsig-test-key-1").digest())


class TestKeygen:
    def test_deterministic_from_entropy(self):
        entropy = hashlib.sha256(b"wordsig-test-key-1").digest()
        a = crypto.generate_keypair(entropy)
        b = crypto.generate_keypair(entropy)
        assert a == b
        # derivation = entropy mod N (nonzero here), pubkey from the oracle
        expected_scalar = int.from_bytes(entropy, "big") % crypto.N
        assert a.private_scalar == expected_scalar
        from cryptography.hazmat.primitives import serialization
        from cryptography.hazmat.primitives.asymmetric import ec

        oracle_pub = (
            ec.derive_private_key(expected_scalar, ec.SECP256K1())
            .public_key()
            .public_bytes(
                serialization.Encoding.X962,
                serialization.PublicFormat.CompressedPoint,
            )
        )
        assert a.public_point == oracle_pub

    def test_random_keys_distinct(self):
        assert crypto.generate_keypair() != crypto.generate_keypair()

    def test_zero_entropy_rehash_path(self):
        kp = crypto.generate_keypair(bytes(32))
        # documented reduction: 0 mod N == 0, so the seed is re-hashed once
        rehash = hashlib.sha256(bytes(32)).digest()
        assert kp.private_scalar == int.from_bytes(rehash, "big") % crypto.N
        assert 1 <= kp.private_scalar < crypto.N

    def test_bad_entropy_length(self):
        with pytest.raises(MalformedKeyError):
            crypto.generate_keypair(b"short")

    def test_keypair_rejects_mismatched_point(self):
        other = crypto.generate_keypair()
        with pytest.raises(MalformedKeyError):
            crypto.KeyPair(TEST_KEY.private_scalar, other.public_point)

    def test_private_bytes_round_trip(self):
        again = crypto.KeyPair.from_private_bytes(TEST_KEY.private_bytes)
        assert again == TEST_KEY


class TestSignVerify:
    def test_round_trip_empty_message(self):
        sig = crypto.sign(b"", TEST_KEY)
        assert crypto.verify(b"", sig, TEST_KEY.public_point)

    def test_deterministic(self):
        assert crypto.sign(b"sample", TEST_KEY) == crypto.sign(b"sample", TEST_KEY)

    def test_oracle_vectors_match_byte_for_byte(self):
        for vec in VECTORS:
            key = crypto.generate_keypair(bytes.fromhex(vec["key_entropy_hex"]))
            assert key.private_scalar == int(vec["private_scalar_hex"], 16)
            assert key.public_point == bytes.fromhex(vec["public_point_hex"])
            message = bytes.fromhex(vec["message_hex"])
            sig = crypto.sign(message, key)
            assert sig.to_bytes() == bytes.fromhex(vec["signature_hex"])

    def test_oracle_vectors_verify(self):
        for vec in VECTORS:
            message = bytes.fromhex(vec["message_hex"])
            sig = bytes.fromhex(vec["signature_hex"])
            pub = bytes.fromhex(vec["public_point_hex"])
            assert crypto.verify(message, sig, pub)

    def test_high_s_twins_rejected(self):
        for vec in VECTORS:
            message = bytes.fromhex(vec["message_hex"])
            sig = crypto.Signature.from_bytes(bytes.fromhex(vec["signature_hex"]))
            twin = crypto.Signature(sig.r, crypto.N - sig.s)
            pub = bytes.fromhex(vec["public_point_hex"])
            assert not crypto.verify(message, twin, pub)

    def test_live_oracle_agreement(self):
        # re-derive one signature with the reference implementation at test
        # time, guarding against a stale frozen file
        from cryptography.hazmat.primitives import hashes
        from cryptography.hazmat.primitives.asymmetric import ec
        from cryptography.hazmat.primitives.asymmetric.utils import (
            decode_dss_signature,
        )

        key = ec.derive_private_key(TEST_KEY.private_scalar, ec.SECP256K1())
        der = key.sign(b"sample", ec.ECDSA(hashes.SHA256(), deterministic_signing=True))
        r, s = decode_dss_signature(der)
        if s > crypto.N // 2:
            s = crypto.N - s
        assert crypto.sign(b"sample", TEST_KEY) == crypto.Signature(r, s)

    def test_message_bit_flip_rejected(self):
        sig = crypto.sign(b"hello world", TEST_KEY)
        assert not crypto.verify(b"hello worle", sig, TEST_KEY.public_point)

    def test_all_signatures_low_s(self):
        for i in range(20):
            sig = crypto.sign(b"m%d" % i, TEST_KEY)
            assert 1 <= sig.s <= crypto.N // 2
            assert sig.is_canonical

    def test_malformed_inputs_return_false(self):
        sig = crypto.sign(b"x", TEST_KEY)
        assert not crypto.verify(b"x", b"\x00" * 64, TEST_KEY.public_point)
        assert not crypto.verify(b"x", b"short", TEST_KEY.public_point)
        assert not crypto.verify(b"x", sig, b"\x05" + b"\x00" * 32)
        assert not crypto.verify(b"x", sig, b"not a point")
        # x-coordinate not on the curve
        off_curve = b"\x02" + (5).to_bytes(32, "big")
        assert not crypto.verify(b"x", sig, off_curve)
        # r, s out of range
        assert not crypto.verify(
            b"x", crypto.Signature(0, sig.s), TEST_KEY.public_point
        )
        assert not crypto.verify(
            b"x", crypto.Signature(sig.r, crypto.N), TEST_KEY.public_point
        )


class TestFingerprint:
    def test_matches_sha256(self):
        fp = crypto.fingerprint(TEST_KEY.public_point)
        assert fp == hashlib.sha256(TEST_KEY.public_point).digest()

    def test_deterministic_and_distinct(self):
        assert crypto.fingerprint(TEST_KEY.public_point) == crypto.fingerprint(
            TEST_KEY.public_point
        )
        seen = set()
        for i in range(10):
            kp = crypto.generate_keypair(hashlib.sha256(b"fp%d" % i).digest())
            seen.add(crypto.fingerprint(kp.public_point))
        assert len(seen) == 10

    def test_wrong_length_rejected(self):
        with pytest.raises(MalformedKeyError):
            crypto.fingerprint(b"\x02" * 32)


@settings(max_examples=30, deadline=None)
@given(st.binary(max_size=256))
def test_sign_verify_round_trip_property(message):
    sig = crypto.sign(message, TEST_KEY)
    assert crypto.verify(message, sig, TEST_KEY.public_point)


@settings(max_examples=30, deadline=None)
@given(st.binary(min_size=1, max_size=64), st.integers(min_value=0))
def test_single_bit_mutations_rejected(message, seed):
    sig = crypto.sign(message, TEST_KEY)
    sig_bytes = bytearray(sig.to_bytes())
    pub = bytearray(TEST_KEY.public_point)

    bit = seed % (len(message) * 8)
    mutated = bytearray(message)
    mutated[bit // 8] ^= 1 << (bit % 8)
    assert not crypto.verify(bytes(mutated), sig, TEST_KEY.public_point)

    bit = seed % 512
    sig_bytes[bit // 8] ^= 1 << (bit % 8)
    assert not crypto.verify(message, bytes(sig_bytes), TEST_KEY.public_point)

    bit = seed % 264
    pub[bit // 8] ^= 1 << (bit % 8)
    assert not crypto.verify(message, sig, bytes(pub))
