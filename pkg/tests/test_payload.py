from __future__ import annotations

import hashlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordsig import certs, crypto, payload
from wordsig.errors import (
    MalformedPayloadError,
    PayloadTooLargeError,
    UnsupportedPayloadVersionError,
)

KEY = crypto.generate_keypair(hashlib.sha256(b"wordsig-test-key-1").digest())
SIG = crypto.sign(b"anything", KEY)
CERT = certs.create_certificate("JaneDoe123", KEY, 1700000000)


class TestSegmentPayload:
    def test_shape(self):
        text = payload.encode_segment_payload("hello world", SIG)
        assert text.startswith("hello world::")
        tail = text.rsplit("::", 1)[1]
        assert len(tail) == 86
        assert ":" not in tail

    def test_empty_words_terminal_frame(self):
        text = payload.encode_segment_payload("", SIG)
        assert text.startswith("::")
        assert payload.decode_segment_payload(text) == ("", SIG)

    def test_round_trip(self):
        for words in ("hi", "a::b", "ends with colon:", "trailing::", "::", "a:"):
            text = payload.encode_segment_payload(words, SIG)
            assert payload.decode_segment_payload(text) == (words, SIG)

    def test_split_is_at_last_separator(self):
        # enumerate every candidate split point: only the final "::" leaves
        # a valid 86-character base64url tail
        words = "a::b"
        text = payload.encode_segment_payload(words, SIG)
        valid_splits = []
        for i in range(len(text) - 1):
            if text[i:i + 2] != "::":
                continue
            tail = text[i + 2:]
            if len(tail) == 86:
                try:
                    payload._b64url_decode(tail)
                except MalformedPayloadError:
                    continue
                valid_splits.append(i)
        assert valid_splits == [len(words)]

    def test_oversize_words_rejected(self):
        with pytest.raises(PayloadTooLargeError):
            payload.encode_segment_payload("a" * 401, SIG)
        payload.encode_segment_payload("a" * 400, SIG)  # the cap itself fits

    def test_missing_separator(self):
        with pytest.raises(MalformedPayloadError):
            payload.decode_segment_payload("no-separator-here")

    def test_short_tail_rejected(self):
        text = payload.encode_segment_payload("w", SIG)
        with pytest.raises(MalformedPayloadError):
            payload.decode_segment_payload(text[:-1])  # 85-char tail

    def test_bad_base64_rejected(self):
        text = payload.encode_segment_payload("w", SIG)
        with pytest.raises(MalformedPayloadError):
            payload.decode_segment_payload(text[:-1] + "=")

    def test_non_canonical_tail_rejected(self):
        text = payload.encode_segment_payload("w", SIG)
        # flip low bits of the final character: same length, same alphabet,
        # but decodes with nonzero discarded bits
        last = text[-1]
        for candidate in "BCDF":
            if candidate != last:
                mutated = text[:-1] + candidate
                break
        try:
            payload.decode_segment_payload(mutated)
        except MalformedPayloadError:
            pass  # either rejection or a different signature is acceptable
        else:
            words, sig = payload.decode_segment_payload(mutated)
            assert sig != SIG


class TestCertPayload:
    def test_round_trip(self):
        text = payload.encode_cert_payload(CERT)
        assert text.startswith("WSIG1:CERT:")
        assert payload.decode_cert_payload(text) == CERT

    def test_future_version_rejected(self):
        text = payload.encode_cert_payload(CERT).replace("WSIG1:", "WSIG2:", 1)
        with pytest.raises(UnsupportedPayloadVersionError):
            payload.decode_cert_payload(text)

    def test_missing_prefix_rejected(self):
        with pytest.raises(MalformedPayloadError):
            payload.decode_cert_payload("CERT:abcdef")

    def test_truncated_base64_rejected(self):
        from wordsig.errors import MalformedCertificateError

        text = payload.encode_cert_payload(CERT)
        # dropping 1 char breaks the base64 length; dropping 3 decodes to
        # truncated certificate bytes -- both must be rejected
        with pytest.raises(MalformedPayloadError):
            payload.decode_cert_payload(text[:-1])
        with pytest.raises((MalformedPayloadError, MalformedCertificateError)):
            payload.decode_cert_payload(text[:-3])


words_strategy = st.text(max_size=120).filter(
    lambda s: len(s.encode("utf-8")) <= 400
)


@settings(max_examples=60, deadline=None)
@given(words=words_strategy, seed=st.binary(min_size=1, max_size=8))
def test_round_trip_property(words, seed):
    sig = crypto.sign(seed, KEY)
    text = payload.encode_segment_payload(words, sig)
    assert payload.decode_segment_payload(text) == (words, sig)


@settings(max_examples=30, deadline=None)
@given(a=words_strategy, b=words_strategy)
def test_grammar_injectivity(a, b):
    text_a = payload.encode_segment_payload(a, SIG)
    text_b = payload.encode_segment_payload(b, SIG)
    assert (text_a == text_b) == (a == b)
