"""The QR payload grammar: certificate frames and segment frames.

A segment payload is `words "::" base64url(signature)` with no padding; the
base64url alphabet has no colon, so splitting at the last "::" is
unambiguous even when the words themselves contain colons. A certificate
payload is `WSIG1:CERT:` followed by the base64url certificate bytes.
"""

from __future__ import annotations

import base64
import binascii
import re

from .certs import Certificate, parse_certificate, serialize_certificate
from .crypto import Signature
from .errors import (
    MalformedPayloadError,
    PayloadTooLargeError,
    UnsupportedPayloadVersionError,
)

MAX_WORDS_BYTES = 400  # profile cap; keeps symbols at readable versions

SEPARATOR = "::"
CERT_PREFIX = "WSIG1:CERT:"
_SIGNATURE_CHARS = 86  # 64 bytes in unpadded base64url
_CERT_PREFIX_RE = re.compile(r"^WSIG(\d+):CERT:")


def _b64url_encode(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _b64url_decode(text: str) -> bytes:
    pad = -len(text) % 4
    if pad == 3:
        raise MalformedPayloadError("invalid base64url length")
    try:
        decoded = base64.urlsafe_b64decode(text + "=" * pad)
    except (binascii.Error, ValueError) as exc:
        raise MalformedPayloadError(f"invalid base64url: {exc}") from exc
    if _b64url_encode(decoded) != text:  # reject non-canonical encodings
        raise MalformedPayloadError("non-canonical base64url")
    return decoded


def encode_segment_payload(words: str, prev_signature: Signature) -> str:
    """words "::" base64url(signature); words may be empty (terminal frame)."""
    encoded = words.encode("utf-8")
    if len(encoded) > MAX_WORDS_BYTES:
        raise PayloadTooLargeError(
            f"words are {len(encoded)} bytes; the cap is {MAX_WORDS_BYTES}"
        )
    return words + SEPARATOR + _b64url_encode(prev_signature.to_bytes())


def decode_segment_payload(text: str) -> tuple[str, Signature]:
    """Inverse of encode_segment_payload; splits at the last "::"."""
    split = text.rfind(SEPARATOR)
    if split < 0:
        raise MalformedPayloadError("payload has no \"::\" separator")
    words, tail = text[:split], text[split + len(SEPARATOR):]
    if len(tail) != _SIGNATURE_CHARS:
        raise MalformedPayloadError(
            f"signature tail must be {_SIGNATURE_CHARS} characters, got {len(tail)}"
        )
    signature = Signature.from_bytes(_b64url_decode(tail))
    if len(words.encode("utf-8")) > MAX_WORDS_BYTES:
        raise PayloadTooLargeError("words exceed the profile cap")
    return words, signature


def encode_cert_payload(cert: Certificate) -> str:
    return CERT_PREFIX + _b64url_encode(serialize_certificate(cert))


def decode_cert_payload(text: str) -> Certificate:
    if not text.startswith(CERT_PREFIX):
        match = _CERT_PREFIX_RE.match(text)
        if match:
            raise UnsupportedPayloadVersionError(
                f"unsupported certificate payload version {match.group(1)}"
            )
        raise MalformedPayloadError("missing certificate payload prefix")
    return parse_certificate(_b64url_decode(text[len(CERT_PREFIX):]))
