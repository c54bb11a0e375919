"""Named public-key certificates and self-signed revocation records.

A certificate binds a display name to a secp256k1 public key. Its
self-signature covers the canonical byte layout of (version, name, key,
issued_at); endorsements by other keys ride along for future use but never
affect verification. A revocation record is signed by the revoked
certificate's own key over a fixed context string, the key fingerprint, and
the revocation time.
"""

from __future__ import annotations

import struct
import unicodedata
from dataclasses import dataclass, replace

from .crypto import KeyPair, Signature, fingerprint, sign, verify
from .errors import (
    KeyCertMismatchError,
    MalformedCaptionError,
    MalformedCertificateError,
    MalformedNameError,
    MalformedRevocationError,
)

CERT_MAGIC = b"WSIG1-CERT"
REVOKE_CONTEXT = b"WSIG1-REVOKE"
CERT_VERSION = 1

MAX_NAME_BYTES = 64
_CAPTION_PREFIX = "["
_CAPTION_SUFFIX = "'s public key certificate]"

_MAX_U64 = 2**64 - 1


def validate_name(name: str) -> None:
    """Enforce the charset rules: 1-64 UTF-8 bytes, no control chars, no "::"."""
    if not isinstance(name, str):
        raise MalformedNameError("name must be a string")
    encoded = name.encode("utf-8")
    if not 1 <= len(encoded) <= MAX_NAME_BYTES:
        raise MalformedNameError(
            f"name must be 1-{MAX_NAME_BYTES} bytes, got {len(encoded)}"
        )
    if "::" in name:
        raise MalformedNameError('name must not contain "::"')
    for ch in name:
        if unicodedata.category(ch) == "Cc":
            raise MalformedNameError("name must not contain control characters")


@dataclass(frozen=True)
class Endorsement:
    endorser_fingerprint: bytes  # fingerprint of the endorser's public key
    signature: Signature  # over the endorsed certificate's canonical bytes


@dataclass(frozen=True)
class Certificate:
    name: str
    public_point: bytes
    issued_at: int
    self_signature: Signature
    endorsements: tuple[Endorsement, ...] = ()
    version: int = CERT_VERSION

    @property
    def canonical(self) -> bytes:
        return canonical_bytes(self.version, self.name, self.public_point, self.issued_at)

    @property
    def fingerprint(self) -> bytes:
        return fingerprint(self.public_point)


@dataclass(frozen=True)
class RevocationRecord:
    cert_fingerprint: bytes
    revoked_at: int
    revocation_signature: Signature


def canonical_bytes(version: int, name: str, public_point: bytes, issued_at: int) -> bytes:
    """The signed layout: magic, version, name length, name, key, timestamp."""
    validate_name(name)
    if version != CERT_VERSION:
        raise MalformedCertificateError(f"unsupported certificate version {version}")
    if len(public_point) != 33:
        raise MalformedCertificateError("public point must be 33 bytes")
    if not 0 <= issued_at <= _MAX_U64:
        raise MalformedCertificateError("issued_at out of unsigned 64-bit range")
    encoded = name.encode("utf-8")
    return (
        CERT_MAGIC
        + struct.pack(">BH", version, len(encoded))
        + encoded
        + public_point
        + struct.pack(">Q", issued_at)
    )


def create_certificate(name: str, keypair: KeyPair, issued_at: int) -> Certificate:
    payload = canonical_bytes(CERT_VERSION, name, keypair.public_point, issued_at)
    return Certificate(
        name=name,
        public_point=keypair.public_point,
        issued_at=issued_at,
        self_signature=sign(payload, keypair),
    )


def verify_certificate(cert: Certificate) -> bool:
    """True iff the self-signature checks out; endorsements are advisory."""
    try:
        payload = cert.canonical
    except (MalformedCertificateError, MalformedNameError):
        return False
    return verify(payload, cert.self_signature, cert.public_point)


def endorse_certificate(cert: Certificate, endorser: KeyPair) -> Certificate:
    if not verify_certificate(cert):
        raise MalformedCertificateError("refusing to endorse an invalid certificate")
    endorsement = Endorsement(
        endorser_fingerprint=fingerprint(endorser.public_point),
        signature=sign(cert.canonical, endorser),
    )
    return replace(cert, endorsements=cert.endorsements + (endorsement,))


def verify_endorsement(cert: Certificate, endorsement: Endorsement, endorser_public_point: bytes) -> bool:
    if fingerprint(endorser_public_point) != endorsement.endorser_fingerprint:
        return False
    return verify(cert.canonical, endorsement.signature, endorser_public_point)


def extract_name(source: Certificate | str) -> str:
    """Name from a certificate, or from a frame-0 caption of the exact shape
    "[" name "'s public key certificate]"."""
    if isinstance(source, Certificate):
        return source.name
    if not isinstance(source, str):
        raise MalformedCaptionError("caption must be a string")
    if not (source.startswith(_CAPTION_PREFIX) and source.endswith(_CAPTION_SUFFIX)):
        raise MalformedCaptionError("caption is not a certificate announcement")
    name = source[len(_CAPTION_PREFIX):-len(_CAPTION_SUFFIX)]
    try:
        validate_name(name)
    except MalformedNameError as exc:
        raise MalformedCaptionError(f"caption name invalid: {exc}") from exc
    return name


def certificate_caption(name: str) -> str:
    validate_name(name)
    return _CAPTION_PREFIX + name + _CAPTION_SUFFIX


# ---------------------------------------------------------------------------
# Revocation
# ---------------------------------------------------------------------------

def _revocation_message(cert_fingerprint: bytes, revoked_at: int) -> bytes:
    return REVOKE_CONTEXT + cert_fingerprint + struct.pack(">Q", revoked_at)


def create_revocation(keypair: KeyPair, cert: Certificate, revoked_at: int) -> RevocationRecord:
    if keypair.public_point != cert.public_point:
        raise KeyCertMismatchError("revocation must be signed by the certificate's own key")
    if not 0 <= revoked_at <= _MAX_U64:
        raise MalformedRevocationError("revoked_at out of unsigned 64-bit range")
    fp = cert.fingerprint
    return RevocationRecord(
        cert_fingerprint=fp,
        revoked_at=revoked_at,
        revocation_signature=sign(_revocation_message(fp, revoked_at), keypair),
    )


def verify_revocation(record: RevocationRecord, cert: Certificate) -> bool:
    if record.cert_fingerprint != cert.fingerprint:
        return False
    if not 0 <= record.revoked_at <= _MAX_U64:
        return False
    message = _revocation_message(record.cert_fingerprint, record.revoked_at)
    return verify(message, record.revocation_signature, cert.public_point)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def serialize_certificate(cert: Certificate) -> bytes:
    out = cert.canonical + cert.self_signature.to_bytes()
    out += struct.pack(">H", len(cert.endorsements))
    for endorsement in cert.endorsements:
        if len(endorsement.endorser_fingerprint) != 32:
            raise MalformedCertificateError("endorser fingerprint must be 32 bytes")
        out += endorsement.endorser_fingerprint + endorsement.signature.to_bytes()
    return out


def parse_certificate(data: bytes) -> Certificate:
    def need(n: int, what: str):
        nonlocal pos
        if len(data) - pos < n:
            raise MalformedCertificateError(f"truncated certificate: missing {what}")
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    pos = 0
    if need(len(CERT_MAGIC), "magic") != CERT_MAGIC:
        raise MalformedCertificateError("bad certificate magic")
    version, name_len = struct.unpack(">BH", need(3, "header"))
    if version != CERT_VERSION:
        raise MalformedCertificateError(f"unsupported certificate version {version}")
    try:
        name = need(name_len, "name").decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedCertificateError("certificate name is not UTF-8") from exc
    try:
        validate_name(name)
    except MalformedNameError as exc:
        raise MalformedCertificateError(str(exc)) from exc
    if name_len != len(name.encode("utf-8")):
        raise MalformedCertificateError("name length field mismatch")
    public_point = need(33, "public point")
    issued_at = struct.unpack(">Q", need(8, "timestamp"))[0]
    self_signature = Signature.from_bytes(need(64, "self-signature"))
    (n_endorsements,) = struct.unpack(">H", need(2, "endorsement count"))
    endorsements = []
    for _ in range(n_endorsements):
        fp = need(32, "endorser fingerprint")
        sig = Signature.from_bytes(need(64, "endorsement signature"))
        endorsements.append(Endorsement(fp, sig))
    if pos != len(data):
        raise MalformedCertificateError(f"{len(data) - pos} trailing bytes")
    return Certificate(
        name=name,
        public_point=public_point,
        issued_at=issued_at,
        self_signature=self_signature,
        endorsements=tuple(endorsements),
        version=version,
    )


def serialize_revocation(record: RevocationRecord) -> bytes:
    if len(record.cert_fingerprint) != 32:
        raise MalformedRevocationError("fingerprint must be 32 bytes")
    return (
        record.cert_fingerprint
        + struct.pack(">Q", record.revoked_at)
        + record.revocation_signature.to_bytes()
    )


def parse_revocation(data: bytes) -> RevocationRecord:
    if len(data) != 32 + 8 + 64:
        raise MalformedRevocationError(f"revocation record must be 104 bytes, got {len(data)}")
    return RevocationRecord(
        cert_fingerprint=data[:32],
        revoked_at=struct.unpack(">Q", data[32:40])[0],
        revocation_signature=Signature.from_bytes(data[40:]),
    )
