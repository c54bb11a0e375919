"""WordSig: chained ECDSA-signed QR streams for authenticating spoken words.

A signer turns a timed transcript into a stream of QR payloads where each
frame carries a signature over the previous frame's displayed words; a
verifier replays the stream through a trust-aware state machine and returns
an exact authenticity verdict.

Only the spoken words are signed and verified, never the surrounding video.
"""

from .certs import (
    Certificate,
    RevocationRecord,
    create_certificate,
    create_revocation,
    endorse_certificate,
    extract_name,
    parse_certificate,
    serialize_certificate,
    verify_certificate,
    verify_revocation,
)
from .crypto import KeyPair, Signature, fingerprint, generate_keypair, sign, verify
from .errors import WordsigError
from .payload import (
    decode_cert_payload,
    decode_segment_payload,
    encode_cert_payload,
    encode_segment_payload,
)
from .qr import QrMatrix, qr_decode, qr_encode, read_png, render_png
from .signer import (
    Frame,
    Segment,
    TimedWord,
    segment_transcript,
    sign_stream,
    write_stream,
)
from .store import RevokedDb, TrustStore
from .verifier import (
    ScriptedOracle,
    TrustQuestion,
    Verdict,
    VerdictCode,
    begin,
    feed,
    finish,
    verify_stream,
)

__version__ = "0.1.0"

__all__ = [
    "Certificate",
    "Frame",
    "KeyPair",
    "QrMatrix",
    "RevocationRecord",
    "RevokedDb",
    "ScriptedOracle",
    "Segment",
    "Signature",
    "TimedWord",
    "TrustQuestion",
    "TrustStore",
    "Verdict",
    "VerdictCode",
    "WordsigError",
    "begin",
    "create_certificate",
    "create_revocation",
    "decode_cert_payload",
    "decode_segment_payload",
    "encode_cert_payload",
    "encode_segment_payload",
    "endorse_certificate",
    "extract_name",
    "feed",
    "fingerprint",
    "finish",
    "generate_keypair",
    "parse_certificate",
    "qr_decode",
    "qr_encode",
    "read_png",
    "render_png",
    "segment_transcript",
    "serialize_certificate",
    "sign",
    "sign_stream",
    "verify",
    "verify_certificate",
    "verify_revocation",
    "verify_stream",
    "write_stream",
]
