"""Generate frozen ECDSA test vectors with an independent reference.

Writes tests/vectors/ecdsa_rfc6979.json. The reference implementation is
OpenSSL via the `cryptography` package (deterministic RFC 6979 signing);
its raw-s output is normalized to low-s before freezing, matching the
package's canonical form. Run from the repository root:

    python tests/gen_crypto_vectors.py
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import ec
from cryptography.hazmat.primitives.asymmetric.utils import decode_dss_signature

N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141

MESSAGES = [
    b"",
    b"sample",
    b"test",
    b"Satoshi Nakamoto",
    b"we are not at war",
    b"[JaneDoe123's public key certificate]",
    b"a" * 400,
    bytes(range(256)),
    "unicode ☃ snowman".encode(),
    b"\x00" * 32,
]


def main() -> None:
    vectors = []
    for i in range(20):
        entropy = hashlib.sha256(f"wordsig-oracle-key-{i}".encode()).digest()
        scalar = int.from_bytes(entropy, "big") % N
        assert scalar != 0
        key = ec.derive_private_key(scalar, ec.SECP256K1())
        pub = key.public_key().public_bytes(
            serialization.Encoding.X962,
            serialization.PublicFormat.CompressedPoint,
        )
        message = MESSAGES[i % len(MESSAGES)] + (b"|%d" % i if i >= len(MESSAGES) else b"")
        der = key.sign(message, ec.ECDSA(hashes.SHA256(), deterministic_signing=True))
        r, s = decode_dss_signature(der)
        if s > N // 2:
            s = N - s
        vectors.append(
            {
                "key_entropy_hex": entropy.hex(),
                "private_scalar_hex": f"{scalar:064x}",
                "public_point_hex": pub.hex(),
                "message_hex": message.hex(),
                "signature_hex": f"{r:064x}{s:064x}",
            }
        )
    out = Path(__file__).parent / "vectors" / "ecdsa_rfc6979.json"
    out.parent.mkdir(exist_ok=True)
    out.write_text(json.dumps(vectors, indent=1) + "\n")
    print(f"wrote {len(vectors)} vectors to {out}")


if __name__ == "__main__":
    main()
