"""Trust-on-first-use, key rotation, and revocation, end to end.

Run:

    python demos/trust_lifecycle.py
"""

import tempfile
from pathlib import Path

from wordsig import (
    RevokedDb,
    Segment,
    TrustStore,
    create_certificate,
    create_revocation,
    generate_keypair,
    sign_stream,
    verify_stream,
    write_stream,
)
from wordsig.verifier import ScriptedOracle

key_v1 = generate_keypair()
cert_v1 = create_certificate("JaneDoe123", key_v1, issued_at=1_700_000_000)
segments = [Segment(1, "hello world")]

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)
    stream_v1 = tmp / "stream-v1"
    write_stream(sign_stream(segments, cert_v1, key_v1), stream_v1)
    store = TrustStore(path=tmp / "trusted.jsonl")

    print("first contact: the viewer is asked and accepts")
    oracle = ScriptedOracle()
    verdict, _ = verify_stream(stream_v1, trust_store=store, oracle=oracle)
    print(f"  questions asked: {[q.kind.value for q in oracle.questions]}")
    print(f"  verdict: {verdict.message}")

    print("second viewing: the certificate is pinned, no questions")
    store = TrustStore.load(tmp / "trusted.jsonl")  # as a fresh process would
    oracle = ScriptedOracle()
    verdict, _ = verify_stream(stream_v1, trust_store=store, oracle=oracle)
    print(f"  questions asked: {[q.kind.value for q in oracle.questions]}")
    print(f"  verdict: {verdict.message}")

    print("Jane rotates her key; the wary viewer declines the changed certificate")
    key_v2 = generate_keypair()
    cert_v2 = create_certificate("JaneDoe123", key_v2, issued_at=1_700_500_000)
    stream_v2 = tmp / "stream-v2"
    write_stream(sign_stream(segments, cert_v2, key_v2), stream_v2)
    oracle = ScriptedOracle(accept_cert_changed=False)
    verdict, _ = verify_stream(stream_v2, trust_store=store, oracle=oracle)
    print(f"  questions asked: {[q.kind.value for q in oracle.questions]}")
    print(f"  verdict: {verdict.message}")

    print("a decline persists nothing; accepting both questions pins the new key")
    oracle = ScriptedOracle()
    verdict, _ = verify_stream(stream_v2, trust_store=store, oracle=oracle)
    print(f"  questions asked: {[q.kind.value for q in oracle.questions]}")
    print(f"  verdict: {verdict.message}")

    print("the old key leaks; Jane revokes her first certificate")
    revoked = RevokedDb(path=tmp / "revoked.jsonl")
    revoked.add(create_revocation(key_v1, cert_v1, revoked_at=1_700_600_000), cert_v1)
    verdict, _ = verify_stream(
        stream_v1, trust_store=store, revoked_db=revoked, oracle=ScriptedOracle()
    )
    print(f"  verdict: {verdict.message}")
