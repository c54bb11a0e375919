"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Run with `pytest -v -s tests/test_acceptance.py`.

Criteria:
  1. round-trip soundness on 200 random transcripts (< 30 s)
  2. exhaustive tamper matrix on a fixed 5-frame stream, 100% detection
     with branch-exact verdicts
  3. verdict-string fidelity for the seven protocol return strings
  4. byte-exact agreement with the independent RFC 6979 oracle (20 vectors)
  5. codec round-trip for 500 random payloads + minimal-version and
     error-correction-budget checks
  6. trust-on-first-use behavior across restarts, declines, rotation,
     and revocation
  7. performance sanity: 1000-segment stream signs in < 10 s and verifies
     in < 5 s
"""

from __future__ import annotations

import hashlib
import json
import random
import string
import time
from pathlib import Path

import pytest

from wordsig import certs, crypto, payload, qr, signer, verifier
from wordsig import qrtables as tables
from wordsig.errors import MalformedStreamError, WordsigError
from wordsig.store import RevokedDb, TrustStore
from wordsig.verifier import QuestionKind, ScriptedOracle, VerdictCode

KEY = crypto.generate_keypair(hashlib.sha256(b"wordsig-test-key-1").digest())
CERT = certs.create_certificate("JaneDoe123", KEY, 1700000000)
ROTATED_KEY = crypto.generate_keypair(hashlib.sha256(b"wordsig-test-key-2").digest())
ROTATED_CERT = certs.create_certificate("JaneDoe123", ROTATED_KEY, 1700000002)


def _ok(line: str) -> None:
    print(f"\nACCEPTANCE PASS: {line}")


def frames_to_triples(frames):
    return [(i, f.payload_text, f.caption) for i, f in enumerate(frames)]


def run_triples(triples, store=None, revoked=None, oracle=None):
    """Drive the state machine; returns ('verdict', Verdict) or ('malformed', index)."""
    oracle = oracle or ScriptedOracle()
    try:
        session = verifier.begin(triples[0][1], triples[0][2], store, revoked, oracle)
        for index, payload_text, caption in triples[1:]:
            if session.verdict is not None:
                break
            verifier.feed(session, index, payload_text, caption)
        return ("verdict", verifier.finish(session))
    except MalformedStreamError as exc:
        return ("malformed", exc.frame_index)


# ---------------------------------------------------------------------------
# 1. Round-trip soundness
# ---------------------------------------------------------------------------

def test_round_trip_soundness_200_random_transcripts():
    rng = random.Random(20220901)
    started = time.perf_counter()
    for case in range(200):
        n_words = rng.randrange(0, 51)
        times = sorted(rng.randrange(0, 20_000) for _ in range(n_words))
        words = [
            signer.TimedWord(t, "".join(rng.choices(string.ascii_lowercase, k=rng.randrange(1, 9))))
            for t in times
        ]
        segments = signer.segment_transcript(words)
        with_terminal = rng.random() < 0.5
        frames = signer.sign_stream(segments, CERT, KEY, emit_terminal=with_terminal)
        kind, verdict = run_triples(frames_to_triples(frames))
        assert kind == "verdict", f"case {case}: malformed"
        expected = VerdictCode.VERIFIED if with_terminal else VerdictCode.UNTERMINATED
        assert verdict.code is expected, f"case {case}: {verdict.code} != {expected}"
    elapsed = time.perf_counter() - started
    assert elapsed < 30, f"took {elapsed:.1f}s, budget is 30s"
    _ok(f"round-trip soundness: 200/200 random transcripts in {elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 2. Exhaustive tamper matrix
# ---------------------------------------------------------------------------

FIXED_WORDS = ["we are", "not at", "war today"]
FIXED_SEGMENTS = [signer.Segment(i + 1, w) for i, w in enumerate(FIXED_WORDS)]
FIXED_FRAMES = signer.sign_stream(FIXED_SEGMENTS, CERT, KEY)  # 5 frames: 0..4
OTHER_FRAMES = signer.sign_stream(
    [signer.Segment(i + 1, w) for i, w in enumerate(["alpha beta", "gamma delta", "epsilon"])],
    CERT,
    KEY,
)


def _flip_char(text: str, pos: int) -> str:
    replacement = "X" if text[pos] != "X" else "Y"
    return text[:pos] + replacement + text[pos + 1:]


def _predict_payload_flip(frame_index: int, mutated: str, caption: str):
    """Expected branch for a payload mutation, derived from the grammar."""
    if frame_index == 0:
        try:
            cert = payload.decode_cert_payload(mutated)
        except WordsigError:
            return ("malformed", 0)
        if cert.name != certs.extract_name(caption):
            return ("verdict", VerdictCode.FAKE_NAME_MISMATCH)
        return ("verdict", VerdictCode.FAKE_CERT_SIGNATURE)
    try:
        words, _ = payload.decode_segment_payload(mutated)
    except WordsigError:
        return ("malformed", frame_index)
    if words != caption:
        return ("verdict", VerdictCode.FAKE_TEXT_MISMATCH)
    return ("verdict", VerdictCode.FAKE_SIGNATURE)


def _outcome_matches(outcome, expected) -> bool:
    kind, value = outcome
    want_kind, want_value = expected
    if kind != want_kind:
        return False
    if kind == "malformed":
        return value == want_value
    return value.code is want_value


def test_tamper_matrix_fixed_stream():
    rng = random.Random(5)
    base = frames_to_triples(FIXED_FRAMES)
    checked = {"caption": 0, "payload": 0, "swap": 0, "drop": 0, "subst": 0, "splice": 0}

    # -- single caption-character flips (sampled 50) -------------------------
    caption_positions = [
        (i, p) for i, _, caption in base for p in range(len(caption))
    ]
    for i, p in rng.sample(caption_positions, 50):
        triples = list(base)
        index, payload_text, caption = triples[i]
        triples[i] = (index, payload_text, _flip_char(caption, p))
        expected_code = (
            VerdictCode.FAKE_NAME_MISMATCH if i == 0 else VerdictCode.FAKE_TEXT_MISMATCH
        )
        outcome = run_triples(triples)
        assert _outcome_matches(outcome, ("verdict", expected_code)), (
            f"caption flip frame {i} pos {p}: {outcome}"
        )
        if i >= 1:
            assert outcome[1].frame_index == i
        checked["caption"] += 1

    # -- single payload-character flips (sampled 50) -------------------------
    payload_positions = [
        (i, p) for i, payload_text, _ in base for p in range(len(payload_text))
    ]
    for i, p in rng.sample(payload_positions, 50):
        triples = list(base)
        index, payload_text, caption = triples[i]
        mutated = _flip_char(payload_text, p)
        triples[i] = (index, mutated, caption)
        expected = _predict_payload_flip(i, mutated, caption)
        outcome = run_triples(triples)
        assert _outcome_matches(outcome, expected), (
            f"payload flip frame {i} pos {p}: got {outcome}, expected {expected}"
        )
        checked["payload"] += 1

    # -- all frame-pair swaps (C(5,2) = 10) ----------------------------------
    for i in range(5):
        for j in range(i + 1, 5):
            swapped = list(FIXED_FRAMES)
            swapped[i], swapped[j] = swapped[j], swapped[i]
            outcome = run_triples(frames_to_triples(swapped))
            if i == 0:
                expected = ("malformed", 0)  # a segment payload where the cert belongs
            else:
                expected = ("verdict", VerdictCode.FAKE_SIGNATURE)
            assert _outcome_matches(outcome, expected), f"swap ({i},{j}): {outcome}"
            if i >= 1:
                assert outcome[1].frame_index == i  # first break at the earlier slot
            checked["swap"] += 1

    # -- all single-frame drops ----------------------------------------------
    for k in range(5):
        dropped = [f for idx, f in enumerate(FIXED_FRAMES) if idx != k]
        outcome = run_triples(frames_to_triples(dropped))
        if k == 0:
            expected = ("malformed", 0)
        elif k == 4:
            expected = ("verdict", VerdictCode.UNTERMINATED)  # terminal dropped
        else:
            expected = ("verdict", VerdictCode.FAKE_SIGNATURE)
        assert _outcome_matches(outcome, expected), f"drop {k}: {outcome}"
        checked["drop"] += 1

    # -- certificate substitution ---------------------------------------------
    substitute = signer.sign_stream([], ROTATED_CERT, ROTATED_KEY, emit_terminal=False)[0]
    triples = frames_to_triples([substitute] + list(FIXED_FRAMES[1:]))
    outcome = run_triples(triples)
    assert _outcome_matches(outcome, ("verdict", VerdictCode.FAKE_SIGNATURE))
    assert outcome[1].frame_index == 1
    checked["subst"] += 1

    # -- all cross-stream splices from the same key ---------------------------
    # keep_a frames of A, then B from position from_b on; (1,1) reproduces
    # stream B exactly and so is not a tamper
    for keep_a in range(1, 5):
        for from_b in range(1, 5):
            if keep_a == 1 and from_b == 1:
                continue
            spliced = list(FIXED_FRAMES[:keep_a]) + list(OTHER_FRAMES[from_b:])
            outcome = run_triples(frames_to_triples(spliced))
            assert _outcome_matches(outcome, ("verdict", VerdictCode.FAKE_SIGNATURE)), (
                f"splice ({keep_a},{from_b}): {outcome}"
            )
            assert outcome[1].frame_index == keep_a
            checked["splice"] += 1

    total = sum(checked.values())
    _ok(
        "tamper matrix: "
        + ", ".join(f"{name}={count}" for name, count in checked.items())
        + f" -- {total}/{total} detected with branch-exact verdicts"
    )


# ---------------------------------------------------------------------------
# 3. Verdict-string fidelity
# ---------------------------------------------------------------------------

def test_verdict_string_fidelity():
    frames = frames_to_triples(FIXED_FRAMES)

    # name mismatch
    bad_name = [(0, frames[0][1], "[JohnDoe999's public key certificate]")] + frames[1:]
    _, verdict = run_triples(bad_name)
    assert verdict.message == "Fake: text name does not match certificate name"

    # certificate signature
    from dataclasses import replace

    forged = replace(CERT, issued_at=CERT.issued_at + 1)
    bad_cert = [(0, payload.encode_cert_payload(forged), frames[0][2])] + frames[1:]
    _, verdict = run_triples(bad_cert)
    assert verdict.message == "Fake: certificate signature does not match certificate name."

    # revoked
    revoked = RevokedDb()
    revoked.add(certs.create_revocation(KEY, CERT, 1700001234), CERT)
    _, verdict = run_triples(frames, revoked=revoked)
    assert verdict.message.startswith(
        "Possibly fake: Certificate was revoked using its own private key on"
    )

    # untrusted
    _, verdict = run_triples(frames, oracle=ScriptedOracle(accept_first_trust=False))
    assert verdict.message == "Possibly fake: you do not trust the certificate source."

    # certificate changed
    store = TrustStore()
    store.append_trusted(ROTATED_CERT, 1)
    _, verdict = run_triples(
        frames, store=store, oracle=ScriptedOracle(accept_cert_changed=False)
    )
    assert "does not match latest trusted certificate for" in verdict.message

    # text mismatch
    tampered = list(frames)
    tampered[2] = (2, frames[2][1], "changed words")
    _, verdict = run_triples(tampered)
    assert verdict.message == "Fake: QR code text content does not match displayed text content."

    # verified
    _, verdict = run_triples(frames)
    assert verdict.message == "Signature stream verified."

    _ok("verdict-string fidelity: all seven protocol strings character-exact")


# ---------------------------------------------------------------------------
# 4. Crypto oracle equivalence
# ---------------------------------------------------------------------------

def test_crypto_oracle_equivalence():
    vectors = json.loads(
        (Path(__file__).parent / "vectors" / "ecdsa_rfc6979.json").read_text()
    )
    assert len(vectors) == 20
    for vec in vectors:
        key = crypto.generate_keypair(bytes.fromhex(vec["key_entropy_hex"]))
        message = bytes.fromhex(vec["message_hex"])
        oracle_sig = bytes.fromhex(vec["signature_hex"])
        assert crypto.sign(message, key).to_bytes() == oracle_sig
        assert crypto.verify(message, oracle_sig, key.public_point)
        parsed = crypto.Signature.from_bytes(oracle_sig)
        twin = crypto.Signature(parsed.r, crypto.N - parsed.s)
        assert not crypto.verify(message, twin, key.public_point)
    _ok("crypto oracle equivalence: 20/20 byte-exact, all verify, high-s rejected")


# ---------------------------------------------------------------------------
# 5. Codec round-trip
# ---------------------------------------------------------------------------

def test_codec_round_trip_500_payloads():
    rng = random.Random(99)
    alphabet = string.ascii_letters + string.digits + " :.,!?"
    for case in range(500):
        n = rng.choice((0, 1, 2, 5, 10, 40, 100, 200, 300, 400))
        words = "".join(rng.choices(alphabet, k=n))[:400]
        sig = crypto.Signature(rng.getrandbits(255) | 1, rng.getrandbits(250) | 1)
        text = payload.encode_segment_payload(words, sig)

        matrix = qr.qr_encode(text, "M")
        byte_len = len(text.encode("utf-8"))
        minimal = next(
            v for v in range(1, 41) if byte_len <= tables.byte_mode_capacity(v, "M")
        )
        assert matrix.version == minimal, f"case {case}: version not minimal"

        png = qr.render_png(matrix, module_pixels=2)
        decoded_text = qr.qr_decode(qr.read_png(png))
        assert decoded_text == text, f"case {case}: pipeline mismatch"
        words_back, sig_back = payload.decode_segment_payload(decoded_text)
        assert (words_back, sig_back) == (words, sig)

    # EC-level-M corruption within the per-block budget must still decode
    matrix = qr.qr_encode("corruption budget trials", "M")
    budget = tables.EC_PER_BLOCK[matrix.version]["M"] // 2
    positions = qr._data_positions(matrix.version)
    for trial in range(20):
        bits = matrix.bits.copy()
        for cw in rng.sample(range(tables.TOTAL_CODEWORDS[matrix.version]), budget):
            r, c = positions[cw * 8 + rng.randrange(8)]
            bits[r, c] ^= True
        assert qr.qr_decode(qr.QrMatrix(matrix.version, "M", bits)) == (
            "corruption budget trials"
        ), f"trial {trial}"
    _ok("codec round-trip: 500/500 payloads, minimal versions, 20/20 corruption trials")


# ---------------------------------------------------------------------------
# 6. Trust-on-first-use behavior
# ---------------------------------------------------------------------------

def test_tofu_scenarios(tmp_path):
    frames = FIXED_FRAMES

    # (a) first-contact accept persists across a process restart
    store_path = tmp_path / "trusted.jsonl"
    signer.write_stream(frames, tmp_path / "stream", created_at=0)
    verdict, _ = verifier.verify_stream(
        tmp_path / "stream", trust_store=TrustStore.load(store_path),
        oracle=ScriptedOracle(), now=1,
    )
    assert verdict.code is VerdictCode.VERIFIED
    reloaded = TrustStore.load(store_path)  # simulates a new process
    assert reloaded.contains(CERT)
    decliner = ScriptedOracle(accept_first_trust=False, accept_cert_changed=False)
    verdict, _ = verifier.verify_stream(
        tmp_path / "stream", trust_store=reloaded, oracle=decliner
    )
    assert verdict.code is VerdictCode.VERIFIED
    assert decliner.questions == []  # pinned: no question was asked

    # (b) first-contact decline persists nothing
    decline_path = tmp_path / "declined.jsonl"
    decliner = ScriptedOracle(accept_first_trust=False)
    verdict, _ = verifier.verify_stream(
        tmp_path / "stream", trust_store=TrustStore.load(decline_path), oracle=decliner
    )
    assert verdict.code is VerdictCode.POSSIBLY_FAKE_UNTRUSTED
    assert not decline_path.exists()

    # (c) key rotation for a known name triggers the cert-changed question
    rotation_store = TrustStore(path=tmp_path / "rotation.jsonl")
    rotation_store.append_trusted(ROTATED_CERT, 1)
    oracle = ScriptedOracle()
    verdict, _ = verifier.verify_stream(
        tmp_path / "stream", trust_store=rotation_store, oracle=oracle
    )
    assert verdict.code is VerdictCode.VERIFIED
    assert QuestionKind.CERT_CHANGED in [q.kind for q in oracle.questions]

    # (d) revoked certificate yields the revocation verdict with its date
    revoked = RevokedDb()
    record = certs.create_revocation(KEY, CERT, 1700001234)
    revoked.add(record, CERT)
    verdict, _ = verifier.verify_stream(
        tmp_path / "stream", revoked_db=revoked, oracle=ScriptedOracle()
    )
    assert verdict.code is VerdictCode.POSSIBLY_FAKE_REVOKED
    assert verdict.revoked_at == 1700001234
    _ok("trust-on-first-use: accept-persist, decline-nothing, rotation, revocation")


# ---------------------------------------------------------------------------
# 7. Performance sanity
# ---------------------------------------------------------------------------

@pytest.mark.slow
def test_performance_1000_segments(tmp_path):
    segments = [signer.Segment(i + 1, f"spoken words number {i}") for i in range(1000)]

    started = time.perf_counter()
    frames = signer.sign_stream(segments, CERT, KEY)
    signer.write_stream(frames, tmp_path / "big", created_at=0)
    sign_elapsed = time.perf_counter() - started
    assert sign_elapsed < 10, f"sign+encode+render took {sign_elapsed:.1f}s (budget 10s)"

    started = time.perf_counter()
    verdict, _ = verifier.verify_stream(tmp_path / "big", oracle=ScriptedOracle())
    verify_elapsed = time.perf_counter() - started
    assert verdict.code is VerdictCode.VERIFIED
    assert verify_elapsed < 5, f"verify took {verify_elapsed:.1f}s (budget 5s)"
    _ok(
        f"performance: 1000-segment stream signed+rendered in {sign_elapsed:.1f}s, "
        f"verified in {verify_elapsed:.1f}s"
    )
