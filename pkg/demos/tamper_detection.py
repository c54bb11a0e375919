"""Show how each kind of stream tampering is caught.

Every frame signs the previous frame's words, so edits that survive a
single-frame check still break the chain. Run:

    python demos/tamper_detection.py
"""

from wordsig import (
    Segment,
    ScriptedOracle,
    create_certificate,
    generate_keypair,
)
from wordsig.errors import MalformedStreamError
from wordsig.signer import sign_stream
from wordsig.verifier import begin, feed, finish

keypair = generate_keypair()
cert = create_certificate("JaneDoe123", keypair, issued_at=1_700_000_000)
segments = [Segment(i + 1, words) for i, words in
            enumerate(["we are", "not at", "war today"])]
frames = sign_stream(segments, cert, keypair)


def run(triples):
    try:
        session = begin(triples[0][1], triples[0][2], None, None, ScriptedOracle())
        for index, payload_text, caption in triples[1:]:
            if session.verdict is not None:
                break
            feed(session, index, payload_text, caption)
        return finish(session).message
    except MalformedStreamError as exc:
        return f"malformed stream ({exc})"


def triples(frame_list):
    return [(i, f.payload_text, f.caption) for i, f in enumerate(frame_list)]


print("untouched stream:")
print(" ", run(triples(frames)), "\n")

print("caption of frame 2 edited ('not at' -> 'now at'):")
tampered = triples(frames)
tampered[2] = (2, tampered[2][1], "now at")
print(" ", run(tampered), "\n")

print("frames 2 and 3 swapped:")
swapped = list(frames)
swapped[2], swapped[3] = swapped[3], swapped[2]
print(" ", run(triples(swapped)), "\n")

print("frame 2 deleted:")
print(" ", run(triples(frames[:2] + frames[3:])), "\n")

print("terminal frame cut off (truncation):")
print(" ", run(triples(frames[:-1])), "\n")

print("certificate swapped for another self-consistent 'JaneDoe123':")
other_key = generate_keypair()
other_cert = create_certificate("JaneDoe123", other_key, issued_at=1_700_000_001)
substituted = [sign_stream([], other_cert, other_key, emit_terminal=False)[0]] + list(frames[1:])
print(" ", run(triples(substituted)))
