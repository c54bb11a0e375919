"""Sign a short timed transcript and verify the resulting stream.

Run from the repository root:

    python demos/sign_and_verify.py
"""

import tempfile
from pathlib import Path

from wordsig import (
    ScriptedOracle,
    TimedWord,
    create_certificate,
    generate_keypair,
    segment_transcript,
    sign_stream,
    verify_stream,
    write_stream,
)

# Jane generates a keypair once and self-signs a certificate for her name.
keypair = generate_keypair()
cert = create_certificate("JaneDoe123", keypair, issued_at=1_700_000_000)
print(f"certificate for {cert.name}, key fingerprint {cert.fingerprint.hex()[:16]}...")

# Her device transcribes speech into timed words (milliseconds, word).
transcript = [
    TimedWord(0, "we"),
    TimedWord(350, "are"),
    TimedWord(700, "not"),
    TimedWord(2_100, "at"),
    TimedWord(2_500, "war"),
    TimedWord(6_300, "today"),  # note the silent 4-6s window in between
]

# Words are grouped into 2-second windows; silence still yields a segment.
segments = segment_transcript(transcript)
for segment in segments:
    print(f"  segment {segment.index}: {segment.words!r}")

# Each frame's QR payload signs the PREVIOUS frame's displayed words,
# chaining the whole stream back to the certificate announcement.
frames = sign_stream(segments, cert, keypair)
print(f"stream of {len(frames)} frames (certificate + segments + terminal)")
for frame in frames:
    print(f"  frame {frame.index}: caption={frame.caption!r} "
          f"QR v{frame.qr.version} ({frame.qr.side}x{frame.qr.side})")

with tempfile.TemporaryDirectory() as tmp:
    stream_dir = Path(tmp) / "stream"
    write_stream(frames, stream_dir)
    print(f"wrote manifest + PNGs to {stream_dir}")

    # The viewer replays the stream; the oracle stands in for the person
    # answering "Do you trust that this content is from JaneDoe123?"
    verdict, events = verify_stream(stream_dir, oracle=ScriptedOracle())
    for event in events:
        print(f"  [frame {event.frame_index}] {event.message}")
    print(f"verdict: {verdict.message}")
    assert verdict.code.value == "Verified"
