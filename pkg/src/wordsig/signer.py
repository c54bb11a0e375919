"""Transcript segmentation and chained frame-stream production.

A timed transcript is grouped into fixed windows (2 seconds by default).
Frame 0 announces the certificate; every later frame carries its segment's
words plus a signature over the PREVIOUS frame's caption, so no frame can be
moved without breaking the chain. Empty windows still produce (empty,
signed) frames: the frame index stays locked to wall-clock time, making
deletion of silent spans detectable.

An extension past the base algorithm: an optional terminal frame with empty
words signs the final caption, which would otherwise go unsigned and be
forgeable by truncation. The verifier treats a missing terminal frame as
"unterminated", not as fake.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass
from pathlib import Path

from .certs import Certificate, certificate_caption, verify_certificate
from .crypto import KeyPair, sign
from .errors import KeyCertMismatchError, MalformedStreamError, TranscriptError
from .payload import encode_cert_payload, encode_segment_payload
from .qr import QrMatrix, qr_encode, render_png

DEFAULT_SEG_MS = 2000

MANIFEST_NAME = "stream.jsonl"
META_NAME = "stream.meta"


@dataclass(frozen=True)
class TimedWord:
    start_ms: int
    text: str

    def __post_init__(self):
        if self.start_ms < 0:
            raise TranscriptError(f"negative start_ms: {self.start_ms}")
        if not self.text:
            raise TranscriptError("empty word")
        if any(ch.isspace() for ch in self.text):
            raise TranscriptError(f"word contains whitespace: {self.text!r}")


@dataclass(frozen=True)
class Segment:
    index: int  # 1-based window number
    words: str  # space-joined words of the window, may be empty


@dataclass(frozen=True)
class Frame:
    index: int
    payload_text: str
    caption: str
    qr: QrMatrix
    png: bytes | None = None


def segment_transcript(words: list[TimedWord], seg_ms: int = DEFAULT_SEG_MS) -> list[Segment]:
    """Group words into windows [(i-1)*seg_ms, i*seg_ms), one segment each.

    Produces segments from window 1 through the window containing the last
    word; windows with no words yield empty segments.
    """
    if seg_ms < 1:
        raise TranscriptError(f"seg_ms must be positive, got {seg_ms}")
    for earlier, later in zip(words, words[1:]):
        if later.start_ms < earlier.start_ms:
            raise TranscriptError(
                f"transcript not sorted: {later.start_ms} after {earlier.start_ms}"
            )
    if not words:
        return []
    n_windows = words[-1].start_ms // seg_ms + 1
    buckets: list[list[str]] = [[] for _ in range(n_windows)]
    for word in words:
        buckets[word.start_ms // seg_ms].append(word.text)
    return [Segment(i + 1, " ".join(bucket)) for i, bucket in enumerate(buckets)]


def sign_stream(
    segments: list[Segment],
    cert: Certificate,
    keypair: KeyPair,
    emit_terminal: bool = True,
) -> list[Frame]:
    """Emit the chained frame stream for segments indexed 1..n."""
    if keypair.public_point != cert.public_point:
        raise KeyCertMismatchError("keypair does not match the certificate")
    if not verify_certificate(cert):
        raise KeyCertMismatchError("certificate fails self-verification")
    for i, segment in enumerate(segments):
        if segment.index != i + 1:
            raise TranscriptError(
                f"segments must be indexed 1..n, found {segment.index} at position {i}"
            )

    caption0 = certificate_caption(cert.name)
    frames = [Frame(0, encode_cert_payload(cert), caption0, qr_encode(encode_cert_payload(cert)))]
    prev_caption = caption0
    for segment in segments:
        payload_text = encode_segment_payload(
            segment.words, sign(prev_caption.encode("utf-8"), keypair)
        )
        frames.append(
            Frame(segment.index, payload_text, segment.words, qr_encode(payload_text))
        )
        prev_caption = segment.words
    if emit_terminal:
        payload_text = encode_segment_payload(
            "", sign(prev_caption.encode("utf-8"), keypair)
        )
        frames.append(Frame(len(segments) + 1, payload_text, "", qr_encode(payload_text)))
    return frames


def write_stream(
    frames: list[Frame],
    directory: str | Path,
    seg_ms: int = DEFAULT_SEG_MS,
    module_pixels: int = 8,
    created_at: int | None = None,
) -> Path:
    """Write stream.jsonl, per-frame PNGs, and stream.meta into a directory.

    The manifest is written last via temp-and-rename so a failed run never
    leaves a partial manifest behind. Returns the manifest path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    records = []
    for frame in frames:
        png_name = f"frame_{frame.index:05d}.png"
        png = frame.png if frame.png is not None else render_png(frame.qr, module_pixels)
        (directory / png_name).write_bytes(png)
        records.append(
            {
                "index": frame.index,
                "payload_text": frame.payload_text,
                "caption": frame.caption,
                "png_file": png_name,
            }
        )
    manifest = directory / MANIFEST_NAME
    tmp = directory / (MANIFEST_NAME + ".tmp")
    tmp.write_text("".join(json.dumps(r) + "\n" for r in records))
    os.replace(tmp, manifest)
    meta = {
        "seg_ms": seg_ms,
        "created_at": int(time.time()) if created_at is None else created_at,
    }
    (directory / META_NAME).write_text(json.dumps(meta) + "\n")
    return manifest


@dataclass(frozen=True)
class ManifestEntry:
    index: int
    caption: str
    payload_text: str | None
    png_file: str | None


def read_stream_manifest(stream_dir: str | Path) -> list[ManifestEntry]:
    """Load and order-check the stream.jsonl records of a stream directory."""
    stream_dir = Path(stream_dir)
    manifest = stream_dir / MANIFEST_NAME
    if not manifest.is_file():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {stream_dir}")
    entries = []
    for line_no, line in enumerate(manifest.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            entry = ManifestEntry(
                index=int(record["index"]),
                caption=str(record["caption"]),
                payload_text=(
                    str(record["payload_text"]) if record.get("payload_text") is not None else None
                ),
                png_file=(
                    str(record["png_file"]) if record.get("png_file") is not None else None
                ),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedStreamError(line_no - 1, f"bad manifest line {line_no}: {exc}") from exc
        entries.append(entry)
    for position, entry in enumerate(entries):
        if entry.index != position:
            raise MalformedStreamError(
                position, f"manifest indices must be 0..n in order, found {entry.index}"
            )
    return entries


def load_transcript(path: str | Path) -> list[TimedWord]:
    """Read a JSON Lines transcript: one {start_ms, text} object per line."""
    words = []
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            words.append(TimedWord(int(record["start_ms"]), str(record["text"])))
        except TranscriptError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise TranscriptError(f"bad transcript line {line_no}: {exc}") from exc
    return words
