"""Stream verification as an explicit state machine.

Frame 0 is vetted in `begin`: certificate parse, caption-vs-certificate name
check, self-signature check, revocation lookup, then the trust decision,
which is delegated to a caller-supplied oracle (interactive prompt, service
round-trip, or scripted test double). Later frames go through `feed`, which
compares the QR words against the displayed caption and checks the carried
signature over the PREVIOUS caption. `finish` distinguishes a properly
terminated stream from one that merely ran out of frames.

Trust semantics: membership and latest-certificate queries are evaluated
against the store as it was when the session began, so a rotated key still
triggers the certificate-changed question even after the first-trust
acceptance. Accepted certificates are queued on the session and committed
to the store only once a final verdict is reached with no trust question
declined; an aborted session never persists half-made decisions.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Protocol

from .certs import Certificate, extract_name, verify_certificate
from .crypto import verify
from .errors import (
    MalformedCaptionError,
    MalformedStreamError,
    QrDecodeError,
    SessionMisuseError,
    WordsigError,
)
from .payload import decode_cert_payload, decode_segment_payload
from .qr import qr_decode
from .signer import ManifestEntry, read_stream_manifest
from .store import RevokedDb, TrustStore

PROGRESS_MESSAGE = "Signatures verified thus far..."
TRUST_QUESTION_PREFIX = "Do you trust that this content is from"


class VerdictCode(enum.Enum):
    FAKE_NAME_MISMATCH = "FakeNameMismatch"
    FAKE_CERT_SIGNATURE = "FakeCertSignature"
    POSSIBLY_FAKE_REVOKED = "PossiblyFakeRevoked"
    POSSIBLY_FAKE_UNTRUSTED = "PossiblyFakeUntrusted"
    POSSIBLY_FAKE_CERT_CHANGED = "PossiblyFakeCertChanged"
    FAKE_TEXT_MISMATCH = "FakeTextMismatch"
    FAKE_SIGNATURE = "FakeSignature"
    UNTERMINATED = "Unterminated"
    VERIFIED = "Verified"

    @property
    def is_fake(self) -> bool:
        return self.value.startswith("Fake")

    @property
    def is_possibly_fake(self) -> bool:
        return self.value.startswith("PossiblyFake")


@dataclass(frozen=True)
class Verdict:
    code: VerdictCode
    message: str
    frame_index: int | None = None
    revoked_at: int | None = None


def _revoked_date(revoked_at: int) -> str:
    return datetime.fromtimestamp(revoked_at, tz=timezone.utc).strftime("%Y-%m-%d")


def _fake_name_mismatch() -> Verdict:
    return Verdict(
        VerdictCode.FAKE_NAME_MISMATCH,
        "Fake: text name does not match certificate name",
        frame_index=0,
    )


def _fake_cert_signature() -> Verdict:
    return Verdict(
        VerdictCode.FAKE_CERT_SIGNATURE,
        "Fake: certificate signature does not match certificate name.",
        frame_index=0,
    )


def _possibly_fake_revoked(revoked_at: int) -> Verdict:
    return Verdict(
        VerdictCode.POSSIBLY_FAKE_REVOKED,
        "Possibly fake: Certificate was revoked using its own private key on "
        + _revoked_date(revoked_at),
        frame_index=0,
        revoked_at=revoked_at,
    )


def _possibly_fake_untrusted() -> Verdict:
    return Verdict(
        VerdictCode.POSSIBLY_FAKE_UNTRUSTED,
        "Possibly fake: you do not trust the certificate source.",
        frame_index=0,
    )


def _possibly_fake_cert_changed(name: str) -> Verdict:
    return Verdict(
        VerdictCode.POSSIBLY_FAKE_CERT_CHANGED,
        "Certificate does not match latest trusted certificate for "
        + name
        + "; Possibly fake signature stream.",
        frame_index=0,
    )


def _fake_text_mismatch(frame_index: int) -> Verdict:
    return Verdict(
        VerdictCode.FAKE_TEXT_MISMATCH,
        "Fake: QR code text content does not match displayed text content.",
        frame_index=frame_index,
    )


def _fake_signature(signature_index: int) -> Verdict:
    return Verdict(
        VerdictCode.FAKE_SIGNATURE,
        f"Fake: Signature {signature_index} does not match words and certificate.",
        frame_index=signature_index + 1,
    )


VERIFIED = Verdict(VerdictCode.VERIFIED, "Signature stream verified.")
UNTERMINATED = Verdict(
    VerdictCode.UNTERMINATED,
    "Signature stream verified except final segment (unterminated).",
)


class QuestionKind(enum.Enum):
    FIRST_TRUST = "first-trust"
    CERT_CHANGED = "cert-changed"


@dataclass(frozen=True)
class TrustQuestion:
    name: str
    kind: QuestionKind

    @property
    def text(self) -> str:
        return f"{TRUST_QUESTION_PREFIX} {self.name}?"


class TrustOracle(Protocol):
    def ask(self, question: TrustQuestion) -> bool: ...


@dataclass
class ScriptedOracle:
    """Test/CLI double answering trust questions from fixed flags."""

    accept_first_trust: bool = True
    accept_cert_changed: bool = True
    questions: list[TrustQuestion] = field(default_factory=list)

    def ask(self, question: TrustQuestion) -> bool:
        self.questions.append(question)
        if question.kind is QuestionKind.FIRST_TRUST:
            return self.accept_first_trust
        return self.accept_cert_changed


class _State(enum.Enum):
    AWAIT_CERT = "await-cert"
    CERT_ACCEPTED = "cert-accepted"
    STREAMING = "streaming"
    DONE = "done"
    FAILED = "failed"


@dataclass(frozen=True)
class VerifyEvent:
    frame_index: int
    message: str


@dataclass
class VerifySession:
    cert: Certificate | None = None
    last_caption: str | None = None
    last_words: str | None = None
    next_index: int = 0
    events: list[VerifyEvent] = field(default_factory=list)
    verdict: Verdict | None = None
    pending_trust: list[Certificate] = field(default_factory=list)
    declined: bool = False
    state: _State = _State.AWAIT_CERT
    on_event: Callable[[VerifyEvent], None] | None = None

    def _log(self, frame_index: int, message: str) -> None:
        event = VerifyEvent(frame_index, message)
        self.events.append(event)
        if self.on_event is not None:
            self.on_event(event)

    def _conclude(self, verdict: Verdict) -> None:
        self.verdict = verdict
        self.state = _State.DONE
        at = verdict.frame_index if verdict.frame_index is not None else max(self.next_index - 1, 0)
        self._log(at, verdict.message)


def begin(
    payload_text: str,
    caption: str,
    trust_store: TrustStore | None,
    revoked_db: RevokedDb | None,
    oracle: TrustOracle,
    on_event: Callable[[VerifyEvent], None] | None = None,
) -> VerifySession:
    """Run the frame-0 checks and trust decision; returns the session.

    An undecodable frame 0 raises MalformedStreamError; every protocol-level
    failure instead lands the session in a Done state carrying its verdict.
    """
    session = VerifySession(on_event=on_event)
    store = trust_store if trust_store is not None else TrustStore()
    revoked = revoked_db if revoked_db is not None else RevokedDb()

    try:
        cert = decode_cert_payload(payload_text)
    except WordsigError as exc:
        session.state = _State.FAILED
        raise MalformedStreamError(0, f"certificate frame undecodable: {exc}") from exc
    session.cert = cert

    try:
        text_name = extract_name(caption)
    except MalformedCaptionError:
        text_name = None
    if text_name != cert.name:
        session._conclude(_fake_name_mismatch())
        return session
    session._log(0, f"text name matches certificate name: {cert.name}")

    if not verify_certificate(cert):
        session._conclude(_fake_cert_signature())
        return session
    session._log(0, "certificate self-signature verified")

    revoked_at = revoked.is_revoked(cert)
    if revoked_at is not None:
        session._conclude(_possibly_fake_revoked(revoked_at))
        return session

    # Trust checks run against the store as of session start; acceptance is
    # queued on the session and committed only with the final verdict.
    already_trusted = store.contains(cert)
    latest = store.latest_trusted_for(cert.name)
    if not already_trusted:
        question = TrustQuestion(cert.name, QuestionKind.FIRST_TRUST)
        session._log(0, question.text)
        if not oracle.ask(question):
            session.declined = True
            session._conclude(_possibly_fake_untrusted())
            return session
        session.pending_trust.append(cert)
        session._log(0, f"certificate trusted for {cert.name}")
    if latest is not None and latest != cert:
        session._log(
            0, f"Certificate does not match latest trusted certificate for {cert.name};"
        )
        session._log(0, "Possibly fake signature stream.")
        question = TrustQuestion(cert.name, QuestionKind.CERT_CHANGED)
        session._log(0, question.text)
        if not oracle.ask(question):
            session.declined = True
            session._conclude(_possibly_fake_cert_changed(cert.name))
            return session
        if cert not in session.pending_trust:
            session.pending_trust.append(cert)  # re-pin as latest for the name
        session._log(0, f"replacement certificate trusted for {cert.name}")

    session.state = _State.CERT_ACCEPTED
    session.last_caption = caption
    session.next_index = 1
    return session


def feed(session: VerifySession, index: int, payload_text: str, caption: str) -> VerifySession:
    """Check one segment frame; may conclude the session with a Fake verdict."""
    if session.state not in (_State.CERT_ACCEPTED, _State.STREAMING):
        raise SessionMisuseError(f"cannot feed frames in state {session.state.value}")
    if index != session.next_index:
        raise SessionMisuseError(
            f"frames must arrive in order: expected {session.next_index}, got {index}"
        )

    try:
        words, signature = decode_segment_payload(payload_text)
    except WordsigError as exc:
        session.state = _State.FAILED
        raise MalformedStreamError(index, f"segment frame undecodable: {exc}") from exc

    if words != caption:
        session._conclude(_fake_text_mismatch(index))
        return session
    if not verify(session.last_caption.encode("utf-8"), signature, session.cert.public_point):
        session._conclude(_fake_signature(index - 1))
        return session

    session._log(index, PROGRESS_MESSAGE)
    session.state = _State.STREAMING
    session.last_caption = caption
    session.last_words = words
    session.next_index = index + 1
    return session


def finish(session: VerifySession) -> Verdict:
    """Final verdict; idempotent once the session is done."""
    if session.verdict is not None:
        return session.verdict
    if session.state is _State.FAILED:
        raise SessionMisuseError("session failed on a malformed frame")
    if session.state is _State.AWAIT_CERT:
        raise SessionMisuseError("no frames were fed")
    if session.state is _State.STREAMING and session.last_words == "":
        session._conclude(VERIFIED)
    else:
        session._conclude(UNTERMINATED)
    return session.verdict


def commit_trust(session: VerifySession, trust_store: TrustStore, now: int | None = None) -> int:
    """Persist queued trust acceptances after a qualifying final verdict.

    Nothing is written when a trust question was declined or the session has
    not concluded. Returns the number of appended entries.
    """
    if session.verdict is None or session.declined or not session.pending_trust:
        return 0
    stamp = int(time.time()) if now is None else now
    for cert in session.pending_trust:
        trust_store.append_trusted(cert, stamp)
    if trust_store.path is not None:
        trust_store.save()
    return len(session.pending_trust)


def _entry_payload_text(entry: ManifestEntry, stream_dir: Path) -> str:
    if entry.payload_text is not None:
        return entry.payload_text
    if entry.png_file is None:
        raise MalformedStreamError(entry.index, "manifest entry has neither payload nor PNG")
    try:
        return qr_decode((stream_dir / entry.png_file).read_bytes())
    except (OSError, QrDecodeError) as exc:
        raise MalformedStreamError(entry.index, f"PNG frame undecodable: {exc}") from exc


def verify_stream(
    stream_dir: str | Path,
    trust_store: TrustStore | None = None,
    revoked_db: RevokedDb | None = None,
    oracle: TrustOracle | None = None,
    persist_trust: bool = True,
    now: int | None = None,
    on_event: Callable[[VerifyEvent], None] | None = None,
) -> tuple[Verdict, list[VerifyEvent]]:
    """Drive begin/feed/finish over a stream directory's manifest.

    Entries missing payload_text fall back to decoding the referenced PNG.
    With no oracle supplied, trust questions are declined.
    """
    stream_dir = Path(stream_dir)
    entries = read_stream_manifest(stream_dir)
    if not entries:
        raise MalformedStreamError(0, "stream manifest is empty")
    if oracle is None:
        oracle = ScriptedOracle(accept_first_trust=False, accept_cert_changed=False)

    session = begin(
        _entry_payload_text(entries[0], stream_dir),
        entries[0].caption,
        trust_store,
        revoked_db,
        oracle,
        on_event=on_event,
    )
    for entry in entries[1:]:
        if session.state is _State.DONE:
            break
        feed(session, entry.index, _entry_payload_text(entry, stream_dir), entry.caption)
    verdict = finish(session)
    if persist_trust and trust_store is not None:
        commit_trust(session, trust_store, now=now)
    return verdict, session.events
