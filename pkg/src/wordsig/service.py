"""Local JSON-over-HTTP session API for live signing and verification.

Signing sessions hand out chained frames one segment at a time; verify
sessions mirror the verifier state machine, surfacing trust questions as a
pending-question status the client answers on a separate endpoint. Frame 0
processing is a pure function of (frame, stores, answers), so answering a
question simply re-runs it with the recorded answers filled in.

The server binds to loopback by default; the trust model places signing on
the speaker's own device, so remote exposure is opt-in. Permissive CORS
headers are emitted for the benefit of browser UIs served from elsewhere.
"""

from __future__ import annotations

import base64
import binascii
import json
import logging
import re
import secrets
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .certs import Certificate, certificate_caption
from .crypto import KeyPair, sign
from .errors import (
    MalformedStreamError,
    PayloadTooLargeError,
    QrDecodeError,
    SessionMisuseError,
    WordsigError,
)
from .payload import MAX_WORDS_BYTES, encode_cert_payload, encode_segment_payload
from .qr import qr_decode, qr_encode, render_png
from .store import REVOKED_FILE, RevokedDb, TrustStore, state_dir
from .verifier import (
    QuestionKind,
    TrustQuestion,
    Verdict,
    VerifySession,
    begin,
    commit_trust,
    feed,
    finish,
)

logger = logging.getLogger(__name__)

PNG_SCALE = 8


def _frame_json(index: int, payload_text: str, caption: str) -> dict:
    png = render_png(qr_encode(payload_text), PNG_SCALE)
    return {
        "index": index,
        "payload_text": payload_text,
        "caption": caption,
        "png_b64": base64.b64encode(png).decode("ascii"),
    }


def _verdict_json(verdict: Verdict) -> dict:
    out = {"code": verdict.code.value, "message": verdict.message}
    if verdict.frame_index is not None:
        out["frame_index"] = verdict.frame_index
    if verdict.revoked_at is not None:
        out["revoked_at"] = verdict.revoked_at
    return out


class _ApiError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


@dataclass
class SignSession:
    id: str
    keypair: KeyPair
    cert: Certificate
    next_index: int
    last_caption: str
    created_at: float
    closed: bool = False
    terminal_response: dict | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    def next_frame(self, words: str) -> dict:
        signature = sign(self.last_caption.encode("utf-8"), self.keypair)
        payload_text = encode_segment_payload(words, signature)
        frame = _frame_json(self.next_index, payload_text, words)
        self.next_index += 1
        self.last_caption = words
        return frame


class _QuestionPending(Exception):
    def __init__(self, question: TrustQuestion):
        super().__init__(question.text)
        self.question = question


class _ReplayOracle:
    """Answers from the recorded map; unanswered questions suspend frame 0."""

    def __init__(self, answers: dict[QuestionKind, bool]):
        self.answers = answers

    def ask(self, question: TrustQuestion) -> bool:
        if question.kind in self.answers:
            return self.answers[question.kind]
        raise _QuestionPending(question)


@dataclass
class VerifySessionHandle:
    id: str
    trust_store: TrustStore
    revoked_db: RevokedDb
    answers: dict[QuestionKind, bool] = field(default_factory=dict)
    pending_question: TrustQuestion | None = None
    frame0: tuple[str, str] | None = None
    session: VerifySession | None = None
    committed: bool = False
    events_sent: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def _drain_events(self) -> list[str]:
        if self.session is None:
            return []
        fresh = self.session.events[self.events_sent:]
        self.events_sent = len(self.session.events)
        return [e.message for e in fresh]

    def _commit_if_done(self) -> None:
        if self.session is None or self.session.verdict is None or self.committed:
            return
        commit_trust(self.session, self.trust_store)
        self.committed = True

    def _status(self) -> dict:
        out: dict = {"status": "ok"}
        if self.pending_question is not None:
            out["status"] = "question_pending"
            out["question"] = {
                "name": self.pending_question.name,
                "kind": self.pending_question.kind.value,
                "text": self.pending_question.text,
            }
        elif self.session is not None and self.session.verdict is not None:
            out["status"] = "done"
            out["verdict"] = _verdict_json(self.session.verdict)
        out["events"] = self._drain_events()
        return out

    def _run_frame0(self) -> dict:
        payload_text, caption = self.frame0
        self.pending_question = None
        try:
            self.session = begin(
                payload_text, caption, self.trust_store, self.revoked_db,
                _ReplayOracle(self.answers),
            )
        except _QuestionPending as pending:
            self.session = None
            self.events_sent = 0
            self.pending_question = pending.question
            return self._status()
        self._commit_if_done()
        return self._status()

    def submit_frame(self, index: int, payload_text: str, caption: str) -> dict:
        if self.session is not None and self.session.verdict is not None:
            raise _ApiError(409, "session already reached a verdict")
        if index == 0:
            if self.frame0 is not None:
                raise _ApiError(409, "frame 0 was already submitted")
            self.frame0 = (payload_text, caption)
            return self._run_frame0()
        if self.pending_question is not None:
            raise _ApiError(409, "a trust question is pending")
        if self.session is None:
            raise _ApiError(409, "frame 0 must come first")
        try:
            feed(self.session, index, payload_text, caption)
        except SessionMisuseError as exc:
            raise _ApiError(409, str(exc)) from exc
        except MalformedStreamError as exc:
            raise _ApiError(400, str(exc)) from exc
        self._commit_if_done()
        return self._status()

    def answer(self, accept: bool) -> dict:
        if self.pending_question is None:
            raise _ApiError(409, "no trust question is pending")
        self.answers[self.pending_question.kind] = accept
        return self._run_frame0()

    def finish(self) -> dict:
        if self.pending_question is not None:
            raise _ApiError(409, "a trust question is pending")
        if self.session is None:
            raise _ApiError(409, "no frames were submitted")
        try:
            finish(self.session)
        except SessionMisuseError as exc:
            raise _ApiError(409, str(exc)) from exc
        self._commit_if_done()
        return self._status()


class ServiceState:
    def __init__(
        self,
        registrations: list[tuple[str, KeyPair, Certificate]],
        trust_store_path: Path | None = None,
        revoked_db_path: Path | None = None,
    ):
        self.keys = {key_id: (keypair, cert) for key_id, keypair, cert in registrations}
        self.trust_store_path = trust_store_path
        self.revoked_db_path = revoked_db_path
        self.sign_sessions: dict[str, SignSession] = {}
        self.verify_sessions: dict[str, VerifySessionHandle] = {}
        self.registry_lock = threading.Lock()

    def open_sign_session(self, key_id: str) -> tuple[SignSession, dict]:
        if key_id not in self.keys:
            raise _ApiError(404, f"unknown key_id {key_id!r}")
        keypair, cert = self.keys[key_id]
        session = SignSession(
            id=secrets.token_hex(16),
            keypair=keypair,
            cert=cert,
            next_index=1,
            last_caption=certificate_caption(cert.name),
            created_at=time.time(),
        )
        with self.registry_lock:
            self.sign_sessions[session.id] = session
        frame0 = _frame_json(0, encode_cert_payload(cert), session.last_caption)
        return session, frame0

    def open_verify_session(self, trust_store_override: str | None) -> VerifySessionHandle:
        store_path = (
            Path(trust_store_override) if trust_store_override else self.trust_store_path
        )
        trust_store = TrustStore.load(store_path) if store_path else TrustStore()
        revoked_path = self.revoked_db_path or state_dir() / REVOKED_FILE
        revoked_db = RevokedDb.load(revoked_path)
        handle = VerifySessionHandle(
            id=secrets.token_hex(16), trust_store=trust_store, revoked_db=revoked_db
        )
        with self.registry_lock:
            self.verify_sessions[handle.id] = handle
        return handle

    def sign_session(self, session_id: str) -> SignSession:
        try:
            return self.sign_sessions[session_id]
        except KeyError:
            raise _ApiError(404, f"unknown sign session {session_id!r}") from None

    def verify_session(self, session_id: str) -> VerifySessionHandle:
        try:
            return self.verify_sessions[session_id]
        except KeyError:
            raise _ApiError(404, f"unknown verify session {session_id!r}") from None


_ROUTES = [
    ("POST", re.compile(r"^/v1/sign/sessions$"), "open_sign"),
    ("POST", re.compile(r"^/v1/sign/sessions/([0-9a-f]+)/segments$"), "segments"),
    ("POST", re.compile(r"^/v1/sign/sessions/([0-9a-f]+)/close$"), "close"),
    ("POST", re.compile(r"^/v1/verify/sessions$"), "open_verify"),
    ("POST", re.compile(r"^/v1/verify/sessions/([0-9a-f]+)/frames$"), "frames"),
    ("POST", re.compile(r"^/v1/verify/sessions/([0-9a-f]+)/answer$"), "answer"),
    ("POST", re.compile(r"^/v1/verify/sessions/([0-9a-f]+)/finish$"), "finish"),
    ("GET", re.compile(r"^/v1/health$"), "health"),
]

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".map": "application/json",
    ".png": "image/png",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
}


class Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    @property
    def state(self) -> ServiceState:
        return self.server.state  # type: ignore[attr-defined]

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)

    def _send_json(self, status: int, obj: dict) -> None:
        body = json.dumps(obj).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _read_body(self) -> dict:
        if not self._raw_body:
            return {}
        try:
            body = json.loads(self._raw_body)
        except json.JSONDecodeError as exc:
            raise _ApiError(400, f"request body is not JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise _ApiError(400, "request body must be a JSON object")
        return body

    def do_OPTIONS(self):  # CORS preflight
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def _dispatch(self, method: str) -> None:
        # drain the body up front: an unread body would be misparsed as the
        # next request line on a kept-alive connection
        length = int(self.headers.get("Content-Length") or 0)
        self._raw_body = self.rfile.read(length) if length > 0 else b""
        path = self.path.split("?", 1)[0]
        for route_method, pattern, name in _ROUTES:
            if route_method != method:
                continue
            match = pattern.match(path)
            if match:
                try:
                    getattr(self, f"_handle_{name}")(*match.groups())
                except _ApiError as exc:
                    self._send_json(exc.status, {"error": str(exc)})
                except WordsigError as exc:
                    self._send_json(400, {"error": str(exc)})
                except Exception:  # keep the daemon alive; report and log
                    logger.exception("unhandled error serving %s", path)
                    self._send_json(500, {"error": "internal error"})
                return
        if method == "GET" and self._serve_static(path):
            return
        self._send_json(404, {"error": f"no route for {method} {path}"})

    # -- sign endpoints ----------------------------------------------------

    def _handle_open_sign(self):
        body = self._read_body()
        key_id = body.get("key_id")
        if not isinstance(key_id, str):
            raise _ApiError(400, "key_id is required")
        session, frame0 = self.state.open_sign_session(key_id)
        self._send_json(200, {"session_id": session.id, "frame0": frame0})

    def _handle_segments(self, session_id: str):
        body = self._read_body()
        words = body.get("words")
        if not isinstance(words, str):
            raise _ApiError(400, "words is required")
        if len(words.encode("utf-8")) > MAX_WORDS_BYTES:
            raise _ApiError(413, f"words exceed {MAX_WORDS_BYTES} bytes")
        session = self.state.sign_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise _ApiError(409, "a concurrent submission is in flight")
        try:
            if session.closed:
                raise _ApiError(409, "session is closed")
            try:
                frame = session.next_frame(words)
            except PayloadTooLargeError as exc:
                raise _ApiError(413, str(exc)) from exc
        finally:
            session.lock.release()
        self._send_json(200, {"frame": frame})

    def _handle_close(self, session_id: str):
        session = self.state.sign_session(session_id)
        with session.lock:
            if not session.closed:
                signature = sign(session.last_caption.encode("utf-8"), session.keypair)
                payload_text = encode_segment_payload("", signature)
                session.terminal_response = {
                    "terminal_frame": _frame_json(session.next_index, payload_text, "")
                }
                session.closed = True
            response = session.terminal_response
        self._send_json(200, response)

    # -- verify endpoints ----------------------------------------------------

    def _handle_open_verify(self):
        body = self._read_body()
        override = body.get("trust_store")
        if override is not None and not isinstance(override, str):
            raise _ApiError(400, "trust_store must be a path string")
        handle = self.state.open_verify_session(override)
        self._send_json(200, {"session_id": handle.id})

    def _frame_payload_text(self, body: dict, index: int) -> str:
        payload_text = body.get("payload_text")
        if isinstance(payload_text, str):
            return payload_text
        png_b64 = body.get("png_b64")
        if not isinstance(png_b64, str):
            raise _ApiError(400, "payload_text or png_b64 is required")
        try:
            png = base64.b64decode(png_b64)
        except (binascii.Error, ValueError) as exc:
            raise _ApiError(400, f"png_b64 is not base64: {exc}") from exc
        try:
            return qr_decode(png)
        except QrDecodeError as exc:
            raise _ApiError(400, f"frame {index}: QR decode failed: {exc}") from exc

    def _handle_frames(self, session_id: str):
        body = self._read_body()
        if not isinstance(body.get("index"), int):
            raise _ApiError(400, "index is required")
        if not isinstance(body.get("caption"), str):
            raise _ApiError(400, "caption is required")
        index = body["index"]
        handle = self.state.verify_session(session_id)
        payload_text = self._frame_payload_text(body, index)
        with handle.lock:
            try:
                result = handle.submit_frame(index, payload_text, body["caption"])
            except MalformedStreamError as exc:
                raise _ApiError(400, str(exc)) from exc
        self._send_json(200, result)

    def _handle_answer(self, session_id: str):
        body = self._read_body()
        if not isinstance(body.get("accept"), bool):
            raise _ApiError(400, "accept must be a boolean")
        handle = self.state.verify_session(session_id)
        with handle.lock:
            result = handle.answer(body["accept"])
        self._send_json(200, result)

    def _handle_finish(self, session_id: str):
        handle = self.state.verify_session(session_id)
        with handle.lock:
            result = handle.finish()
        self._send_json(200, result)

    def _handle_health(self):
        self._send_json(200, {"status": "ok", "keys": sorted(self.state.keys)})

    # -- static UI ----------------------------------------------------------

    def _serve_static(self, path: str) -> bool:
        ui_dir: Path | None = getattr(self.server, "ui_dir", None)
        if ui_dir is None:
            return False
        relative = path.lstrip("/") or "index.html"
        target = (ui_dir / relative).resolve()
        if not str(target).startswith(str(ui_dir.resolve())) or not target.is_file():
            return False
        body = target.read_bytes()
        self.send_response(200)
        self.send_header(
            "Content-Type", _STATIC_TYPES.get(target.suffix, "application/octet-stream")
        )
        self.send_header("Content-Length", str(len(body)))
        self._cors()
        self.end_headers()
        self.wfile.write(body)
        return True


def make_server(
    registrations: list[tuple[str, KeyPair, Certificate]],
    bind: str = "127.0.0.1",
    port: int = 8754,
    trust_store_path: Path | None = None,
    revoked_db_path: Path | None = None,
    ui_dir: Path | None = None,
) -> ThreadingHTTPServer:
    server = ThreadingHTTPServer((bind, port), Handler)
    server.state = ServiceState(  # type: ignore[attr-defined]
        registrations,
        trust_store_path=trust_store_path,
        revoked_db_path=revoked_db_path,
    )
    server.ui_dir = ui_dir  # type: ignore[attr-defined]
    return server
