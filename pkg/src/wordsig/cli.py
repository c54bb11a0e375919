"""Command line interface: key lifecycle, stream signing and verification.

Exit codes are a stable scripting contract:
    0 verified, 1 unterminated, 2 possibly-fake, 3 fake,
    4 malformed input or stream, 5 usage error.
"""

from __future__ import annotations

import argparse
import base64
import binascii
import json
import sys
import time
from pathlib import Path

from . import service
from .certs import (
    Certificate,
    create_certificate,
    create_revocation,
    parse_certificate,
    parse_revocation,
    serialize_certificate,
    serialize_revocation,
    validate_name,
)
from .crypto import KeyPair, generate_keypair
from .errors import (
    KeyCertMismatchError,
    MalformedCertificateError,
    MalformedNameError,
    MalformedRevocationError,
    WordsigError,
)
from .signer import load_transcript, segment_transcript, sign_stream, write_stream
from .store import REVOKED_FILE, TRUSTED_FILE, RevokedDb, TrustStore, state_dir
from .verifier import (
    PROGRESS_MESSAGE,
    ScriptedOracle,
    TrustQuestion,
    Verdict,
    VerdictCode,
    verify_stream,
)

EXIT_VERIFIED = 0
EXIT_UNTERMINATED = 1
EXIT_POSSIBLY_FAKE = 2
EXIT_FAKE = 3
EXIT_MALFORMED = 4
EXIT_USAGE = 5


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit 2; the contract says 5
        raise _UsageError(message)


def verdict_exit_code(verdict: Verdict) -> int:
    if verdict.code is VerdictCode.VERIFIED:
        return EXIT_VERIFIED
    if verdict.code is VerdictCode.UNTERMINATED:
        return EXIT_UNTERMINATED
    if verdict.code.is_possibly_fake:
        return EXIT_POSSIBLY_FAKE
    return EXIT_FAKE


class InteractiveOracle:
    """Asks the viewer on the terminal; EOF counts as a decline."""

    def ask(self, question: TrustQuestion) -> bool:
        while True:
            sys.stdout.write(f"{question.text} [y/n] ")
            sys.stdout.flush()
            line = sys.stdin.readline()
            if not line:
                sys.stdout.write("\n")
                return False
            answer = line.strip().lower()
            if answer in ("y", "yes"):
                return True
            if answer in ("n", "no"):
                return False


# ---------------------------------------------------------------------------
# File helpers
# ---------------------------------------------------------------------------

def _read_binary_or_b64(path: Path) -> bytes:
    """Read a file that may be raw bytes or base64url-wrapped text."""
    data = path.read_bytes()
    try:
        text = data.decode("ascii").strip()
        return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))
    except (UnicodeDecodeError, binascii.Error, ValueError):
        return data


def load_keypair(path: str | Path) -> KeyPair:
    return KeyPair.from_private_bytes(Path(path).read_bytes())


def load_certificate(path: str | Path) -> Certificate:
    path = Path(path)
    try:
        return parse_certificate(path.read_bytes())
    except MalformedCertificateError:
        return parse_certificate(_read_binary_or_b64(path))


def _load_revoked(path: str | Path) -> RevokedDb:
    """Accept a revoked.jsonl database or a single .wsigrev record file."""
    path = Path(path)
    if path.suffix == ".jsonl":
        return RevokedDb.load(path)
    try:
        record = parse_revocation(path.read_bytes())
    except MalformedRevocationError:
        record = parse_revocation(_read_binary_or_b64(path))
    db = RevokedDb()
    # validity is re-checked against the stream's certificate at query time
    db.records.append((record, None))
    return db


def _trust_store_path(args) -> Path:
    if args.trust_store:
        return Path(args.trust_store)
    return state_dir() / TRUSTED_FILE


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_keygen(args) -> int:
    try:
        validate_name(args.name)
    except MalformedNameError as exc:
        raise _UsageError(str(exc)) from exc
    entropy = None
    if args.entropy_hex:
        try:
            entropy = bytes.fromhex(args.entropy_hex)
        except ValueError as exc:
            raise _UsageError(f"--entropy-hex is not hex: {exc}") from exc
    keypair = generate_keypair(entropy)
    issued_at = args.issued_at if args.issued_at is not None else int(time.time())
    cert = create_certificate(args.name, keypair, issued_at)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    key_path = out / "private.key"
    key_path.write_bytes(keypair.private_bytes)
    key_path.chmod(0o600)
    cert_path = out / "certificate.wsigcert"
    cert_path.write_bytes(serialize_certificate(cert))
    print(f"name:        {args.name}")
    print(f"fingerprint: {cert.fingerprint.hex()}")
    print(f"private key: {key_path}")
    print(f"certificate: {cert_path}")
    return 0


def cmd_sign(args) -> int:
    keypair = load_keypair(args.key)
    cert = load_certificate(args.cert)
    if keypair.public_point != cert.public_point:
        raise KeyCertMismatchError("private key does not match the certificate")
    words = load_transcript(args.transcript)
    segments = segment_transcript(words, seg_ms=args.seg_ms)
    frames = sign_stream(segments, cert, keypair, emit_terminal=not args.no_terminal)
    manifest = write_stream(
        frames, args.out, seg_ms=args.seg_ms, module_pixels=args.png_scale
    )
    print(f"wrote {len(frames)} frames to {manifest.parent}")
    return 0


def cmd_verify(args) -> int:
    store_path = _trust_store_path(args)
    trust_store = TrustStore.load(store_path)
    if args.revoked:
        revoked = _load_revoked(args.revoked)
    else:
        revoked = RevokedDb.load(state_dir() / REVOKED_FILE)

    if args.yes:
        oracle = ScriptedOracle(accept_first_trust=True, accept_cert_changed=True)
    elif args.no:
        oracle = ScriptedOracle(accept_first_trust=False, accept_cert_changed=False)
    else:
        oracle = InteractiveOracle()

    def show(event):
        if event.message == PROGRESS_MESSAGE or event.message.startswith(
            "Certificate does not match latest trusted certificate for"
        ) or event.message == "Possibly fake signature stream.":
            print(event.message)

    verdict, _ = verify_stream(
        args.stream,
        trust_store=trust_store,
        revoked_db=revoked,
        oracle=oracle,
        on_event=show,
    )
    print(verdict.message)
    return verdict_exit_code(verdict)


def cmd_revoke(args) -> int:
    keypair = load_keypair(args.key)
    cert = load_certificate(args.cert)
    revoked_at = args.at if args.at is not None else int(time.time())
    record = create_revocation(keypair, cert, revoked_at)
    Path(args.out).write_bytes(serialize_revocation(record))
    print(f"revocation record for {cert.name} written to {args.out}")
    return 0


def cmd_trust_list(args) -> int:
    store = TrustStore.load(_trust_store_path(args))
    for entry in store.entries:
        print(f"{entry.name}\t{entry.certificate.fingerprint.hex()}\t{entry.added_at}")
    return 0


def cmd_trust_add(args) -> int:
    store = TrustStore.load(_trust_store_path(args))
    cert = load_certificate(args.cert)
    store.append_trusted(cert, int(time.time()))
    store.save()
    print(f"trusted {cert.name} ({cert.fingerprint.hex()[:16]}...)")
    return 0


def cmd_trust_remove(args) -> int:
    try:
        fingerprint = bytes.fromhex(args.fingerprint)
    except ValueError as exc:
        raise _UsageError(f"--fingerprint is not hex: {exc}") from exc
    store = TrustStore.load(_trust_store_path(args))
    removed = store.remove_fingerprint(fingerprint)
    store.save()
    print(f"removed {removed} entries")
    return 0


def cmd_cert_show(args) -> int:
    from .certs import verify_certificate

    cert = load_certificate(args.certfile)
    print(f"name:         {cert.name}")
    print(f"fingerprint:  {cert.fingerprint.hex()}")
    print(f"public key:   {cert.public_point.hex()}")
    print(f"issued at:    {cert.issued_at}")
    print(f"self-check:   {'ok' if verify_certificate(cert) else 'FAILED'}")
    print(f"endorsements: {len(cert.endorsements)}")
    return 0


def cmd_serve(args) -> int:
    registrations = []
    if args.config:
        config = json.loads(Path(args.config).read_text())
        for item in config.get("keys", []):
            registrations.append(
                (item["id"], load_keypair(item["key"]), load_certificate(item["cert"]))
            )
    if args.key and args.cert:
        keypair = load_keypair(args.key)
        cert = load_certificate(args.cert)
        registrations.append((args.key_id or cert.name, keypair, cert))
    if not registrations:
        raise _UsageError("serve needs --config or --key/--cert")
    if args.bind != "127.0.0.1":
        print(
            "warning: binding to a non-loopback address exposes signing "
            "sessions to the network",
            file=sys.stderr,
        )
    server = service.make_server(
        registrations,
        bind=args.bind,
        port=args.port,
        trust_store_path=_trust_store_path(args),
        ui_dir=Path(args.ui) if args.ui else None,
    )
    host, port = server.server_address[:2]
    print(f"wordsig service listening on http://{host}:{port}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="wordsig", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("keygen", help="generate a keypair and certificate")
    p.add_argument("--name", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--entropy-hex", help="64 hex chars for deterministic derivation")
    p.add_argument("--issued-at", type=int, help="certificate timestamp (unix seconds)")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="sign a timed transcript into a QR stream")
    p.add_argument("--key", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seg-ms", type=int, default=2000)
    p.add_argument("--no-terminal", action="store_true")
    p.add_argument("--png-scale", type=int, default=8)
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="verify a stream directory")
    p.add_argument("--stream", required=True)
    p.add_argument("--trust-store")
    p.add_argument("--revoked")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--yes", action="store_true", help="accept trust questions")
    mode.add_argument("--no", action="store_true", help="decline trust questions")
    mode.add_argument("--interactive", action="store_true", help="prompt (default)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("revoke", help="create a self-signed revocation record")
    p.add_argument("--key", required=True)
    p.add_argument("--cert", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--at", type=int, help="revocation timestamp (unix seconds)")
    p.set_defaults(func=cmd_revoke)

    p = sub.add_parser("trust", help="manage the trusted-certificate history")
    trust_sub = p.add_subparsers(dest="trust_command")
    q = trust_sub.add_parser("list")
    q.add_argument("--trust-store")
    q.set_defaults(func=cmd_trust_list)
    q = trust_sub.add_parser("add")
    q.add_argument("--cert", required=True)
    q.add_argument("--trust-store")
    q.set_defaults(func=cmd_trust_add)
    q = trust_sub.add_parser("remove")
    q.add_argument("--fingerprint", required=True)
    q.add_argument("--trust-store")
    q.set_defaults(func=cmd_trust_remove)

    p = sub.add_parser("cert", help="inspect certificate files")
    cert_sub = p.add_subparsers(dest="cert_command")
    q = cert_sub.add_parser("show")
    q.add_argument("certfile")
    q.set_defaults(func=cmd_cert_show)

    p = sub.add_parser("serve", help="run the local session service")
    p.add_argument("--config", help="JSON file with key/cert registrations")
    p.add_argument("--key", help="private key file for a single registration")
    p.add_argument("--cert", help="certificate file for a single registration")
    p.add_argument("--key-id", help="identifier for the single registration")
    p.add_argument("--port", type=int, default=8754)
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--ui", help="directory of static UI files to serve")
    p.add_argument("--trust-store")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "func"):
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except WordsigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
