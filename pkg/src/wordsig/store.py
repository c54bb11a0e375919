"""Durable trusted-certificate history and revocation database.

Both stores are JSON Lines files holding only public material. The trusted
store is an append-only history, not a set: the latest entry for a name is
what the verifier compares against, so both membership and recency queries
work. Saves go through temp-and-rename, and loads drop (but count) entries
that fail cryptographic verification.
"""

from __future__ import annotations

import base64
import binascii
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .certs import (
    Certificate,
    RevocationRecord,
    parse_certificate,
    parse_revocation,
    serialize_certificate,
    serialize_revocation,
    verify_certificate,
    verify_revocation,
)
from .errors import MalformedCertificateError, MalformedRevocationError

TRUSTED_FILE = "trusted.jsonl"
REVOKED_FILE = "revoked.jsonl"


def state_dir() -> Path:
    """WORDSIG_HOME, else the XDG state dir, else ~/.local/state/wordsig."""
    override = os.environ.get("WORDSIG_HOME")
    if override:
        return Path(override)
    xdg = os.environ.get("XDG_STATE_HOME")
    base = Path(xdg) if xdg else Path.home() / ".local" / "state"
    return base / "wordsig"


def _b64(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _unb64(text: str) -> bytes:
    return base64.urlsafe_b64decode(text + "=" * (-len(text) % 4))


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    tmp.chmod(0o600)
    os.replace(tmp, path)


@dataclass(frozen=True)
class TrustEntry:
    name: str
    certificate: Certificate
    added_at: int


@dataclass
class TrustStore:
    entries: list[TrustEntry] = field(default_factory=list)
    path: Path | None = None
    load_warnings: int = 0

    @classmethod
    def load(cls, path: str | Path) -> "TrustStore":
        path = Path(path)
        store = cls(path=path)
        if not path.is_file():
            return store
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                cert = parse_certificate(_unb64(record["cert_b64url"]))
                entry = TrustEntry(str(record["name"]), cert, int(record["added_at"]))
            except (KeyError, TypeError, ValueError, binascii.Error,
                    MalformedCertificateError):
                store.load_warnings += 1
                continue
            if entry.name != cert.name or not verify_certificate(cert):
                store.load_warnings += 1
                continue
            store.entries.append(entry)
        return store

    def save(self) -> None:
        if self.path is None:
            raise ValueError("store has no backing path")
        lines = [
            json.dumps(
                {
                    "name": e.name,
                    "cert_b64url": _b64(serialize_certificate(e.certificate)),
                    "added_at": e.added_at,
                }
            )
            for e in self.entries
        ]
        _atomic_write(self.path, "".join(line + "\n" for line in lines))

    def append_trusted(self, cert: Certificate, now: int) -> None:
        """Append to the history; duplicates allowed, latest wins per name."""
        if not verify_certificate(cert):
            raise MalformedCertificateError("refusing to trust an invalid certificate")
        self.entries.append(TrustEntry(cert.name, cert, now))

    def latest_trusted_for(self, name: str) -> Certificate | None:
        for entry in reversed(self.entries):
            if entry.name == name:
                return entry.certificate
        return None

    def contains(self, cert: Certificate) -> bool:
        return any(e.certificate == cert for e in self.entries)

    def remove_fingerprint(self, fingerprint: bytes) -> int:
        """Drop every entry whose certificate has this key fingerprint."""
        before = len(self.entries)
        self.entries = [
            e for e in self.entries if e.certificate.fingerprint != fingerprint
        ]
        return before - len(self.entries)


@dataclass
class RevokedDb:
    records: list[tuple[RevocationRecord, Certificate]] = field(default_factory=list)
    path: Path | None = None
    load_warnings: int = 0

    @classmethod
    def load(cls, path: str | Path) -> "RevokedDb":
        path = Path(path)
        db = cls(path=path)
        if not path.is_file():
            return db
        for line in path.read_text().splitlines():
            if not line.strip():
                continue
            try:
                record_json = json.loads(line)
                record = parse_revocation(_unb64(record_json["record_b64url"]))
                cert = parse_certificate(_unb64(record_json["cert_b64url"]))
            except (KeyError, TypeError, ValueError, binascii.Error,
                    MalformedCertificateError, MalformedRevocationError):
                db.load_warnings += 1
                continue
            if not verify_revocation(record, cert):
                db.load_warnings += 1
                continue
            db.records.append((record, cert))
        return db

    def save(self) -> None:
        if self.path is None:
            raise ValueError("database has no backing path")
        lines = [
            json.dumps(
                {
                    "record_b64url": _b64(serialize_revocation(record)),
                    "cert_b64url": _b64(serialize_certificate(cert)),
                }
            )
            for record, cert in self.records
        ]
        _atomic_write(self.path, "".join(line + "\n" for line in lines))

    def add(self, record: RevocationRecord, cert: Certificate) -> None:
        if not verify_revocation(record, cert):
            raise MalformedRevocationError("revocation record does not verify")
        self.records.append((record, cert))

    def is_revoked(self, cert: Certificate) -> int | None:
        """revoked_at of the first valid record matching the certificate."""
        fp = cert.fingerprint
        for record, paired_cert in self.records:
            if record.cert_fingerprint != fp:
                continue
            if verify_revocation(record, cert):  # runtime guard, not just load-time
                return record.revoked_at
        return None
