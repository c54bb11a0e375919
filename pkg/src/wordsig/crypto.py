"""Deterministic ECDSA over secp256k1.

Messages are digested with SHA-256, nonces follow RFC 6979, and signatures
are emitted in 64-byte compact r||s form with low-s normalization, so signing
is a pure function: the same (message, key) pair always yields the same
bytes. Verification returns False for anything non-canonical (bad point
encodings, out-of-range r or s, high-s) instead of raising.

Point arithmetic uses Jacobian coordinates with a precomputed window table
for the generator and a small per-key table for verification, which keeps a
full sign or verify around a millisecond in pure Python.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
from dataclasses import dataclass
from functools import lru_cache

from .errors import MalformedKeyError

# secp256k1: y^2 = x^3 + 7 over F_P, generator G of prime order N.
P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

_HALF_N = N // 2  # low-s bound: canonical signatures have s <= (N-1)/2

# Jacobian points are (X, Y, Z) with affine x = X/Z^2, y = Y/Z^3.
_INFINITY = (0, 1, 0)

_WINDOW = 4  # window width, bits, for both fixed-base and per-key tables


@dataclass(frozen=True)
class Signature:
    """Compact ECDSA signature; wire form is r||s, 32 bytes each, big-endian.

    Instances parsed off the wire may be non-canonical; `verify` rejects
    those. `sign` only ever produces canonical (low-s) values.
    """

    r: int
    s: int

    def to_bytes(self) -> bytes:
        return self.r.to_bytes(32, "big") + self.s.to_bytes(32, "big")

    @classmethod
    def from_bytes(cls, data: bytes) -> "Signature":
        if len(data) != 64:
            raise MalformedKeyError(f"signature must be 64 bytes, got {len(data)}")
        return cls(int.from_bytes(data[:32], "big"), int.from_bytes(data[32:], "big"))

    @property
    def is_canonical(self) -> bool:
        return 1 <= self.r < N and 1 <= self.s <= _HALF_N


@dataclass(frozen=True)
class KeyPair:
    """A secp256k1 private scalar with its compressed public point."""

    private_scalar: int
    public_point: bytes

    def __post_init__(self):
        if not 1 <= self.private_scalar < N:
            raise MalformedKeyError("private scalar out of range")
        if derive_public_point(self.private_scalar) != self.public_point:
            raise MalformedKeyError("public point does not match private scalar")

    @property
    def private_bytes(self) -> bytes:
        return self.private_scalar.to_bytes(32, "big")

    @classmethod
    def from_private_bytes(cls, data: bytes) -> "KeyPair":
        if len(data) != 32:
            raise MalformedKeyError(f"private key must be 32 bytes, got {len(data)}")
        scalar = int.from_bytes(data, "big")
        if not 1 <= scalar < N:
            raise MalformedKeyError("private scalar out of range")
        return cls(scalar, derive_public_point(scalar))


# ---------------------------------------------------------------------------
# Jacobian point arithmetic
# ---------------------------------------------------------------------------

def _jac_double(pt):
    X1, Y1, Z1 = pt
    if not Z1 or not Y1:
        return _INFINITY
    # dbl-2009-l, specialised for a = 0
    A = X1 * X1 % P
    B = Y1 * Y1 % P
    C = B * B % P
    D = 2 * ((X1 + B) * (X1 + B) - A - C) % P
    E = 3 * A % P
    F = E * E % P
    X3 = (F - 2 * D) % P
    Y3 = (E * (D - X3) - 8 * C) % P
    Z3 = 2 * Y1 * Z1 % P
    return (X3, Y3, Z3)


def _jac_add(pt1, pt2):
    X1, Y1, Z1 = pt1
    X2, Y2, Z2 = pt2
    if not Z1:
        return pt2
    if not Z2:
        return pt1
    Z1Z1 = Z1 * Z1 % P
    Z2Z2 = Z2 * Z2 % P
    U1 = X1 * Z2Z2 % P
    U2 = X2 * Z1Z1 % P
    S1 = Y1 * Z2 * Z2Z2 % P
    S2 = Y2 * Z1 * Z1Z1 % P
    if U1 == U2:
        if S1 != S2:
            return _INFINITY
        return _jac_double(pt1)
    H = (U2 - U1) % P
    I = 4 * H * H % P
    J = H * I % P
    R = 2 * (S2 - S1) % P
    V = U1 * I % P
    X3 = (R * R - J - 2 * V) % P
    Y3 = (R * (V - X3) - 2 * S1 * J) % P
    Z3 = 2 * H * Z1 * Z2 % P
    return (X3, Y3, Z3)


def _jac_add_affine(pt1, pt2):
    """Mixed addition: pt2 is affine (Z == 1)."""
    X1, Y1, Z1 = pt1
    X2, Y2 = pt2
    if not Z1:
        return (X2, Y2, 1)
    Z1Z1 = Z1 * Z1 % P
    U2 = X2 * Z1Z1 % P
    S2 = Y2 * Z1 * Z1Z1 % P
    if X1 == U2:
        if Y1 != S2:
            return _INFINITY
        return _jac_double(pt1)
    H = (U2 - X1) % P
    HH = H * H % P
    I = 4 * HH % P
    J = H * I % P
    R = 2 * (S2 - Y1) % P
    V = X1 * I % P
    X3 = (R * R - J - 2 * V) % P
    Y3 = (R * (V - X3) - 2 * Y1 * J) % P
    Z3 = 2 * Z1 * H % P
    return (X3, Y3, Z3)


def _to_affine(pt):
    X, Y, Z = pt
    if not Z:
        return None
    zinv = pow(Z, P - 2, P)
    zinv2 = zinv * zinv % P
    return (X * zinv2 % P, Y * zinv2 * zinv % P)


def _batch_to_affine(points):
    """Normalize many Jacobian points with a single field inversion."""
    zs = [pt[2] for pt in points]
    prefix = [1] * (len(zs) + 1)
    for i, z in enumerate(zs):
        prefix[i + 1] = prefix[i] * z % P
    inv_all = pow(prefix[-1], P - 2, P)
    out = [None] * len(points)
    for i in range(len(points) - 1, -1, -1):
        zinv = inv_all * prefix[i] % P
        inv_all = inv_all * zs[i] % P
        X, Y, _ = points[i]
        zinv2 = zinv * zinv % P
        out[i] = (X * zinv2 % P, Y * zinv2 * zinv % P)
    return out


@lru_cache(maxsize=1)
def _g_window_tables():
    """tables[i][d-1] = affine point of (d << 4i) * G for d in 1..15."""
    tables = []
    base = (GX, GY, 1)
    jac_rows = []
    for _ in range(256 // _WINDOW):
        row = [base]
        for _ in range(14):
            row.append(_jac_add(row[-1], base))
        jac_rows.append(row)
        base = row[-1]
        base = _jac_add(base, row[0])  # 16 * previous base
    flat = _batch_to_affine([pt for row in jac_rows for pt in row])
    for i in range(len(jac_rows)):
        tables.append(tuple(flat[i * 15:(i + 1) * 15]))
    return tuple(tables)


def _mul_g(k: int):
    """k * G in Jacobian coordinates via the fixed-base window table."""
    k %= N
    acc = _INFINITY
    tables = _g_window_tables()
    i = 0
    while k:
        d = k & 0xF
        if d:
            acc = _jac_add_affine(acc, tables[i][d - 1])
        k >>= _WINDOW
        i += 1
    return acc


@lru_cache(maxsize=64)
def _point_window(public_point: bytes):
    """[Q, 2Q, ..., 15Q] as affine points, or None for a bad encoding.

    Cached by encoding so verifying a long stream under one key builds the
    table once.
    """
    affine = _decode_point(public_point)
    if affine is None:
        return None
    base = (affine[0], affine[1], 1)
    pts = [base]
    for _ in range(14):
        pts.append(_jac_add_affine(pts[-1], affine))
    return tuple(_batch_to_affine(pts))


def _mul_point(k: int, table) -> tuple:
    """k * Q via a 4-bit fixed window over the cached table for Q."""
    k %= N
    if not k:
        return _INFINITY
    nibbles = []
    while k:
        nibbles.append(k & 0xF)
        k >>= _WINDOW
    acc = _INFINITY
    for d in reversed(nibbles):
        acc = _jac_double(_jac_double(_jac_double(_jac_double(acc))))
        if d:
            acc = _jac_add_affine(acc, table[d - 1])
    return acc


# ---------------------------------------------------------------------------
# Point encoding
# ---------------------------------------------------------------------------

def _compress(affine) -> bytes:
    x, y = affine
    prefix = b"\x02" if y % 2 == 0 else b"\x03"
    return prefix + x.to_bytes(32, "big")


def _decode_point(data: bytes):
    """Compressed SEC1 -> affine (x, y), or None if invalid."""
    if len(data) != 33 or data[0] not in (2, 3):
        return None
    x = int.from_bytes(data[1:], "big")
    if x >= P:
        return None
    y_sq = (pow(x, 3, P) + 7) % P
    y = pow(y_sq, (P + 1) // 4, P)
    if y * y % P != y_sq:
        return None  # x is not on the curve
    if y & 1 != data[0] & 1:
        y = P - y
    return (x, y)


def derive_public_point(private_scalar: int) -> bytes:
    """Compressed public point for a private scalar."""
    if not 1 <= private_scalar < N:
        raise MalformedKeyError("private scalar out of range")
    return _compress(_to_affine(_mul_g(private_scalar)))


# ---------------------------------------------------------------------------
# RFC 6979 deterministic nonces
# ---------------------------------------------------------------------------

def _hmac_sha256(key: bytes, msg: bytes) -> bytes:
    return hmac.new(key, msg, hashlib.sha256).digest()


def _rfc6979_nonces(private_scalar: int, digest: bytes):
    """Yield candidate nonces per RFC 6979 (SHA-256, qlen = 256)."""
    x_octets = private_scalar.to_bytes(32, "big")
    h_octets = (int.from_bytes(digest, "big") % N).to_bytes(32, "big")
    v = b"\x01" * 32
    k = b"\x00" * 32
    k = _hmac_sha256(k, v + b"\x00" + x_octets + h_octets)
    v = _hmac_sha256(k, v)
    k = _hmac_sha256(k, v + b"\x01" + x_octets + h_octets)
    v = _hmac_sha256(k, v)
    while True:
        v = _hmac_sha256(k, v)
        candidate = int.from_bytes(v, "big")
        if 1 <= candidate < N:
            yield candidate
        k = _hmac_sha256(k, v + b"\x00")
        v = _hmac_sha256(k, v)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def generate_keypair(entropy: bytes | None = None) -> KeyPair:
    """Make a keypair; with entropy given, derivation is deterministic.

    The 32 entropy bytes are reduced mod N; a zero result (astronomically
    rare, but reachable with pathological inputs like all-zero bytes) is
    re-hashed with SHA-256 until nonzero, so every input yields a valid key.
    """
    if entropy is None:
        entropy = secrets.token_bytes(32)
    if len(entropy) != 32:
        raise MalformedKeyError(f"entropy must be 32 bytes, got {len(entropy)}")
    seed = entropy
    while True:
        scalar = int.from_bytes(seed, "big") % N
        if scalar:
            break
        seed = hashlib.sha256(seed).digest()
    return KeyPair(scalar, derive_public_point(scalar))


def sign(message: bytes, key: KeyPair) -> Signature:
    """Deterministic low-s signature over SHA-256(message)."""
    digest = hashlib.sha256(message).digest()
    z = int.from_bytes(digest, "big")
    for k in _rfc6979_nonces(key.private_scalar, digest):
        point = _to_affine(_mul_g(k))
        r = point[0] % N
        if r == 0:
            continue
        s = pow(k, -1, N) * (z + r * key.private_scalar) % N
        if s == 0:
            continue
        if s > _HALF_N:
            s = N - s
        return Signature(r, s)
    raise AssertionError("unreachable: RFC 6979 generator is infinite")


def verify(message: bytes, sig: Signature | bytes, public_point: bytes) -> bool:
    """True iff sig is a canonical signature on SHA-256(message) under the key.

    Never raises: malformed signatures, high-s values, and invalid point
    encodings all return False.
    """
    if isinstance(sig, bytes):
        if len(sig) != 64:
            return False
        sig = Signature(int.from_bytes(sig[:32], "big"), int.from_bytes(sig[32:], "big"))
    if not sig.is_canonical:
        return False
    if not isinstance(public_point, bytes):
        return False
    table = _point_window(public_point)
    if table is None:
        return False
    digest = hashlib.sha256(message).digest()
    z = int.from_bytes(digest, "big")
    w = pow(sig.s, -1, N)
    u1 = z * w % N
    u2 = sig.r * w % N
    point = _jac_add(_mul_g(u1), _mul_point(u2, table))
    X, _, Z = point
    if not Z:
        return False
    # Compare r against x = X/Z^2 without inverting: check X == cand * Z^2.
    z_sq = Z * Z % P
    for cand in (sig.r, sig.r + N):
        if cand < P and (cand * z_sq - X) % P == 0:
            return True
    return False


def fingerprint(public_point: bytes) -> bytes:
    """SHA-256 digest of the 33-byte compressed public key."""
    if not isinstance(public_point, bytes) or len(public_point) != 33:
        raise MalformedKeyError("public point must be 33 bytes")
    return hashlib.sha256(public_point).digest()
