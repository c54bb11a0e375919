"""GF(2^8) arithmetic and Reed-Solomon codec for QR symbols.

The field uses the QR polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D) with
generator element 2. Generator polynomials have roots alpha^0..alpha^(n-1),
matching the QR convention. Decoding runs syndromes, Berlekamp-Massey,
Chien search, and Forney, correcting up to nsym // 2 byte errors per block.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import QrDecodeError

_EXP = [0] * 512  # alpha^i, doubled so products skip an explicit mod 255
_LOG = [0] * 256

_x = 1
for _i in range(255):
    _EXP[_i] = _x
    _LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= 0x11D
for _i in range(255, 512):
    _EXP[_i] = _EXP[_i - 255]


def gf_mul(a: int, b: int) -> int:
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_div(a: int, b: int) -> int:
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return _EXP[_LOG[a] - _LOG[b] + 255]


def gf_pow(a: int, exp: int) -> int:
    if a == 0:
        return 0
    return _EXP[(_LOG[a] * exp) % 255]


def _poly_mul(p: list[int], q: list[int]) -> list[int]:
    out = [0] * (len(p) + len(q) - 1)
    for i, pi in enumerate(p):
        if pi == 0:
            continue
        lp = _LOG[pi]
        for j, qj in enumerate(q):
            if qj:
                out[i + j] ^= _EXP[lp + _LOG[qj]]
    return out


def _poly_eval(p: list[int], x: int) -> int:
    """Evaluate polynomial (highest-degree coefficient first) at x."""
    y = 0
    for coef in p:
        y = gf_mul(y, x) ^ coef
    return y


@lru_cache(maxsize=None)
def _generator_poly(nsym: int) -> tuple[int, ...]:
    g = [1]
    for i in range(nsym):
        g = _poly_mul(g, [1, _EXP[i]])
    return tuple(g)


def rs_encode(data: bytes, nsym: int) -> bytes:
    """Return the nsym parity bytes for data (polynomial remainder)."""
    gen = _generator_poly(nsym)
    rem = bytearray(nsym)
    for byte in data:
        factor = byte ^ rem[0]
        del rem[0]
        rem.append(0)
        if factor:
            lf = _LOG[factor]
            for i in range(nsym):
                g = gen[i + 1]
                if g:
                    rem[i] ^= _EXP[lf + _LOG[g]]
    return bytes(rem)


def _syndromes(codeword: bytes, nsym: int) -> list[int]:
    return [_poly_eval(list(codeword), _EXP[i]) for i in range(nsym)]


def _berlekamp_massey(synd: list[int]) -> list[int]:
    """Error locator polynomial, lowest-degree coefficient last."""
    err_loc = [1]
    old_loc = [1]
    for i in range(len(synd)):
        delta = synd[i]
        for j in range(1, len(err_loc)):
            delta ^= gf_mul(err_loc[-(j + 1)], synd[i - j])
        old_loc.append(0)
        if delta != 0:
            if len(old_loc) > len(err_loc):
                new_loc = [gf_mul(c, delta) for c in old_loc]
                old_loc = [gf_div(c, delta) for c in err_loc]
                err_loc = new_loc
            for j in range(len(old_loc)):
                err_loc[-(j + 1)] ^= gf_mul(delta, old_loc[-(j + 1)])
    while err_loc and err_loc[0] == 0:
        err_loc.pop(0)
    return err_loc


def rs_decode(codeword: bytes, nsym: int) -> bytes:
    """Correct up to nsym // 2 byte errors; return the repaired codeword.

    Raises QrDecodeError when the error count exceeds the budget.
    """
    synd = _syndromes(codeword, nsym)
    if max(synd) == 0:
        return bytes(codeword)

    err_loc = _berlekamp_massey(synd)
    n_errors = len(err_loc) - 1
    if n_errors * 2 > nsym:
        raise QrDecodeError("too many errors for the Reed-Solomon budget")

    # Chien search: roots of the locator give error positions.
    positions = []
    for i in range(len(codeword)):
        # error at position i (from the left) corresponds to alpha^(len-1-i)
        x_inv = _EXP[255 - (len(codeword) - 1 - i) % 255]
        if _poly_eval(err_loc, x_inv) == 0:
            positions.append(i)
    if len(positions) != n_errors:
        raise QrDecodeError("error locator degree does not match its roots")

    # Forney: error magnitudes from the evaluator polynomial.
    synd_poly = list(reversed(synd))
    err_eval = _poly_mul(synd_poly, err_loc)[-(n_errors + 1):]
    out = bytearray(codeword)
    for pos in positions:
        x = _EXP[(len(codeword) - 1 - pos) % 255]
        x_inv = _EXP[255 - (len(codeword) - 1 - pos) % 255]
        # formal derivative of the locator, evaluated at x_inv
        loc_prime = 0
        coeffs = list(reversed(err_loc))  # lowest degree first
        for j in range(1, len(coeffs), 2):
            loc_prime ^= gf_mul(coeffs[j], gf_pow(x_inv, j - 1))
        if loc_prime == 0:
            raise QrDecodeError("degenerate error locator")
        magnitude = gf_mul(x, gf_div(_poly_eval(err_eval, x_inv), loc_prime))
        out[pos] ^= magnitude

    if max(_syndromes(bytes(out), nsym)) != 0:
        raise QrDecodeError("correction failed to clear the syndromes")
    return bytes(out)
