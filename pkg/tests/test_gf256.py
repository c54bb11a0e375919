from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wordsig import gf256
from wordsig.errors import QrDecodeError


def test_field_basics():
    assert gf256.gf_mul(0, 7) == 0
    assert gf256.gf_mul(1, 7) == 7
    # alpha^8 = 0x1D under the 0x11D modulus
    assert gf256.gf_pow(2, 8) == 0x1D
    for a in (1, 2, 77, 255):
        assert gf256.gf_div(gf256.gf_mul(a, 99), 99) == a


def test_known_qr_parity_vector():
    # ISO 18004 worked example: numeric "01234567" at version 1-M
    data = bytes([16, 32, 12, 86, 97, 128, 236, 17, 236, 17, 236, 17, 236, 17, 236, 17])
    parity = gf256.rs_encode(data, 10)
    assert list(parity) == [165, 36, 212, 193, 237, 54, 199, 135, 44, 85]


def test_decode_clean_codeword():
    data = bytes(range(30))
    cw = data + gf256.rs_encode(data, 16)
    assert gf256.rs_decode(cw, 16) == cw


@pytest.mark.parametrize("nsym", [10, 16, 22, 28])
def test_corrects_up_to_budget(nsym):
    rng = random.Random(nsym)
    data = bytes(rng.randrange(256) for _ in range(40))
    cw = data + gf256.rs_encode(data, nsym)
    for n_errors in (1, nsym // 2):
        corrupted = bytearray(cw)
        for pos in rng.sample(range(len(cw)), n_errors):
            corrupted[pos] ^= rng.randrange(1, 256)
        assert gf256.rs_decode(bytes(corrupted), nsym) == cw


def test_rejects_beyond_budget():
    rng = random.Random(7)
    data = bytes(rng.randrange(256) for _ in range(40))
    nsym = 16
    cw = data + gf256.rs_encode(data, nsym)
    corrupted = bytearray(cw)
    for pos in rng.sample(range(len(cw)), nsym):  # 2x the correctable count
        corrupted[pos] ^= rng.randrange(1, 256)
    with pytest.raises(QrDecodeError):
        gf256.rs_decode(bytes(corrupted), nsym)


@settings(max_examples=50, deadline=None)
@given(st.binary(min_size=1, max_size=60), st.integers(2, 30), st.randoms())
def test_round_trip_with_random_errors(data, nsym, rng):
    cw = data + gf256.rs_encode(data, nsym)
    n_errors = rng.randrange(0, nsym // 2 + 1)
    corrupted = bytearray(cw)
    for pos in rng.sample(range(len(cw)), n_errors):
        corrupted[pos] ^= rng.randrange(1, 256)
    assert gf256.rs_decode(bytes(corrupted), nsym) == cw
