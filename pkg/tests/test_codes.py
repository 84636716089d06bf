import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sygrand.bitlinalg import BitMatrix, BitVector, rank
from sygrand.codes import (AlistParseError, CodeConstructionError, GaloisField2m,
                           bch_generator_polynomial, build_bch, code_from_parity_check,
                           default_primitive_polynomial, encode, extend_parity, get_code,
                           gf2_poly_mul, gf_mul, load_alist, save_alist, sphere_union_rate)

GF16 = GaloisField2m(4, 0b10011)


def clmul_mod(a, b, poly, m):
    """Shift-and-add multiplication with reduction; independent of the tables."""
    out = 0
    for i in range(m):
        if (b >> i) & 1:
            out ^= a << i
    for d in range(2 * m - 2, m - 1, -1):
        if (out >> d) & 1:
            out ^= poly << (d - m)
    return out


@pytest.mark.parametrize("a, b, expected", [(0x2, 0x8, 0x3), (0x8, 0x8, 0xC), (0x7, 0x1, 0x7)])
def test_gf_mul_examples(a, b, expected):
    assert gf_mul(GF16, a, b) == expected


def test_gf_mul_matches_shift_and_add():
    for m in (3, 4, 5, 8):
        F = GaloisField2m(m)
        for a in range(1 << m):
            for b in range(0, 1 << m, max(1, (1 << m) // 16)):
                assert F.mul(a, b) == clmul_mod(a, b, F.primitive_poly, m)


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_gf_mul_distributes_over_xor(a, b, c):
    F = GaloisField2m(8)
    assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)


def test_gf_tables_are_inverse():
    F = GaloisField2m(6)
    for i in range(F.order):
        assert F.log[F.exp[i]] == i
    for a in range(1, 64):
        assert F.mul(a, F.inv(a)) == 1


def test_non_primitive_polynomial_rejected():
    # x^4 + x^3 + x^2 + x + 1 is irreducible, but alpha has order 5
    with pytest.raises(CodeConstructionError):
        GaloisField2m(4, 0b11111)


@pytest.mark.parametrize("m, poly", [(3, 0b1011), (4, 0b10011), (5, 0b100101), (8, 0x11D)])
def test_default_primitive_polynomials(m, poly):
    assert default_primitive_polynomial(m) == poly


@pytest.mark.parametrize("m, t, n, k, g", [
    (3, 1, 7, 4, 0b1011),
    (4, 1, 15, 11, 0b10011),
    (4, 2, 15, 7, 0b111010001),
])
def test_build_bch_examples(m, t, n, k, g):
    code = build_bch(m, t)
    assert (code.n, code.k) == (n, k)
    assert code.metadata["generator_poly"] == g
    code.check()


def test_generator_is_product_of_minimal_polynomials():
    F = GaloisField2m(5)
    g = gf2_poly_mul(F.minimal_polynomial(1), F.minimal_polynomial(3))
    assert bch_generator_polynomial(5, 2) == g


def test_generator_polynomial_has_designed_roots():
    F = GaloisField2m(8)
    g = bch_generator_polynomial(8, 2)
    for i in range(1, 5):
        root = F.pow_alpha(i)
        acc, power = 0, 1
        for d in range(g.bit_length()):
            if (g >> d) & 1:
                acc ^= power
            power = F.mul(power, root)
        assert acc == 0


def test_bch_t_too_large():
    with pytest.raises(CodeConstructionError):
        build_bch(3, 4)


@pytest.mark.parametrize("name, n, k", [("hamming-8-4", 8, 4), ("ebch-32-21", 32, 21),
                                        ("ebch-256-239", 256, 239)])
def test_named_even_weight_codes(name, n, k):
    code = get_code(name)
    assert (code.n, code.k) == (n, k)
    assert code.even_weight
    code.check()


def test_extend_parity_hamming_exhaustive():
    code = extend_parity(build_bch(3, 1))
    words = list(code.codewords())
    assert len(set(words)) == 16
    assert all(w.parity() == 0 and code.is_codeword(w) for w in words)
    assert min(w.bits.bit_count() for w in words if w.bits) == 4


def test_ebch_32_21_from_bch_31_21():
    base = build_bch(5, 2)
    assert (base.n, base.k) == (31, 21)
    e = extend_parity(base)
    assert (e.n, e.k) == (32, 21) and e.even_weight
    assert rank(e.H) == 11


@pytest.mark.parametrize("name", ["bch-15-7", "bch-15-11", "hamming-8-4", "ebch-16-11"])
def test_even_weight_flag_matches_enumeration(name):
    code = get_code(name)
    enumerated = all(w.parity() == 0 for w in code.codewords())
    assert code.even_weight == enumerated


def test_encode_zero_and_parity(ebch_32_21):
    assert encode(ebch_32_21, BitVector.zeros(21)) == BitVector.zeros(32)
    rng = np.random.default_rng(0)
    for _ in range(200):
        c = encode(ebch_32_21, BitVector.from_array(rng.integers(0, 2, 21)))
        assert ebch_32_21.syndrome(c) == 0 and c.parity() == 0


def test_encode_length_mismatch(ebch_32_21):
    with pytest.raises(ValueError):
        encode(ebch_32_21, BitVector.zeros(20))


def test_sphere_union_rate():
    assert sphere_union_rate(7, 4) == pytest.approx(1.0)
    assert sphere_union_rate(32, 21) == pytest.approx((21 + math.log2(33)) / 32)
    assert sphere_union_rate(32, 21) == pytest.approx(0.8139, abs=1e-4)
    assert sphere_union_rate(256, 239) == pytest.approx(0.9649, abs=1e-4)


def test_alist_repetition():
    code = load_alist("2 1\n1 2\n1 1\n2\n1\n1\n1 2\n")
    assert (code.n, code.k) == (2, 1)
    assert code.G.to_array().tolist() == [[1, 1]]


def test_alist_round_trip(ebch_32_21):
    text = save_alist(ebch_32_21)
    code = load_alist(text)
    assert code.H == ebch_32_21.H
    assert code.k == 21
    code.check()


def test_alist_round_trip_with_zero_padding():
    H = BitMatrix.from_array([[1, 1, 0, 1], [0, 1, 1, 1]])
    text = save_alist(H)
    assert " 0" in text.splitlines()[4] or " 0" in "".join(text.splitlines()[4:8])
    assert load_alist(text).H == H


def test_alist_truncated_names_missing_section():
    text = save_alist(get_code("hamming-8-4"))
    truncated = "\n".join(text.splitlines()[:6])
    with pytest.raises(AlistParseError, match="missing column list"):
        load_alist(truncated)


def test_alist_errors_carry_line_numbers():
    with pytest.raises(AlistParseError, match="line 3"):
        load_alist("3 1\n1 3\n1 1\n3\n1\n1\n1\n1 2 3\n")
    with pytest.raises(AlistParseError, match="out of range"):
        load_alist("2 1\n1 2\n1 1\n2\n2\n1\n1 2\n")


def test_alist_rank_deficient():
    with pytest.raises(CodeConstructionError, match="rank"):
        load_alist("2 2\n2 2\n2 2\n2 2\n1 2\n1 2\n1 2\n1 2\n")


def test_import_path_for_arbitrary_parity_check():
    rng = np.random.default_rng(11)
    while True:
        H = BitMatrix.from_array(rng.integers(0, 2, size=(6, 20)))
        if rank(H) == 6:
            break
    code = code_from_parity_check(H)
    code.check()
    assert (code.n, code.k) == (20, 14)
