import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stcode import galois
from stcode.galois import GF, SingularMatrixError, ZeroInverseError, gf_solve, mat_vec, naive_mul

elems8 = st.integers(0, 255)
elems16 = st.integers(0, 65535)


def test_add_examples(gf8):
    assert gf8.add(0x00, 0x57) == 0x57
    assert gf8.add(0x57, 0x57) == 0x00
    assert gf8.add(0x53, 0xCA) == 0x99


def test_mul_identity_and_annihilator(gf8):
    for x in range(256):
        assert gf8.mul(x, 1) == x
        assert gf8.mul(x, 0) == 0


def test_single_reduction_step(gf8):
    # 0x80 * x overflows to x^8 = x^4 + x^3 + x^2 + 1 under 0x11D
    assert naive_mul(0x80, 0x02, 8, 0x11D) == 0x1D
    assert gf8.mul(0x80, 0x02) == 0x1D


def test_inverse_of_two(gf8):
    oracle = [c for c in range(1, 256) if naive_mul(2, c, 8, 0x11D) == 1]
    assert oracle == [0x8E]
    assert gf8.inv(0x02) == 0x8E
    assert gf8.inv(0x01) == 0x01


def test_inverse_exhaustive_gf256(gf8):
    for a in range(1, 256):
        assert gf8.mul(a, gf8.inv(a)) == 1


def test_zero_has_no_inverse(gf8):
    with pytest.raises(ZeroInverseError):
        gf8.inv(0)
    with pytest.raises(ZeroInverseError):
        gf8.div(3, 0)


def test_tables_match_naive_gf256(gf8):
    for a in range(256):
        for b in range(256):
            assert gf8.mul(a, b) == naive_mul(a, b, 8, 0x11D)


@given(elems16, elems16)
def test_tables_match_naive_gf65536(a, b):
    assert galois.field(16).mul(a, b) == naive_mul(a, b, 16, 0x1100B)


def test_field_axioms_random_triples(gf8, gf16):
    rnd = random.Random(7)
    for f in (gf8, gf16):
        for _ in range(10_000):
            a, b, c = (rnd.randrange(f.q) for _ in range(3))
            assert f.mul(a, b) == f.mul(b, a)
            assert f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c))
            assert f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c))
            assert f.add(a, 0) == a and f.mul(a, 1) == a


@settings(max_examples=200)
@given(elems16.filter(bool))
def test_inverse_gf65536(a):
    f = galois.field(16)
    assert f.mul(a, f.inv(a)) == 1


def test_vectorized_matches_scalar(gf16, rng):
    a = rng.integers(0, 1 << 16, size=500)
    b = rng.integers(0, 1 << 16, size=500)
    got = gf16.vmul(a, b)
    assert [int(x) for x in got] == [gf16.mul(int(x), int(y)) for x, y in zip(a, b)]


def test_modulus_validation():
    assert galois.is_irreducible(0x11D)
    assert galois.is_irreducible(0x1100B)
    with pytest.raises(ValueError):
        GF(8, 0x100)  # x^8 is reducible
    with pytest.raises(ValueError):
        GF(8, 0x11B ^ 0x2)  # 0x119 = (x+1)(...)
    with pytest.raises(ValueError):
        GF(12)


def test_alternative_modulus_is_accepted():
    f = GF(8, 0x11B)
    assert f.mul(0x53, 0xCA) == 0x01  # AES field inverse pair


def test_solve_identity(gf8):
    v = [5, 7, 9]
    assert gf_solve(gf8, galois.identity(3), v) == v


@given(st.integers(2, 255), elems8, elems8)
def test_solve_two_by_two(theta, u, v):
    f = galois.field(8)
    x = gf_solve(f, [[1, 1], [theta, 1]], [u, v])
    assert mat_vec(f, [[1, 1], [theta, 1]], x) == [u, v]


def test_solve_singular_reports_rank(gf8):
    with pytest.raises(SingularMatrixError) as info:
        gf_solve(gf8, [[1, 1], [1, 1]], [1, 2])
    assert info.value.rank == 1


@pytest.mark.parametrize("size", [8, 16, 32])
def test_solve_round_trip(gf8, size):
    rnd = random.Random(size)
    while True:
        m = [[rnd.randrange(256) for _ in range(size)] for _ in range(size)]
        if galois.gf_rank(gf8, m) == size:
            break
    x = [rnd.randrange(256) for _ in range(size)]
    assert gf_solve(gf8, m, mat_vec(gf8, m, x)) == x


def test_span_coefficients(gf8):
    rows = [[1, 1, 0], [0, 1, 1]]
    c = galois.span_coefficients(gf8, rows, [1, 0, 1])
    assert c == [1, 1]
    assert galois.span_coefficients(gf8, rows, [1, 0, 0]) is None


def test_batch_nonsingular_matches_rank(gf8, rng):
    mats = rng.integers(0, 256, size=(300, 4, 4))
    mats[:60, 2] = mats[:60, 0]
    mats[60:90, :, 1] = 0
    mats[90:120, 0, :3] = 0  # first column pivot sits below the diagonal
    got = galois.batch_nonsingular(gf8, mats)
    ref = [galois.gf_rank(gf8, m.tolist()) == 4 for m in mats]
    assert got.tolist() == ref
    assert not got[:90].any()


def test_null_space(gf16, rng):
    m = rng.integers(0, 1 << 16, size=(3, 7)).tolist()
    basis = galois.null_space(gf16, m)
    assert len(basis) == 4
    for h in basis:
        assert galois.mat_vec(gf16, m, h) == [0, 0, 0]
    assert galois.gf_rank(gf16, basis) == 4
