import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Poly, symbols

from tdesign.finite_field import GF, MODULI, FieldElement, gf_inv, gf_mul, poly_eval

X = symbols("x")


def to_poly(v):
    return Poly([int(b) for b in bin(v)[2:]], X, modulus=2)


def from_poly(p):
    v = 0
    for (e,), c in p.terms():
        if int(c) % 2:
            v |= 1 << e
    return v


@pytest.mark.parametrize("k", sorted(MODULI))
def test_moduli_irreducible(k):
    p = to_poly(MODULI[k])
    assert p.degree() == k
    assert p.is_irreducible


def test_spec_examples():
    # GF(4) with x^2 + x + 1: x * x = x + 1
    assert gf_mul(2, 2, 2) == 3
    # GF(8), p = x^2 + x at x = 3 -> 6
    assert poly_eval([0, 1, 1], 3, 3) == 6


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_mul_against_sympy(k):
    mod = to_poly(MODULI[k])
    for a in range(1 << k):
        for b in range(1 << k):
            want = from_poly((to_poly(a) * to_poly(b)).rem(mod)) if a and b else 0
            assert gf_mul(a, b, k) == want


@pytest.mark.parametrize("n", [2, 4, 8, 16, 64])
def test_vectorised_matches_scalar(n):
    gf = GF(n)
    k = gf.k
    a, b = np.meshgrid(np.arange(n), np.arange(n))
    want = np.vectorize(lambda x, y: gf_mul(int(x), int(y), k))(a, b)
    assert np.array_equal(gf.mul(a, b), want)
    nz = np.arange(1, n)
    assert np.all(gf.mul(nz, gf.inv(nz)) == 1)


def test_evaluate_matches_horner():
    gf = GF(16)
    rng = np.random.default_rng(0)
    coeffs = rng.integers(16, size=(20, 4))
    vals = gf.evaluate(coeffs, np.arange(16))
    for i in range(20):
        for x in range(16):
            assert vals[i, x] == poly_eval(list(coeffs[i]), x, 4)


def test_bad_sizes():
    for n in [0, 1, 3, 12]:
        with pytest.raises(ValueError):
            GF(n)
    with pytest.raises(ValueError):
        FieldElement(8, 3)
    with pytest.raises(ZeroDivisionError):
        gf_inv(0, 3)


elems = st.integers(0, 255)


@settings(max_examples=200)
@given(elems, elems, elems)
def test_field_axioms_gf256(a, b, c):
    k = 8
    A, B, C = FieldElement(a, k), FieldElement(b, k), FieldElement(c, k)
    assert A * B == B * A
    assert (A * B) * C == A * (B * C)
    assert A * (B + C) == A * B + A * C
    assert A + A == FieldElement(0, k)
    if a:
        assert A * A.inverse() == FieldElement(1, k)


def test_sympy_field_order():
    # multiplicative group of GF(2^k) is cyclic of order 2^k - 1; x generates it
    for k in [3, 5, 7]:
        seen = {1}
        v = 1
        for _ in range((1 << k) - 2):
            v = gf_mul(v, 2, k)
            seen.add(v)
        assert len(seen) == (1 << k) - 1


@pytest.mark.parametrize("k", [1, 2, 3])
def test_field_axioms_exhaustive(k):
    q = 1 << k
    for a in range(q):
        for b in range(q):
            for c in range(q):
                assert gf_mul(gf_mul(a, b, k), c, k) == gf_mul(a, gf_mul(b, c, k), k)
                assert gf_mul(a, b ^ c, k) == gf_mul(a, b, k) ^ gf_mul(a, c, k)
        if a:
            assert gf_mul(a, gf_inv(a, k), k) == 1


@settings(max_examples=100)
@given(st.integers(2, 10), st.lists(st.integers(0, 1023), min_size=1, max_size=6), st.integers(0, 1023))
def test_poly_eval_matches_power_sum(k, coeffs, x):
    q = 1 << k
    coeffs = [c % q for c in coeffs]
    x %= q
    naive = 0
    for i, c in enumerate(coeffs):
        p = 1
        for _ in range(i):
            p = gf_mul(p, x, k)
        naive ^= gf_mul(c, p, k)
    assert poly_eval(coeffs, x, k) == naive
