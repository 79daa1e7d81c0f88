"""Arithmetic in GF(2^k).

Field elements are identified with integers in ``[0, 2^k)`` through their bit
pattern: bit ``i`` is the coefficient of ``x^i`` in the polynomial basis.
Addition is XOR, multiplication is carry-less multiplication reduced by a fixed
irreducible modulus.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# Fixed irreducible (primitive) moduli, one per degree.  Bit i is the coefficient of x^i.
MODULI = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10000011,
    8: 0x11D,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
    17: 0x20009,
    18: 0x40081,
    19: 0x80027,
    20: 0x100009,
}

MAX_DEGREE = max(MODULI)


def degree_of(n):
    """Return k such that n == 2**k, raising ValueError otherwise."""
    n = int(n)
    if n < 2 or n & (n - 1):
        raise ValueError(f"field size must be a power of two >= 2, got {n}")
    k = n.bit_length() - 1
    if k > MAX_DEGREE:
        raise ValueError(f"no modulus tabulated for GF(2^{k}); max degree is {MAX_DEGREE}")
    return k


def clmul(a, b):
    """Carry-less product of two non-negative integers."""
    r = 0
    while b:
        if b & 1:
            r ^= a
        a <<= 1
        b >>= 1
    return r


def poly_mod(a, m):
    """Remainder of a modulo m, both GF(2)[x] polynomials as integers."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


@dataclass(frozen=True)
class FieldElement:
    value: int
    k: int

    def __post_init__(self):
        if self.k not in MODULI:
            raise ValueError(f"unsupported field degree {self.k}")
        if not 0 <= self.value < (1 << self.k):
            raise ValueError(f"value {self.value} outside GF(2^{self.k})")

    def _check(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.k != self.k:
            raise ValueError("elements belong to different fields")
        return other

    def __add__(self, other):
        other = self._check(other)
        return FieldElement(self.value ^ other.value, self.k)

    __sub__ = __add__

    def __mul__(self, other):
        other = self._check(other)
        return FieldElement(gf_mul(self.value, other.value, self.k), self.k)

    def inverse(self):
        return FieldElement(gf_inv(self.value, self.k), self.k)

    def __int__(self):
        return self.value


def gf_add(a, b):
    return a ^ b


def gf_mul(a, b, k):
    """Product of field elements a, b in GF(2^k)."""
    return poly_mod(clmul(int(a), int(b)), MODULI[k])


def gf_pow(a, e, k):
    r = 1
    while e:
        if e & 1:
            r = gf_mul(r, a, k)
        a = gf_mul(a, a, k)
        e >>= 1
    return r


def gf_inv(a, k):
    if a == 0:
        raise ZeroDivisionError("zero has no inverse")
    return gf_pow(a, (1 << k) - 2, k)


def poly_eval(coeffs, x, k):
    """Evaluate sum_i coeffs[i] x^i in GF(2^k) by Horner's rule (constant term first)."""
    r = 0
    for c in reversed(coeffs):
        r = gf_mul(r, x, k) ^ int(c)
    return r


@lru_cache(maxsize=None)
def _tables(k):
    # exp/log tables built from the primitive element x
    q = 1 << k
    exp = np.zeros(2 * q, dtype=np.int64)
    log = np.zeros(q, dtype=np.int64)
    v = 1
    for i in range(q - 1):
        exp[i] = v
        log[v] = i
        v = gf_mul(v, 2, k)
    if v != 1:
        raise ValueError(f"modulus for degree {k} is not primitive")
    exp[q - 1:2 * q - 2] = exp[: q - 1]
    exp.setflags(write=False)
    log.setflags(write=False)
    return exp, log


class GF:
    """Vectorised arithmetic in GF(2^k) over integer numpy arrays.

    Parameters
    ----------
    n : int
        Field size, a power of two.
    """

    def __init__(self, n):
        self.k = degree_of(n)
        self.order = 1 << self.k
        self.modulus = MODULI[self.k]
        self._exp, self._log = _tables(self.k)

    def __repr__(self):
        return f"GF(2^{self.k})"

    def mul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        out = self._exp[self._log[a] + self._log[b]]
        return np.where((a == 0) | (b == 0), 0, out)

    def power(self, a, e):
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        out = self._exp[(self._log[a] * e) % (self.order - 1)]
        return np.where(a == 0, 0, out)

    def inv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("zero has no inverse")
        return self._exp[(self.order - 1 - self._log[a]) % (self.order - 1)]

    def powers(self, xs, count):
        """Matrix P[i, j] = xs[i]^j for j < count."""
        xs = np.asarray(xs, dtype=np.int64)
        out = np.empty((len(xs), count), dtype=np.int64)
        for j in range(count):
            out[:, j] = self.power(xs, j)
        return out

    def evaluate(self, coeffs, xs):
        """Evaluate many polynomials at many points.

        ``coeffs`` has shape (P, d) with the constant term in column 0; the
        result has shape (P, len(xs)).
        """
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
        xs = np.asarray(xs, dtype=np.int64)
        out = np.zeros((coeffs.shape[0], len(xs)), dtype=np.int64)
        for j in range(coeffs.shape[1] - 1, -1, -1):
            out = self.mul(out, xs[None, :]) ^ coeffs[:, j:j + 1]
        return out
