"""Exact moments of Haar-random pure states and the symmetric subspace."""

import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, factorial, prod

import numpy as np


@dataclass(frozen=True)
class Monomial:
    """prod_j alpha_j^c_j conj(alpha_j)^d_j, stored as sorted (index, c, d) terms."""

    terms: tuple

    def __post_init__(self):
        terms = tuple(sorted((int(i), int(c), int(d)) for i, c, d in self.terms))
        if not terms:
            raise ValueError("monomial needs at least one term")
        idx = [i for i, _, _ in terms]
        if len(set(idx)) != len(idx):
            raise ValueError("monomial indices must be distinct")
        for i, c, d in terms:
            if i < 0 or c < 0 or d < 0:
                raise ValueError("indices and exponents must be non-negative")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def from_exponents(cls, c, d=None):
        """From dicts index -> exponent; ``d`` defaults to ``c`` (balanced)."""
        d = c if d is None else d
        keys = sorted(set(c) | set(d))
        return cls(tuple((i, c.get(i, 0), d.get(i, 0)) for i in keys))

    @classmethod
    def parse(cls, text):
        """Parse ``"i:c[,d]"`` terms separated by ``,`` or ``;``.

        A term without ``d`` is balanced.  ``"1:2,2:0"`` is |alpha_1|^4 and
        ``"0:1,0;1:0,1"`` is alpha_0 conj(alpha_1).
        """
        terms = []
        for tok in re.split(r"[;,]", text.replace(" ", "")):
            if not tok:
                continue
            if ":" in tok:
                i, c = tok.split(":")
                terms.append([int(i), int(c), int(c)])
            elif terms:
                terms[-1][2] = int(tok)
            else:
                raise ValueError(f"malformed monomial {text!r}")
        return cls(tuple(tuple(t) for t in terms))

    @property
    def degree(self):
        return sum(c for _, c, _ in self.terms), sum(d for _, _, d in self.terms)

    @property
    def balanced(self):
        return all(c == d for _, c, d in self.terms)

    def max_index(self):
        return max(i for i, _, _ in self.terms)

    def evaluate(self, states):
        """Value of the monomial at each row of ``states`` (shape (n, N))."""
        states = np.atleast_2d(states)
        out = np.ones(states.shape[0], dtype=complex)
        for i, c, d in self.terms:
            a = states[:, i]
            out *= a ** c * np.conj(a) ** d
        return out

    def __str__(self):
        return ";".join(f"{i}:{c},{d}" for i, c, d in self.terms)


def rising(N, d):
    return prod(range(N, N + d))


def haar_expectation(N, monomial):
    """Exact E_Haar of a monomial over unit vectors in C^N, as a Fraction."""
    if N < 1:
        raise ValueError("N must be positive")
    if monomial.max_index() >= N:
        raise ValueError(f"monomial index {monomial.max_index()} >= N={N}")
    if not monomial.balanced:
        return Fraction(0)
    t = monomial.degree[0]
    return Fraction(prod(factorial(c) for _, c, _ in monomial.terms), rising(N, t))


def symmetric_dim(N, t):
    """Dimension C(N+t-1, t) of the symmetric subspace of (C^N)^{(x)t}."""
    return comb(N + t - 1, t)


def multiset_weight(indices):
    """Number t!/prod c_j! of orderings of a multiset of indices."""
    cnt = Counter(indices)
    return factorial(len(indices)) // prod(factorial(c) for c in cnt.values())


def multisets(N, t):
    """All non-decreasing index tuples of length t, lexicographically."""
    return list(combinations_with_replacement(range(N), t))


def haar_sample(n, N, rng):
    """n Haar-random unit vectors in C^N as rows."""
    z = rng.standard_normal((n, N)) + 1j * rng.standard_normal((n, N))
    return z / np.linalg.norm(z, axis=1, keepdims=True)
