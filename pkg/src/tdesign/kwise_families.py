"""Exact and approximately k-wise independent function families.

A family is a finite list of functions ``{0..N-1} -> {0..m-1}``; members are
addressed by an integer index and evaluated in vectorised blocks through
:meth:`FunctionFamily.values`.

Realisations
------------
``polynomial``
    All polynomials of degree < k over GF(Q), Q = 2^r >= max(N, m); values are
    reduced to their low ``log2(m)`` bits.  Exactly k-wise independent.
``bch``
    Binary family ``f_s(x) = <s, (1, x, x^3, ..., x^(2h-1))>`` over GF(2), with
    h = ceil((k-1)/2) and x in GF(2^r).  Exactly k-wise independent, 2 N^h members
    when N = 2^r.
``projective``
    k = 2 only: ``f_s(j) = <s, v_j>`` over GF(m) where v_j runs over distinct
    projective points of GF(m)^D.  Exactly pairwise independent.
``small-bias``
    The ``bch`` generator fed by a seed drawn from a linear feedback shift
    register with a random irreducible feedback polynomial.  Only approximately
    k-wise independent; the bound on the joint distance from uniform is stored
    in ``bound``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import ceil, comb

import numpy as np

from .finite_field import GF, MAX_DEGREE, clmul, degree_of, poly_mod

REALIZATIONS = ("polynomial", "bch", "projective", "small-bias")


def _log2_exact(m, what):
    m = int(m)
    if m < 2 or m & (m - 1):
        raise ValueError(f"{what} must be a power of two >= 2, got {m}")
    return m.bit_length() - 1


def _bits_for(n):
    """Smallest r >= 1 with 2^r >= n."""
    return max(1, (int(n) - 1).bit_length())


def _digits(index, base, count):
    """Little-endian base-``base`` digits of an array of indices."""
    index = np.asarray(index, dtype=np.int64)
    out = np.empty(index.shape + (count,), dtype=np.int64)
    for i in range(count):
        out[..., i] = index % base
        index = index // base
    return out


@dataclass
class FunctionFamily:
    """A family of functions {0..N-1} -> {0..m-1}.

    Attributes
    ----------
    kind : str
        ``"exact-polynomial"``, ``"binary-exact"`` or ``"delta-dependent"``.
    N, m, k : int
        Domain size, range size and independence order.
    delta : float
        Requested distance from uniform on any k points (0 for exact kinds).
    realization : str
        One of :data:`REALIZATIONS`.
    params : dict
        Realisation parameters (field sizes, LFSR degree, ...).
    bound : float
        Proven upper bound on the distance from uniform of any k-point marginal.
    seed : int
        Stored for serialisation; the construction itself is deterministic.
    """

    kind: str
    N: int
    m: int
    k: int
    delta: float
    realization: str
    params: dict
    size: int
    bound: float = 0.0
    seed: int = 0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def to_dict(self):
        return {"kind": self.kind, "N": self.N, "m": self.m, "k": self.k,
                "delta": self.delta, "seed": self.seed,
                "realization": self.realization, "size": self.size}

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        if kind == "exact-polynomial":
            fam = exact_family(d["N"], d["k"])
        elif kind == "binary-exact":
            fam = binary_family(d["N"], d["k"])
        elif kind == "delta-dependent":
            fam = delta_family(d["N"], d["m"], d["k"], d["delta"],
                               d.get("realization", "auto"), seed=d.get("seed", 0))
        else:
            raise ValueError(f"unknown family kind {kind!r}")
        if "size" in d and d["size"] != fam.size:
            raise ValueError("serialised family size does not match reconstruction")
        return fam

    def __len__(self):
        return self.size

    def values(self, start=0, stop=None):
        """Table V[i, j] = f_{start+i}(j) for member indices in [start, stop)."""
        stop = self.size if stop is None else min(stop, self.size)
        idx = np.arange(start, stop, dtype=np.int64)
        return _EVALUATORS[self.realization](self, idx)

    def evaluate(self, index, x):
        if not 0 <= index < self.size:
            raise IndexError(f"member index {index} outside family of size {self.size}")
        if not 0 <= x < self.N:
            raise ValueError(f"point {x} outside domain of size {self.N}")
        return int(self.values(index, index + 1)[0, x])


def member_eval(family, index, x):
    return family.evaluate(index, x)


# ---------------------------------------------------------------- polynomial

def _polynomial_values(fam, idx):
    q, k = fam.params["Q"], fam.k
    coeffs = _digits(idx, q, k)
    vals = GF(q).evaluate(coeffs, np.arange(fam.N))
    return vals & (fam.m - 1)


def exact_family(N, k):
    """All polynomials of degree <= k-1 over GF(N), as functions GF(N) -> GF(N).

    Member ``i`` has coefficients given by the little-endian base-N digits of
    ``i`` (constant term first).  For k > N the family is still well defined and
    exactly N-wise independent.
    """
    degree_of(N)
    if k < 1:
        raise ValueError("k must be >= 1")
    return FunctionFamily("exact-polynomial", N, N, k, 0.0, "polynomial", {"Q": N}, N ** k)


def _polynomial_family(N, m, k, delta):
    q = 1 << max(_bits_for(N), _bits_for(m))
    degree_of(q)
    return FunctionFamily("delta-dependent", N, m, k, delta, "polynomial", {"Q": q}, q ** k)


# ---------------------------------------------------------------- bch

def _bch_rows(N, k):
    # rows of the generator: bit 0 is the constant, then r bits for each odd power
    r = _bits_for(N)
    h = ceil((k - 1) / 2)
    if r > MAX_DEGREE:
        raise ValueError("domain too large")
    xs = np.arange(N, dtype=np.int64)
    cols = [np.ones((N, 1), dtype=np.int64)]
    if h:
        gf = GF(1 << r)
        for e in range(1, 2 * h, 2):
            p = gf.power(xs, e)
            cols.append((p[:, None] >> np.arange(r)) & 1)
    return np.concatenate(cols, axis=1)  # (N, 1 + h r)


@lru_cache(maxsize=None)
def _bch_matrix(N, k):
    g = _bch_rows(N, k)
    g.setflags(write=False)
    return g


def _bch_expand(seed_bits, N, k):
    """Output bits f_s(x) for seeds given as a (P, S) 0/1 array."""
    g = _bch_matrix(N, k)
    return (seed_bits @ g.T) & 1


def _bch_values(fam, idx):
    s = fam.params["seed_bits"]
    bits = (idx[:, None] >> np.arange(s)) & 1
    return _bch_expand(bits, fam.N, fam.k)


def binary_family(N, k):
    """Exactly k-wise independent functions {0..N-1} -> {0, 1} (BCH construction)."""
    if N < 2:
        raise ValueError("N must be >= 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    s = _bch_matrix(N, k).shape[1]
    return FunctionFamily("binary-exact", N, 2, k, 0.0, "bch", {"seed_bits": s}, 1 << s)


# ---------------------------------------------------------------- projective

@lru_cache(maxsize=None)
def _projective_points(m, D, N):
    # first N vectors of GF(m)^D (little-endian code order) whose last nonzero entry is 1
    pts = []
    code = 1
    while len(pts) < N:
        v = _digits(np.array([code]), m, D)[0]
        nz = np.nonzero(v)[0]
        if v[nz[-1]] == 1:
            pts.append(v)
        code += 1
    out = np.array(pts, dtype=np.int64)
    out.setflags(write=False)
    return out


def _projective_values(fam, idx):
    m, D = fam.m, fam.params["D"]
    pts = _projective_points(m, D, fam.N)
    s = _digits(idx, m, D)
    gf = GF(m)
    out = np.zeros((len(idx), fam.N), dtype=np.int64)
    for i in range(D):
        out ^= gf.mul(s[:, i:i + 1], pts[None, :, i])
    return out


def _projective_family(N, m, k, delta):
    if k != 2:
        return None
    D = 2
    while (m ** D - 1) // (m - 1) < N:
        D += 1
    return FunctionFamily("delta-dependent", N, m, k, delta, "projective", {"D": D}, m ** D)


# ---------------------------------------------------------------- small bias

def _mobius(n):
    res, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            res = -res
        p += 1
    return -res if n > 1 else res


def count_irreducible(d):
    """Number of monic irreducible polynomials of degree d over GF(2)."""
    return sum(_mobius(e) * 2 ** (d // e) for e in range(1, d + 1) if d % e == 0) // d


def _is_irreducible(p):
    # Rabin's test over GF(2): x^(2^d) == x mod p and gcd(x^(2^(d/q)) - x, p) == 1
    d = p.bit_length() - 1
    if d == 1:
        return True

    def frob(times):
        r = 2
        for _ in range(times):
            r = poly_mod(clmul(r, r), p)
        return r

    def gcd(a, b):
        while b:
            a, b = b, poly_mod(a, b)
        return a

    if frob(d) != 2:
        return False
    q, n = 2, d
    while n > 1:
        if n % q == 0:
            while n % q == 0:
                n //= q
            if gcd(frob(d // q) ^ 2, p) != 1:
                return False
        q += 1
    return True


@lru_cache(maxsize=None)
def irreducible_polynomials(d):
    """Sorted list of all monic irreducible degree-d polynomials over GF(2), as ints."""
    out = [p for p in range(1 << d, 1 << (d + 1)) if _is_irreducible(p)]
    assert len(out) == count_irreducible(d)
    return out


def _lfsr_bits(poly, state, length):
    d = poly.bit_length() - 1
    taps = poly & ((1 << d) - 1)
    bits = [(state >> i) & 1 for i in range(d)]
    for n in range(d, length):
        acc = 0
        for i in range(d):
            if (taps >> i) & 1:
                acc ^= bits[n - d + i]
        bits.append(acc)
    return bits[:length]


def _lfsr_block(poly, states, length):
    d = poly.bit_length() - 1
    states = np.asarray(states, dtype=np.int64)
    bits = np.zeros((len(states), max(length, d)), dtype=np.int64)
    bits[:, :d] = (states[:, None] >> np.arange(d)) & 1
    tap_idx = [i for i in range(d) if (poly >> i) & 1]
    for n in range(d, length):
        acc = np.zeros(len(states), dtype=np.int64)
        for i in tap_idx:
            acc ^= bits[:, n - d + i]
        bits[:, n] = acc
    return bits[:, :length]


def _small_bias_values(fam, idx):
    p = fam.params
    b = p["bits_per_value"]
    if p["lfsr_degree"] == 0:
        seeds = (idx[:, None] >> np.arange(p["seed_bits"])) & 1
    else:
        d = p["lfsr_degree"]
        polys = irreducible_polynomials(d)
        which, state = np.divmod(idx, 1 << d)
        seeds = np.zeros((len(idx), p["seed_bits"]), dtype=np.int64)
        for w in np.unique(which):
            sel = which == w
            seeds[sel] = _lfsr_block(polys[w], state[sel], p["seed_bits"])
    bits = _bch_expand(seeds, fam.N * b, p["bit_k"])
    bits = bits.reshape(len(idx), fam.N, b)
    return (bits << np.arange(b)).sum(axis=2)


def _small_bias_family(N, m, k, delta):
    b = _log2_exact(m, "m")
    L = k * b
    n_bits = N * b
    seed_bits = _bch_matrix(n_bits, L).shape[1]
    # Vazirani: distance from uniform on L bits <= 2^(L/2 - 1) * bias
    target = delta / 2 ** (L / 2 - 1)
    d = 1
    while d < seed_bits:
        bias = ((seed_bits - 1) // d) / count_irreducible(d)
        if bias <= target:
            break
        d += 1
    if d >= seed_bits:
        params = {"bits_per_value": b, "bit_k": L, "seed_bits": seed_bits, "lfsr_degree": 0}
        return FunctionFamily("delta-dependent", N, m, k, delta, "small-bias", params,
                              1 << seed_bits, bound=0.0)
    params = {"bits_per_value": b, "bit_k": L, "seed_bits": seed_bits, "lfsr_degree": d}
    size = count_irreducible(d) << d
    return FunctionFamily("delta-dependent", N, m, k, delta, "small-bias", params, size,
                          bound=2 ** (L / 2 - 1) * bias)


def delta_family(N, m, k, delta, construction="auto", seed=0):
    """A family whose k-point marginals are within ``delta`` of uniform.

    ``construction`` is one of ``"polynomial"``, ``"projective"``,
    ``"small-bias"`` or ``"auto"``; ``auto`` returns the smallest family whose
    proven bound meets ``delta`` (ties go to the exactly independent one).
    """
    _log2_exact(m, "m")
    if N < 2:
        raise ValueError("N must be >= 2")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    builders = {"polynomial": _polynomial_family, "projective": _projective_family,
                "small-bias": _small_bias_family}
    if construction == "auto":
        cands = [b(N, m, k, delta) for b in builders.values()]
        cands = [c for c in cands if c is not None and c.bound <= delta]
        fam = min(cands, key=lambda c: c.size)
    elif construction in builders:
        fam = builders[construction](N, m, k, delta)
        if fam is None:
            raise ValueError(f"construction {construction!r} unavailable for k={k}")
    else:
        raise ValueError(f"unknown construction {construction!r}")
    fam.seed = seed
    return fam


_EVALUATORS = {
    "polynomial": _polynomial_values,
    "bch": _bch_values,
    "projective": _projective_values,
    "small-bias": _small_bias_values,
}


def family_bias(family, k=None, budget=10 ** 8):
    """Maximum total-variation distance from uniform over all k-point marginals.

    Enumerates every member and every k-subset of the domain; raises
    ``ValueError`` if ``size * C(N, k) * k`` exceeds ``budget``.
    """
    k = family.k if k is None else k
    cost = family.size * comb(family.N, k) * k
    if cost > budget:
        raise ValueError(f"exhaustive bias check needs {cost} operations, budget {budget}")
    vals = family.values()
    m = family.m
    weights = m ** np.arange(k)
    worst = 0.0
    for sub in combinations(range(family.N), k):
        codes = vals[:, sub] @ weights
        hist = np.bincount(codes, minlength=m ** k) / family.size
        worst = max(worst, 0.5 * np.abs(hist - m ** -k).sum())
    return worst
