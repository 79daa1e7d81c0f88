"""Gauss quadrature for the limiting amplitude distribution and its rounding.

The real part of a Haar-random amplitude, scaled by sqrt(N), tends to a law
with moments ``E X^j = (j/2)!`` for even j and 0 for odd j (X^2 is exponential
with mean 1).  A rule with few nodes matching these moments drives the
amplitude magnitudes of the design.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np
from scipy.linalg import eigh_tridiagonal


@dataclass
class QuadratureRule:
    """Nodes and positive weights summing to one.

    ``weights_num``/``weights_den`` hold the exact rational weights of a rounded
    rule (``None`` for an unrounded Gauss rule).
    """

    nodes: np.ndarray
    weights: np.ndarray
    t: int
    N: int = None
    weights_num: list = None
    weights_den: int = None

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.shape != self.weights.shape:
            raise ValueError("nodes and weights differ in length")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")
        if abs(self.weights.sum() - 1) > 1e-12:
            raise ValueError("weights must sum to one")

    def __len__(self):
        return len(self.nodes)

    def moment(self, j):
        return float(np.dot(self.weights, self.nodes ** j))

    def moments(self, count):
        return np.array([self.moment(j) for j in range(count)])

    def to_dict(self):
        d = {"t": self.t, "N": self.N, "nodes": [float(x) for x in self.nodes]}
        if self.weights_num is not None:
            d["weights_num"] = [int(w) for w in self.weights_num]
            d["weights_den"] = int(self.weights_den)
        else:
            d["weights"] = [float(w) for w in self.weights]
        return d

    @classmethod
    def from_dict(cls, d):
        if "weights_num" in d:
            num = [int(w) for w in d["weights_num"]]
            den = int(d["weights_den"])
            if sum(num) != den:
                raise ValueError("rational weights do not sum to one")
            return cls(d["nodes"], np.array(num) / den, d["t"], d.get("N"), num, den)
        return cls(d["nodes"], d["weights"], d["t"], d.get("N"))


def limit_moments(t):
    """Moments m_0..m_{2t} of the limit law as exact integers."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return [factorial(j // 2) if j % 2 == 0 else 0 for j in range(2 * t + 1)]


def recurrence(moments, n):
    """Three-term recurrence (a_0..a_{n-1}, b_0..b_{n-1}) of the monic orthogonal
    polynomials, from moments mu_0..mu_{2n-1} by Chebyshev's algorithm in exact
    rational arithmetic.  Raises ValueError if the Hankel matrix is not positive
    definite."""
    mu = [Fraction(m) for m in moments]
    if len(mu) < 2 * n:
        raise ValueError(f"need {2 * n} moments for {n} nodes")
    if mu[0] <= 0:
        raise ValueError("invalid moment sequence: mu_0 must be positive")
    a = [mu[1] / mu[0]]
    b = [mu[0]]
    prev = [Fraction(0)] * (2 * n)
    cur = mu[:2 * n]
    for k in range(1, n):
        nxt = [Fraction(0)] * (2 * n)
        for l in range(k, 2 * n - k):
            nxt[l] = cur[l + 1] - a[k - 1] * cur[l] - b[k - 1] * prev[l]
        if nxt[k] <= 0:
            raise ValueError("invalid moment sequence: Hankel matrix is not positive definite")
        a.append(nxt[k + 1] / nxt[k] - cur[k] / cur[k - 1])
        b.append(nxt[k] / cur[k - 1])
        prev, cur = cur, nxt
    return a, b


def _golub_welsch(moments, n):
    a, b = recurrence(moments, n)
    d = np.array([float(x) for x in a])
    e = np.sqrt(np.array([float(x) for x in b[1:]]))
    x, v = eigh_tridiagonal(d, e)
    w = float(moments[0]) * v[0] ** 2
    return x, w


def gauss_rule(moments, t=None):
    """Smallest Gauss-type rule reproducing ``moments`` (m_0..m_K, m_0 = 1).

    Symmetric sequences (all odd moments zero) give a symmetric rule; when K is
    even an implied zero moment of order K+1 is used, which puts a node at the
    origin if the node count is odd.
    """
    mom = [Fraction(m) for m in moments]
    if len(mom) < 2:
        raise ValueError("need at least m_0 and m_1")
    if mom[0] != 1:
        raise ValueError("m_0 must equal 1")
    K = len(mom) - 1
    t = K // 2 if t is None else t
    symmetric = all(m == 0 for m in mom[1::2])
    if symmetric and K % 2 == 0:
        mom = mom + [Fraction(0)]
    n = len(mom) // 2
    x, w = _golub_welsch(mom, n)
    if symmetric:
        x = (x - x[::-1]) / 2
        w = (w + w[::-1]) / 2
    return QuadratureRule(x, w / w.sum(), t)


def haar_rule(t):
    """Rule used by the design of order t: matches the limit moments up to 2t,
    with an even number of nonzero nodes (2 ceil((t+1)/2))."""
    if t < 1:
        raise ValueError("t must be >= 1")
    return gauss_rule(limit_moments(t if t % 2 else t + 1), t)


def round_rule(rule, N):
    """Round the weights to multiples of 1/N.

    Uses largest-remainder apportionment (ties broken by node index), drops
    nodes that receive no weight, and rescales each kept node so that
    ``q x^2`` is unchanged.  If a node was dropped, all nodes are scaled by a
    common factor restoring the second moment of the input rule.
    """
    if N < 1:
        raise ValueError("N must be positive")
    w = [Fraction(float(x)) for x in rule.weights]
    total = sum(w)
    quotas = [x / total * N for x in w]
    units = [int(q) for q in quotas]
    rem = N - sum(units)
    order = sorted(range(len(w)), key=lambda i: (-(quotas[i] - units[i]), i))
    for i in order[:rem]:
        units[i] += 1
    keep = [i for i in range(len(w)) if units[i] > 0]
    x = rule.nodes
    q = rule.weights
    nodes = np.array([x[i] * np.sqrt(q[i] * N / units[i]) for i in keep])
    num = [units[i] for i in keep]
    weights = np.array(num) / N
    if len(keep) < len(w):
        target = float(np.dot(q, x ** 2))
        nodes = nodes * np.sqrt(target / np.dot(weights, nodes ** 2))
    return QuadratureRule(nodes, weights, rule.t, N, num, N)


def rounding_deviation(rule, rounded, t):
    """max_j |E_rounded X^j - E_rule X^j| over j <= 2t."""
    return max(abs(rounded.moment(j) - rule.moment(j)) for j in range(2 * t + 1))

