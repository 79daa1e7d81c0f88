"""Weighted ensembles of pure states.

A product ensemble is indexed by pairs (f, g): ``f`` selects amplitude
magnitudes through a rounded quadrature rule and ``g`` selects phases.  With
``a_{f,j} = |x_{level(f(j))}| / sqrt(N)`` the member state is
``a_f * phase_g / ||a_f||`` with weight ``||a_f||^2 / (|F| |G|)``; the element
index is ``f * |G| + g``.
"""

from math import ceil, log2

import numpy as np

from .kwise_families import FunctionFamily, binary_family, delta_family, exact_family
from .quadrature import QuadratureRule, haar_rule, round_rule

PHASE_CACHE_ENTRIES = 1 << 22


def _check_pow2(N):
    if N < 2 or N & (N - 1):
        raise ValueError(f"N must be a power of two >= 2, got {N}")


def _is_prime(n):
    return n >= 2 and all(n % p for p in range(2, int(n ** 0.5) + 1))


class Ensemble:
    """Base class: a finite weighted set of unit vectors in C^N."""

    variant = "custom-list"

    def __len__(self):
        return self.size

    def chunks(self, chunk_size=8192):
        """Yield (start, weights, states) blocks covering every element in order."""
        for start in range(0, self.size, chunk_size):
            stop = min(start + chunk_size, self.size)
            w, s = self.block(start, stop)
            yield start, w, s

    def block(self, start, stop):
        raise NotImplementedError

    def element(self, i):
        if not 0 <= i < self.size:
            raise IndexError(f"element {i} outside ensemble of size {self.size}")
        w, s = self.block(i, i + 1)
        return float(w[0]), s[0]

    def arrays(self):
        """All weights and states; only sensible for small ensembles."""
        return self.block(0, self.size)

    def total_weight(self):
        return float(sum(w.sum() for _, w, _ in self.chunks()))

    product = None


class StateListEnsemble(Ensemble):
    """An explicit list of weighted states."""

    def __init__(self, weights, states, t, variant="custom-list"):
        self.weights = np.asarray(weights, dtype=float)
        self.states = np.atleast_2d(np.asarray(states, dtype=complex))
        if self.weights.ndim != 1 or len(self.weights) != len(self.states):
            raise ValueError("need one weight per state")
        if np.any(self.weights < 0):
            raise ValueError("weights must be non-negative")
        if abs(self.weights.sum() - 1) > 1e-10:
            raise ValueError("weights must sum to one")
        norms = np.linalg.norm(self.states, axis=1)
        if np.abs(norms - 1).max() > 1e-10:
            raise ValueError("states must be unit vectors")
        self.N = self.states.shape[1]
        self.t = t
        self.size = len(self.weights)
        self.variant = variant

    def block(self, start, stop):
        return self.weights[start:stop], self.states[start:stop]

    def to_spec(self):
        if self.variant == "mub":
            return {"variant": "mub", "N": self.N, "t": self.t}
        raise ValueError("explicit state lists have no compact specification")


class ProductStructure:
    """Factors of a product ensemble: f-weights, unit radial vectors, phase rows."""

    def __init__(self, f_weights, radial, phase_rows, size_g):
        self.f_weights = f_weights
        self.radial = radial
        self.phase_rows = phase_rows
        self.size_g = size_g


class ProductEnsemble(Ensemble):
    """Ensemble built from a magnitude family and one or more phase families.

    Parameters
    ----------
    variant : str
        ``"main"`` or ``"improved"``.
    N, t : int
        Dimension and design order.
    rule : QuadratureRule
        Rounded rule with rational weights of denominator ``f_family.m``.
    f_family : FunctionFamily
        Selects magnitude levels; values lie in ``0..rule.weights_den - 1``.
    phase_families : list of FunctionFamily
        Member ``g`` contributes ``exp(2 pi i g(j) / m)`` for each family.
    epsilon : float, optional
        Target accuracy recorded in the specification.
    """

    def __init__(self, variant, N, t, rule, f_family, phase_families, epsilon=None):
        if rule.weights_den != f_family.m:
            raise ValueError("rule denominator must equal the magnitude family range")
        self.variant = variant
        self.N = N
        self.t = t
        self.rule = rule
        self.epsilon = epsilon
        self.f_family = f_family
        self.phase_families = list(phase_families)
        self.size_f = f_family.size
        self.size_g = int(np.prod([g.size for g in self.phase_families], dtype=object))
        self.size = self.size_f * self.size_g
        self._levels = np.cumsum(rule.weights_num)
        self._amp = np.abs(rule.nodes) / np.sqrt(N)
        self._phase_tables = None
        mags = self.magnitudes(0, self.size_f)
        norm2 = (mags ** 2).sum(axis=1)
        self._f_weights = norm2 / self.size_f
        self._radial = mags / np.sqrt(norm2)[:, None]
        self.product = ProductStructure(self._f_weights, self._radial, self.phase_rows,
                                        self.size_g)

    def magnitudes(self, start, stop):
        """a_{f,j} for f in [start, stop)."""
        v = self.f_family.values(start, stop)
        level = np.searchsorted(self._levels, v, side="right")
        return self._amp[level]

    def _family_phases(self, fam, start, stop):
        return np.exp(2j * np.pi * fam.values(start, stop) / fam.m)

    def phase_rows(self, start, stop):
        """Unit-modulus phase vectors for g in [start, stop)."""
        if self._phase_tables is None:
            total = sum(g.size for g in self.phase_families) * self.N
            if total <= PHASE_CACHE_ENTRIES:
                self._phase_tables = [self._family_phases(g, 0, g.size)
                                      for g in self.phase_families]
        idx = np.arange(start, stop, dtype=np.int64)
        out = np.ones((len(idx), self.N), dtype=complex)
        for k in range(len(self.phase_families) - 1, -1, -1):
            fam = self.phase_families[k]
            idx, digit = np.divmod(idx, fam.size)
            if self._phase_tables is not None:
                out *= self._phase_tables[k][digit]
            else:
                lo, hi = int(digit.min()), int(digit.max()) + 1
                out *= self._family_phases(fam, lo, hi)[digit - lo]
        return out

    def block(self, start, stop):
        idx = np.arange(start, stop, dtype=np.int64)
        f, g = np.divmod(idx, self.size_g)
        if not len(idx):
            return np.zeros(0), np.zeros((0, self.N), dtype=complex)
        g0 = int(g.min())
        ph = self.phase_rows(g0, int(g.max()) + 1)[g - g0]
        states = self._radial[f] * ph
        weights = self._f_weights[f] / self.size_g
        return weights, states

    def chunks(self, chunk_size=8192):
        G = self.size_g
        if chunk_size >= G:
            ph = self.phase_rows(0, G)
            per = chunk_size // G
            for f0 in range(0, self.size_f, per):
                f1 = min(f0 + per, self.size_f)
                states = (self._radial[f0:f1, None, :] * ph[None]).reshape(-1, self.N)
                weights = np.repeat(self._f_weights[f0:f1] / G, G)
                yield f0 * G, weights, states
        else:
            for f in range(self.size_f):
                for g0 in range(0, G, chunk_size):
                    g1 = min(g0 + chunk_size, G)
                    states = self._radial[f] * self.phase_rows(g0, g1)
                    weights = np.full(g1 - g0, self._f_weights[f] / G)
                    yield f * G + g0, weights, states

    def total_weight(self):
        return float(self._f_weights.sum())

    def to_spec(self):
        return {
            "variant": self.variant,
            "N": self.N,
            "t": self.t,
            "epsilon": self.epsilon,
            "rule": self.rule.to_dict(),
            "families": {
                "f": self.f_family.to_dict(),
                "g": [g.to_dict() for g in self.phase_families],
            },
            "size": self.size,
        }


def build_design(N, t, allow_small_n=False):
    """Design of order t in C^N from exactly t-wise and 2t-wise independent
    polynomial families over GF(N).  Size N^(3t).

    ``allow_small_n`` permits N < 2t, where phase cancellation is no longer
    guaranteed and the result is only an approximate design.
    """
    _check_pow2(N)
    if t < 1:
        raise ValueError("t must be >= 1")
    if N < 2 * t and not allow_small_n:
        raise ValueError(f"need N >= 2t, got N={N}, t={t}")
    rule = round_rule(haar_rule(t), N)
    return ProductEnsemble("main", N, t, rule, exact_family(N, t), [exact_family(N, 2 * t)])


def improved_parameters(N, t, epsilon):
    """Moduli and family accuracy used by :func:`build_design_improved`."""
    m_f = min(N, 1 << ceil(log2(8 / epsilon)))
    m_g = 1 << (t.bit_length())
    return {"m_f": m_f, "m_g": max(m_g, 2), "delta": epsilon / 8}


def build_design_improved(N, t, epsilon, allow_small_n=False):
    """Smaller approximate design using delta-dependent families.

    Magnitudes come from a t-wise family into Z_{m_f}; phases combine a sign
    from an exactly 2t-wise independent binary family with an m_g-th root of
    unity from a t-wise family, where m_g is the smallest power of two above t.
    """
    _check_pow2(N)
    if t < 1:
        raise ValueError("t must be >= 1")
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must lie in (0, 1)")
    if N < 2 * t and not allow_small_n:
        raise ValueError(f"need N >= 2t, got N={N}, t={t}")
    p = improved_parameters(N, t, epsilon)
    rule = round_rule(haar_rule(t), p["m_f"])
    f = delta_family(N, p["m_f"], t, p["delta"])
    g1 = binary_family(N, 2 * t)
    g2 = delta_family(N, p["m_g"], t, p["delta"])
    return ProductEnsemble("improved", N, t, rule, f, [g1, g2], epsilon=epsilon)


def improved_size(N, t, epsilon):
    """Size of :func:`build_design_improved` without building the ensemble."""
    p = improved_parameters(N, t, epsilon)
    return (delta_family(N, p["m_f"], t, p["delta"]).size * binary_family(N, 2 * t).size
            * delta_family(N, p["m_g"], t, p["delta"]).size)


def mub_states(N):
    """The N+1 bases as an (N(N+1), N) array; element = basis * N + vector.

    Basis 0 is computational; basis a+1 has vectors w^(a j^2 + b j)/sqrt(N).  For
    N = 2 the X and Y eigenbases are used.
    """
    if not _is_prime(N):
        raise ValueError(f"N must be prime, got {N}")
    j = np.arange(N)
    blocks = [np.eye(N, dtype=complex)]
    for a in range(N):
        if N == 2:
            expo = (a * j + 2 * np.arange(N)[:, None] * j) / 4
        else:
            expo = (a * j ** 2 + np.arange(N)[:, None] * j) % N / N
        blocks.append(np.exp(2j * np.pi * expo) / np.sqrt(N))
    return np.concatenate(blocks)


def build_mub_design(N):
    """Uniform mixture of N+1 mutually unbiased bases: an exact 2-design."""
    states = mub_states(N)
    w = np.full(len(states), 1 / len(states))
    return StateListEnsemble(w, states, 2, variant="mub")


def from_spec(spec):
    """Rebuild an ensemble from :meth:`to_spec` output."""
    v = spec["variant"]
    if v == "main":
        ens = build_design(spec["N"], spec["t"], allow_small_n=spec["N"] < 2 * spec["t"])
    elif v == "improved":
        ens = build_design_improved(spec["N"], spec["t"], spec["epsilon"],
                                    allow_small_n=spec["N"] < 2 * spec["t"])
    elif v == "mub":
        return build_mub_design(spec["N"])
    else:
        raise ValueError(f"unknown variant {v!r}")
    if "rule" in spec:
        given = QuadratureRule.from_dict(spec["rule"])
        if given.weights_num != ens.rule.weights_num or not np.allclose(given.nodes, ens.rule.nodes):
            raise ValueError("rule in specification does not match the construction")
    if "families" in spec:
        FunctionFamily.from_dict(spec["families"]["f"])
        if spec["families"]["f"]["size"] != ens.f_family.size:
            raise ValueError("family in specification does not match the construction")
    return ens
