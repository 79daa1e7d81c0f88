"""Moment and frame-operator checks for ensembles of pure states.

Everything reduces to moment matrices ``E[I, J] = sum_i p_i alpha_i^I conj(alpha_i^J)``
indexed by multisets I, J of coordinates, where ``alpha^I = prod_{j in I} alpha_j``.
The frame operator on the symmetric subspace is ``sqrt(d_I d_J) E[I, J]`` for
multisets of size t, with ``d_I`` the number of orderings of I; an exact
t-design has every eigenvalue equal to ``1 / C(N+t-1, t)``.

Product ensembles are handled through the factorisation
``E = E_f * E_g`` (entrywise), which is exact; generic ensembles are streamed in
chunks.  Chunk partial sums are reduced pairwise in a fixed order so results
do not depend on the number of worker threads.
"""

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import permutations
from math import factorial

import numpy as np

from .haar_moments import Monomial, haar_expectation, multiset_weight, multisets, symmetric_dim

DEFAULT_CHUNK = 8192


def resolve_threads(threads=None):
    if threads is None:
        threads = int(os.environ.get("TDESIGN_THREADS", "1"))
    if threads < 1:
        raise ValueError("threads must be >= 1")
    return threads


def _pairwise_sum(parts):
    parts = list(parts)
    if not parts:
        return None
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def stream_reduce(fn, items, threads=None):
    """sum(fn(x) for x in items), evaluated on a thread pool with a
    deterministic pairwise reduction."""
    threads = resolve_threads(threads)
    if threads == 1:
        return _pairwise_sum(fn(x) for x in items)
    with ThreadPoolExecutor(threads) as ex:
        return _pairwise_sum(ex.map(fn, items))


def _index_table(sets, t_max):
    # pad with index -1, which points at an appended column of ones
    tab = np.full((len(sets), max(t_max, 1)), -1, dtype=np.int64)
    for r, s in enumerate(sets):
        tab[r, :len(s)] = s
    return tab


def _products(states, tab):
    ext = np.concatenate([states, np.ones((states.shape[0], 1), dtype=states.dtype)], axis=1)
    return np.prod(ext[:, tab], axis=2)


def _gram_block(weights, states, rows, cols):
    a = _products(states, rows)
    b = _products(states, cols) if cols is not rows else a
    return (a * weights[:, None]).T @ np.conj(b)


def _product_moments(ens, row_sets, col_sets, threads, chunk_size):
    prod = ens.product
    t_max = max(len(s) for s in list(row_sets) + list(col_sets))
    rows = _index_table(row_sets, t_max)
    cols = _index_table(col_sets, t_max)
    same = row_sets == col_sets
    rr = _products(prod.radial, rows)
    rc = rr if same else _products(prod.radial, cols)
    ef = (rr * prod.f_weights[:, None]).T @ rc
    G = prod.size_g
    step = max(1, chunk_size)

    def part(g0):
        ph = prod.phase_rows(g0, min(g0 + step, G))
        pr = _products(ph, rows)
        pc = pr if same else _products(ph, cols)
        return pr.T @ np.conj(pc)

    eg = stream_reduce(part, range(0, G, step), threads) / G
    return ef * eg


def moment_matrix(ens, row_sets, col_sets=None, method="auto", threads=None,
                  chunk_size=DEFAULT_CHUNK):
    """E[I, J] = sum_i p_i alpha_i^I conj(alpha_i^J) for multisets I in rows, J in cols.

    ``method`` is ``"factored"`` (product ensembles only), ``"stream"`` or ``"auto"``.
    """
    row_sets = [tuple(s) for s in row_sets]
    col_sets = row_sets if col_sets is None else [tuple(s) for s in col_sets]
    for s in row_sets + col_sets:
        if any(not 0 <= i < ens.N for i in s):
            raise ValueError(f"multiset {s} has an index outside 0..{ens.N - 1}")
    if method == "auto":
        method = "factored" if ens.product is not None else "stream"
    if method == "factored":
        if ens.product is None:
            raise ValueError("factored evaluation needs a product ensemble")
        return _product_moments(ens, row_sets, col_sets, threads, chunk_size)
    if method != "stream":
        raise ValueError(f"unknown method {method!r}")
    t_max = max(len(s) for s in row_sets + col_sets)
    rows = _index_table(row_sets, t_max)
    cols = rows if col_sets == row_sets else _index_table(col_sets, t_max)

    def part(chunk):
        _, w, s = chunk
        return _gram_block(w, s, rows, cols)

    return stream_reduce(part, ens.chunks(chunk_size), threads)


def _antisymmetric_probe(N, t, rng):
    # random unit vector orthogonal to the symmetric subspace of (C^N)^{(x)t}
    shape = (N,) * t
    x = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    sym = sum(np.transpose(x, p) for p in permutations(range(t))) / factorial(t)
    w = (x - sym).ravel()
    return w / np.linalg.norm(w)


def _tensor_power(states, t):
    out = states
    for _ in range(t - 1):
        out = (out[:, :, None] * states[:, None, :]).reshape(states.shape[0], -1)
    return out


def frame_operator(ens, t=None, max_dim=4000, method="auto", threads=None,
                   chunk_size=DEFAULT_CHUNK, probe_samples=1024, seed=0):
    """Frame operator on the symmetric subspace and an off-support residual.

    Returns ``(F, residual)``.  ``F`` is indexed by :func:`multisets` of size t.
    The residual adds ``|sum p - trace F|`` to a spot check: the weighted mean of
    ``|<w|phi^{(x)t}>|^2`` over up to ``probe_samples`` evenly strided elements,
    for a random unit ``w`` orthogonal to the symmetric subspace.
    """
    t = ens.t if t is None else t
    M = symmetric_dim(ens.N, t)
    if M > max_dim:
        raise ValueError(f"symmetric subspace dimension {M} exceeds max_dim={max_dim}")
    sets = multisets(ens.N, t)
    E = moment_matrix(ens, sets, method=method, threads=threads, chunk_size=chunk_size)
    d = np.sqrt([multiset_weight(s) for s in sets])
    F = d[:, None] * E * d[None, :]
    F = (F + F.conj().T) / 2
    residual = abs(ens.total_weight() - np.trace(F).real)
    if t > 1 and ens.N ** t <= 1 << 16:
        rng = np.random.default_rng(seed)
        w = _antisymmetric_probe(ens.N, t, rng)
        idx = np.unique(np.linspace(0, ens.size - 1, min(probe_samples, ens.size)).astype(np.int64))
        pw, st = zip(*(ens.element(int(i)) for i in idx))
        pw = np.array(pw)
        amp = _tensor_power(np.array(st), t) @ np.conj(w)
        residual += float(np.dot(pw, np.abs(amp) ** 2) / pw.sum())
    return F, residual


def approx_epsilon(F, N, t):
    """max over eigenvalues lambda of |lambda * C(N+t-1, t) - 1|."""
    M = symmetric_dim(N, t)
    if F.shape != (M, M):
        raise ValueError(f"frame operator must be {M}x{M}")
    lam = np.linalg.eigvalsh(F)
    return float(np.abs(lam * M - 1).max())


def monomial_expectation(ens, monomial, threads=None, chunk_size=DEFAULT_CHUNK):
    """sum_i p_i m(alpha_i) for a :class:`Monomial`."""
    if monomial.max_index() >= ens.N:
        raise ValueError(f"monomial index {monomial.max_index()} >= N={ens.N}")
    c, d = monomial.degree
    if max(c, d) > ens.t:
        warnings.warn(f"monomial degree {(c, d)} exceeds design order t={ens.t}")

    def part(chunk):
        _, w, s = chunk
        return complex(np.dot(w, monomial.evaluate(s)))

    return stream_reduce(part, ens.chunks(chunk_size), threads)


def _stratified(sets, budget):
    # evenly strided picks inside each (size, number of distinct indices) stratum
    if len(sets) <= budget:
        return sets
    strata = {}
    for s in sets:
        strata.setdefault((len(s), len(set(s))), []).append(s)
    per = max(1, budget // len(strata))
    out = []
    for key in sorted(strata):
        grp = strata[key]
        if len(grp) <= per:
            out.extend(grp)
        else:
            out.extend(grp[i] for i in np.linspace(0, len(grp) - 1, per).astype(int))
    return out


@dataclass
class VerificationReport:
    """Outcome of :func:`check_conditions`."""

    N: int
    t: int
    size: int
    epsilon: float
    unbalanced_residual: float
    balanced_relative_deviation: float
    second_moment_residual: float
    povm_residual: float
    off_support_residual: float
    trace: float
    frame_bound: float
    mode: str
    monomials_checked: int
    target_epsilon: float = None
    conditions_hold: bool = None
    table: list = field(default_factory=list)

    def to_dict(self):
        return {k: v for k, v in self.__dict__.items()}


def check_conditions(ens, t=None, epsilon=None, mode="full", max_monomials=400,
                     tolerance=1e-12, table=False, threads=None, chunk_size=DEFAULT_CHUNK,
                     seed=0):
    """Check the moment conditions of an approximate t-design.

    Moment matrices are taken over all multisets of size 0..t; the pair (I, J)
    is the monomial alpha^I conj(alpha^J), which is balanced exactly when
    I == J.  Reported:

    * largest |E| over pairs I != J with |I| == |J| (Haar value 0),
    * largest relative deviation |E - Haar| / Haar over I == J,
    * largest |E|alpha_j|^2 - 1/N| and the full ``sum p phi phi^* - I/N`` residual,
    * the spectral epsilon of the frame operator, and ``t! *`` the relative
      deviation, which bounds it whenever the unbalanced moments vanish.

    ``mode="budgeted"`` checks a stratified subset of at most ``max_monomials``
    multisets instead of all of them.
    """
    t = ens.t if t is None else t
    if mode not in ("full", "budgeted"):
        raise ValueError(f"unknown mode {mode!r}")
    sets = [s for k in range(t + 1) for s in multisets(ens.N, k)]
    if mode == "budgeted":
        sets = _stratified(sets, max_monomials)
    E = moment_matrix(ens, sets, threads=threads, chunk_size=chunk_size)
    haar = np.array([float(haar_expectation(ens.N, Monomial(tuple(
        (i, s.count(i), s.count(i)) for i in set(s))))) if s else 1.0 for s in sets])
    size = np.array([len(s) for s in sets])
    off = np.where(size[:, None] == size[None, :], E, 0)
    np.fill_diagonal(off, 0)
    unbalanced = float(np.abs(off).max()) if len(sets) > 1 else 0.0
    diag = E.diagonal()
    rel = np.abs(diag - haar) / haar
    balanced = float(rel[1:].max()) if len(sets) > 1 else 0.0
    singles = [i for i, s in enumerate(sets) if len(s) == 1]
    second = float(np.abs(diag[singles] - 1 / ens.N).max()) if singles else 0.0

    sets1 = multisets(ens.N, 1)
    P = moment_matrix(ens, sets1, threads=threads, chunk_size=chunk_size)
    povm = float(np.abs(P - np.eye(ens.N) / ens.N).max())

    F, off_support = frame_operator(ens, t, threads=threads, chunk_size=chunk_size, seed=seed)
    eps = approx_epsilon(F, ens.N, t)
    report = VerificationReport(
        N=ens.N, t=t, size=ens.size, epsilon=eps,
        unbalanced_residual=unbalanced, balanced_relative_deviation=balanced,
        second_moment_residual=second, povm_residual=povm,
        off_support_residual=off_support, trace=float(np.trace(F).real),
        frame_bound=factorial(t) * balanced, mode=mode, monomials_checked=len(sets) ** 2,
    )
    if epsilon is not None:
        report.target_epsilon = epsilon
        report.conditions_hold = bool(unbalanced <= tolerance and second <= tolerance
                                      and balanced <= epsilon)
    if table:
        rows = []
        for a, I in enumerate(sets):
            for b, J in enumerate(sets):
                h = haar[a] if a == b else 0.0
                rows.append({"row": list(I), "col": list(J), "re": float(E[a, b].real),
                             "im": float(E[a, b].imag), "haar": h})
        report.table = rows
    return report


def haar_monte_carlo(N, monomial, samples, seed=0, batch=100000):
    """Monte Carlo mean and standard error of a monomial over Haar states."""
    from .haar_moments import haar_sample

    rng = np.random.default_rng(seed)
    total, total2, n = 0.0, 0.0, 0
    while n < samples:
        k = min(batch, samples - n)
        v = monomial.evaluate(haar_sample(k, N, rng))
        total += v.sum()
        total2 += (np.abs(v) ** 2).sum()
        n += k
    mean = total / n
    var = total2 / n - abs(mean) ** 2
    return mean, float(np.sqrt(max(var, 0) / n))

