"""Two-stage simulation of the main design's POVM.

Stage f measures the magnitude function: coefficients c_1..c_{t-1} are drawn
uniformly, an ancilla register is prepared in ``sum_i amp(i) |i>`` with
``amp(i) = |x_{level(i)}| / sqrt(N)``, shifted by ``m(j) = c_{t-1} j^{t-1} + ... + c_1 j``
(controlled on the system value j, in GF(N)) and read out as c_0.  The
post-measurement state is proportional to ``a_f * alpha`` with
``f(j) = c_0 + m(j)``.

Stage g measures the phase function: the probability of g is
``N^{-(2t-1)} |<psi_g|phi>|^2`` with ``psi_g(j) = exp(2 pi i g(j) / N) / sqrt(N)``.
All coefficients except the linear one are drawn from their marginal, then
the linear coefficient d_1 from its conditional law.  For N = 2 the last step
is a Fourier-basis measurement after undoing the phases of g with d_1 = 0
(see :func:`fourier_stage_g_probabilities`); for larger N the slices are not
orthogonal in the XOR arithmetic of GF(N), so the conditional law is computed
directly.

The composition equals the direct POVM ``N p_{f,g} |<psi_{f,g}|phi>|^2``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .finite_field import GF
from .kwise_families import exact_family
from .quadrature import haar_rule, round_rule


@dataclass
class MeasurementOutcome:
    f_index: int
    g_index: int
    f_coeffs: tuple
    g_coeffs: tuple
    state: np.ndarray = None


def _check_state(state):
    state = np.asarray(state, dtype=complex)
    if state.ndim != 1:
        raise ValueError("state must be a vector")
    if abs(np.linalg.norm(state) - 1) > 1e-10:
        raise ValueError("state must be normalised")
    return state


def _rule_for(N, t, rule):
    if rule is None:
        return round_rule(haar_rule(t), N)
    if rule.weights_den != N:
        raise ValueError("rule weights must be multiples of 1/N")
    return rule


def ancilla_amplitudes(rule, N):
    """amp(i) for i in 0..N-1."""
    levels = np.searchsorted(np.cumsum(rule.weights_num), np.arange(N), side="right")
    return np.abs(rule.nodes)[levels] / np.sqrt(N)


def _shift(N, high):
    # m(j) = sum_{k>=1} c_k j^k over GF(N)
    gf = GF(N)
    coeffs = np.concatenate([[0], np.asarray(high, dtype=np.int64)])
    return gf.evaluate(coeffs[None, :], np.arange(N))[0]


def stage_f_joint(state, high, rule):
    """Joint system/ancilla amplitudes B[j, c] after the controlled shift."""
    N = len(state)
    amp = ancilla_amplitudes(rule, N)
    m = _shift(N, high)
    c = np.arange(N)
    return state[:, None] * amp[c[None, :] ^ m[:, None]]


def stage_f_probabilities(state, t, high, rule=None):
    """Probability of each c_0 given c_1..c_{t-1} = ``high``."""
    state = _check_state(state)
    rule = _rule_for(len(state), t, rule)
    if len(high) != t - 1:
        raise ValueError(f"need {t - 1} higher coefficients")
    B = stage_f_joint(state, high, rule)
    return (np.abs(B) ** 2).sum(axis=0)


def stage_f(state, t, rule, rng):
    """One stage-f shot.  Returns (coefficients c_0..c_{t-1}, collapsed state)."""
    state = _check_state(state)
    N = len(state)
    rule = _rule_for(N, t, rule)
    high = rng.integers(N, size=t - 1)
    B = stage_f_joint(state, high, rule)
    p = (np.abs(B) ** 2).sum(axis=0)
    c0 = rng.choice(N, p=p / p.sum())
    out = B[:, c0]
    return (int(c0),) + tuple(int(c) for c in high), out / np.linalg.norm(out)


def kraus_f(f_index, N, t, rule=None):
    """Diagonal of the stage-f Kraus operator N^{-(t-1)/2} diag(a_f)."""
    rule = _rule_for(N, t, rule)
    amp = ancilla_amplitudes(rule, N)
    vals = exact_family(N, t).values(f_index, f_index + 1)[0]
    return amp[vals] / N ** ((t - 1) / 2)


@lru_cache(maxsize=8)
def _phase_table(N, t):
    vals = exact_family(N, 2 * t).values()
    tab = np.exp(2j * np.pi * vals / N) / np.sqrt(N)
    tab.setflags(write=False)
    return tab


def stage_g_distribution(state, t):
    """P(g) = N^{-(2t-1)} |<psi_g|phi>|^2 for every member g, in index order."""
    state = _check_state(state)
    N = len(state)
    amp = np.conj(_phase_table(N, t)) @ state
    return np.abs(amp) ** 2 / N ** (2 * t - 1)


def _split(p, N):
    # axes (higher digits, d_1, d_0)
    return p.reshape(-1, N, N)


def stage_g(state, t, rng):
    """One stage-g shot.  Returns the coefficients d_0..d_{2t-1}."""
    N = len(state)
    p = _split(stage_g_distribution(state, t), N)
    marg = p.sum(axis=1).ravel()
    r = rng.choice(len(marg), p=marg / marg.sum())
    hi, d0 = divmod(r, N)
    cond = p[hi, :, d0]
    d1 = rng.choice(N, p=cond / cond.sum())
    idx = d0 + N * d1 + N * N * hi
    return _coeffs(idx, N, 2 * t)


def _coeffs(idx, N, k):
    out = []
    for _ in range(k):
        idx, d = divmod(int(idx), N)
        out.append(d)
    return tuple(out)


def _index(coeffs, N):
    return sum(int(c) * N ** i for i, c in enumerate(coeffs))


def fourier_stage_g_probabilities(state, t, rest):
    """Probabilities of l after undoing the phases of g_0 (= g with d_1 = 0)
    and measuring in the basis ``sum_j w^{-j l} |j> / sqrt(N)``.

    ``rest`` holds d_0, d_2, ..., d_{2t-1}.  Matches the exact conditional law
    of d_1 only for N = 2.
    """
    state = _check_state(state)
    N = len(state)
    coeffs = [rest[0], 0] + list(rest[1:])
    if len(coeffs) != 2 * t:
        raise ValueError(f"need {2 * t - 1} coefficients")
    g0 = GF(N).evaluate(np.array([coeffs]), np.arange(N))[0]
    undone = np.exp(-2j * np.pi * g0 / N) * state
    j = np.arange(N)
    basis = np.exp(-2j * np.pi * np.outer(j, j) / N) / np.sqrt(N)  # column l
    p = np.abs(basis.conj().T @ undone) ** 2
    return p / p.sum()


def stage_g_conditional(state, t, rest):
    """Exact conditional law of d_1 given the other coefficients."""
    N = len(state)
    p = _split(stage_g_distribution(state, t), N)
    hi = _index(rest[1:], N)
    cond = p[hi, :, rest[0]]
    return cond / cond.sum()


def measure(state, t, rule=None, rng=None):
    """One shot of the full two-stage measurement."""
    rng = np.random.default_rng() if rng is None else rng
    N = len(state)
    fc, post = stage_f(state, t, rule, rng)
    gc = stage_g(post, t, rng)
    return MeasurementOutcome(_index(fc, N), _index(gc, N), fc, gc, post)


def composed_distribution(state, t, rule=None):
    """Exact outcome distribution of the two-stage procedure, shape (N^t, N^(2t))."""
    state = _check_state(state)
    N = len(state)
    rule = _rule_for(N, t, rule)
    out = np.zeros((N ** t, N ** (2 * t)))
    for h in range(N ** (t - 1)):
        high = _coeffs(h, N, t - 1)
        B = stage_f_joint(state, high, rule)
        pc = (np.abs(B) ** 2).sum(axis=0) / N ** (t - 1)
        for c0 in range(N):
            if pc[c0] == 0:
                continue
            post = B[:, c0] / np.linalg.norm(B[:, c0])
            out[c0 + N * h] = pc[c0] * stage_g_distribution(post, t)
    return out


def direct_distribution(ens, state):
    """N p_i |<phi_i|state>|^2 over the ensemble, shape (|F|, |G|)."""
    state = _check_state(state)
    prod = ens.product
    amp = np.conj(prod.radial[:, None, :] * prod.phase_rows(0, prod.size_g)[None]) @ state
    p = prod.f_weights[:, None] / prod.size_g
    return ens.N * p * np.abs(amp) ** 2


def sample_povm(state, t, count, seed=0, rule=None):
    """Counts of ``count`` independent two-stage shots, shape (N^t, N^(2t)).

    Shots are drawn stage by stage with multinomial splits, which is equal in
    law to repeating :func:`measure` ``count`` times.
    """
    state = _check_state(state)
    if count < 0:
        raise ValueError("count must be non-negative")
    N = len(state)
    rule = _rule_for(N, t, rule)
    rng = np.random.default_rng(seed)
    counts = np.zeros((N ** t, N ** (2 * t)), dtype=np.int64)
    nh = N ** (t - 1)
    for h, n_h in enumerate(rng.multinomial(count, np.full(nh, 1 / nh))):
        if not n_h:
            continue
        B = stage_f_joint(state, _coeffs(h, N, t - 1), rule)
        pc = (np.abs(B) ** 2).sum(axis=0)
        for c0, n_f in enumerate(rng.multinomial(n_h, pc / pc.sum())):
            if not n_f:
                continue
            post = B[:, c0] / np.linalg.norm(B[:, c0])
            p = _split(stage_g_distribution(post, t), N)
            marg = p.sum(axis=1).ravel()
            row = counts[c0 + N * h]
            for r, n_r in enumerate(rng.multinomial(n_f, marg / marg.sum())):
                if not n_r:
                    continue
                hi, d0 = divmod(r, N)
                cond = p[hi, :, d0]
                n_d1 = rng.multinomial(n_r, cond / cond.sum())
                row[d0 + N * np.arange(N) + N * N * hi] += n_d1
    return counts
