"""How well the POVM of an ensemble separates two quantum states.

For an ensemble {p_i, phi_i} the POVM elements are ``N p_i |phi_i><phi_i|``.
With ``Delta = rho1 - rho2`` and ``S_i = <phi_i|Delta|phi_i>`` the l1 distance
between outcome distributions is ``sum_i N p_i |S_i|``.  Hoelder's inequality
gives ``E|S| >= (E S^2)^{3/2} / (E S^4)^{1/2}`` under the measure p.
"""

from dataclasses import dataclass

import numpy as np

from .design_builder import mub_states
from .verifier import DEFAULT_CHUNK, stream_reduce


def check_density(rho, tol=1e-8):
    """Validate a density matrix (Hermitian, PSD, unit trace) and return it as an array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix must be Hermitian")
    if abs(np.trace(rho).real - 1) > tol:
        raise ValueError("density matrix must have unit trace")
    if np.linalg.eigvalsh((rho + rho.conj().T) / 2).min() < -tol:
        raise ValueError("density matrix must be positive semidefinite")
    return rho


def pure(psi):
    psi = np.asarray(psi, dtype=complex)
    psi = psi / np.linalg.norm(psi)
    return np.outer(psi, psi.conj())


def frobenius_norm(delta):
    return float(np.linalg.norm(delta))


def berger_bound(m2, m4):
    """Lower bound (E S^2)^{3/2} / (E S^4)^{1/2} on E|S|."""
    if m4 <= 0:
        return 0.0
    return float(m2 ** 1.5 / m4 ** 0.5)


def _s_values_product(ens, delta, g0, g1):
    # S[f, g] for all f and g in [g0, g1) as one matrix product
    prod = ens.product
    r = prod.radial
    rd = (r[:, :, None] * r[:, None, :] * delta[None]).reshape(len(r), -1)
    ph = prod.phase_rows(g0, g1)
    pp = (np.conj(ph)[:, :, None] * ph[:, None, :]).reshape(len(ph), -1)
    return (rd @ pp.T).real


def s_moments(ens, delta, threads=None, chunk_size=DEFAULT_CHUNK):
    """Weighted sums (sum p, sum p S, sum p |S|, sum p S^2, sum p S^4)."""
    delta = np.asarray(delta, dtype=complex)
    if ens.product is not None:
        prod = ens.product
        G = prod.size_g
        step = max(1, chunk_size // 4)

        def part(g0):
            S = _s_values_product(ens, delta, g0, min(g0 + step, G))
            w = prod.f_weights / G
            n = S.shape[1]
            return np.array([w.sum() * n, w @ S.sum(1), w @ np.abs(S).sum(1),
                             w @ (S ** 2).sum(1), w @ (S ** 4).sum(1)])

        return stream_reduce(part, range(0, G, step), threads)

    def part(chunk):
        _, w, s = chunk
        S = np.einsum("na,ab,nb->n", np.conj(s), delta, s).real
        return np.array([w.sum(), w @ S, w @ np.abs(S), w @ S ** 2, w @ S ** 4])

    return stream_reduce(part, ens.chunks(chunk_size), threads)


def povm_distribution(ens, rho, chunk_size=DEFAULT_CHUNK):
    """Outcome probabilities N p_i <phi_i|rho|phi_i>, in element order."""
    rho = check_density(rho)
    if rho.shape[0] != ens.N:
        raise ValueError("dimension mismatch between state and ensemble")
    out = []
    for _, w, s in ens.chunks(chunk_size):
        out.append(ens.N * w * np.einsum("na,ab,nb->n", np.conj(s), rho, s).real)
    return np.concatenate(out)


@dataclass
class DistinctionReport:
    """Distinguishing power of an ensemble POVM for one pair of states."""

    l1: float
    frobenius: float
    f_ratio: float
    m2: float
    m4: float
    berger: float
    haar_m2: float
    haar_m4_bound: float
    epsilon_hat: float = None
    bounds: dict = None
    haar_baseline: float = None
    haar_baseline_stderr: float = None

    def to_dict(self):
        return dict(self.__dict__)


def haar_s_moments(N, f):
    """Haar value of E S^2 and the bound on E S^4 for a traceless Delta with
    Frobenius norm f."""
    return f ** 2 / (N * (N + 1)), 9 * f ** 4 / (N * (N + 1) * (N + 2) * (N + 3))


def design_bounds(N, f, eps):
    """Predicted ranges for an epsilon-approximate 4-design.

    ``one_minus_delta`` is the factor ``max(0, 1 - 4 eps)^{3/2} / (1 + 50 eps)^{1/2}``
    by which the Haar bound f/3 on l1 may shrink.
    """
    m2, m4 = haar_s_moments(N, f)
    omd = max(0.0, 1 - 4 * eps) ** 1.5 / (1 + 50 * eps) ** 0.5
    return {"l1_lower": f / 3 * omd, "m2_low": (1 - 4 * eps) * m2, "m2_high": (1 + 4 * eps) * m2,
            "m4_high": (1 + 50 * eps) * m4, "one_minus_delta": omd}


def distinguish(ens, rho1, rho2, epsilon_hat=None, baseline_trials=0, seed=0, threads=None,
                chunk_size=DEFAULT_CHUNK):
    """Compare the ensemble POVM on two states.

    ``epsilon_hat``, if given, is the measured design accuracy used for the
    predicted ranges in ``bounds``.
    """
    rho1 = check_density(rho1)
    rho2 = check_density(rho2)
    if rho1.shape != rho2.shape or rho1.shape[0] != ens.N:
        raise ValueError("density matrices must match the ensemble dimension")
    delta = rho1 - rho2
    N = ens.N
    tot, s1, sabs, s2, s4 = s_moments(ens, delta, threads, chunk_size)
    m2, m4 = s2 / tot, s4 / tot
    f = frobenius_norm(delta)
    hm2, hm4 = haar_s_moments(N, f)
    rep = DistinctionReport(l1=float(N * sabs), frobenius=f,
                            f_ratio=float(N * sabs / f) if f > 0 else 0.0,
                            m2=float(m2), m4=float(m4), berger=berger_bound(m2, m4),
                            haar_m2=hm2, haar_m4_bound=hm4)
    if epsilon_hat is not None:
        rep.epsilon_hat = float(epsilon_hat)
        rep.bounds = design_bounds(N, f, epsilon_hat)
    if baseline_trials:
        rep.haar_baseline, rep.haar_baseline_stderr = haar_baseline(
            rho1, rho2, baseline_trials, seed, return_stderr=True)
    return rep


def haar_unitary(N, rng):
    """Haar-random unitary by QR of a complex Gaussian matrix with phase fix."""
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def haar_baseline(rho1, rho2, trials, seed=0, return_stderr=False):
    """Mean l1 distance after measuring in a Haar-random orthonormal basis."""
    rho1 = check_density(rho1)
    rho2 = check_density(rho2)
    delta = rho1 - rho2
    N = delta.shape[0]
    rngs = [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]
    vals = np.empty(trials)
    for k, rng in enumerate(rngs):
        u = haar_unitary(N, rng)
        vals[k] = np.abs(np.einsum("ak,ab,bk->k", np.conj(u), delta, u).real).sum()
    mean = float(vals.mean())
    if return_stderr:
        se = float(vals.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
        return mean, se
    return mean


def mub_counterexample(N):
    """Two orthogonal states separated poorly by the N+1 unbiased bases.

    Returns ``(rho1, rho2, l1)``: the first two vectors of the computational
    basis and the l1 distance 2/(N+1) between their outcome distributions.
    """
    states = mub_states(N)
    rho1, rho2 = pure(states[0]), pure(states[1])
    delta = rho1 - rho2
    S = np.einsum("na,ab,nb->n", np.conj(states), delta, states).real
    l1 = float(np.abs(S).sum() / (N + 1))
    return rho1, rho2, l1


def random_orthogonal_pair(N, rng):
    """Two orthogonal Haar-random pure density matrices."""
    u = haar_unitary(N, rng)
    return pure(u[:, 0]), pure(u[:, 1])
