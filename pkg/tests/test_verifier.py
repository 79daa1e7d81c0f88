from itertools import permutations

import numpy as np
import pytest

from tdesign.design_builder import (
    StateListEnsemble,
    build_design,
    build_design_improved,
    build_mub_design,
)
from tdesign.haar_moments import Monomial, haar_expectation, haar_sample, multisets, symmetric_dim
from tdesign.verifier import (
    approx_epsilon,
    check_conditions,
    frame_operator,
    haar_monte_carlo,
    moment_matrix,
    monomial_expectation,
)


def sym_basis(N, t):
    # orthonormal basis of the symmetric subspace, one column per multiset
    cols = []
    for s in multisets(N, t):
        v = np.zeros(N ** t)
        for p in set(permutations(s)):
            v[np.ravel_multi_index(p, (N,) * t)] = 1
        cols.append(v / np.linalg.norm(v))
    return np.array(cols).T


def dense_frame(ens, t):
    w, s = ens.arrays()
    tp = s
    for _ in range(t - 1):
        tp = (tp[:, :, None] * s[:, None, :]).reshape(len(s), -1)
    return (tp * w[:, None]).T @ tp.conj()


@pytest.mark.parametrize("ens,t", [(build_design(4, 2), 2), (build_mub_design(3), 2),
                                   (build_design(2, 1), 1)])
def test_frame_operator_against_dense(ens, t):
    full = dense_frame(ens, t)
    B = sym_basis(ens.N, t)
    F, residual = frame_operator(ens, t)
    assert np.abs(B.T @ full @ B - F).max() < 1e-14
    # no weight outside the symmetric subspace
    P = B @ B.T
    assert np.abs(full - P @ full @ P).max() < 1e-14
    assert residual < 1e-12
    lam = np.sort(np.linalg.eigvalsh(full))[-len(B.T):]
    assert np.allclose(lam, np.sort(np.linalg.eigvalsh(F)), atol=1e-14)


def test_random_ensemble_not_a_design():
    rng = np.random.default_rng(0)
    s = haar_sample(40, 4, rng)
    ens = StateListEnsemble(np.full(40, 1 / 40), s, 2)
    F, _ = frame_operator(ens)
    assert approx_epsilon(F, 4, 2) > 0.1


@pytest.mark.parametrize("N", [2, 3, 5, 7])
def test_mub_is_2_design(N):
    F, residual = frame_operator(build_mub_design(N), 2)
    assert approx_epsilon(F, N, 2) < 1e-10
    assert residual < 1e-12


def test_factored_matches_stream_main():
    ens = build_design(8, 2)
    sets = [s for k in range(3) for s in multisets(8, k)]
    a = moment_matrix(ens, sets, method="factored")
    b = moment_matrix(ens, sets, method="stream")
    assert np.abs(a - b).max() < 1e-13


def test_factored_matches_stream_improved():
    ens = build_design_improved(8, 2, 0.5)
    sets = multisets(8, 2)
    a = moment_matrix(ens, sets, method="factored")
    b = moment_matrix(ens, sets, method="stream", chunk_size=1 << 15)
    assert np.abs(a - b).max() < 1e-13


def test_rectangular_moments():
    ens = build_design(4, 2)
    rows, cols = multisets(4, 1), multisets(4, 2)
    a = moment_matrix(ens, rows, cols, method="factored")
    b = moment_matrix(ens, rows, cols, method="stream")
    assert a.shape == (4, 10)
    assert np.abs(a - b).max() < 1e-14


def test_thread_count_does_not_change_results():
    ens = build_design(8, 2)
    sets = multisets(8, 2)
    ref = moment_matrix(ens, sets, method="stream", threads=1, chunk_size=4096)
    for th in (2, 3):
        out = moment_matrix(ens, sets, method="stream", threads=th, chunk_size=4096)
        assert np.array_equal(ref, out)
    a = check_conditions(ens, threads=1).to_dict()
    b = check_conditions(ens, threads=3).to_dict()
    assert a == b


def test_env_thread_variable(monkeypatch):
    monkeypatch.setenv("TDESIGN_THREADS", "2")
    ens = build_design(4, 2)
    assert np.array_equal(moment_matrix(ens, multisets(4, 2), method="stream"),
                          moment_matrix(ens, multisets(4, 2), method="stream", threads=1))
    monkeypatch.setenv("TDESIGN_THREADS", "0")
    with pytest.raises(ValueError):
        moment_matrix(ens, multisets(4, 2))


@pytest.mark.parametrize("N,t", [(8, 2), (16, 2), (8, 3)])
def test_main_design_conditions(N, t):
    rep = check_conditions(build_design(N, t), epsilon=0.9)
    assert rep.unbalanced_residual < 1e-12
    assert rep.second_moment_residual < 1e-12
    assert rep.povm_residual < 1e-12
    assert rep.off_support_residual < 1e-12
    assert abs(rep.trace - 1) < 1e-10
    # with vanishing unbalanced moments the frame operator is diagonal
    assert rep.epsilon <= rep.frame_bound + 1e-12
    assert abs(rep.epsilon - rep.balanced_relative_deviation) < 1e-12
    assert rep.conditions_hold


def test_conditions_flag_false_when_target_too_small():
    rep = check_conditions(build_design(8, 2), epsilon=0.01)
    assert rep.conditions_hold is False


def test_small_n_breaks_phase_cancellation():
    rep = check_conditions(build_design(4, 4, allow_small_n=True))
    assert rep.unbalanced_residual > 1e-3


def test_monomial_expectation():
    ens = build_design(8, 2)
    m = Monomial.parse("1:2")
    val = monomial_expectation(ens, m)
    E = moment_matrix(ens, [(1, 1)])
    assert abs(val - E[0, 0]) < 1e-15
    assert abs(monomial_expectation(ens, Monomial.parse("0:1,0;1:0,1"))) < 1e-15
    with pytest.warns(UserWarning):
        monomial_expectation(ens, Monomial.parse("1:3"))
    with pytest.raises(ValueError):
        monomial_expectation(ens, Monomial.parse("8:1"))


def test_mub_monomial_exact():
    ens = build_mub_design(5)
    m = Monomial.parse("1:1;2:1")
    assert abs(monomial_expectation(ens, m) - float(haar_expectation(5, m))) < 1e-15


def test_budgeted_mode():
    ens = build_design(16, 2)
    full = check_conditions(ens)
    part = check_conditions(ens, mode="budgeted", max_monomials=40)
    assert part.monomials_checked < full.monomials_checked
    assert part.balanced_relative_deviation <= full.balanced_relative_deviation + 1e-12
    rep = check_conditions(build_design(4, 2), table=True)
    assert len(rep.table) == rep.monomials_checked


def test_frame_operator_limits():
    with pytest.raises(ValueError):
        frame_operator(build_design(16, 2), max_dim=10)
    with pytest.raises(ValueError):
        approx_epsilon(np.eye(3), 4, 2)


def test_haar_monte_carlo_small():
    mean, se = haar_monte_carlo(4, Monomial.parse("1:2"), 200000, seed=3)
    assert abs(mean - 0.1) < 4 * se
    assert symmetric_dim(4, 2) == 10


def test_equivalence_both_directions_mub():
    ens = build_mub_design(5)
    F, _ = frame_operator(ens, 2)
    M = symmetric_dim(5, 2)
    assert np.abs(F - np.eye(M) / M).max() < 1e-12
    rep = check_conditions(ens, 2)
    assert rep.epsilon < 1e-10
    assert rep.unbalanced_residual < 1e-12
    assert rep.balanced_relative_deviation < 1e-12
    assert rep.epsilon <= rep.frame_bound + 1e-12


def test_theorem_bound_on_other_ensembles():
    for ens in (build_design(4, 4, allow_small_n=True), build_design_improved(16, 2, 0.2)):
        rep = check_conditions(ens)
        assert rep.epsilon <= rep.frame_bound
