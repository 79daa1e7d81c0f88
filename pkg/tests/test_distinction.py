import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdesign.design_builder import StateListEnsemble, build_design, build_mub_design
from tdesign.distinction import (
    berger_bound,
    check_density,
    design_bounds,
    distinguish,
    haar_baseline,
    haar_unitary,
    mub_counterexample,
    povm_distribution,
    pure,
    random_orthogonal_pair,
    s_moments,
)
from tdesign.haar_moments import haar_sample


@pytest.mark.parametrize("N", [3, 5, 7, 11])
def test_mub_counterexample(N):
    rho1, rho2, l1 = mub_counterexample(N)
    assert abs(l1 - 2 / (N + 1)) < 1e-12
    rep = distinguish(build_mub_design(N), rho1, rho2)
    assert abs(rep.l1 - 2 / (N + 1)) < 1e-12
    assert abs(rep.frobenius - np.sqrt(2)) < 1e-12


def test_l1_matches_outcome_distributions():
    rng = np.random.default_rng(2)
    ens = build_design(4, 2)
    rho1, rho2 = random_orthogonal_pair(4, rng)
    p1 = povm_distribution(ens, rho1)
    p2 = povm_distribution(ens, rho2)
    assert abs(p1.sum() - 1) < 1e-12
    rep = distinguish(ens, rho1, rho2)
    assert abs(rep.l1 - np.abs(p1 - p2).sum()) < 1e-12


def test_product_and_stream_s_moments_agree():
    rng = np.random.default_rng(4)
    ens = build_design(8, 2)
    rho1, rho2 = random_orthogonal_pair(8, rng)
    w, s = ens.arrays()
    plain = StateListEnsemble(w / w.sum(), s, 2)
    a = s_moments(ens, rho1 - rho2)
    b = s_moments(plain, rho1 - rho2)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-14)


def test_mub_exact_second_moment():
    # a 2-design reproduces E S^2 = f^2 / (N (N+1)) exactly
    rng = np.random.default_rng(0)
    for N in (3, 5):
        rho1, rho2 = random_orthogonal_pair(N, rng)
        rep = distinguish(build_mub_design(N), rho1, rho2)
        assert abs(rep.m2 - rep.haar_m2) < 1e-14


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_berger_property(seed):
    rng = np.random.default_rng(seed)
    N = int(rng.choice([4, 8]))
    ens = build_design(N, 2)
    rho1, rho2 = random_orthogonal_pair(N, rng)
    rep = distinguish(ens, rho1, rho2)
    assert rep.l1 / N >= rep.berger - 1e-12


def test_berger_bound_values():
    assert berger_bound(1.0, 1.0) == 1.0
    assert berger_bound(0.0, 0.0) == 0.0


def test_design_bounds_shape():
    b = design_bounds(4, np.sqrt(2), 0.0)
    assert abs(b["m2_low"] - 2 / 20) < 1e-15
    assert abs(b["m4_high"] - 9 * 4 / 840) < 1e-15
    assert b["one_minus_delta"] == 1.0
    assert design_bounds(4, 1.0, 1.0)["one_minus_delta"] == 0.0


def test_haar_unitary():
    u = haar_unitary(6, np.random.default_rng(0))
    assert np.abs(u.conj().T @ u - np.eye(6)).max() < 1e-12


def test_haar_baseline_orthogonal_pair():
    rng = np.random.default_rng(5)
    rho1, rho2 = random_orthogonal_pair(8, rng)
    mean, se = haar_baseline(rho1, rho2, 400, seed=1, return_stderr=True)
    assert mean > 0.5 and se < 0.1
    assert haar_baseline(rho1, rho2, 400, seed=1) == mean


def test_density_validation():
    with pytest.raises(ValueError):
        check_density(np.diag([0.5, 0.6]))
    with pytest.raises(ValueError):
        check_density(np.array([[0.5, 1], [0, 0.5]]))
    with pytest.raises(ValueError):
        check_density(np.diag([1.5, -0.5]))
    psi = haar_sample(1, 3, np.random.default_rng(0))[0]
    check_density(pure(psi))
    with pytest.raises(ValueError):
        distinguish(build_design(4, 2), pure(psi), pure(psi))


def test_mub_second_moment_general_delta():
    rng = np.random.default_rng(9)
    for N in (3, 5, 7):
        z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        d = z + z.conj().T
        d -= np.trace(d) / N * np.eye(N)
        tot, _, _, s2, s4 = s_moments(build_mub_design(N), d)
        f = np.linalg.norm(d)
        assert abs(s2 - f ** 2 / (N * (N + 1))) < 1e-10
        assert s4 >= s2 ** 2
