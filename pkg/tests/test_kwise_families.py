from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tdesign.finite_field import poly_eval
from tdesign.kwise_families import (
    FunctionFamily,
    _lfsr_bits,
    _lfsr_block,
    binary_family,
    count_irreducible,
    delta_family,
    exact_family,
    family_bias,
    irreducible_polynomials,
)


def test_member_decoding_example():
    # N = 4, index 5: coefficients (1, 1) -> f(x) = x + 1, f(2) = 3
    fam = exact_family(4, 2)
    assert fam.size == 16
    assert fam.evaluate(5, 2) == 3


@pytest.mark.parametrize("N,k", [(4, 1), (4, 2), (8, 2), (8, 3), (4, 3)])
def test_exact_family_matches_horner(N, k):
    fam = exact_family(N, k)
    vals = fam.values()
    deg = N.bit_length() - 1
    for i, coeffs in enumerate(product(range(N), repeat=k)):
        idx = sum(c * N ** j for j, c in enumerate(coeffs))
        assert [poly_eval(coeffs, x, deg) for x in range(N)] == list(vals[idx])


@pytest.mark.parametrize("N,k", [(4, 2), (8, 2), (8, 3), (16, 2)])
def test_exact_family_is_k_wise_uniform(N, k):
    vals = exact_family(N, k).values()
    for pts in combinations(range(N), k):
        codes = vals[:, pts] @ (N ** np.arange(k))
        # every k-tuple of values occurs exactly once
        assert np.array_equal(np.bincount(codes, minlength=N ** k), np.ones(N ** k))


def test_exact_family_k_above_n():
    fam = exact_family(4, 6)
    assert fam.size == 4 ** 6
    assert family_bias(fam, 4) == 0


@pytest.mark.parametrize("N,k", [(8, 2), (8, 3), (8, 4), (16, 4), (16, 5), (12, 4)])
def test_binary_family_exact(N, k):
    fam = binary_family(N, k)
    assert family_bias(fam) == 0


def test_binary_family_size():
    assert binary_family(16, 4).size == 2 * 16 ** 2
    assert binary_family(64, 4).size == 2 * 64 ** 2


@pytest.mark.parametrize("construction", ["polynomial", "projective", "small-bias", "auto"])
def test_tiny_delta_family(construction):
    fam = delta_family(8, 2, 2, 0.25, construction)
    assert family_bias(fam) <= 0.25


@pytest.mark.parametrize("N,m,k,delta", [(64, 2, 2, 0.5), (32, 2, 3, 0.6), (16, 4, 2, 0.7)])
def test_small_bias_within_bound(N, m, k, delta):
    fam = delta_family(N, m, k, delta, "small-bias")
    assert fam.params["lfsr_degree"] > 0
    measured = family_bias(fam, budget=10 ** 9)
    assert measured <= fam.bound + 1e-12
    assert fam.bound <= delta


def test_small_bias_size_polylog():
    sizes = [delta_family(2 ** e, 2, 2, 0.1, "small-bias").size for e in (4, 8, 12)]
    assert sizes == sorted(sizes)
    # growth from N = 2^8 to 2^12 stays far below the factor 16 growth of N
    assert sizes[2] <= (12 / 8) ** 4 * sizes[1]
    assert sizes[2] < 2 ** 12


def test_projective_family_pairwise():
    fam = delta_family(16, 4, 2, 0.01, "projective")
    assert fam.size == 4 ** 3
    assert family_bias(fam) == 0


def test_auto_picks_smallest():
    opts = []
    for c in ["polynomial", "projective", "small-bias"]:
        f = delta_family(16, 4, 2, 0.025, c)
        if f.bound <= 0.025:
            opts.append(f.size)
    assert delta_family(16, 4, 2, 0.025).size == min(opts)


def test_irreducible_counts():
    for d in range(1, 11):
        assert len(irreducible_polynomials(d)) == count_irreducible(d)
    assert count_irreducible(4) == 3


def test_lfsr_block_matches_scalar():
    poly = irreducible_polynomials(5)[2]
    states = np.arange(32)
    block = _lfsr_block(poly, states, 40)
    for s in states:
        assert list(block[s]) == _lfsr_bits(poly, int(s), 40)


def test_serialisation_round_trip():
    for fam in [exact_family(8, 3), binary_family(16, 4), delta_family(32, 4, 2, 0.1),
                delta_family(64, 2, 2, 0.5, "small-bias")]:
        back = FunctionFamily.from_dict(fam.to_dict())
        assert back.size == fam.size
        assert np.array_equal(back.values(0, 50), fam.values(0, 50))


def test_invalid_parameters():
    with pytest.raises(ValueError):
        exact_family(6, 2)
    with pytest.raises(ValueError):
        delta_family(8, 3, 2, 0.1)
    with pytest.raises(ValueError):
        delta_family(8, 2, 2, 1.5)
    with pytest.raises(ValueError):
        delta_family(8, 2, 3, 0.1, "projective")
    with pytest.raises(IndexError):
        exact_family(4, 2).evaluate(16, 0)
    with pytest.raises(ValueError):
        family_bias(exact_family(16, 4), budget=10)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([4, 8, 16]), st.integers(1, 3), st.integers(0, 10 ** 6))
def test_values_in_range(N, k, seed):
    fam = exact_family(N, k)
    i = seed % fam.size
    v = fam.values(i, i + 1)[0]
    assert v.min() >= 0 and v.max() < N


@pytest.mark.parametrize("N,k", [(4, 2), (8, 3), (4, 4)])
def test_index_to_function_bijection(N, k):
    vals = exact_family(N, k).values()
    assert len({tuple(r) for r in vals}) == N ** k
