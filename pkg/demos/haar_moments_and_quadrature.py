"""
Haar moments and the amplitude quadrature rule
==============================================

Exact Haar averages of monomials, a Monte Carlo check, and the small Gauss
rule that stands in for the distribution of a scaled amplitude.
"""

import numpy as np

from tdesign import Monomial, haar_expectation, haar_rule, limit_moments, round_rule
from tdesign.verifier import haar_monte_carlo

# E|a_1|^2 |a_2|^2 and E|a_1|^4 over random unit vectors in C^4
for text in ("1:1;2:1", "1:2"):
    m = Monomial.parse(text)
    mean, se = haar_monte_carlo(4, m, 200000, seed=1)
    print(f"{text:10s} exact {haar_expectation(4, m)}  monte carlo {mean.real:.5f} +/- {se:.5f}")

# unbalanced monomials average to zero
print("a_0 conj(a_1):", haar_expectation(4, Monomial.parse("0:1,0;1:0,1")))

# rule for order t = 2: four nodes +-sqrt(2 -+ sqrt(2))
rule = haar_rule(2)
print("nodes  ", np.round(rule.nodes, 6))
print("weights", np.round(rule.weights, 6))
print("moments", np.round(rule.moments(7), 10), "target", limit_moments(3))

# weights rounded to multiples of 1/N; the moment error shrinks with N for small t
for N in (16, 64, 256, 1024):
    r = round_rule(rule, N)
    err = max(abs(r.moment(j) - rule.moment(j)) for j in range(5))
    print(f"N={N:5d} weights {r.weights_num} moment error {err:.2e}")
