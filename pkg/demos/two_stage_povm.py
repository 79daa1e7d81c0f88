"""
Measuring the design POVM in two stages
=======================================

The magnitude function f is measured first through an ancilla, then the
phase function g.  The composition reproduces the POVM exactly.
"""

import numpy as np

from tdesign import build_design, sample_povm
from tdesign.haar_moments import haar_sample
from tdesign.povm_sim import (
    composed_distribution,
    direct_distribution,
    fourier_stage_g_probabilities,
    stage_g_conditional,
)

psi = haar_sample(1, 4, np.random.default_rng(3))[0]
exact = composed_distribution(psi, 2)
direct = direct_distribution(build_design(4, 2), psi)
print("outcomes:", exact.size, " max |composed - direct|:", np.abs(exact - direct).max())

counts = sample_povm(psi, 2, 100000, seed=0)
print("total variation of 1e5 shots:", 0.5 * np.abs(counts / 1e5 - exact).sum())

# the Fourier shortcut for the last phase coefficient holds for qubits only
for N in (2, 4):
    phi = haar_sample(1, N, np.random.default_rng(N))[0]
    a = fourier_stage_g_probabilities(phi, 1, (0,))
    b = stage_g_conditional(phi, 1, (0,))
    print(f"N={N}: Fourier shortcut matches exact conditional: {np.allclose(a, b)}")
