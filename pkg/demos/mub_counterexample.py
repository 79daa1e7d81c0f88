"""
Mutually unbiased bases
=======================

In prime dimension the N+1 unbiased bases form an exact 2-design, yet their
POVM barely separates two computational basis states.
"""

from tdesign import build_mub_design, mub_counterexample
from tdesign.verifier import approx_epsilon, frame_operator

for N in (2, 3, 5, 7):
    F, _ = frame_operator(build_mub_design(N), 2)
    _, _, l1 = mub_counterexample(N)
    print(f"N={N}: epsilon {approx_epsilon(F, N, 2):.1e}  l1 {l1:.4f}  2/(N+1) {2 / (N + 1):.4f}")
