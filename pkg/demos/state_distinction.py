"""
Distinguishing two states with a design POVM
============================================

Random orthogonal pure states in C^4, measured with the order-4 ensemble
(built with N < 2t, so only approximately a design) and with the MUB
2-design in C^5, against random orthonormal bases.
"""

import numpy as np

from tdesign import build_design, build_mub_design, distinguish
from tdesign.distinction import random_orthogonal_pair
from tdesign.verifier import approx_epsilon, frame_operator

ens = build_design(4, 4, allow_small_n=True)
F, _ = frame_operator(ens, 4)
eps = approx_epsilon(F, 4, 4)
print(f"order-4 ensemble: {ens.size} elements, epsilon {eps:.3f}")

rng = np.random.default_rng(0)
for _ in range(3):
    rho1, rho2 = random_orthogonal_pair(4, rng)
    rep = distinguish(ens, rho1, rho2, epsilon_hat=eps, baseline_trials=200, seed=1)
    print(f"l1 {rep.l1:.3f}  f/3 {rep.frobenius / 3:.3f}  N*berger {4 * rep.berger:.3f}  "
          f"E S^2 {rep.m2:.4f} (Haar {rep.haar_m2:.4f})  random basis {rep.haar_baseline:.3f}")

mub = build_mub_design(5)
rho1, rho2 = random_orthogonal_pair(5, rng)
rep = distinguish(mub, rho1, rho2)
print(f"MUB N=5: E S^2 {rep.m2:.6f} Haar {rep.haar_m2:.6f}")
