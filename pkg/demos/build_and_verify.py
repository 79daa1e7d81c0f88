"""
Building and verifying a design
===============================

The main construction of order t = 2 in dimension 8, its moment conditions
and the spectral accuracy of its frame operator, compared with N = 16 and the
smaller improved variant.
"""

from tdesign import build_design, build_design_improved, check_conditions

ens = build_design(8, 2)
print("elements:", ens.size)
rep = check_conditions(ens)
print(f"unbalanced moments  {rep.unbalanced_residual:.1e}")
print(f"second moments      {rep.second_moment_residual:.1e}")
print(f"frame epsilon       {rep.epsilon:.4f}")
print(f"2! x max rel. dev.  {rep.frame_bound:.4f}")

big = build_design(16, 2)
print(f"N=16: {big.size} elements, epsilon {check_conditions(big).epsilon:.4f}")

imp = build_design_improved(16, 2, 0.2)
rep = check_conditions(imp)
print(f"improved N=16: {imp.size} elements, epsilon {rep.epsilon:.4f}")
print("families:", [f.realization for f in [imp.f_family] + imp.phase_families])
