"""
Independent function families
=============================

Exact polynomial families over GF(N), the binary BCH family and
approximately independent small-bias families with their measured bias.
"""

from tdesign import binary_family, delta_family, exact_family, family_bias

fam = exact_family(4, 2)
print("exact N=4 k=2:", fam.size, "members; member 5 at x=2 ->", fam.evaluate(5, 2))
print("bias of exact N=8 k=3:", family_bias(exact_family(8, 3)))
print("binary 4-wise on 16 points:", binary_family(16, 4).size, "members")

for construction in ("polynomial", "projective", "small-bias", "auto"):
    f = delta_family(64, 2, 2, 0.5, construction)
    print(f"{construction:10s} size {f.size:6d} bound {f.bound:.3f} measured {family_bias(f):.3f}")

for e in (4, 8, 12):
    print(f"small-bias N=2^{e}: size {delta_family(2 ** e, 2, 2, 0.1, 'small-bias').size}")
