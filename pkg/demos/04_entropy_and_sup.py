"""
Entropy and the pointwise estimate
==================================

Near s = 1 the embedding reduces to an entropy inequality: for unit-norm
F the integral of |F|^2 log(1 / (2 sqrt(pi) |F| y)) is at least 1, with
equality for the kernel. The proven lower bound is (log 3) / 2. A second
sharp fact bounds |F(x + iy)| y by ||F|| / (2 sqrt(pi)).
"""

import math

import numpy as np

from sharpbergman import KernelPower, entropy_disc, entropy_halfplane, sup_fy
from sharpbergman.trial import a2_norm_squared, random_trial

print(f"(log 3)/2 = {math.log(3) / 2:.4f}")
print(f"kernel entropy = {entropy_halfplane(KernelPower(2.0, 1j)):.10f}")

rng = np.random.default_rng(2)
for family in ("pw", "kernel"):
    vals = [entropy_halfplane(random_trial(family, rng)) for _ in range(10)]
    print(f"{family:12s} min {min(vals):.5f}  max {max(vals):.5f}")
for family in ("disc_poly", "disc_kernel"):
    vals = [entropy_disc(random_trial(family, rng)) for _ in range(10)]
    print(f"{family:12s} min {min(vals):.5f}  max {max(vals):.5f}")

print()
print("sup |F| y divided by ||F|| / (2 sqrt(pi)); the kernel attains 1")
for F in [KernelPower(2.0, 1j)] + [random_trial("pw", rng) for _ in range(4)]:
    bound = math.sqrt(a2_norm_squared(F)) / (2 * math.sqrt(math.pi))
    print(f"{type(F).__name__:14s} {sup_fy(F) / bound:.8f}")
