"""
Equality cases of the sharp embedding
=====================================

The normalized embedding ratio divides the weighted 2s-norm integral by
the squared A^2 norm raised to s and by the sharp constant C_s. Powers of
the reproducing kernel reach the value 1. Every other kernel power falls
short by exactly the closed-form gamma ratio.
"""

import numpy as np

from sharpbergman import KernelPower, cayley_transfer, ratio_disc, ratio_halfplane
from sharpbergman.forms import kernel_power_ratio

# The reproducing kernel (z + i)^-2 is extremal for every s.
F0 = KernelPower(2.0, 1j)
for s in (1.5, 2.0, 2.5, 3.0):
    rep = ratio_halfplane(F0, s)
    print(f"s = {s:3.1f}   normalized ratio = {rep.normalized:.12f}")

# Other exponents: quadrature against the closed form.
print()
print("   r    quadrature      closed form")
for r in (1.3, 1.5, 2.5, 3.0, 4.0):
    quad = ratio_halfplane(KernelPower(r, 0.4 + 0.8j), 2.0).normalized
    print(f"{r:4.1f}  {quad:.12f}  {kernel_power_ratio(r, 2.0):.12f}")

# The Cayley transfer carries the half-plane ratio to the disc unchanged.
# The factor 2^(2s-2) cancels between the two sharp constants.
print()
F = KernelPower(3.0, -0.5 + 0.7j)
G = cayley_transfer(F)
for s in np.linspace(1.2, 3.2, 5):
    h, d = ratio_halfplane(F, s).normalized, ratio_disc(G, s).normalized
    print(f"s = {s:3.1f}   half-plane {h:.12f}   disc {d:.12f}")
