"""
Upper and lower bounds for the best constant
============================================

Phi(s) is the best constant divided by C_s, and the conjecture is
Phi(s) = 1. The ledger collects the available bounds on that scale:
the coarse bracket from neighbouring integers, the preliminary 2s - 1,
the Minkowski infimum over nu, and the interpolation bound. The table is
the data behind a bound plot; ``sharpbergman bounds`` writes it as CSV.
"""

from sharpbergman.verify import bounds_ledger, verify_bound_ordering


def fmt(x):
    return "      -" if x is None else f"{x:7.4f}"


print("    s   lower  kernel  interp  coarse  prelim  minkowski  nu*")
for k in range(21):
    s = 1.05 + 0.1 * k
    led = bounds_ledger(s)
    print(
        f"{s:5.2f} {fmt(led.phi_lower)} {fmt(led.kernel_lower)} {fmt(led.phi_upper_interpolation)}"
        f" {fmt(led.phi_upper_coarse)} {fmt(led.phi_upper_prelim)}   {led.phi_upper_minkowski:7.4f}"
        f"  {led.nu_star:5.2f}"
    )

# Orderings that hold at s = 1.25: 1 < interpolation < coarse, and
# 2s - 1 below the Minkowski infimum.
for rec in verify_bound_ordering(1.25):
    print(f"{rec.inequality_id:28s} lhs {rec.lhs:.6f}  rhs {rec.rhs:.6f}  pass {rec.pass_}")

# Past the midpoint of an interval the second interpolation branch drops
# below the kernel value 1, so it cannot bound Phi from above.
print(f"interpolation at s = 1.75: {bounds_ledger(1.75).phi_upper_interpolation:.4f}")
