"""
Searching for a counterexample among disc polynomials
=====================================================

On the disc the A^2 norm of a polynomial is exact, so the search
maximizes the normalized ratio over unit coefficient vectors with
Nelder-Mead and several restarts. A value above 1 + 1e-5 would flag a
counterexample candidate; none appears.
"""

from sharpbergman.optimize import search_extremal_disc
from sharpbergman.trial import to_text

for s in (1.5, 1.7, 2.0, 2.6):
    for degree in (1, 3):
        out = search_extremal_disc(s, degree, restarts=6, seed=1)
        print(
            f"s = {s:3.1f}  degree {degree}   best {out.result.best_value:.10f}"
            f"   re-checked {out.checked_value:.10f}   flag {out.counterexample}"
        )

# The maximizer found at an unproven exponent: a constant, up to phase.
out = search_extremal_disc(1.7, 3, restarts=8, seed=0)
print()
print(to_text(out.best_trial))
