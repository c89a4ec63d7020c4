"""Real special functions: log-gamma, polygamma of orders 0-2, log-beta.

Every routine accepts a float or a numpy array of positive reals and
returns the same shape. Non-positive or non-finite input raises
:class:`DomainError` instead of propagating NaN.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = ["DomainError", "log_gamma", "polygamma", "log_beta"]


class DomainError(ValueError):
    """Argument outside the domain of a routine."""


# Bernoulli numbers B_2 .. B_16
_BERNOULLI = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)
_SHIFT = 10.0


def _check_positive(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise DomainError(f"{name} must be finite and > 0, got {x!r}")
    return arr


def _out(arr):
    return float(arr) if np.ndim(arr) == 0 else arr


def log_gamma(x):
    """Natural log of the gamma function for x > 0."""
    arr = _check_positive(x)
    return _out(special.gammaln(arr))


def _asymptotic(m, x):
    # x >= _SHIFT everywhere
    inv = 1.0 / x
    inv2 = inv * inv
    if m == 0:
        acc = np.log(x) - 0.5 * inv
        p = inv2
        for k, b in enumerate(_BERNOULLI, start=1):
            acc = acc - b / (2 * k) * p
            p = p * inv2
        return acc
    if m == 1:
        acc = inv + 0.5 * inv2
        p = inv2 * inv
        for b in _BERNOULLI:
            acc = acc + b * p
            p = p * inv2
        return acc
    acc = -inv2 - inv2 * inv
    p = inv2 * inv2
    for k, b in enumerate(_BERNOULLI, start=1):
        acc = acc - (2 * k + 1) * b * p
        p = p * inv2
    return acc


def polygamma(m: int, x):
    """Polygamma function psi^(m)(x) for m in {0, 1, 2} and x > 0.

    Arguments below 10 are shifted upward with the recurrences

        psi(x)   = psi(x+1)   - 1/x
        psi'(x)  = psi'(x+1)  + 1/x**2
        psi''(x) = psi''(x+1) - 2/x**3

    and the Bernoulli asymptotic series (8 terms) is evaluated at the
    shifted point.
    """
    if m not in (0, 1, 2):
        raise DomainError(f"polygamma order must be 0, 1 or 2, got {m!r}")
    arr = np.atleast_1d(_check_positive(x)).astype(float)
    shift = np.maximum(np.ceil(_SHIFT - arr), 0.0)
    n_max = int(shift.max()) if shift.size else 0
    # accumulate the recurrence correction from the largest shift downward
    corr = np.zeros_like(arr)
    for j in range(n_max - 1, -1, -1):
        active = j < shift
        xj = arr + j
        if m == 0:
            term = -1.0 / xj
        elif m == 1:
            term = 1.0 / (xj * xj)
        else:
            term = -2.0 / (xj * xj * xj)
        corr = corr + np.where(active, term, 0.0)
    val = _asymptotic(m, arr + shift) + corr
    return _out(val.reshape(np.shape(x)))


def log_beta(a, b):
    """log B(a, b) = log Gamma(a) + log Gamma(b) - log Gamma(a + b)."""
    a_arr = _check_positive(a, "a")
    b_arr = _check_positive(b, "b")
    lo = np.minimum(a_arr, b_arr)
    hi = np.maximum(a_arr, b_arr)
    # symmetric evaluation order so that log_beta(a, b) == log_beta(b, a)
    val = special.gammaln(lo) + special.gammaln(hi) - special.gammaln(lo + hi)
    return _out(val)


def log_gamma_ratio(num, den):
    """Sum of log-gammas of ``num`` minus the sum over ``den``."""
    total = 0.0
    for v in num:
        total += log_gamma(v)
    for v in den:
        total -= log_gamma(v)
    return total

