"""Closed forms: sharp constants, kernel and simplex moments, gamma ratios.

Gamma products are always formed as exponentials of log-gamma sums, since
direct products overflow once the arguments pass ~170.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .quad import QuadratureResult, Tolerance, tanh_sinh_rule
from .specfun import DomainError, log_gamma

__all__ = [
    "SharpConstant",
    "sharp_constant",
    "kernel_moment",
    "simplex_moment",
    "simplex_moment_oracle",
    "kernel_power_ratio",
    "log_kernel_power_ratio",
    "monomial_ratio",
    "log_monomial_ratio",
    "pw_norm_squared",
]

_LOG_PI = math.log(math.pi)
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class SharpConstant:
    """Conjectured best constants on Pi+ and on the unit disc."""

    s: float
    halfplane_value: float
    disc_value: float


def sharp_constant(s: float) -> SharpConstant:
    """C_s = pi**(1-s) / ((2s-1) 2**(2s-2)) and its disc analogue pi**(1-s)/(2s-1)."""
    if not (np.isfinite(s) and s >= 1.0):
        raise DomainError(f"s must be >= 1, got {s!r}")
    log_disc = (1.0 - s) * _LOG_PI - math.log(2.0 * s - 1.0)
    log_half = log_disc - (2.0 * s - 2.0) * _LOG2
    return SharpConstant(float(s), math.exp(log_half), math.exp(log_disc))


def log_kernel_moment(r, t, y):
    if not (r > 0 and t > -1 and 2 * r - t > 2 and y > 0):
        raise DomainError(f"kernel_moment needs r>0, t>-1, 2r-t>2, y>0; got {(r, t, y)}")
    return (
        math.log(4.0 * math.pi)
        + log_gamma(1.0 + t)
        + log_gamma(2.0 * r - t - 2.0)
        - 2.0 * r * _LOG2
        - 2.0 * log_gamma(r)
        - (2.0 * r - t - 2.0) * math.log(y)
    )


def kernel_moment(r: float, t: float, y: float) -> float:
    """Integral over Pi+ of v**t / |x + iy - (u - iv)|**(2r) du dv."""
    return math.exp(log_kernel_moment(r, t, y))


def simplex_moment(n: int, u: float) -> float:
    """u**(2n+1) / Gamma(2n+2)."""
    if int(n) != n or n < 1 or not u > 0:
        raise DomainError(f"simplex_moment needs integer n>=1 and u>0; got {(n, u)}")
    return math.exp((2 * n + 1) * math.log(u) - log_gamma(2.0 * n + 2.0))


def _nested_simplex(k, rem, nodes, comps, weights):
    # J_0(R) = R;  J_k(R) = R^2 int_0^1 x J_{k-1}(R (1-x)) dx
    if k == 0:
        return rem
    inner = _nested_simplex(k - 1, rem[..., None] * comps, nodes, comps, weights)
    return rem * rem * (inner * nodes) @ weights


def simplex_moment_oracle(n: int, u: float, tol: Tolerance | None = None) -> QuadratureResult:
    """Brute-force the simplex integral by nested 1-D tanh-sinh rules.

    The integrand (u - sum t_j) prod t_j is integrated one coordinate at a
    time over t_k in (0, remaining budget); the rule level is raised until
    two consecutive levels agree.
    """
    if int(n) != n or not 1 <= n <= 4 or not u > 0:
        raise DomainError(f"simplex oracle supports integer 1<=n<=4 and u>0; got {(n, u)}")
    tol = tol or Tolerance(relative=1e-10)
    prev = None
    evals = 0
    value = math.nan
    err = math.inf
    for level in range(1, 6):
        nodes, comps, weights = tanh_sinh_rule(level)
        # the polynomial integrand needs no near-endpoint nodes
        keep = np.minimum(nodes, comps) > 1e-17
        nodes, comps, weights = nodes[keep], comps[keep], weights[keep]
        if nodes.size**n > 2e8:
            break
        # outermost coordinate looped to bound memory by nodes**(n-1)
        inner = np.array(
            [float(_nested_simplex(n - 1, np.asarray(u * c), nodes, comps, weights)) for c in comps]
        )
        value = u * u * float((inner * nodes) @ weights)
        evals += nodes.size**n
        if prev is not None:
            err = abs(value - prev)
            if err <= max(tol.absolute, tol.relative * abs(value)):
                return QuadratureResult(value, err, evals, True)
        prev = value
    return QuadratureResult(value, err, evals, False)


def log_kernel_power_ratio(r, s):
    if not (r > 1 and s >= 1):
        raise DomainError(f"kernel_power_ratio needs r>1, s>=1; got {(r, s)}")
    lhs = log_gamma(2 * s) + log_gamma(2 * s * (r - 1)) - 2 * log_gamma(r * s)
    rhs = s * (log_gamma(2 * (r - 1)) - 2 * log_gamma(r))
    return lhs - rhs


def kernel_power_ratio(r: float, s: float) -> float:
    """[Gamma(2s) Gamma(2s(r-1)) / Gamma(rs)^2] / [Gamma(2(r-1)) / Gamma(r)^2]^s."""
    if s == 1:
        if not r > 1:
            raise DomainError(f"kernel_power_ratio needs r>1; got {r!r}")
        return 1.0
    return math.exp(log_kernel_power_ratio(r, s))


def log_monomial_ratio(n, s):
    if int(n) != n or n < 0 or not s >= 1:
        raise DomainError(f"monomial_ratio needs integer n>=0, s>=1; got {(n, s)}")
    return (
        s * math.log(n + 1.0)
        + log_gamma(n * s + 1.0)
        + log_gamma(2.0 * s)
        - log_gamma((n + 2.0) * s)
    )


def monomial_ratio(n: int, s: float) -> float:
    """(n+1)**s Gamma(ns+1) Gamma(2s) / Gamma((n+2)s), the disc monomial test."""
    if n == 0 and s >= 1:
        return 1.0
    return math.exp(log_monomial_ratio(n, s))


def pw_norm_squared(alpha: float, pw_terms) -> float:
    """Squared A^2_alpha(Pi+) norm of F(z) = int_0^inf f(t) e^{itz} dt.

    ``pw_terms`` lists ``(c, a, b)`` with f(t) = sum c t**a exp(-b t); the
    Gram sum of Gamma(a_j + a_k - alpha) / (b_j + b_k)**(a_j + a_k - alpha)
    is scaled by 2 pi Gamma(alpha + 1) / 2**(alpha + 1).
    """
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha!r}")
    terms = [(complex(c), float(a), float(b)) for c, a, b in pw_terms]
    if not terms:
        raise DomainError("empty Paley-Wiener profile")
    total = 0.0 + 0.0j
    for cj, aj, bj in terms:
        if not bj > 0:
            raise DomainError(f"decay rates must be positive, got {bj!r}")
        for ck, ak, bk in terms:
            e = aj + ak - alpha
            if not e > 0:
                raise DomainError(f"profile not integrable at 0: a_j + a_k - alpha = {e}")
            total += cj * ck.conjugate() * math.exp(log_gamma(e) - e * math.log(bj + bk))
    pref = 2.0 * math.pi * math.exp(log_gamma(alpha + 1.0) - (alpha + 1.0) * _LOG2)
    return pref * total.real
