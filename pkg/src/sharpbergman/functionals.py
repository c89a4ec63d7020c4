"""Embedding ratios, entropy functionals, the dual-norm gap and sup |F| y.

All integrands are formed from ``log|F|`` so that large powers of small or
large moduli never overflow, and the function is rescaled to unit A^2 norm
(and the ratio divided by the sharp constant) before integration. The
quadratures therefore work on quantities of order one, where relative
tolerances are meaningful.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import forms
from .quad import Tolerance, integrate_disc, integrate_halfplane
from .specfun import DomainError
from .trial import (
    DISC,
    HALFPLANE,
    KernelPower,
    PWCombination,
    Scaled,
    TrialFunction,
    a2_norm_squared,
    angular_rule,
)

__all__ = [
    "RatioReport",
    "ConvergenceError",
    "ratio_halfplane",
    "ratio_disc",
    "entropy_halfplane",
    "entropy_disc",
    "dual_gap",
    "sup_fy",
    "DEFAULT_TOL",
]

DEFAULT_TOL = Tolerance(relative=1e-9, absolute=1e-13)
_LOG_SQRT_PI = 0.5 * math.log(math.pi)
_LOG2 = math.log(2.0)


@dataclass(frozen=True)
class RatioReport:
    """One evaluation of the embedding ratio.

    ``numerator`` is the weighted 2s-norm integral, ``denominator`` the
    squared A^2 norm raised to ``s``; ``normalized`` divides the ratio by
    the sharp constant of ``domain_tag``.
    """

    s: float
    numerator: float
    denominator: float
    ratio: float
    normalized: float
    domain_tag: str
    error_estimate: float

    def as_dict(self):
        return {
            "s": self.s,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "ratio": self.ratio,
            "normalized": self.normalized,
            "domain": self.domain_tag,
            "error_estimate": self.error_estimate,
        }


class ConvergenceError(ArithmeticError):
    """Quadrature did not reach the requested tolerance.

    ``partial`` holds whatever was computed (a :class:`RatioReport` or a
    float) so callers can still inspect it.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


def _check_s(s, strict=False):
    if not np.isfinite(s) or s < 1 or (strict and s == 1):
        raise DomainError(f"s must be {'>' if strict else '>='} 1, got {s!r}")
    return float(s)


def _halfplane_frame(F):
    """(x_center, y_scale) locating where a half-plane trial function lives."""
    while isinstance(F, Scaled):
        F = F.source
    if isinstance(F, KernelPower):
        return F.z0.real, F.z0.imag
    if isinstance(F, PWCombination):
        # (b - iz)^-(a+1) is centred on the pole z = -ib
        return 0.0, float(np.exp(np.mean([math.log(b) for _, _, b in F.terms])))
    return 0.0, 1.0


def _point(x, y):
    # x + 1j*y would turn an infinite y into nan + inf j
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    z = np.empty(x.shape, dtype=complex)
    z.real = x
    z.imag = y
    return z


def _require_domain(F, domain):
    if not isinstance(F, TrialFunction) or F.domain != domain:
        raise DomainError(f"expected a trial function on the {domain}")


def _report(s, log_norm2, value, err, constant, tag):
    normalized = value
    ratio = normalized * constant
    denominator = math.exp(s * log_norm2)
    return RatioReport(
        s=s,
        numerator=ratio * denominator,
        denominator=denominator,
        ratio=ratio,
        normalized=normalized,
        domain_tag=tag,
        error_estimate=err * constant,
    )


def _finish(report, res):
    if not res.converged:
        raise ConvergenceError(
            f"ratio quadrature did not converge (error estimate {res.error_estimate:.3g})",
            report,
        )
    return report


def ratio_halfplane(F: TrialFunction, s: float, tol: Tolerance | None = None) -> RatioReport:
    """Embedding ratio of ``F`` on the upper half-plane.

    numerator = int |F|^{2s} y^{2s-2} dx dy, denominator = ||F||^{2s}.
    At s = 1 the two coincide and the report is exact.
    """
    _require_domain(F, HALFPLANE)
    s = _check_s(s)
    tol = tol or DEFAULT_TOL
    norm2 = a2_norm_squared(F)
    log_norm2 = math.log(norm2)
    const = forms.sharp_constant(s).halfplane_value
    if s == 1.0:
        return RatioReport(1.0, norm2, norm2, 1.0, 1.0, HALFPLANE, 0.0)
    shift = s * log_norm2 + math.log(const)

    def g(x, y):
        return np.exp(2.0 * s * F.log_abs(_point(x, y)) + (2.0 * s - 2.0) * np.log(y) - shift)

    xc, ys = _halfplane_frame(F)
    res = integrate_halfplane(g, tol, x_center=xc, x_scale=ys, y_scale=ys)
    report = _report(s, log_norm2, res.value, res.error_estimate, const, HALFPLANE)
    return _finish(report, res)


def ratio_disc(G: TrialFunction, s: float, tol: Tolerance | None = None) -> RatioReport:
    """Embedding ratio of ``G`` on the unit disc with weight (1 - |w|^2)^{2s-2}."""
    _require_domain(G, DISC)
    s = _check_s(s)
    tol = tol or DEFAULT_TOL
    norm2 = a2_norm_squared(G)
    log_norm2 = math.log(norm2)
    const = forms.sharp_constant(s).disc_value
    if s == 1.0:
        return RatioReport(1.0, norm2, norm2, 1.0, 1.0, DISC, 0.0)
    shift = s * log_norm2 + math.log(const)

    def g(rho, theta, omr):
        la = G.log_abs(rho * np.exp(1j * theta))
        return np.exp(2.0 * s * la + (2.0 * s - 2.0) * np.log(omr) - shift)

    res = integrate_disc(g, tol, complement=True, angular=angular_rule(G))
    report = _report(s, log_norm2, res.value, res.error_estimate, const, DISC)
    return _finish(report, res)


def _checked(res, what):
    if not res.converged:
        raise ConvergenceError(
            f"{what} quadrature did not converge (error estimate {res.error_estimate:.3g})",
            res.value,
        )
    return res.value


def entropy_halfplane(F: TrialFunction, tol: Tolerance | None = None) -> float:
    """int |f|^2 log[1 / (2 sqrt(pi) |f| y)] dx dy for f = F / ||F||.

    Zeros of F contribute nothing: the clamped log|F| makes |F|^2 log|F|
    vanish there.
    """
    _require_domain(F, HALFPLANE)
    tol = tol or DEFAULT_TOL
    half_log_n = 0.5 * math.log(a2_norm_squared(F))

    def g(x, y):
        la = F.log_abs(_point(x, y)) - half_log_n
        return np.exp(2.0 * la) * (-_LOG2 - _LOG_SQRT_PI - la - np.log(y))

    xc, ys = _halfplane_frame(F)
    res = integrate_halfplane(g, tol, x_center=xc, x_scale=ys, y_scale=ys)
    return _checked(res, "entropy")


def entropy_disc(G: TrialFunction, tol: Tolerance | None = None) -> float:
    """int |g|^2 log[1 / (sqrt(pi) |g| (1 - |w|^2))] dm for g = G / ||G||."""
    _require_domain(G, DISC)
    tol = tol or DEFAULT_TOL
    half_log_n = 0.5 * math.log(a2_norm_squared(G))

    def g(rho, theta, omr):
        la = G.log_abs(rho * np.exp(1j * theta)) - half_log_n
        return np.exp(2.0 * la) * (-_LOG_SQRT_PI - la - np.log(omr))

    res = integrate_disc(g, tol, complement=True, angular=angular_rule(G))
    return _checked(res, "entropy")


def _dual_exponent_check(G, p, alpha):
    F = G
    while isinstance(F, Scaled):
        F = F.source
    if isinstance(F, KernelPower) and not F.p * p - alpha > 2.0:
        raise DomainError(
            f"weighted norm diverges: |F|^{p:.6g} decays like |z|^-{F.p * p:.6g}"
        )


def dual_gap(G: TrialFunction, s: float, tol: Tolerance | None = None) -> float:
    """C_s^{1/(2s)} ||G||_{A^q_alpha} - ||G||_{A^2} on the half-plane.

    Here q = 2s/(2s-1) and alpha = -2(s-1)/(2s-1). With y = u^{2s-1} the
    weight becomes constant, y^alpha dy = (2s-1) du, so the integrand is
    smooth at the boundary.
    """
    _require_domain(G, HALFPLANE)
    s = _check_s(s, strict=True)
    tol = tol or DEFAULT_TOL
    q = 2.0 * s / (2.0 * s - 1.0)
    alpha = -2.0 * (s - 1.0) / (2.0 * s - 1.0)
    _dual_exponent_check(G, q, alpha)
    norm2 = a2_norm_squared(G)
    # unit-norm G keeps the integral of order one
    half_log_n = 0.5 * math.log(norm2)
    k = 2.0 * s - 1.0

    def g(x, u):
        return k * np.exp(q * (G.log_abs(_point(x, u**k)) - half_log_n))

    xc, ys = _halfplane_frame(G)
    res = integrate_halfplane(
        g, tol, x_center=xc, x_scale=ys, y_scale=ys ** (1.0 / k)
    )
    integral = _checked(res, "dual norm")
    const = forms.sharp_constant(s).halfplane_value
    unit_gap = const ** (1.0 / (2.0 * s)) * integral ** (1.0 / q) - 1.0
    return math.sqrt(norm2) * unit_gap


def sup_fy(F: TrialFunction) -> float:
    """Largest value of |F(x + iy)| y found by a scan plus local zooming.

    A log-spaced grid in y (with x spread proportionally to y) locates the
    best cell; the grid is then repeatedly contracted around the current
    maximiser. The result is a lower bound on the true supremum.
    """
    _require_domain(F, HALFPLANE)
    xc, ys = _halfplane_frame(F)

    def objective(x, logy):
        return F.log_abs(_point(x, np.exp(logy))) + logy

    logy = math.log(ys) + np.linspace(-12.0, 12.0, 193)
    v = np.sinh(np.linspace(-7.0, 7.0, 141))
    X = xc + np.exp(logy)[:, None] * v[None, :]
    L = np.broadcast_to(logy[:, None], X.shape)
    vals = objective(X, L)
    i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = float(vals[i, j])
    bx, by = float(X[i, j]), float(L[i, j])
    # half-widths of the search box around the best node
    hx = float(np.exp(by)) * max(abs(v[min(j + 1, v.size - 1)] - v[j]), abs(v[j] - v[max(j - 1, 0)]))
    hy = float(logy[1] - logy[0])
    for _ in range(40):
        gx = bx + hx * np.linspace(-1.0, 1.0, 21)
        gy = by + hy * np.linspace(-1.0, 1.0, 21)
        GX, GY = np.meshgrid(gx, gy, indexing="ij")
        vals = objective(GX, GY)
        i, j = np.unravel_index(int(np.argmax(vals)), vals.shape)
        if vals[i, j] >= best:
            best, bx, by = float(vals[i, j]), float(GX[i, j]), float(GY[i, j])
        hx *= 0.35
        hy *= 0.35
        if hy < 1e-13 and hx < 1e-13 * max(1.0, abs(bx)):
            break
    return math.exp(best)
