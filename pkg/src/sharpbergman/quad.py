"""Adaptive double-exponential quadrature on lines, half-lines, Pi+ and the disc.

All integrands are called with numpy arrays of abscissae and must return
arrays of the same shape. Unbounded intervals are first mapped to (-1, 1)
(``x = tan(pi u / 2)`` for the real line, ``y = (1 + u) / (1 - u)`` for the
half-line) and then integrated with nested tanh-sinh levels. Nodes are
generated together with their exact distances to both endpoints, so
integrands with endpoint singularities never see a rounded endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "Tolerance",
    "QuadratureResult",
    "QuadratureError",
    "integrate_1d",
    "integrate_halfplane",
    "integrate_disc",
    "tanh_sinh_rule",
]

_T_MAX = 6.0
_MIN_LEVEL = 3
_MAX_LEVEL = 12
_HALF_PI = 0.5 * math.pi
_BELOW_ONE = np.nextafter(1.0, 0.0)


@dataclass(frozen=True)
class Tolerance:
    relative: float = 1e-9
    absolute: float = 1e-12
    max_evaluations: int = 2_000_000

    def __post_init__(self):
        if not (self.relative > 0 and self.absolute > 0):
            raise ValueError("tolerances must be positive")
        if self.max_evaluations < 1:
            raise ValueError("max_evaluations must be positive")

    def bound(self, value):
        return np.maximum(self.absolute, self.relative * np.abs(value))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


class QuadratureError(ArithmeticError):
    """Raised when an integrand returns a non-finite sample."""

    def __init__(self, abscissa, axis="x"):
        self.abscissa = abscissa
        self.axis = axis
        super().__init__(f"non-finite integrand value at {axis}={abscissa!r}")


def _level_params(level):
    """Reference tanh-sinh nodes that are new at ``level`` (all of them at 0)."""
    h = 2.0 ** (-level)
    kmax = int(math.floor(_T_MAX / h))
    k = np.arange(-kmax, kmax + 1, dtype=float)
    if level > 0:
        k = k[np.abs(k) % 2 == 1]
    t = k * h
    u = _HALF_PI * np.sinh(np.abs(t))
    near = 2.0 / (np.exp(2.0 * u) + 1.0)  # distance from the closer endpoint
    far = 2.0 - near
    left = np.where(t < 0, near, far)
    right = np.where(t < 0, far, near)
    x = np.where(t < 0, left - 1.0, 1.0 - right)
    # d tanh(u)/dt = (pi/2) cosh t sech^2 u, and sech^2 u = left * right
    dxdt = _HALF_PI * np.cosh(t) * left * right
    keep = (left > 0) & (right > 0)
    return h, x[keep], left[keep], right[keep], dxdt[keep]


def tanh_sinh_rule(level: int):
    """Full tanh-sinh rule on (0, 1) at a fixed level.

    Returns ``(nodes, complements, weights)`` where ``complements = 1 - nodes``
    is computed without cancellation.
    """
    xs, cs, ws = [], [], []
    for lev in range(level + 1):
        h, _, left, right, dxdt = _level_params(lev)
        xs.append(left / 2.0)
        cs.append(right / 2.0)
        ws.append(dxdt)
    h = 2.0 ** (-level)
    return np.concatenate(xs), np.concatenate(cs), np.concatenate(ws) * h / 2.0


class _Map:
    """Change of variables from (-1, 1) onto an integration domain."""

    def __init__(self, kind, a=0.0, b=1.0):
        self.kind = kind
        self.a = a
        self.b = b

    def __call__(self, x, left, right, dxdt):
        a, b = self.a, self.b
        if self.kind == "finite":
            half = 0.5 * (b - a)
            pts = np.where(x < 0, a + half * left, b - half * right)
            return pts, dxdt * half, (half * left, half * right)
        if self.kind == "halfline":
            # b is the length scale
            pts = a + b * left / right
            return pts, (dxdt / right) * (2.0 * b / right), None
        # full line: a is the centre, b the scale
        sgn = np.where(x < 0, -1.0, 1.0)
        d = np.where(x < 0, left, right)
        s = np.sin(_HALF_PI * d)
        c = np.cos(_HALF_PI * d)
        pts = a + b * sgn * c / s
        return pts, (dxdt / s) * (b * _HALF_PI / s), None


def _domain_map(domain):
    if isinstance(domain, str):
        domain = (domain,)
    kind = domain[0]
    if kind == "finite":
        a, b = float(domain[1]), float(domain[2])
        if not (np.isfinite(a) and np.isfinite(b) and b > a):
            raise ValueError(f"bad finite interval {domain!r}")
        return _Map("finite", a, b)
    if kind == "halfline":
        a = float(domain[1]) if len(domain) > 1 else 0.0
        scale = float(domain[2]) if len(domain) > 2 else 1.0
        return _Map("halfline", a, scale)
    if kind == "line":
        c = float(domain[1]) if len(domain) > 1 else 0.0
        scale = float(domain[2]) if len(domain) > 2 else 1.0
        return _Map("line", c, scale)
    raise ValueError(f"unknown domain {domain!r}")


def _check_finite(vals, pts, axis):
    bad = ~np.isfinite(vals)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        p = np.broadcast_to(pts, vals.shape)[tuple(idx)]
        raise QuadratureError(float(p), axis)


def _adaptive(f, dmap, tol, axis="x", complement=False, nested=False):
    """Nested-level tanh-sinh integration of a scalar integral.

    With ``nested=True`` the integrand is itself an integral: ``f(points,
    allowance)`` returns ``(values, errors)`` and may stop refining a node
    once its error is below ``allowance`` (the share of the outer error
    budget that node's weight can absorb).
    Returns ``value, error, evaluations, converged``.
    """
    total = 0.0
    inner_err = 0.0
    prev = None
    evals = 0
    err = math.inf
    converged = False
    for level in range(_MAX_LEVEL + 1):
        h, x, left, right, dxdt = _level_params(level)
        pts, w, comp = dmap(x, left, right, dxdt)
        args = (pts, comp) if complement else (pts,)
        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            if nested:
                scale = abs(prev) if prev is not None else None
                if scale is None:
                    pilot, _ = f(*args, np.full(pts.shape, np.inf))
                    scale = abs(h * float(np.asarray(pilot) @ w))
                # sum_j h |w_j| allow_j stays below a tenth of the outer budget
                aw = np.abs(w)
                share = 0.1 * tol.bound(scale) / (2.0 * _T_MAX)
                allow = np.divide(share, aw, out=np.full(aw.shape, np.inf), where=aw > 0)
                vals, errs = f(*args, allow)
            else:
                vals, errs = f(*args), None
        vals = np.asarray(vals, dtype=float)
        _check_finite(vals, pts, axis)
        evals += pts.size
        part = float(vals @ w)
        total = h * part if level == 0 else 0.5 * total + h * part
        if errs is not None:
            inner_err = (0.5 * inner_err if level else 0.0) + h * float(np.asarray(errs) @ np.abs(w))
        if prev is not None:
            err = abs(total - prev)
            if level >= _MIN_LEVEL and err + inner_err <= tol.bound(total):
                converged = True
                break
        prev = total
        if evals >= tol.max_evaluations:
            break
    return total, err + inner_err, evals, converged


def _adaptive_batch(fb, dmap, tol, n, allow, axis="x", max_level=10):
    """Integrate ``n`` related integrands at once, refining each separately.

    ``fb(points, idx)`` returns an array of shape ``(len(idx), len(points))``
    for the still-active integrand indices ``idx``.
    """
    total = np.zeros(n)
    prev = np.zeros(n)
    err = np.full(n, np.inf)
    active = np.arange(n)
    evals = 0
    for level in range(max_level + 1):
        h, x, left, right, dxdt = _level_params(level)
        pts, w, _ = dmap(x, left, right, dxdt)
        vals = np.broadcast_to(np.asarray(fb(pts, active), dtype=float), (active.size, pts.size))
        _check_finite(vals, pts[None, :], axis)
        evals += vals.size
        part = vals @ w
        total[active] = h * part if level == 0 else 0.5 * total[active] + h * part
        if level:
            err[active] = np.abs(total[active] - prev[active])
        prev[active] = total[active]
        if level >= _MIN_LEVEL:
            # absolute slack comes only through ``allow`` (scaled by outer weight)
            done = err[active] <= np.maximum(tol.relative * np.abs(total[active]), allow[active])
            active = active[~done]
        if active.size == 0:
            break
        if evals >= tol.max_evaluations:
            break
    return total, err, evals, active.size == 0


def integrate_1d(
    f: Callable, domain, tol: Tolerance | None = None, *, complement: bool = False
) -> QuadratureResult:
    """Integrate ``f`` over a finite interval, half-line or the real line.

    ``domain`` is ``("finite", a, b)``, ``("halfline", a[, scale])`` for
    ``(a, inf)`` or ``("line"[, centre, scale])``.

    Near an endpoint ``a != 0`` the abscissae round to ``a`` itself. For
    integrands singular there, pass ``complement=True`` (finite intervals
    only): ``f`` is then called as ``f(x, (x - a, b - x))`` with both
    distances computed exactly.
    """
    tol = tol or Tolerance()
    dmap = _domain_map(domain)
    if complement and dmap.kind != "finite":
        raise ValueError("complement=True needs a finite interval")
    val, err, n, ok = _adaptive(f, dmap, tol, complement=complement)
    return QuadratureResult(float(val), float(err), int(n), bool(ok))


def integrate_halfplane(
    g: Callable,
    tol: Tolerance | None = None,
    *,
    x_center: float = 0.0,
    x_scale: float = 1.0,
    y_scale: float = 1.0,
) -> QuadratureResult:
    """Integrate ``g(x, y)`` over the upper half-plane.

    Iterated: for every outer y node the inner integral over the real line
    is refined independently, then the outer integral over y in (0, inf).
    The error estimate is the outer level difference plus the sum of inner
    errors weighted by the outer quadrature weights.
    """
    tol = tol or Tolerance()
    unit_line = _Map("line", 0.0, 1.0)
    ymap = _Map("halfline", 0.0, y_scale)
    inner_tol = Tolerance(tol.relative * 0.25, tol.absolute * 0.25, tol.max_evaluations)
    counter = {"evals": 0}

    def outer(y, allow):
        ycol = y[:, None]
        # integrands on Pi+ spread over a width ~ y in x, so the x scale grows with y
        width = x_scale + ycol

        def fb(xh, idx):
            # far tails are clipped to stay finite; their weight underflows anyway
            x = np.clip(x_center + width[idx] * xh[None, :], -1e300, 1e300)
            return g(x, ycol[idx]) * width[idx]

        val, err, n, _ = _adaptive_batch(fb, unit_line, inner_tol, y.size, allow, axis="x")
        counter["evals"] += n
        return val, err

    val, err, _, ok = _adaptive(outer, ymap, tol, axis="y", nested=True)
    return QuadratureResult(float(val), float(err), int(counter["evals"]), bool(ok))


def integrate_disc(
    g: Callable,
    tol: Tolerance | None = None,
    *,
    complement: bool = False,
    angular: str = "trapezoid",
    max_angles: int = 1 << 14,
) -> QuadratureResult:
    """Integrate ``g(rho, theta)`` over the unit disc with area measure.

    The radial variable is ``t = rho**2`` on (0, 1), so ``dm = dt dtheta / 2``;
    the angular rule is the periodic trapezoid rule, doubled per radius until
    converged. With ``complement=True`` the integrand is called as
    ``g(rho, theta, one_minus_rho2)`` with ``1 - rho**2`` computed exactly.
    Radii that round to 1 in double precision are evaluated at the largest
    double below 1, so ``|w| < 1`` always holds; ``1 - rho**2`` passed with
    ``complement=True`` stays exact.

    ``angular="tanh-sinh"`` replaces the trapezoid rule by a tanh-sinh rule
    on (0, 2 pi), which clusters nodes at theta = 0; use it when the
    integrand is singular at the boundary point w = 1 (Cayley images of
    half-plane functions).
    """
    tol = tol or Tolerance()
    tmap = _Map("finite", 0.0, 1.0)
    counter = {"evals": 0}
    inner_tol = Tolerance(tol.relative * 0.25, tol.absolute * 0.25, tol.max_evaluations)

    if angular not in ("trapezoid", "tanh-sinh"):
        raise ValueError(f"unknown angular rule {angular!r}")
    theta_map = _Map("finite", 0.0, 2.0 * math.pi)

    def angular_de(t, comp, allow):
        out_val = np.zeros(t.shape)
        out_err = np.zeros(t.shape)
        inside = np.arange(t.size)
        rho = np.minimum(np.sqrt(t), _BELOW_ONE)[:, None]
        omr = comp[1][:, None]

        def fb(theta, idx):
            if complement:
                return g(rho[idx], theta[None, :], omr[idx])
            return g(rho[idx], theta[None, :])

        with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
            val, err, n, _ = _adaptive_batch(
                fb, theta_map, inner_tol, inside.size, 2.0 * allow[inside], axis="theta"
            )
        counter["evals"] += n
        # dm = dt dtheta / 2
        out_val[inside] = 0.5 * val
        out_err[inside] = 0.5 * err
        return out_val, out_err

    def angular_trap(t, comp, allow):
        out_val = np.zeros(t.shape)
        out_err = np.zeros(t.shape)
        inside = np.arange(t.size)
        rho = np.minimum(np.sqrt(t), _BELOW_ONE)[:, None]
        omr = comp[1][:, None]
        prev = np.zeros(inside.size)
        active = np.arange(inside.size)
        n = 16
        while active.size:
            theta = ((2.0 * math.pi / n) * np.arange(n))[None, :]
            with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
                if complement:
                    samples = g(rho[active], theta, omr[active])
                else:
                    samples = g(rho[active], theta)
            samples = np.broadcast_to(np.asarray(samples, dtype=float), (active.size, n))
            _check_finite(samples, np.broadcast_to(theta, samples.shape), "theta")
            counter["evals"] += samples.size
            vals = samples.mean(axis=1) * math.pi  # (2 pi) * (1/2) from dm = dt dtheta / 2
            err = np.abs(vals - prev[active]) if n > 16 else np.full(active.size, np.inf)
            prev[active] = vals
            tgt = inside[active]
            out_val[tgt] = vals
            out_err[tgt] = err
            if n >= 32:
                done = err <= np.maximum(inner_tol.bound(vals), allow[tgt])
                if 2 * n > max_angles:
                    break
                active = active[~done]
            n *= 2
        return out_val, out_err

    inner = angular_trap if angular == "trapezoid" else angular_de
    val, err, _, ok = _adaptive(inner, tmap, tol, axis="rho", complement=True, nested=True)
    return QuadratureResult(float(val), float(err), int(counter["evals"]), bool(ok))
