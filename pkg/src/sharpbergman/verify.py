"""Inequality battery and the bounds ledger for Phi(s).

Every check produces a :class:`VerificationRecord` whose ``pass_`` flag is
recomputable from ``lhs``, ``rhs`` and ``tolerance`` alone:
``margin = rhs - lhs`` and ``pass_ = margin >= -tolerance``, except that
``tolerance = 0`` marks a strict inequality and requires ``margin > 0``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import forms
from .optimize import _workers, minimize_minkowski
from .quad import Tolerance, integrate_halfplane
from .specfun import DomainError, polygamma

__all__ = [
    "VerificationRecord",
    "BoundsLedger",
    "BatteryGrids",
    "verify_gamma_power",
    "verify_monomial",
    "verify_g_concavity",
    "verify_h_monotone",
    "bounds_ledger",
    "verify_bound_ordering",
    "kernel_moment_grid",
    "interpolation_bound",
    "verify_kernel_moment",
    "verify_simplex",
    "run_battery",
    "summarize",
]

CLOSED_FORM_TOL = 1e-10
QUADRATURE_TOL = 1e-6


@dataclass(frozen=True)
class VerificationRecord:
    inequality_id: str
    params: dict
    lhs: float
    rhs: float
    margin: float
    pass_: bool
    tolerance: float

    @staticmethod
    def passes(margin, tolerance):
        return bool(margin > 0 if tolerance == 0 else margin >= -tolerance)

    @classmethod
    def make(cls, inequality_id, params, lhs, rhs, tolerance):
        lhs, rhs = float(lhs), float(rhs)
        margin = rhs - lhs
        ok = cls.passes(margin, tolerance)
        return cls(inequality_id, dict(params), lhs, rhs, margin, ok, float(tolerance))

    def as_dict(self):
        return {
            "inequality_id": self.inequality_id,
            "params": dict(self.params),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.pass_,
            "tolerance": self.tolerance,
        }


def verify_gamma_power(r: float, s: float) -> VerificationRecord:
    """Kernel-power ratio <= 1, with equality exactly at r = 2."""
    if not (r > 1 and s > 1):
        raise DomainError(f"need r > 1 and s > 1; got {(r, s)}")
    return VerificationRecord.make(
        "gamma_power", {"r": r, "s": s}, forms.kernel_power_ratio(r, s), 1.0, CLOSED_FORM_TOL
    )


def verify_monomial(n: int, s: float) -> VerificationRecord:
    """Disc monomial ratio <= 1, with equality when s = 1 or n = 0."""
    return VerificationRecord.make(
        "monomial", {"n": n, "s": s}, forms.monomial_ratio(n, s), 1.0, CLOSED_FORM_TOL
    )


def g_second_derivative(u, s):
    """g''(u) for g(u) = log Gamma(us) - s log Gamma(u)."""
    u = np.asarray(u, dtype=float)
    return s * (s * polygamma(1, u * s) - polygamma(1, u))


def verify_g_concavity(s: float, u_grid) -> VerificationRecord:
    """g'' < 0 at every node of ``u_grid`` (strict)."""
    if not s > 1:
        raise DomainError(f"concavity check needs s > 1, got {s!r}")
    u = np.asarray(u_grid, dtype=float)
    if u.size == 0 or np.any(u <= 0):
        raise DomainError("u grid must be non-empty and positive")
    lhs = float(np.max(g_second_derivative(u, s)))
    params = {"s": s, "u_min": float(u.min()), "u_max": float(u.max()), "nodes": int(u.size)}
    return VerificationRecord.make("g_concavity", params, lhs, 0.0, 0.0)


def h(t):
    """h(t) = t psi'(t)."""
    t = np.asarray(t, dtype=float)
    return t * polygamma(1, t)


def h_prime(t):
    t = np.asarray(t, dtype=float)
    return polygamma(1, t) + t * polygamma(2, t)


def verify_h_monotone(t_grid) -> VerificationRecord:
    """h strictly decreasing across the grid and h' < 0 at every node."""
    t = np.asarray(t_grid, dtype=float)
    if t.size < 2 or np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise DomainError("t grid must be positive, strictly increasing, with >= 2 nodes")
    hv = h(t)
    lhs = float(max(np.max(np.diff(hv)), np.max(h_prime(t))))
    params = {"t_min": float(t[0]), "t_max": float(t[-1]), "nodes": int(t.size)}
    return VerificationRecord.make("h_monotone", params, lhs, 0.0, 0.0)


@dataclass(frozen=True)
class BoundsLedger:
    """Known bounds for Phi(s), all on the Phi scale (bound constant / C_s).

    ``n`` and ``phi_upper_interpolation`` are ``None`` where undefined
    (integer s for ``n``; integer and half-integer s for the interpolation
    bound). At integer s the bracket collapses to Phi(s) = 1.
    """

    s: float
    n: Optional[int]
    phi_lower: float
    phi_upper_coarse: float
    phi_upper_prelim: float
    phi_upper_minkowski: float
    phi_upper_interpolation: Optional[float]
    kernel_lower: float = 1.0
    nu_star: float = field(default=math.nan, compare=False)

    def as_row(self):
        return {
            "s": self.s,
            "phi_lower": self.phi_lower,
            "kernel_lower": self.kernel_lower,
            "interpolation": self.phi_upper_interpolation,
            "coarse": self.phi_upper_coarse,
            "prelim": self.phi_upper_prelim,
            "minkowski": self.phi_upper_minkowski,
        }


def interpolation_bound(s: float) -> Optional[float]:
    """Phi-scale interpolation bound; ``None`` at integer and half-integer s.

    First branch (n < s < n + 1/2):
    (2s-1) / ((2n-1)^{2n+1-2s} (2n)^{2(s-n)}). The second branch
    (n + 1/2 < s < n + 1) carries an extra factor 2 in the denominator.
    """
    n = math.floor(s)
    frac = s - n
    if frac == 0.0 or frac == 0.5:
        return None
    log_den = (2 * n + 1 - 2 * s) * math.log(2 * n - 1) + 2 * (s - n) * math.log(2 * n)
    value = (2 * s - 1) * math.exp(-log_den)
    return value if frac < 0.5 else value / 2.0


def bounds_ledger(s: float) -> BoundsLedger:
    if not s > 1:
        raise DomainError(f"bounds ledger needs s > 1, got {s!r}")
    s = float(s)
    nu_star, mink = minimize_minkowski(s)
    if s == math.floor(s):
        n = None
        lower = coarse = 1.0
    else:
        n = int(math.floor(s))
        lower = (2 * s - 1) / (2 * n + 1)
        coarse = (2 * s - 1) / (2 * n - 1)
    return BoundsLedger(
        s=s,
        n=n,
        phi_lower=lower,
        phi_upper_coarse=coarse,
        phi_upper_prelim=2 * s - 1,
        phi_upper_minkowski=mink,
        phi_upper_interpolation=interpolation_bound(s),
        nu_star=nu_star,
    )


def verify_bound_ordering(s: float) -> list:
    """Ordering assertions valid at ``s``.

    First interpolation branch: 1 < interpolation and interpolation < coarse.
    For 1 < s < 2 additionally prelim <= Minkowski infimum. Outside those
    ranges no assertion is made and the list may be empty.
    """
    led = bounds_ledger(s)
    out = []
    frac = s - math.floor(s)
    if 0.0 < frac < 0.5:
        p = {"s": s, "n": led.n}
        out.append(
            VerificationRecord.make("lemma_interp_above_one", p, 1.0, led.phi_upper_interpolation, 0.0)
        )
        out.append(
            VerificationRecord.make(
                "lemma_interp_below_coarse", p, led.phi_upper_interpolation, led.phi_upper_coarse, 0.0
            )
        )
    if 1.0 < s < 2.0:
        out.append(
            VerificationRecord.make(
                "prelim_below_minkowski",
                {"s": s, "nu_star": led.nu_star},
                led.phi_upper_prelim,
                led.phi_upper_minkowski,
                CLOSED_FORM_TOL,
            )
        )
    return out


def kernel_moment_grid():
    """The 45-node (r, t, y) grid; nodes with 2r - t <= 2 are included on purpose."""
    return [
        (r, t, y)
        for r in (1.5, 2.0, 2.5, 3.0, 4.0)
        for t in (0.0, 0.5, 1.0)
        for y in (0.5, 1.0, 2.0)
    ]


def _failed(rec):
    return VerificationRecord(
        rec.inequality_id, rec.params, rec.lhs, rec.rhs, rec.margin, False, rec.tolerance
    )


def verify_kernel_moment(r: float, t: float, y: float, tol: Tolerance | None = None):
    """Quadrature of v^t |z - conj(w)|^{-2r} over Pi+ against the closed form.

    The record's lhs is the relative discrepancy, rhs 0, tolerance 1e-7.
    Outside the admissible range (2r - t <= 2) the integral diverges; the
    record then passes exactly when the closed form refuses the point.
    """
    params = {"r": r, "t": t, "y": y}
    if not 2 * r - t > 2:
        try:
            forms.kernel_moment(r, t, y)
        except DomainError:
            return VerificationRecord.make("kernel_moment_rejects", params, 0.0, 0.0, 1e-7)
        return VerificationRecord.make("kernel_moment_rejects", params, math.inf, 0.0, 1e-7)
    tol = tol or Tolerance(relative=1e-10, absolute=1e-300)
    log_exact = math.log(forms.kernel_moment(r, t, y))

    def g(u, v):
        # |x + iy - (u - iv)|^2 at x = 0, normalized by the exact value
        d2 = u * u + (y + v) ** 2
        return np.exp(t * np.log(v) - r * np.log(d2) - log_exact)

    res = integrate_halfplane(g, tol, x_scale=y, y_scale=y)
    rec = VerificationRecord.make("kernel_moment", params, abs(res.value - 1.0), 0.0, 1e-7)
    return rec if res.converged else _failed(rec)


def verify_simplex(n: int, u: float) -> VerificationRecord:
    """Nested-quadrature simplex integral against u^{2n+1} / Gamma(2n+2)."""
    exact = forms.simplex_moment(n, u)
    res = forms.simplex_moment_oracle(n, u)
    rel = abs(res.value - exact) / exact
    rec = VerificationRecord.make("simplex_moment", {"n": n, "u": u}, rel, 0.0, QUADRATURE_TOL)
    return rec if res.converged else _failed(rec)


@dataclass(frozen=True)
class BatteryGrids:
    """Parameter grids for :func:`run_battery`; empty tuples skip a family."""

    gamma_r: tuple = ()
    gamma_s: tuple = ()
    monomial_n: tuple = ()
    monomial_s: tuple = ()
    concavity_s: tuple = ()
    u_grid: tuple = ()
    t_grid: tuple = ()
    ordering_s: tuple = ()
    kernel_moment: tuple = ()
    simplex: tuple = ()

    @classmethod
    def default(cls):
        rs = tuple(float(v) for v in np.logspace(0.0, 1.0, 61)[1:])
        mono_s = tuple(float(v) for v in np.linspace(1.0, 10.0, 20))
        nodes = tuple(float(v) for v in np.logspace(-2.0, 4.0, 500))
        ordering = []
        for n in (1, 2, 3):
            ordering.extend(float(v) for v in np.linspace(n, n + 0.5, 52)[1:-1])
        return cls(
            gamma_r=(2.0,) + rs,
            gamma_s=rs,
            monomial_n=tuple(range(51)),
            monomial_s=mono_s,
            concavity_s=(1.1, 2.0, 5.0, 10.0),
            u_grid=nodes,
            t_grid=nodes,
            ordering_s=tuple(ordering),
            kernel_moment=tuple(kernel_moment_grid()),
            simplex=tuple((n, u) for n in (1, 2, 3, 4) for u in (0.5, 1.0, 2.0)),
        )

    @classmethod
    def empty(cls):
        return cls()


_ORACLE_PARAMS = {"kernel_moment": ("r", "t", "y"), "simplex": ("n", "u")}


def _oracle_records(job):
    kind, args = job
    fn = verify_kernel_moment if kind == "kernel_moment" else verify_simplex
    return _guard(kind, dict(zip(_ORACLE_PARAMS[kind], args)), fn, *args)


def _guard(kind, params, fn, *args):
    # individual failures are recorded, never propagated
    try:
        out = fn(*args)
    except (ArithmeticError, ValueError) as exc:
        return [VerificationRecord(kind, dict(params, error=str(exc)), math.nan, math.nan, math.nan, False, 0.0)]
    return out if isinstance(out, list) else [out]


def run_battery(grids: BatteryGrids | None = None) -> list:
    """Run every check on the given grids; records come in a fixed order.

    Order: gamma power (r-major), monomial (n-major), g concavity, h
    monotonicity, bound ordering, kernel moments, simplex moments. The
    quadrature oracles fan out over ``SHARPBERGMAN_WORKERS`` processes;
    results are merged back in grid order.
    """
    g = BatteryGrids.default() if grids is None else grids
    records = []
    for r in g.gamma_r:
        for s in g.gamma_s:
            records += _guard("gamma_power", {"r": r, "s": s}, verify_gamma_power, r, s)
    for n in g.monomial_n:
        for s in g.monomial_s:
            records += _guard("monomial", {"n": n, "s": s}, verify_monomial, n, s)
    if g.u_grid:
        for s in g.concavity_s:
            records += _guard("g_concavity", {"s": s}, verify_g_concavity, s, g.u_grid)
    if g.t_grid:
        records += _guard("h_monotone", {}, verify_h_monotone, g.t_grid)
    for s in g.ordering_s:
        records += _guard("bound_ordering", {"s": s}, verify_bound_ordering, s)

    jobs = [("kernel_moment", tuple(a)) for a in g.kernel_moment]
    jobs += [("simplex", tuple(a)) for a in g.simplex]
    workers = min(_workers(), max(len(jobs), 1))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_oracle_records, jobs))
    else:
        chunks = [_oracle_records(job) for job in jobs]
    for chunk in chunks:
        records += chunk
    return records


def summarize(records) -> tuple:
    """(passed, total)."""
    return sum(1 for r in records if r.pass_), len(records)
