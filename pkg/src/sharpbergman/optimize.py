"""Derivative-free search: Nelder-Mead, golden section, extremal hunting.

The extremal search maximizes the normalized disc ratio over polynomials
of fixed degree. Its objective is evaluated on a fixed product rule
(Gauss-Jacobi in ``t = |w|^2`` against the weight ``(1 - t)^{2s-2}``,
trapezoid in the angle), which makes each evaluation a small matrix
product; the winner is then re-checked with the adaptive disc quadrature.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from . import forms
from .functionals import ratio_disc
from .quad import Tolerance
from .specfun import DomainError, log_gamma
from .trial import DiscPolynomial

__all__ = [
    "OptimResult",
    "ExtremalSearch",
    "nelder_mead",
    "golden_section",
    "minkowski_factor",
    "minimize_minkowski",
    "search_extremal_disc",
    "PolynomialRatio",
    "WORKERS_ENV",
]

WORKERS_ENV = "SHARPBERGMAN_WORKERS"
COUNTEREXAMPLE_THRESHOLD = 1.0 + 1e-5


@dataclass
class OptimResult:
    best_value: float
    best_params: list
    iterations: int
    restarts_used: int
    converged: bool
    history: list = field(default_factory=list)


def _as_worst(v, sign):
    # non-finite objective values are ranked below every finite one
    return sign * v if np.isfinite(v) else math.inf


def nelder_mead(
    objective: Callable,
    x0,
    *,
    max_iter: int = 5000,
    simplex_scale: float = 0.1,
    tol: float = 1e-10,
    mode: str = "minimize",
) -> OptimResult:
    """Nelder-Mead simplex search with standard coefficients (1, 2, 1/2, 1/2).

    Converged when both the simplex diameter (relative to ``max(1, |x|)``)
    and the spread of vertex values (relative to ``max(1, |f|)``) fall
    below ``tol``. ``mode="maximize"`` negates internally; the reported
    values always carry the objective's own sign. ``history`` records the
    best value after every iteration, so it is monotone.
    """
    if mode not in ("minimize", "maximize"):
        raise ValueError(f"mode must be 'minimize' or 'maximize', got {mode!r}")
    sign = 1.0 if mode == "minimize" else -1.0
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.ndim != 1 or x0.size == 0:
        raise ValueError("x0 must be a non-empty vector")
    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise DomainError("objective is not finite at x0")
    n = x0.size
    simplex = np.vstack([x0] + [x0 + simplex_scale * np.eye(n)[i] for i in range(n)])
    fvals = np.array([_as_worst(f0, sign)] + [_as_worst(float(objective(p)), sign) for p in simplex[1:]])

    def f(p):
        return _as_worst(float(objective(p)), sign)

    history = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        best, worst = simplex[0], simplex[-1]
        centroid = simplex[:-1].mean(axis=0)

        xr = centroid + (centroid - worst)
        fr = f(xr)
        if fr < fvals[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = f(xe)
            simplex[-1], fvals[-1] = (xe, fe) if fe < fr else (xr, fr)
        elif fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
        else:
            if fr < fvals[-1]:
                xc = centroid + 0.5 * (xr - centroid)
            else:
                xc = centroid + 0.5 * (worst - centroid)
            fc = f(xc)
            if fc < min(fr, fvals[-1]):
                simplex[-1], fvals[-1] = xc, fc
            else:
                simplex[1:] = best + 0.5 * (simplex[1:] - best)
                fvals[1:] = [f(p) for p in simplex[1:]]

        i_best = int(np.argmin(fvals))
        history.append((it, sign * float(fvals[i_best])))
        diam = float(np.max(np.linalg.norm(simplex - simplex[i_best], axis=1)))
        finite = fvals[np.isfinite(fvals)]
        spread = float(finite.max() - finite.min()) if finite.size == fvals.size else math.inf
        xb = simplex[i_best]
        if diam <= tol * max(1.0, float(np.linalg.norm(xb))) and spread <= tol * max(
            1.0, abs(float(fvals[i_best]))
        ):
            converged = True
            break

    i_best = int(np.argmin(fvals))
    return OptimResult(
        best_value=sign * float(fvals[i_best]),
        best_params=[float(v) for v in simplex[i_best]],
        iterations=it,
        restarts_used=1,
        converged=converged,
        history=history,
    )


_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable, a: float, b: float, *, xtol: float = 1e-12, max_iter: int = 200):
    """Minimize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    if not a < b:
        raise ValueError("need a < b")
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= xtol * max(1.0, abs(c)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def minkowski_factor(nu: float, s: float) -> float:
    """nu^s Gamma(2s) Gamma((nu-1)s) / Gamma((nu+1)s/2)^2."""
    if not (nu > 1 and s > 1):
        raise DomainError(f"minkowski factor needs nu > 1 and s > 1; got {(nu, s)}")
    return math.exp(
        s * math.log(nu)
        + log_gamma(2.0 * s)
        + log_gamma((nu - 1.0) * s)
        - 2.0 * log_gamma((nu + 1.0) * s / 2.0)
    )


def minimize_minkowski(s: float, *, nu_max: float = 60.0):
    """Infimum over nu in (1, nu_max] of :func:`minkowski_factor`.

    A 400-point log scan in ``nu - 1`` brackets the minimum, then golden
    section refines it. Returns ``(nu_star, value)``.
    """
    if not s > 1:
        raise DomainError(f"s must exceed 1, got {s!r}")
    lo = 1e-6
    grid = 1.0 + np.logspace(math.log10(lo), math.log10(nu_max - 1.0), 400)
    vals = np.array([minkowski_factor(v, s) for v in grid])
    i = int(np.argmin(vals))
    a = grid[max(i - 1, 0)]
    b = grid[min(i + 1, grid.size - 1)]
    if a == b:
        return float(grid[i]), float(vals[i])
    nu, val = golden_section(lambda v: minkowski_factor(v, s), float(a), float(b))
    if vals[i] < val:
        return float(grid[i]), float(vals[i])
    return float(nu), float(val)


class PolynomialRatio:
    """Normalized disc ratio of ``sum c_k w^k`` on a fixed product rule.

    ``n_radial`` Gauss-Jacobi nodes in ``t = |w|^2`` absorb the weight
    ``(1 - t)^{2s-2}``; ``n_angular`` equispaced angles integrate the
    periodic direction. For integer ``s`` the rule is exact once both
    counts exceed the polynomial degree of ``|G|^{2s}``.
    """

    def __init__(self, s: float, degree: int, n_radial: int = 64, n_angular: int = 128):
        if not s >= 1:
            raise DomainError(f"s must be >= 1, got {s!r}")
        if int(degree) != degree or degree < 0:
            raise DomainError(f"degree must be a non-negative integer, got {degree!r}")
        self.s = float(s)
        self.degree = int(degree)
        n_angular = max(n_angular, 4 * (self.degree + 1) * int(math.ceil(s)))
        x, wx = special.roots_jacobi(n_radial, 2.0 * s - 2.0, 0.0)
        t = 0.5 * (1.0 + x)
        # dt = dx/2 and (1-t)^a = 2^-a (1-x)^a; dm = dt dtheta / 2
        wt = wx * 0.5 ** (2.0 * s - 1.0)
        theta = 2.0 * math.pi * np.arange(n_angular) / n_angular
        rho = np.sqrt(t)
        w = (rho[:, None] * np.exp(1j * theta)[None, :]).ravel()
        self._vander = w[:, None] ** np.arange(self.degree + 1)[None, :]
        self._weights = np.repeat(wt, n_angular) * (math.pi / n_angular)
        self._log_const = math.log(forms.sharp_constant(s).disc_value)
        self._k1 = np.arange(1, self.degree + 2, dtype=float)

    def __call__(self, coeffs) -> float:
        c = np.asarray(coeffs, dtype=complex)
        norm2 = math.pi * float(np.sum(np.abs(c) ** 2 / self._k1))
        if not norm2 > 0:
            return math.nan
        mod2 = np.abs(self._vander @ c) ** 2 / norm2
        integral = float(self._weights @ mod2**self.s)
        return math.exp(math.log(integral) - self._log_const) if integral > 0 else math.nan


@dataclass
class ExtremalSearch:
    """Result of :func:`search_extremal_disc`.

    ``checked_value`` is the adaptive-quadrature ratio of ``best_trial``
    (tolerance 1e-10 when the counterexample flag is raised).
    """

    result: OptimResult
    best_trial: DiscPolynomial
    checked_value: float
    counterexample: bool
    threshold: float


def _coeffs_from_params(p):
    p = np.asarray(p, dtype=float)
    c = p[0::2] + 1j * p[1::2]
    nrm = float(np.linalg.norm(c))
    return c / nrm if nrm > 0 else None


def _params_from_coeffs(c):
    c = np.asarray(c, dtype=complex)
    out = np.empty(2 * c.size)
    out[0::2] = c.real
    out[1::2] = c.imag
    return out


def _starts(degree, restarts, seed):
    starts = [_params_from_coeffs(np.eye(degree + 1, dtype=complex)[0])]
    children = np.random.SeedSequence(seed).spawn(max(restarts - 1, 0))
    for child in children:
        rng = np.random.default_rng(child)
        v = rng.normal(size=degree + 1) + 1j * rng.normal(size=degree + 1)
        starts.append(_params_from_coeffs(v / np.linalg.norm(v)))
    return starts


def _run_restart(args):
    s, degree, x0, max_iter, tol = args
    ratio = PolynomialRatio(s, degree)

    def objective(p):
        c = _coeffs_from_params(p)
        return math.nan if c is None else ratio(c)

    return nelder_mead(objective, x0, max_iter=max_iter, simplex_scale=0.2, tol=tol, mode="maximize")


def _workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


def search_extremal_disc(
    s: float,
    degree: int,
    restarts: int = 4,
    seed: int = 0,
    *,
    threshold: float = COUNTEREXAMPLE_THRESHOLD,
    max_iter: int = 4000,
    tol: float = 1e-10,
) -> ExtremalSearch:
    """Maximize the normalized disc ratio over polynomials of given degree.

    Parameters are the real and imaginary parts of ``c_0..c_degree``; each
    point is projected to ``||c||_2 = 1`` before evaluation (the ratio is
    scale invariant) and an all-zero vector counts as the worst vertex.
    Restart 0 starts from the constant function, the others from seeded
    random unit vectors. Restarts run in parallel when the environment
    variable ``SHARPBERGMAN_WORKERS`` exceeds 1; the merge keeps the best
    value and, on ties, the lowest restart index.
    """
    if not s >= 1:
        raise DomainError(f"s must be >= 1, got {s!r}")
    if int(degree) != degree or degree < 0:
        raise DomainError(f"degree must be a non-negative integer, got {degree!r}")
    if restarts < 1:
        raise DomainError("need at least one restart")
    degree = int(degree)
    jobs = [(float(s), degree, x0, max_iter, tol) for x0 in _starts(degree, restarts, seed)]
    workers = min(_workers(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(j) for j in jobs]

    best_idx = 0
    for i, r in enumerate(results):
        if r.best_value > results[best_idx].best_value:
            best_idx = i
    best = results[best_idx]
    merged = OptimResult(
        best_value=best.best_value,
        best_params=best.best_params,
        iterations=sum(r.iterations for r in results),
        restarts_used=len(results),
        converged=best.converged,
        history=best.history,
    )
    trial = DiscPolynomial(tuple(_coeffs_from_params(best.best_params)))
    flagged = best.best_value > threshold
    check_tol = Tolerance(relative=1e-10, absolute=1e-14) if flagged else None
    checked = ratio_disc(trial, s, check_tol).normalized
    return ExtremalSearch(merged, trial, checked, bool(flagged and checked > threshold), threshold)
