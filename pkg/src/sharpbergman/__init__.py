"""Numerical study of sharp Bergman-space embeddings on the half-plane and disc.

Submodules, bottom-up: :mod:`specfun` (log-gamma, polygamma),
:mod:`quad` (adaptive double-exponential quadrature), :mod:`forms`
(closed forms), :mod:`trial` (trial functions and the Cayley transfer),
:mod:`functionals` (ratios, entropies), :mod:`verify` (inequality
battery), :mod:`optimize` (extremal search) and :mod:`cli`.
"""

__version__ = "0.1.0"

from .forms import kernel_moment, kernel_power_ratio, monomial_ratio, sharp_constant
from .functionals import (
    RatioReport,
    dual_gap,
    entropy_disc,
    entropy_halfplane,
    ratio_disc,
    ratio_halfplane,
    sup_fy,
)
from .quad import Tolerance, integrate_1d, integrate_disc, integrate_halfplane
from .specfun import DomainError, log_gamma, polygamma
from .trial import (
    DiscKernelPower,
    DiscPolynomial,
    KernelPower,
    PWCombination,
    Scaled,
    Transferred,
    cayley_transfer,
    inverse_cayley_transfer,
)

__all__ = [
    "DomainError",
    "Tolerance",
    "log_gamma",
    "polygamma",
    "integrate_1d",
    "integrate_halfplane",
    "integrate_disc",
    "sharp_constant",
    "kernel_moment",
    "kernel_power_ratio",
    "monomial_ratio",
    "KernelPower",
    "PWCombination",
    "DiscPolynomial",
    "DiscKernelPower",
    "Transferred",
    "Scaled",
    "cayley_transfer",
    "inverse_cayley_transfer",
    "RatioReport",
    "ratio_halfplane",
    "ratio_disc",
    "entropy_halfplane",
    "entropy_disc",
    "dual_gap",
    "sup_fy",
]
