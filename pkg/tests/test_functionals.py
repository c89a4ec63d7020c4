import math

import numpy as np
import pytest

from sharpbergman.forms import kernel_power_ratio, monomial_ratio, sharp_constant
from sharpbergman.functionals import (
    ConvergenceError,
    RatioReport,
    dual_gap,
    entropy_disc,
    entropy_halfplane,
    ratio_disc,
    ratio_halfplane,
    sup_fy,
)
from sharpbergman.quad import Tolerance
from sharpbergman.specfun import DomainError
from sharpbergman.trial import (
    DiscKernelPower,
    DiscPolynomial,
    KernelPower,
    PWCombination,
    Scaled,
    a2_norm_squared,
    cayley_transfer,
    random_trial,
)

ENTROPY_FLOOR = math.log(3) / 2 - 1e-6
F0 = KernelPower(2.0, 1j)


def check_report(rep: RatioReport):
    assert rep.ratio == pytest.approx(rep.numerator / rep.denominator, rel=1e-12)
    const = (
        sharp_constant(rep.s).halfplane_value
        if rep.domain_tag == "halfplane"
        else sharp_constant(rep.s).disc_value
    )
    assert rep.normalized == pytest.approx(rep.ratio / const, rel=1e-12)
    assert min(rep.numerator, rep.denominator, rep.ratio, rep.normalized) > 0
    assert rep.error_estimate >= 0


# --- ratio examples ---------------------------------------------------------------


@pytest.mark.parametrize("s", [1.5, 2.0, 3.0])
def test_kernel_is_extremal_on_halfplane(s):
    rep = ratio_halfplane(F0, s)
    check_report(rep)
    assert rep.normalized == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("r", [1.3, 1.5, 2.5, 3.0, 4.0])
def test_kernel_power_ratio_by_quadrature(r):
    rep = ratio_halfplane(KernelPower(r, 0.4 + 0.8j), 2.0)
    assert rep.normalized == pytest.approx(kernel_power_ratio(r, 2.0), abs=1e-6)


def test_s_equal_one_is_exact():
    for F in (F0, PWCombination([(1, 0.5, 2.0)])):
        assert ratio_halfplane(F, 1.0).normalized == 1.0
    assert ratio_disc(DiscPolynomial([1, 2, 3]), 1.0).normalized == 1.0


def test_disc_examples():
    for s in (1.5, 2.0, 3.7):
        rep = ratio_disc(DiscPolynomial([0.3 - 1j]), s)
        check_report(rep)
        assert rep.normalized == pytest.approx(1.0, abs=1e-8)
    assert ratio_disc(DiscPolynomial([0, 1]), 2.0).normalized == pytest.approx(0.4, abs=1e-6)
    assert ratio_disc(DiscKernelPower(2.0, 0.3), 2.0).normalized == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("n, s", [(2, 1.5), (3, 2.0), (5, 2.5)])
def test_disc_monomials_match_closed_form(n, s):
    G = DiscPolynomial([0] * n + [1])
    assert ratio_disc(G, s).normalized == pytest.approx(monomial_ratio(n, s), abs=1e-8)


def test_domain_checks():
    with pytest.raises(DomainError):
        ratio_halfplane(DiscPolynomial([1]), 2.0)
    with pytest.raises(DomainError):
        ratio_disc(F0, 2.0)
    with pytest.raises(DomainError):
        ratio_halfplane(F0, 0.5)


def test_nonconvergence_carries_partial_report():
    with pytest.raises(ConvergenceError) as info:
        ratio_halfplane(KernelPower(1.7, 0.2 + 0.5j), 2.3, Tolerance(relative=1e-12, max_evaluations=50))
    assert isinstance(info.value.partial, RatioReport)
    assert math.isfinite(info.value.partial.normalized)


# --- invariants -------------------------------------------------------------------


@pytest.mark.parametrize("c", [2.0, -1.0, 3j])
def test_scale_invariance(c):
    F = PWCombination([(1.0, 0.5, 1.0), (0.5j, 1.5, 2.0)])
    G = DiscPolynomial([1.0, 0.5 - 0.5j, 0.25])
    assert ratio_halfplane(Scaled(F, c), 2.3).normalized == pytest.approx(
        ratio_halfplane(F, 2.3).normalized, abs=1e-9
    )
    assert ratio_disc(Scaled(G, c), 1.7).normalized == pytest.approx(ratio_disc(G, 1.7).normalized, abs=1e-9)


@pytest.mark.parametrize("lam, a", [(0.25, 0.0), (3.0, -2.0), (10.0, 7.5)])
def test_affine_invariance(lam, a):
    z0 = 0.2 + 0.7j
    for p, s in [(2.0, 2.5), (3.1, 1.6)]:
        base = ratio_halfplane(KernelPower(p, z0), s).normalized
        moved = ratio_halfplane(KernelPower(p, lam * z0 + a), s).normalized
        assert moved == pytest.approx(base, abs=1e-6)


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("family", ["pw", "kernel"])
def test_transfer_compatibility(family, seed):
    F = random_trial(family, np.random.default_rng(seed))
    for s in (1.5, 2.0, 2.7):
        half = ratio_halfplane(F, s).normalized
        disc = ratio_disc(cayley_transfer(F), s).normalized
        assert disc == pytest.approx(half, abs=1e-6)


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("n", [2, 3])
def test_integer_case_bound(n, seed):
    F = random_trial("pw", np.random.default_rng(1000 + seed))
    assert ratio_halfplane(F, n).normalized <= 1 + 1e-6


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("s", [1.5, 2.5])
def test_half_integer_case_bound(s, seed):
    G = random_trial("disc_poly", np.random.default_rng(2000 + seed))
    assert ratio_disc(G, s).normalized <= 1 + 1e-6


# --- entropy ----------------------------------------------------------------------


def test_entropy_extremals():
    assert entropy_halfplane(F0) == pytest.approx(1.0, abs=1e-5)
    assert entropy_disc(DiscPolynomial([0.7j])) == pytest.approx(1.0, abs=1e-6)
    assert entropy_disc(DiscKernelPower(2.0, 0.0)) == pytest.approx(1.0, abs=1e-6)


def test_entropy_scale_invariance():
    F = PWCombination([(1.0, 0.5, 1.0), (0.5j, 1.5, 2.0)])
    base = entropy_halfplane(F)
    for c in (2.0, 10j):
        assert entropy_halfplane(Scaled(F, c)) == pytest.approx(base, abs=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_entropy_floor(seed):
    rng = np.random.default_rng(300 + seed)
    for family in ("pw", "kernel"):
        assert entropy_halfplane(random_trial(family, rng)) >= ENTROPY_FLOOR
    for family in ("disc_poly", "disc_kernel"):
        assert entropy_disc(random_trial(family, rng)) >= ENTROPY_FLOOR


# --- dual gap ---------------------------------------------------------------------


def test_dual_gap_examples():
    gap = dual_gap(F0, 2.0)
    assert gap >= -1e-6
    pw = dual_gap(PWCombination([(1, 1, 1)]), 2.0)
    assert math.isfinite(pw)


def test_dual_gap_kernel_closed_form():
    # weighted 4/3-norm of (z+i)^-2 has the kernel-moment closed form
    from sharpbergman.forms import kernel_moment

    s = 2.0
    p, alpha = 2 * s / (2 * s - 1), -2 * (s - 1) / (2 * s - 1)
    lhs = sharp_constant(s).halfplane_value ** (1 / (2 * s)) * kernel_moment(p, alpha, 1.0) ** (1 / p)
    assert dual_gap(F0, s) == pytest.approx(lhs - math.sqrt(math.pi / 4), abs=1e-8)


def test_dual_gap_domain():
    with pytest.raises(DomainError):
        dual_gap(F0, 1.0)
    with pytest.raises(DomainError):
        dual_gap(DiscPolynomial([1]), 2.0)


# --- sup |F| y ----------------------------------------------------------------------


def test_sup_fy_examples():
    assert sup_fy(F0) == pytest.approx(0.25, abs=1e-9)
    unit = Scaled(F0, 1 / math.sqrt(a2_norm_squared(F0)))
    assert sup_fy(unit) == pytest.approx(1 / (2 * math.sqrt(math.pi)), abs=1e-6)


@pytest.mark.parametrize("seed", range(6))
def test_sup_fy_bound(seed):
    rng = np.random.default_rng(400 + seed)
    for family in ("pw", "kernel"):
        F = random_trial(family, rng)
        bound = math.sqrt(a2_norm_squared(F)) / (2 * math.sqrt(math.pi))
        assert sup_fy(F) <= bound + 1e-9
