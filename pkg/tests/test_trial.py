import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpbergman.quad import Tolerance
from sharpbergman.specfun import DomainError
from sharpbergman.trial import (
    DiscKernelPower,
    DiscPolynomial,
    KernelPower,
    PWCombination,
    Scaled,
    Transferred,
    a2_norm_squared,
    cayley,
    cayley_derivative,
    cayley_transfer,
    evaluate,
    from_text,
    inverse_cayley_transfer,
    pointwise_power,
    quadrature_norm_squared,
    random_trial,
    to_mapping,
    to_text,
    trial_from_mapping,
)

FAMILIES = ["pw", "kernel", "disc_poly", "disc_kernel"]


def test_evaluate_examples():
    assert evaluate(KernelPower(2.0, 1j), 1j) == pytest.approx(0.25, abs=1e-15)
    assert evaluate(DiscPolynomial([1]), 0.3 - 0.2j) == 1
    assert evaluate(PWCombination([(1, 1, 1)]), 1j) == pytest.approx(0.25, abs=1e-15)


def test_evaluate_rejects_boundary_points():
    with pytest.raises(DomainError):
        evaluate(KernelPower(2.0), 0.5)
    with pytest.raises(DomainError):
        evaluate(DiscPolynomial([1, 1]), 1.0)
    with pytest.raises(DomainError):
        evaluate(cayley_transfer(KernelPower(2.0)), np.array([0.0, 1j]))


def test_construction_invariants():
    with pytest.raises(DomainError):
        KernelPower(2.0, 1.0)
    with pytest.raises(DomainError):
        DiscKernelPower(2.0, 1.0)
    with pytest.raises(DomainError):
        DiscPolynomial([0, 0])
    with pytest.raises(DomainError):
        PWCombination([(0, 1, 1)])
    with pytest.raises(DomainError):
        PWCombination([(1, 1, -1)])
    with pytest.raises(DomainError):
        Scaled(DiscPolynomial([1]), 0.0)


def test_noninteger_power_has_no_branch_cut():
    F = KernelPower(2.7, 0.3 + 1.1j)
    x = np.linspace(-50, 50, 2001)
    vals = F(x + 1e-3j)
    # continuous along a horizontal line: adjacent values never jump in phase
    steps = np.abs(np.diff(np.unwrap(np.angle(vals))))
    assert steps.max() < 0.2


def test_norm_examples():
    assert a2_norm_squared(KernelPower(2.0, 1j)) == pytest.approx(math.pi / 4, rel=1e-14)
    assert a2_norm_squared(DiscPolynomial([0, 1])) == pytest.approx(math.pi / 2, rel=1e-14)
    assert a2_norm_squared(DiscPolynomial([1, 1])) == pytest.approx(1.5 * math.pi, rel=1e-14)
    with pytest.raises(DomainError):
        a2_norm_squared(KernelPower(1.0))


def test_cayley_examples():
    assert cayley(0.0) == pytest.approx(1j)
    assert cayley_derivative(0.0) == pytest.approx(2j)
    G = cayley_transfer(KernelPower(2.0, 1j))
    assert evaluate(G, 0.0) == pytest.approx(0.5j, abs=1e-15)
    with pytest.raises(DomainError):
        cayley_transfer(DiscPolynomial([1]))
    with pytest.raises(DomainError):
        inverse_cayley_transfer(KernelPower(2.0))


@given(st.floats(min_value=0.0, max_value=0.99), st.floats(min_value=-math.pi, max_value=math.pi))
@settings(max_examples=100, deadline=None)
def test_cayley_maps_disc_into_halfplane(r, theta):
    z = cayley(r * np.exp(1j * theta))
    assert z.imag > 0


def test_round_trip_transfer_is_identity():
    F = PWCombination([(1.0, 0.5, 1.0), (0.5j, 1.5, 2.0)])
    back = inverse_cayley_transfer(cayley_transfer(F))
    z = np.array([0.1 + 0.5j, -2.0 + 3.0j, 5.0 + 0.01j])
    np.testing.assert_allclose(back(z), F(z), rtol=1e-12)


@pytest.mark.parametrize("seed", range(4))
@pytest.mark.parametrize("family", ["pw", "kernel"])
def test_transfer_isometry_by_quadrature(family, seed):
    F = random_trial(family, np.random.default_rng(seed))
    norm = a2_norm_squared(F)
    transferred = quadrature_norm_squared(cayley_transfer(F), Tolerance(relative=1e-10))
    assert abs(transferred - norm) <= 1e-7 * norm


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("family", FAMILIES)
def test_closed_form_norm_matches_quadrature(family, seed):
    F = random_trial(family, np.random.default_rng(100 + seed))
    assert quadrature_norm_squared(F) == pytest.approx(a2_norm_squared(F), rel=1e-7)


def test_disc_kernel_norm_closed_form():
    # p = 2 is the reproducing kernel: ||K_xi||^2 = pi / (1 - |xi|^2)^2
    xi = 0.4 + 0.3j
    assert a2_norm_squared(DiscKernelPower(2.0, xi)) == pytest.approx(
        math.pi / (1 - abs(xi) ** 2) ** 2, rel=1e-13
    )


def test_pw_synthesis_matches_laplace_integral():
    terms = [(1.0, 0.5, 1.0), (0.3 - 0.4j, 1.7, 0.6)]
    F = PWCombination(terms)
    rng = np.random.default_rng(7)
    points = rng.uniform(-3, 3, 10) + 1j * rng.uniform(0.05, 3, 10)
    for z in points:
        zz = mp.mpc(z.real, z.imag)
        ref = mp.quad(
            lambda t: mp.fsum(mp.mpc(c) * t**a * mp.exp(-b * t) for c, a, b in terms) * mp.exp(1j * zz * t),
            [0, 1, mp.inf],
        )
        assert abs(evaluate(F, z) - complex(ref)) <= 1e-7 * max(1.0, abs(complex(ref)))


def test_pointwise_power_examples():
    F = KernelPower(2.0, 1j)
    z = np.array([1j, 0.5 + 2j])
    np.testing.assert_allclose(pointwise_power(F, 1)(z), F(z), rtol=0, atol=0)
    assert pointwise_power(DiscPolynomial([1]), 3)(0.2j) == 1
    assert pointwise_power(F, 2)(1j) == pytest.approx(1 / 16)
    with pytest.raises(DomainError):
        pointwise_power(F, 0)


def test_scaled_wrapper():
    G = DiscPolynomial([1, 2j])
    S = Scaled(G, 3 - 4j)
    w = np.array([0.1, -0.5j])
    np.testing.assert_allclose(S(w), (3 - 4j) * G(w), rtol=1e-15)
    np.testing.assert_allclose(S.log_abs(w), math.log(5) + G.log_abs(w), rtol=1e-14)
    assert a2_norm_squared(S) == pytest.approx(25 * a2_norm_squared(G), rel=1e-14)
    assert S.domain == G.domain


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("family", FAMILIES)
def test_serialization_round_trip(family, seed):
    F = random_trial(family, np.random.default_rng(seed))
    for wrapped in (F, Scaled(F, 0.7 - 0.1j), Transferred(F)):
        back = from_text(to_text(wrapped))
        assert back == wrapped
        assert trial_from_mapping(to_mapping(wrapped)) == wrapped


def test_serialization_errors():
    with pytest.raises(ValueError):
        from_text("variant = Spline\n")
    with pytest.raises(ValueError):
        from_text("variant = KernelPower\n")
    with pytest.raises(ValueError):
        from_text("nonsense\n")


def test_log_abs_matches_values():
    rng = np.random.default_rng(3)
    for family in FAMILIES:
        F = random_trial(family, rng)
        for G in (F, Transferred(F)):
            if G.domain == "disc":
                pts = 0.9 * np.sqrt(rng.uniform(size=20)) * np.exp(2j * np.pi * rng.uniform(size=20))
            else:
                pts = rng.uniform(-3, 3, 20) + 1j * rng.uniform(0.01, 3, 20)
            np.testing.assert_allclose(G.log_abs(pts), np.log(np.abs(G(pts))), rtol=1e-12, atol=1e-12)
