"""Trial functions on the upper half-plane and the disc.

Four concrete families plus a wrapper that moves a function to the other
domain through the Cayley map ``Phi(w) = i (1 + w) / (1 - w)``:

* :class:`KernelPower`     ``F(z) = ((z - conj(z0)) / i) ** (-p)`` on Pi+
* :class:`PWCombination`   ``F(z) = sum c Gamma(a+1) (b - iz) ** (-(a+1))`` on Pi+
* :class:`DiscPolynomial`  ``G(w) = sum c_k w**k`` on the disc
* :class:`DiscKernelPower` ``G(w) = (1 - w conj(xi)) ** (-p)`` on the disc
* :class:`Transferred`     ``(F o Phi) Phi'`` or its inverse
* :class:`Scaled`          a constant multiple of another trial function

Every power is taken of a base with positive real part, so the principal
branch is analytic on the whole domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from . import forms
from .quad import Tolerance, integrate_disc, integrate_halfplane
from .specfun import DomainError

__all__ = [
    "TrialFunction",
    "KernelPower",
    "PWCombination",
    "DiscPolynomial",
    "DiscKernelPower",
    "Transferred",
    "Scaled",
    "evaluate",
    "a2_norm_squared",
    "quadrature_norm_squared",
    "trial_from_mapping",
    "cayley",
    "cayley_derivative",
    "cayley_transfer",
    "inverse_cayley_transfer",
    "pointwise_power",
    "to_mapping",
    "to_text",
    "from_text",
    "random_trial",
]

HALFPLANE = "halfplane"
DISC = "disc"
_TINY = 1e-300


def cayley(w):
    """Phi(w) = i (1 + w) / (1 - w), mapping the disc onto Pi+."""
    return 1j * (1.0 + w) / (1.0 - w)


def cayley_derivative(w):
    return 2j / (1.0 - w) ** 2


def _inverse_cayley(z):
    # (z - i) / (z + i), written to stay finite for huge |z|
    return 1.0 - 2j / (z + 1j)


def _inverse_cayley_derivative(z):
    return 2j / (z + 1j) ** 2


class TrialFunction:
    """Base class; subclasses are frozen dataclasses."""

    domain: str

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        self._check_domain(z)
        return self._eval(z)

    def log_abs(self, z):
        """log|F(z)| without domain checks, clamped below at log(1e-300)."""
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return np.log(np.maximum(np.abs(self._eval(np.asarray(z, dtype=complex))), _TINY))

    def _check_domain(self, z):
        if self.domain == HALFPLANE:
            if np.any(~(z.imag > 0)):
                raise DomainError("point not in the open upper half-plane")
        elif np.any(~(np.abs(z) < 1)):
            raise DomainError("point not in the open unit disc")

    def _eval(self, z):
        raise NotImplementedError


@dataclass(frozen=True)
class KernelPower(TrialFunction):
    p: float
    z0: complex = 1j

    domain = HALFPLANE

    def __post_init__(self):
        object.__setattr__(self, "z0", complex(self.z0))
        if not self.z0.imag > 0:
            raise DomainError("z0 must lie in the upper half-plane")
        if not (np.isfinite(self.p) and self.p > 0):
            raise DomainError(f"exponent must be positive, got {self.p!r}")

    def _base(self, z):
        return (z - self.z0.conjugate()) / 1j

    def _eval(self, z):
        return np.exp(-self.p * np.log(self._base(z)))

    def log_abs(self, z):
        return -self.p * np.log(np.abs(self._base(np.asarray(z, dtype=complex))))


@dataclass(frozen=True)
class PWCombination(TrialFunction):
    """Laplace transform of f(t) = sum c t**a exp(-b t)."""

    terms: tuple

    domain = HALFPLANE

    def __post_init__(self):
        terms = tuple((complex(c), float(a), float(b)) for c, a, b in self.terms)
        if not terms or all(c == 0 for c, _, _ in terms):
            raise DomainError("Paley-Wiener combination must not vanish identically")
        for c, a, b in terms:
            if not (a > 0 and b > 0):
                raise DomainError(f"need a > 0 and b > 0, got a={a}, b={b}")
        object.__setattr__(self, "terms", terms)

    def _eval(self, z):
        out = np.zeros(np.shape(z), dtype=complex)
        z = np.asarray(z, dtype=complex)
        for c, a, b in self.terms:
            # b - iz assembled by parts: -1j * z is nan when Im z is infinite
            base = np.empty(z.shape, dtype=complex)
            base.real = b + z.imag
            base.imag = -z.real
            out = out + c * np.exp(special.gammaln(a + 1.0) - (a + 1.0) * np.log(base))
        return out


@dataclass(frozen=True)
class DiscPolynomial(TrialFunction):
    coeffs: tuple

    domain = DISC

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        if not coeffs or all(c == 0 for c in coeffs):
            raise DomainError("polynomial coefficients must not all vanish")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def _eval(self, w):
        out = np.zeros(np.shape(w), dtype=complex)
        for c in reversed(self.coeffs):
            out = out * w + c
        return out


@dataclass(frozen=True)
class DiscKernelPower(TrialFunction):
    p: float
    xi: complex = 0j

    domain = DISC

    def __post_init__(self):
        object.__setattr__(self, "xi", complex(self.xi))
        if not abs(self.xi) < 1:
            raise DomainError("xi must lie in the open unit disc")
        if not (np.isfinite(self.p) and self.p > 0):
            raise DomainError(f"exponent must be positive, got {self.p!r}")

    def _eval(self, w):
        return np.exp(-self.p * np.log(1.0 - w * self.xi.conjugate()))

    def log_abs(self, w):
        return -self.p * np.log(np.abs(1.0 - np.asarray(w, dtype=complex) * self.xi.conjugate()))


@dataclass(frozen=True)
class Transferred(TrialFunction):
    """The source function carried to the other domain, isometrically in A^2."""

    source: TrialFunction

    @property
    def domain(self):
        return DISC if self.source.domain == HALFPLANE else HALFPLANE

    def _eval(self, z):
        if self.source.domain == HALFPLANE:
            return self.source._eval(cayley(z)) * cayley_derivative(z)
        return self.source._eval(_inverse_cayley(z)) * _inverse_cayley_derivative(z)

    def log_abs(self, z):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            if self.source.domain == HALFPLANE:
                return self.source.log_abs(cayley(z)) + np.log(np.abs(cayley_derivative(z)))
            # log|2i/(z+i)^2| formed without squaring, which overflows for huge |z|
            return self.source.log_abs(_inverse_cayley(z)) + (
                np.log(2.0) - 2.0 * np.log(np.abs(z + 1j))
            )


@dataclass(frozen=True)
class Scaled(TrialFunction):
    """The constant multiple ``factor * source``."""

    source: TrialFunction
    factor: complex = 1.0 + 0j

    def __post_init__(self):
        object.__setattr__(self, "factor", complex(self.factor))
        if self.factor == 0 or not np.isfinite(self.factor):
            raise DomainError("scale factor must be finite and nonzero")

    @property
    def domain(self):
        return self.source.domain

    def _eval(self, z):
        return self.factor * self.source._eval(z)

    def log_abs(self, z):
        return math.log(abs(self.factor)) + self.source.log_abs(z)


def evaluate(F: TrialFunction, z):
    """Principal-branch value of ``F`` at ``z`` (scalar or array)."""
    out = F(z)
    return complex(out) if np.ndim(out) == 0 else out


def cayley_transfer(F: TrialFunction) -> Transferred:
    """G = (F o Phi) Phi' on the disc for a half-plane function F."""
    if F.domain != HALFPLANE:
        raise DomainError("cayley_transfer expects a half-plane function")
    return Transferred(F)


def inverse_cayley_transfer(G: TrialFunction) -> Transferred:
    """The half-plane function whose Cayley transfer is G."""
    if G.domain != DISC:
        raise DomainError("inverse_cayley_transfer expects a disc function")
    return Transferred(G)


def pointwise_power(F: TrialFunction, n: int) -> Callable:
    """z -> F(z)**n."""
    if int(n) != n or n < 1:
        raise DomainError(f"power must be a positive integer, got {n!r}")
    n = int(n)
    return lambda z: F(z) ** n


def _disc_kernel_norm_squared(p, xi):
    # pi * sum_k |(p)_k / k!|^2 |xi|^(2k) / (k+1)
    r2 = abs(xi) ** 2
    if r2 == 0.0:
        return math.pi
    total = 0.0
    k0 = 0
    while True:
        k = np.arange(k0, k0 + 4096, dtype=float)
        logc = special.gammaln(p + k) - special.gammaln(p) - special.gammaln(k + 1.0)
        terms = np.exp(2.0 * logc + k * math.log(r2) - np.log(k + 1.0))
        total += math.fsum(terms)
        # terms decay geometrically once k exceeds the peak
        if terms[-1] <= 1e-18 * total and terms[-1] <= terms[-2]:
            break
        k0 += 4096
        if k0 > 10_000_000:
            raise DomainError("kernel series did not converge; |xi| too close to 1")
    return math.pi * total


def a2_norm_squared(F: TrialFunction, tol: Tolerance | None = None) -> float:
    """Squared unweighted Bergman norm on the function's own domain.

    Exact for every family: monomial orthogonality for polynomials, the
    Paley-Wiener Gram sum for PW combinations, the kernel moment for
    kernel powers, a power series for disc kernels and isometry for
    transferred functions. Other TrialFunction subclasses fall back to
    quadrature of |F|^2.
    """
    if isinstance(F, DiscPolynomial):
        return math.pi * math.fsum(abs(c) ** 2 / (k + 1) for k, c in enumerate(F.coeffs))
    if isinstance(F, PWCombination):
        return forms.pw_norm_squared(0.0, F.terms)
    if isinstance(F, KernelPower):
        if not F.p > 1:
            raise DomainError(f"(z - conj z0)^(-p) is not in A^2 for p={F.p} <= 1")
        return forms.kernel_moment(F.p, 0.0, F.z0.imag)
    if isinstance(F, DiscKernelPower):
        return _disc_kernel_norm_squared(F.p, F.xi)
    if isinstance(F, Transferred):
        return a2_norm_squared(F.source, tol)
    if isinstance(F, Scaled):
        return abs(F.factor) ** 2 * a2_norm_squared(F.source, tol)
    return quadrature_norm_squared(F, tol)


def angular_rule(G: TrialFunction) -> str:
    """Angular disc rule suited to ``G``: Cayley images peak at w = 1."""
    while isinstance(G, Scaled):
        G = G.source
    if isinstance(G, Transferred) and G.source.domain == HALFPLANE:
        return "tanh-sinh"
    return "trapezoid"


def quadrature_norm_squared(F: TrialFunction, tol: Tolerance | None = None) -> float:
    """||F||^2 by direct quadrature of |F|^2 (no closed form used)."""
    tol = tol or Tolerance(relative=1e-10)
    if F.domain == HALFPLANE:
        res = integrate_halfplane(lambda x, y: np.exp(2.0 * F.log_abs(x + 1j * y)), tol)
    else:
        res = integrate_disc(
            lambda r, t: np.exp(2.0 * F.log_abs(r * np.exp(1j * t))), tol, angular=angular_rule(F)
        )
    return res.value


# --- plain-text serialization -------------------------------------------------


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _items(F: TrialFunction, prefix=""):
    if isinstance(F, KernelPower):
        yield prefix + "variant", "KernelPower"
        yield prefix + "p", _fmt(F.p)
        yield prefix + "z0", f"{_fmt(F.z0.real)} {_fmt(F.z0.imag)}"
    elif isinstance(F, PWCombination):
        yield prefix + "variant", "PWCombination"
        yield prefix + "terms", "; ".join(
            f"{_fmt(c.real)} {_fmt(c.imag)} {_fmt(a)} {_fmt(b)}" for c, a, b in F.terms
        )
    elif isinstance(F, DiscPolynomial):
        yield prefix + "variant", "DiscPolynomial"
        yield prefix + "coeffs", "; ".join(f"{_fmt(c.real)} {_fmt(c.imag)}" for c in F.coeffs)
    elif isinstance(F, DiscKernelPower):
        yield prefix + "variant", "DiscKernelPower"
        yield prefix + "p", _fmt(F.p)
        yield prefix + "xi", f"{_fmt(F.xi.real)} {_fmt(F.xi.imag)}"
    elif isinstance(F, Transferred):
        yield prefix + "variant", "Transferred"
        yield from _items(F.source, prefix + "source.")
    elif isinstance(F, Scaled):
        yield prefix + "variant", "Scaled"
        yield prefix + "factor", f"{_fmt(F.factor.real)} {_fmt(F.factor.imag)}"
        yield from _items(F.source, prefix + "source.")
    else:
        raise TypeError(f"cannot serialize {type(F).__name__}")


def to_mapping(F: TrialFunction) -> dict:
    """Flat ``{key: text}`` form, the inverse of :func:`trial_from_mapping`."""
    return dict(_items(F))


def to_text(F: TrialFunction) -> str:
    """``key = value`` lines; floats carry 17 significant digits."""
    return "".join(f"{k} = {v}\n" for k, v in _items(F))


def _complex(text):
    re, im = text.split()
    return complex(float(re), float(im))


def trial_from_mapping(data: dict, prefix: str = "") -> TrialFunction:
    try:
        variant = data[prefix + "variant"]
        if variant == "KernelPower":
            return KernelPower(float(data[prefix + "p"]), _complex(data[prefix + "z0"]))
        if variant == "PWCombination":
            terms = []
            for chunk in data[prefix + "terms"].split(";"):
                cr, ci, a, b = (float(v) for v in chunk.split())
                terms.append((complex(cr, ci), a, b))
            return PWCombination(tuple(terms))
        if variant == "DiscPolynomial":
            return DiscPolynomial(tuple(_complex(c) for c in data[prefix + "coeffs"].split(";")))
        if variant == "DiscKernelPower":
            return DiscKernelPower(float(data[prefix + "p"]), _complex(data[prefix + "xi"]))
        if variant == "Transferred":
            return Transferred(trial_from_mapping(data, prefix + "source."))
        if variant == "Scaled":
            return Scaled(
                trial_from_mapping(data, prefix + "source."), _complex(data[prefix + "factor"])
            )
    except KeyError as exc:
        raise ValueError(f"missing field {exc.args[0]!r}") from None
    raise ValueError(f"unknown variant {variant!r}")


def from_text(text: str) -> TrialFunction:
    data = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        data[key] = value
    return trial_from_mapping(data)


# --- seeded random families ---------------------------------------------------


def _unit_complex(rng, n):
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return v / np.linalg.norm(v)


def random_trial(family: str, rng: np.random.Generator) -> TrialFunction:
    """Draw one trial function with parameters of order one.

    ``family`` is ``"pw"`` (2-3 term PW combination), ``"kernel"`` (kernel
    power with p in (1.3, 4)), ``"disc_poly"`` (degree 1-4 polynomial) or
    ``"disc_kernel"`` (p in (1.3, 4), |xi| < 0.6).
    """
    if family == "pw":
        n = int(rng.integers(2, 4))
        c = _unit_complex(rng, n)
        a = rng.uniform(0.3, 2.5, size=n)
        b = rng.uniform(0.5, 2.0, size=n)
        return PWCombination(tuple(zip(c, a, b)))
    if family == "kernel":
        z0 = complex(rng.uniform(-1.0, 1.0), rng.uniform(0.5, 2.0))
        return KernelPower(float(rng.uniform(1.3, 4.0)), z0)
    if family == "disc_poly":
        deg = int(rng.integers(1, 5))
        return DiscPolynomial(tuple(_unit_complex(rng, deg + 1)))
    if family == "disc_kernel":
        xi = 0.6 * math.sqrt(rng.uniform()) * np.exp(2j * math.pi * rng.uniform())
        return DiscKernelPower(float(rng.uniform(1.3, 4.0)), complex(xi))
    raise ValueError(f"unknown family {family!r}")
