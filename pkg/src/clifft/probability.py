"""Clifford-valued probability densities and their characteristic functions.

A Clifford density assigns one real density to each blade it uses,

    f_X(x) = sum_S e_S f_S(x),

and its characteristic function is the Clifford Fourier transform
``phi_X(t) = integral f_X(x) exp(mu t x) dx``. Each blade term
``phi_S(t)`` lies in the commutative plane spanned by 1 and mu, so the
per-blade closed forms are evaluated with Python complex numbers and then
embedded via ``i -> mu``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np
from numpy.polynomial import hermite
from scipy import integrate, special

from .algebra import (
    ImaginaryUnit,
    Multivector,
    Signature,
    SignatureMismatch,
    gp,
    gp_array,
    modulus,
)
from .transform import (
    AliasingWarning,
    SampledSignal,
    Spectrum,
    TransformPlan,
    cft_forward,
    cft_inverse,
    frequency_grid,
    tail_energy_fraction,
)

MASS_TOL = 1e-9
ANALYTIC_STEP = 1e-2
EXP_WINDOW = 40.0
CDF_END_TOL = 1e-6


class InvalidDensity(ValueError):
    pass


class DivergentTailWarning(UserWarning):
    pass


# -- per-blade densities ---------------------------------------------------


def _uniform_power_integrals(alpha: float, beta: float, k: int, t: np.ndarray) -> np.ndarray:
    """``integral_alpha^beta (i x)^k exp(i x t) dx`` for each t."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    scale = max(abs(alpha), abs(beta))
    small = np.abs(t) * scale < 2.0
    if np.any(small):
        ts = t[small]
        acc = np.zeros(ts.shape, dtype=complex)
        term = np.ones(ts.shape, dtype=complex)
        for j in range(60):
            p = k + j + 1
            acc += term * (beta**p - alpha**p) / p
            term = term * (1j * ts) / (j + 1)
        out[small] = (1j**k) * acc
    if np.any(~small):
        tl = t[~small]
        eb, ea = np.exp(1j * beta * tl), np.exp(1j * alpha * tl)
        plain = (eb - ea) / (1j * tl)
        for m in range(1, k + 1):
            plain = (beta**m * eb - alpha**m * ea) / (1j * tl) - m / (1j * tl) * plain
        out[~small] = (1j**k) * plain
    return out


@dataclass(frozen=True)
class Uniform:
    """Indicator of ``[alpha, beta]``; unit mass only when ``beta - alpha == 1``."""

    alpha: float
    beta: float
    kind: str = field(default="uniform", init=False)

    def __post_init__(self):
        if not self.beta > self.alpha:
            raise InvalidDensity(f"uniform needs beta > alpha, got [{self.alpha}, {self.beta}]")

    @property
    def mass(self) -> float:
        return self.beta - self.alpha

    def pdf(self, x):
        # Jump points take the mean of the one-sided limits.
        x = np.asarray(x, dtype=float)
        inside = ((x > self.alpha) & (x < self.beta)).astype(float)
        return inside + 0.5 * ((x == self.alpha) | (x == self.beta))

    def cdf(self, x):
        return np.clip(np.asarray(x, dtype=float) - self.alpha, 0.0, self.mass)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        w, c = self.beta - self.alpha, 0.5 * (self.beta + self.alpha)
        safe = np.where(t == 0, 1.0, t)
        val = np.where(t == 0, w, 2.0 / safe * np.sin(w * safe / 2.0))
        return val * np.exp(1j * c * t)

    def cf_derivative(self, t, order: int):
        if order == 0:
            return self.cf(t)
        return _uniform_power_integrals(self.alpha, self.beta, order, np.asarray(t, dtype=float))

    def moment(self, ell: int) -> float:
        p = ell + 1
        return (self.beta**p - self.alpha**p) / p

    def support(self) -> tuple[float, float]:
        return self.alpha, self.beta

    def log_pdf_derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))


@dataclass(frozen=True)
class Gaussian:
    """``sqrt(lam / pi) exp(-lam x**2)``."""

    lam: float
    kind: str = field(default="gaussian", init=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidDensity(f"gaussian needs lambda > 0, got {self.lam}")

    mass = 1.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return math.sqrt(self.lam / math.pi) * np.exp(-self.lam * x**2)

    def cdf(self, x):
        return 0.5 * (1.0 + special.erf(math.sqrt(self.lam) * np.asarray(x, dtype=float)))

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-(t**2) / (4.0 * self.lam)) + 0j

    def cf_derivative(self, t, order: int):
        # d^k/dt^k exp(-a t^2) = (-sqrt a)^k H_k(sqrt a t) exp(-a t^2), physicists' Hermite.
        t = np.asarray(t, dtype=float)
        ra = math.sqrt(1.0 / (4.0 * self.lam))
        coef = np.zeros(order + 1)
        coef[order] = 1.0
        return ((-ra) ** order * hermite.hermval(ra * t, coef) * np.exp(-((ra * t) ** 2))) + 0j

    def moment(self, ell: int) -> float:
        if ell % 2:
            return 0.0
        return math.prod(range(ell - 1, 0, -2)) / (2.0 * self.lam) ** (ell // 2)

    def support(self) -> tuple[float, float]:
        r = math.sqrt(EXP_WINDOW / self.lam)
        return -r, r

    def log_pdf_derivative(self, x):
        return -2.0 * self.lam * np.asarray(x, dtype=float)


@dataclass(frozen=True)
class Exponential:
    """``lam exp(-lam x)`` on ``[0, inf)``."""

    lam: float
    kind: str = field(default="exponential", init=False)

    def __post_init__(self):
        if not self.lam > 0:
            raise InvalidDensity(f"exponential needs lambda > 0, got {self.lam}")

    mass = 1.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x > 0, self.lam * np.exp(-self.lam * np.maximum(x, 0.0)), 0.0)
        return np.where(x == 0, 0.5 * self.lam, out)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x > 0, -np.expm1(-self.lam * np.maximum(x, 0.0)), 0.0)

    def cf(self, t):
        t = np.asarray(t, dtype=float)
        return self.lam * (self.lam + 1j * t) / (self.lam**2 + t**2)

    def cf_derivative(self, t, order: int):
        t = np.asarray(t, dtype=float)
        return self.lam * math.factorial(order) * (1j**order) / (self.lam - 1j * t) ** (order + 1)

    def moment(self, ell: int) -> float:
        return math.factorial(ell) / self.lam**ell

    def support(self) -> tuple[float, float]:
        return 0.0, EXP_WINDOW / self.lam

    def log_pdf_derivative(self, x):
        return np.full(np.shape(x), -self.lam, dtype=float)


@dataclass(frozen=True)
class SmoothedUniform:
    """Indicator of ``[alpha, beta]`` convolved with a centered normal of std ``sigma``."""

    alpha: float
    beta: float
    sigma: float
    kind: str = field(default="smoothed_uniform", init=False)

    def __post_init__(self):
        if not self.beta > self.alpha:
            raise InvalidDensity(f"smoothed uniform needs beta > alpha, got [{self.alpha}, {self.beta}]")
        if not self.sigma > 0:
            raise InvalidDensity(f"smoothing width must be positive, got {self.sigma}")

    @property
    def mass(self) -> float:
        return self.beta - self.alpha

    @property
    def _parts(self):
        return Uniform(self.alpha, self.beta), Gaussian(1.0 / (2.0 * self.sigma**2))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        s = self.sigma
        return special.ndtr((x - self.alpha) / s) - special.ndtr((x - self.beta) / s)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        s = self.sigma

        def prim(u):
            # integral of ndtr(u/s) du
            return u * special.ndtr(u / s) + s * np.exp(-0.5 * (u / s) ** 2) / math.sqrt(2 * math.pi)

        return prim(x - self.alpha) - prim(x - self.beta)

    def cf(self, t):
        u, g = self._parts
        return u.cf(t) * g.cf(t)

    def cf_derivative(self, t, order: int):
        u, g = self._parts
        return sum(
            math.comb(order, j) * u.cf_derivative(t, j) * g.cf_derivative(t, order - j) for j in range(order + 1)
        )

    def moment(self, ell: int) -> float:
        u, g = self._parts
        return sum(math.comb(ell, k) * u.moment(k) * g.moment(ell - k) for k in range(ell + 1))

    def support(self) -> tuple[float, float]:
        return self.alpha - 9.0 * self.sigma, self.beta + 9.0 * self.sigma

    def log_pdf_derivative(self, x):
        x = np.asarray(x, dtype=float)
        s = self.sigma
        a, b = (x - self.alpha) / s, (x - self.beta) / s
        # f'/f in log space; right of centre use ndtr(-b) - ndtr(-a) to avoid cancellation.
        hi, lo = np.where(b > 0, -b, a), np.where(b > 0, -a, b)
        log_f = special.log_ndtr(hi) + np.log1p(-np.exp(special.log_ndtr(lo) - special.log_ndtr(hi)))
        log_pa = -0.5 * a**2 - 0.5 * math.log(2 * math.pi)
        log_pb = -0.5 * b**2 - 0.5 * math.log(2 * math.pi)
        return (np.exp(log_pa - log_f) - np.exp(log_pb - log_f)) / s


@dataclass(frozen=True, eq=False)
class Sampled:
    """Tabulated density on ``x0 + j * dx``; zero outside the table."""

    x0: float
    dx: float
    values: np.ndarray
    kind: str = field(default="sampled", init=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) < 2:
            raise InvalidDensity("sampled density needs a 1-D table of at least two values")
        if not self.dx > 0:
            raise InvalidDensity(f"grid step must be positive, got {self.dx}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(len(self.values))

    @property
    def mass(self) -> float:
        return float(np.trapezoid(self.values, dx=self.dx))

    def pdf(self, x):
        return np.interp(np.asarray(x, dtype=float), self.x, self.values, left=0.0, right=0.0)

    def cdf(self, x):
        cum = integrate.cumulative_trapezoid(self.values, dx=self.dx, initial=0.0)
        return np.interp(np.asarray(x, dtype=float), self.x, cum, left=0.0, right=cum[-1])

    def cf_derivative(self, t, order: int):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = self.x
        weights = self.values * (1j * x) ** order * self.dx
        return np.exp(1j * np.multiply.outer(t, x)) @ weights

    def cf(self, t):
        return self.cf_derivative(t, 0)

    def moment(self, ell: int) -> float:
        return float(np.trapezoid(self.x**ell * self.values, dx=self.dx))

    def support(self) -> tuple[float, float]:
        return self.x0, self.x0 + self.dx * (len(self.values) - 1)

    def log_pdf_derivative(self, x):
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.gradient(np.log(self.values), self.dx)
        return np.interp(np.asarray(x, dtype=float), self.x, d)


BladeDensity = Uniform | Gaussian | Exponential | SmoothedUniform | Sampled
ANALYTIC_KINDS = (Uniform, Gaussian, Exponential, SmoothedUniform)


@dataclass(frozen=True, eq=False)
class CliffordDensity:
    """Per-blade real densities keyed by blade bitmask."""

    signature: Signature
    components: Mapping[int, BladeDensity]

    def __post_init__(self):
        comps = dict(sorted((int(k), v) for k, v in self.components.items()))
        for blade in comps:
            if not 0 <= blade < self.signature.size:
                raise InvalidDensity(f"blade {blade} out of range for {self.signature}")
        object.__setattr__(self, "components", comps)

    @classmethod
    def uniform_blades(cls, signature: Signature, blades, component: BladeDensity) -> CliffordDensity:
        return cls(signature, {b: component for b in blades})

    @property
    def is_analytic(self) -> bool:
        return all(isinstance(c, ANALYTIC_KINDS) for c in self.components.values())

    def blade_sum(self) -> Multivector:
        """``sum_S e_S`` over the blades carrying a density."""
        c = np.zeros(self.signature.size)
        for b in self.components:
            c[b] = 1.0
        return Multivector(self.signature, c)

    def pdf(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.zeros((len(x), self.signature.size))
        for b, comp in self.components.items():
            out[:, b] = comp.pdf(x)
        return out

    def support(self) -> tuple[float, float]:
        if not self.components:
            return -1.0, 1.0
        lo = min(c.support()[0] for c in self.components.values())
        hi = max(c.support()[1] for c in self.components.values())
        return lo, hi

    def to_signal(self, n: int, half_width: float) -> SampledSignal:
        return SampledSignal.from_function(self.signature, self.pdf, n, half_width)


@dataclass(frozen=True)
class BladeCheck:
    blade: int
    integral: float
    minimum: float
    passed: bool


@dataclass(frozen=True)
class DensityReport:
    checks: tuple[BladeCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[BladeCheck]:
        return [c for c in self.checks if not c.passed]


def validate_density(d: CliffordDensity, tol: float = MASS_TOL) -> DensityReport:
    """Check unit mass and nonnegativity blade by blade."""
    checks = []
    for blade, comp in d.components.items():
        if isinstance(comp, Sampled):
            integral = comp.mass
            minimum = float(np.min(comp.values))
        else:
            integral = float(comp.mass)
            minimum = 0.0
        ok = abs(integral - 1.0) <= tol and minimum >= 0.0
        checks.append(BladeCheck(blade, integral, minimum, ok))
    return DensityReport(tuple(checks))


def require_valid(d: CliffordDensity, unnormalized: bool = False) -> None:
    """Raise :class:`InvalidDensity` unless every blade is a unit-mass density.

    ``unnormalized=True`` keeps only the nonnegativity requirement, which lets
    indicator densities of any width through.
    """
    report = validate_density(d)
    for c in report.checks:
        if c.minimum < 0:
            raise InvalidDensity(f"blade {c.blade} takes negative values (min {c.minimum:.3g})")
        if not unnormalized and not c.passed:
            raise InvalidDensity(f"blade {c.blade} integrates to {c.integral:.12g}, not 1")


# -- characteristic functions ----------------------------------------------


@dataclass(frozen=True, eq=False)
class CharacteristicFunction:
    """``phi_X`` either in closed form (``density``) or tabulated (``spectrum``)."""

    mu: ImaginaryUnit
    density: CliffordDensity | None = None
    spectrum: Spectrum | None = None

    def __post_init__(self):
        if (self.density is None) == (self.spectrum is None):
            raise ValueError("give exactly one of density or spectrum")
        sig = self.signature
        if self.mu.signature != sig:
            raise SignatureMismatch(f"mu lives in {self.mu.signature}, density in {sig}")

    @property
    def signature(self) -> Signature:
        return self.density.signature if self.density is not None else self.spectrum.signature

    @property
    def form(self) -> Literal["analytic", "gridded"]:
        return "analytic" if self.density is not None else "gridded"

    def blade_values(self, t, order: int = 0) -> dict[int, np.ndarray]:
        """Complex ``d^order phi_S / dt^order`` per blade (closed form only)."""
        if self.density is None:
            raise ValueError("per-blade derivatives need a closed-form characteristic function")
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return {b: np.asarray(c.cf_derivative(t, order), dtype=complex) for b, c in self.density.components.items()}

    def derivative(self, t, order: int) -> np.ndarray:
        """Coefficients of ``d^order phi / dt^order`` at each ``t``; shape ``(len(t), 2**n)``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        sig = self.signature
        right = self.mu.right_matrix()
        out = np.zeros((len(t), sig.size))
        for b, z in self.blade_values(t, order).items():
            out[:, b] += z.real
            out += np.multiply.outer(z.imag, right[b])
        return out

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.density is not None:
            return self.derivative(t, 0)
        idx = np.rint((t - self.spectrum.xi0) / self.spectrum.dxi).astype(int)
        on_grid = (idx >= 0) & (idx < self.spectrum.n)
        on_grid &= np.isclose(self.spectrum.xi0 + idx * self.spectrum.dxi, t, rtol=0, atol=1e-9 * self.spectrum.dxi)
        if not np.all(on_grid):
            raise ValueError("tabulated characteristic function evaluated off its grid")
        return self.spectrum.values[idx]

    def at(self, t: float) -> Multivector:
        return Multivector(self.signature, self(np.array([t]))[0])


def characteristic_function(
    d: CliffordDensity,
    mu: ImaginaryUnit | Multivector,
    n: int | None = None,
    half_width: float | None = None,
) -> CharacteristicFunction:
    """Characteristic function of ``d``.

    Closed forms are used when every blade is an analytic family and no grid is
    requested. Otherwise the density is sampled on ``[-half_width, half_width)``
    with ``n`` points and pushed through :func:`cft_forward`.
    """
    if not isinstance(mu, ImaginaryUnit):
        mu = ImaginaryUnit(mu)
    if mu.signature != d.signature:
        raise SignatureMismatch(f"mu lives in {mu.signature}, density in {d.signature}")
    if n is None and d.is_analytic:
        return CharacteristicFunction(mu, density=d)
    n = 1024 if n is None else n
    if half_width is None:
        lo, hi = d.support()
        half_width = max(16.0, abs(lo), abs(hi))
    spec = cft_forward(d.to_signal(n, half_width), TransformPlan(mu))
    return CharacteristicFunction(mu, spectrum=spec)


@dataclass(frozen=True)
class MomentResult:
    order: int
    value: Multivector
    method: Literal["direct", "cf-derivative"]

    def blade(self, bitmask: int) -> float:
        return float(self.value.coeffs[bitmask])


def moment_direct(d: CliffordDensity, ell: int) -> MomentResult:
    """``m_ell = sum_S e_S integral x**ell f_S(x) dx``; closed forms where known."""
    if ell < 0:
        raise ValueError("moment order must be nonnegative")
    c = np.zeros(d.signature.size)
    for blade, comp in d.components.items():
        c[blade] = comp.moment(ell)
        if isinstance(comp, Sampled):
            _check_tail(comp, ell, c[blade])
    return MomentResult(ell, Multivector(d.signature, c), "direct")


def _check_tail(comp: Sampled, ell: int, estimate: float):
    x, v = comp.x, comp.values
    integrand = np.abs(x**ell * v)
    edge = max(1, len(x) // 20)
    tail = float(np.trapezoid(integrand[:edge], dx=comp.dx) + np.trapezoid(integrand[-edge:], dx=comp.dx))
    scale = max(abs(estimate), float(np.trapezoid(integrand, dx=comp.dx)))
    if scale > 0 and tail > 1e-8 * scale:
        warnings.warn(
            f"order-{ell} moment integrand carries {tail / scale:.2e} of its mass in the window edges",
            DivergentTailWarning,
            stacklevel=3,
        )


_STENCILS = {
    0: (np.array([0, 0, 1, 0, 0], dtype=float), 0),
    1: (np.array([1, -8, 0, 8, -1], dtype=float) / 12.0, 1),
    2: (np.array([-1, 16, -30, 16, -1], dtype=float) / 12.0, 2),
    3: (np.array([-1, 2, 0, -2, 1], dtype=float) / 2.0, 3),
    4: (np.array([1, -4, 6, -4, 1], dtype=float), 4),
}


def neg_mu_power(mu: ImaginaryUnit, ell: int) -> Multivector:
    sig = mu.signature
    out = Multivector.scalar(sig, 1.0)
    neg = -mu.value
    for _ in range(ell):
        out = gp(out, neg)
    return out


def cf_stencil_derivative(phi: CharacteristicFunction, ell: int, h: float | None = None) -> np.ndarray:
    """Five-point central estimate of ``d^ell phi / dt^ell`` at 0 (coefficients)."""
    if ell not in _STENCILS:
        raise ValueError(f"derivative order must be in 0..4, got {ell}")
    if h is None:
        if phi.form == "analytic":
            h = ANALYTIC_STEP
        else:
            spec = phi.spectrum
            k0 = -spec.xi0 / spec.dxi
            if not (0 <= k0 < spec.n and abs(k0 - round(k0)) < 1e-9):
                raise ValueError("tabulated characteristic function grid does not contain t = 0")
            h = 2.0 * spec.dxi
    weights, power = _STENCILS[ell]
    vals = phi(h * np.arange(-2, 3))
    return weights @ vals / h**power


def moment_from_cf(phi: CharacteristicFunction, ell: int, h: float | None = None) -> MomentResult:
    """``m_ell = phi^(ell)(0) (-mu)**ell`` with a five-point stencil at ``t = 0``."""
    deriv = Multivector(phi.signature, cf_stencil_derivative(phi, ell, h))
    return MomentResult(ell, gp(deriv, neg_mu_power(phi.mu, ell)), "cf-derivative")


def variance(d: CliffordDensity) -> Multivector:
    """``m_2 - m_1 m_1`` with the geometric square."""
    m1 = moment_direct(d, 1).value
    m2 = moment_direct(d, 2).value
    return m2 - gp(m1, m1)


def variance_from_cf(phi: CharacteristicFunction, h: float | None = None) -> Multivector:
    m1 = moment_from_cf(phi, 1, h).value
    m2 = moment_from_cf(phi, 2, h).value
    return m2 - gp(m1, m1)


def variance_cf_shortcut(phi: CharacteristicFunction, h: float | None = None) -> Multivector:
    """``phi'(0)**2 - phi''(0)``.

    Equals :func:`variance_from_cf` only when ``phi'(0)`` commutes with mu,
    e.g. a single scalar blade; kept as a cross-check.
    """
    d1 = Multivector(phi.signature, cf_stencil_derivative(phi, 1, h))
    d2 = Multivector(phi.signature, cf_stencil_derivative(phi, 2, h))
    return gp(d1, d1) - d2


def blade_variance(d: CliffordDensity) -> Multivector:
    """``sum_S e_S ((m_2)_S - (m_1)_S**2)``, the variance of each blade on its own."""
    m1 = moment_direct(d, 1).value.coeffs
    m2 = moment_direct(d, 2).value.coeffs
    return Multivector(d.signature, m2 - m1**2)


def moment_modulus(m: MomentResult) -> float:
    """Squared modulus ``|m_ell|**2 = sum_S (m_ell)_S**2``."""
    return float(np.sum(np.asarray(m.value.coeffs, dtype=float) ** 2))


# -- distribution functions ------------------------------------------------


@dataclass(frozen=True, eq=False)
class CliffordCDF:
    signature: Signature
    x: np.ndarray
    values: np.ndarray

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.stack([np.interp(x, self.x, self.values[:, b]) for b in range(self.signature.size)], axis=-1)

    def derivative(self) -> np.ndarray:
        """Central-difference density estimate on the grid."""
        return np.gradient(self.values, self.x, axis=0)


class InsufficientSupport(ValueError):
    pass


def cdf_build(d: CliffordDensity, grid, unnormalized: bool = False) -> CliffordCDF:
    """Per-blade distribution function on ``grid``.

    Analytic families use their exact primitives; tabulated blades are
    integrated with the cumulative trapezoid rule.
    """
    x = np.asarray(grid, dtype=float)
    if x.ndim != 1 or len(x) < 2 or np.any(np.diff(x) <= 0):
        raise ValueError("grid must be strictly increasing with at least two points")
    out = np.zeros((len(x), d.signature.size))
    for blade, comp in d.components.items():
        if isinstance(comp, Sampled):
            out[:, blade] = integrate.cumulative_trapezoid(comp.pdf(x), x, initial=0.0)
        else:
            out[:, blade] = comp.cdf(x)
        lo, hi = out[0, blade], out[-1, blade]
        target = comp.mass if unnormalized else 1.0
        if abs(lo) > CDF_END_TOL or abs(hi - target) > CDF_END_TOL:
            raise InsufficientSupport(
                f"blade {blade}: grid [{x[0]}, {x[-1]}] captures mass {hi - lo:.9g}, endpoints {lo:.3g}, {hi:.9g}"
            )
    return CliffordCDF(d.signature, x, out)


def density_from_cf(
    phi: CharacteristicFunction,
    n: int = 1024,
    half_width: float = 16.0,
    tail_tol: float = 1e-12,
) -> CliffordDensity:
    """Invert ``phi`` back to tabulated blade densities.

    Closed-form characteristic functions are first tabulated on the frequency
    grid reciprocal to ``[-half_width, half_width)`` with ``n`` points.
    """
    sig = phi.signature
    if phi.form == "gridded":
        spec = phi.spectrum
    else:
        dx = 2.0 * half_width / n
        xi = frequency_grid(n, dx)
        spec = Spectrum(sig, float(xi[0]), float(xi[1] - xi[0]), phi(xi), x0=-half_width)
    frac = tail_energy_fraction(spec)
    if frac > tail_tol:
        warnings.warn(
            f"characteristic function keeps {frac:.3e} of its energy at the grid edge; inversion will ring",
            AliasingWarning,
            stacklevel=2,
        )
    f = cft_inverse(spec, TransformPlan(phi.mu, direction="inverse"))
    if phi.density is not None:
        blades = list(phi.density.components)
    else:
        peak = float(np.max(np.abs(f.values))) if f.values.size else 0.0
        blades = [b for b in range(sig.size) if peak > 0 and np.max(np.abs(f.values[:, b])) > 1e-9 * peak]
    return CliffordDensity(sig, {b: Sampled(f.x0, f.dx, f.values[:, b]) for b in blades})


def cf_pair_sides(
    f: CliffordDensity,
    g: CliffordDensity,
    mu: ImaginaryUnit | Multivector,
    y: float,
    n: int = 2048,
    half_width: float = 16.0,
) -> tuple[Multivector, Multivector]:
    """Both sides of the characteristic-function pairing identity at ``y``.

    left:  integral g(t) phi_f(t) exp(-mu t y) dt
    right: sum_S e_S integral f(x) psi_S(x - y) dx,   psi_S = CF of g_S

    Each side is a Riemann sum on ``[-half_width, half_width)``; the left uses
    the characteristic function of ``f`` and samples of ``g``, the right uses
    samples of ``f`` and the characteristic functions of the blades of ``g``.
    """
    if not isinstance(mu, ImaginaryUnit):
        mu = ImaginaryUnit(mu)
    if f.signature != g.signature:
        raise SignatureMismatch(f"{f.signature} vs {g.signature}")
    sig = f.signature
    h = 2.0 * half_width / n
    grid = -half_width + h * np.arange(n)

    phi_f = characteristic_function(f, mu) if f.is_analytic else None
    if phi_f is None:
        phi_vals = np.zeros((n, sig.size))
        right = mu.right_matrix()
        for b, comp in f.components.items():
            z = comp.cf(grid)
            phi_vals[:, b] += z.real
            phi_vals += np.multiply.outer(z.imag, right[b])
    else:
        phi_vals = phi_f(grid)
    g_vals = g.pdf(grid)
    integrand = gp_array(sig, gp_array(sig, g_vals, phi_vals), mu.exp(-grid * y))
    left = h * integrand.sum(axis=0)

    f_vals = f.pdf(grid)
    right_total = np.zeros(sig.size)
    for b, comp in g.components.items():
        psi = mu.embed(comp.cf(grid - y))
        inner = h * gp_array(sig, f_vals, psi).sum(axis=0)
        right_total += gp_array(sig, Multivector.blade(sig, b, 1.0).coeffs.astype(float), inner)
    return Multivector(sig, left), Multivector(sig, right_total)


def cf_pair_identity_defect(f: CliffordDensity, g: CliffordDensity, mu, y: float, **grid) -> float:
    left, right = cf_pair_sides(f, g, mu, y, **grid)
    return modulus(left - right)


# -- uncertainty -----------------------------------------------------------


@dataclass(frozen=True)
class UncertaintyCheck:
    blade: int
    window: tuple[float, float]
    log_derivative_norm_sq: float
    xi_cf_norm_sq: float
    second_moment: float

    @property
    def product(self) -> float:
        return self.log_derivative_norm_sq * self.xi_cf_norm_sq * self.second_moment

    @property
    def product_unsquared(self) -> float:
        return math.sqrt(self.log_derivative_norm_sq * self.xi_cf_norm_sq) * self.second_moment

    @property
    def holds(self) -> bool:
        return self.product >= 1.0


def uncertainty_check(
    d: CliffordDensity,
    mu: ImaginaryUnit | Multivector,
    blade: int,
    n: int = 4096,
    half_width: float = 16.0,
    floor: float = 1e-10,
) -> UncertaintyCheck:
    """Evaluate ``||d/dx ln f_S||^2 ||xi phi_S||^2 (m_2)_S`` for one blade.

    The log-derivative norm diverges on the real line for most families, so
    it is taken over the truncation window where ``f_S >= floor * max f_S``.
    The frequency norm uses the tabulated transform of the sampled blade.
    """
    if not isinstance(mu, ImaginaryUnit):
        mu = ImaginaryUnit(mu)
    comp = d.components[blade]
    dx = 2.0 * half_width / n
    x = -half_width + dx * np.arange(n)
    fx = comp.pdf(x)
    keep = fx >= floor * np.max(fx)
    window = (float(x[keep][0]), float(x[keep][-1]))
    dlog = comp.log_pdf_derivative(x[keep])
    log_norm = float(dx * np.sum(dlog**2))

    spec = cft_forward(SampledSignal.scalar(d.signature, -half_width, dx, fx), TransformPlan(mu))
    xi = spec.xi_values
    xi_norm = float(spec.dxi * np.sum(xi**2 * np.sum(spec.values**2, axis=1)))
    return UncertaintyCheck(blade, window, log_norm, xi_norm, float(comp.moment(2)))
