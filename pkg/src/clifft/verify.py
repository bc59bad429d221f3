"""Identity-defect harness.

Every identity is measured by evaluating its two sides along separate code
paths on seeded random inputs, and reducing the discrepancy to one number:
a relative defect for equalities, a one-sided normalized violation for
inequalities.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .algebra import (
    ImaginaryUnit,
    Multivector,
    Signature,
    default_mu,
    format_multivector,
    gp_array,
)
from .probability import (
    CliffordDensity,
    Exponential,
    Gaussian,
    SmoothedUniform,
    Uniform,
    characteristic_function,
    moment_direct,
    moment_from_cf,
    uncertainty_check,
)
from .transform import (
    BAND_LIMIT_TOL,
    SampledSignal,
    TransformPlan,
    central_difference,
    cft_forward,
    cft_inverse,
    convolution_via_spectra,
    convolve_direct,
    pad_signal,
    signal_left_mul,
    tail_energy_fraction,
    translate_signal,
)

IDENTITIES = (
    "parseval",
    "inversion",
    "translation",
    "derivative",
    "convolution",
    "nagy",
    "uncertainty",
    "submultiplicativity",
    "riemann_lebesgue",
    "linearity",
    "cf_moments",
)

TOLERANCES = {
    "linearity": 1e-12,
    "submultiplicativity": 1e-12,
    "parseval": 1e-6,
    "inversion": 1e-6,
    "translation": 1e-6,
    "derivative": 1e-6,
    "nagy": 1e-6,
    "uncertainty": 1e-6,
    "riemann_lebesgue": 1e-6,
    "convolution": 1e-4,
    "cf_moments": 1e-4,
}

DECAY_FRACTION = 0.05


class UnknownIdentity(ValueError):
    pass


@dataclass(frozen=True)
class VerifyConfig:
    signature: Signature = Signature(3, 0)
    mu: Multivector | None = None
    n: int = 1024
    half_width: float = 16.0
    seed: int = 7
    tol: float | None = None
    signals: int = 20
    pairs: int = 1000

    def __post_init__(self):
        mu = default_mu(self.signature) if self.mu is None else self.mu
        object.__setattr__(self, "mu", mu)
        ImaginaryUnit(mu)

    @property
    def unit(self) -> ImaginaryUnit:
        return ImaginaryUnit(self.mu)

    def digest(self) -> dict:
        return {
            "signature": [self.signature.p, self.signature.q],
            "mu": format_multivector(self.mu),
            "N": self.n,
            "L": self.half_width,
            "seed": self.seed,
        }

    def tolerance(self, ident: str) -> float:
        return TOLERANCES[ident] if self.tol is None else self.tol


@dataclass
class IdentityReport:
    id: str
    defect: float | None
    tolerance: float
    passed: bool
    config: dict
    details: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        doc = {
            "id": self.id,
            "defect": self.defect,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "config": self.config,
        }
        if self.details:
            doc["details"] = self.details
        if self.warnings:
            doc["warnings"] = self.warnings
        return doc


# -- test signals ----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """``sum_i A_i exp(-((x - c_i) / w_i)**2)`` with multivector amplitudes ``A_i``."""

    signature: Signature
    centers: np.ndarray
    widths: np.ndarray
    amplitudes: np.ndarray

    @classmethod
    def random(cls, sig: Signature, half_width: float, rng: np.random.Generator, max_terms: int = 8):
        k = int(rng.integers(1, max_terms + 1))
        centers = rng.uniform(-half_width / 2, half_width / 2, k)
        widths = rng.uniform(0.3, 2.0, k)
        amps = rng.uniform(-1.0, 1.0, (k, sig.size))
        return cls(sig, centers, widths, amps)

    def _bumps(self, x):
        u = (np.asarray(x, dtype=float)[:, None] - self.centers) / self.widths
        return u, np.exp(-(u**2))

    def __call__(self, x) -> np.ndarray:
        _, b = self._bumps(x)
        return b @ self.amplitudes

    def derivative(self, x) -> np.ndarray:
        u, b = self._bumps(x)
        return (-2.0 * u / self.widths * b) @ self.amplitudes

    def sample(self, n: int, half_width: float) -> SampledSignal:
        return SampledSignal.from_function(self.signature, self, n, half_width)


def _rel(diff: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.sqrt(np.sum(ref**2, axis=-1)))) if ref.size else 0.0
    err = float(np.max(np.sqrt(np.sum(diff**2, axis=-1)))) if diff.size else 0.0
    if scale == 0.0:
        return 0.0 if err == 0.0 else math.inf
    return err / scale


def _violation(lhs: float, rhs: float) -> float:
    """One-sided normalized violation of ``lhs <= rhs``."""
    if lhs <= rhs:
        return 0.0
    return (lhs - rhs) / rhs if rhs > 0 else math.inf


def _signals(cfg: VerifyConfig, rng, count: int | None = None) -> list[GaussianMixture]:
    return [GaussianMixture.random(cfg.signature, cfg.half_width, rng) for _ in range(count or cfg.signals)]


# -- identity procedures ---------------------------------------------------


def _parseval(cfg: VerifyConfig, rng):
    plan = TransformPlan(cfg.unit)
    worst, literal = 0.0, 0.0
    for g in _signals(cfg, rng):
        f = g.sample(cfg.n, cfg.half_width)
        lhs = 2.0 * math.pi * f.l2_norm_sq()
        rhs = cft_forward(f, plan).l2_norm_sq()
        worst = max(worst, abs(lhs - rhs) / lhs)
        unsq = 2.0 * math.pi * math.sqrt(f.l2_norm_sq())
        literal = max(literal, abs(unsq - math.sqrt(rhs)) / unsq)
    return worst, {"literal_unsquared_defect": literal}


def _inversion(cfg: VerifyConfig, rng):
    fwd = TransformPlan(cfg.unit)
    inv = TransformPlan(cfg.unit, direction="inverse")
    worst, tail = 0.0, 0.0
    for g in _signals(cfg, rng):
        f = g.sample(cfg.n, cfg.half_width)
        spec = cft_forward(f, fwd)
        tail = max(tail, tail_energy_fraction(spec))
        back = cft_inverse(spec, inv)
        worst = max(worst, math.sqrt(np.sum((back.values - f.values) ** 2) / np.sum(f.values**2)))
    details = {"max_tail_energy_fraction": tail}
    if tail > BAND_LIMIT_TOL:
        details["_warnings"] = [
            f"aliased input: spectral tail holds {tail:.3e} of the energy (guard {BAND_LIMIT_TOL:g});"
            " round trip is exact on the grid but does not represent the continuous signal"
        ]
    return worst, details


def _translation(cfg: VerifyConfig, rng):
    plan = TransformPlan(cfg.unit)
    mu = cfg.unit
    worst, shifts = 0.0, []
    for g in _signals(cfg, rng):
        f = g.sample(cfg.n, cfg.half_width)
        steps = int(rng.integers(1, max(1, cfg.n // 128) + 1)) * int(rng.choice([-1, 1]))
        h = steps * f.dx
        shifts.append(h)
        lhs = cft_forward(translate_signal(f, h), plan)
        spec = cft_forward(f, plan)
        rhs = gp_array(f.signature, spec.values, mu.exp(-h * spec.xi_values))
        worst = max(worst, _rel(lhs.values - rhs, rhs))
    return worst, {"max_shift": max(abs(s) for s in shifts)}


def _derivative(cfg: VerifyConfig, rng):
    plan = TransformPlan(cfg.unit)
    mu = cfg.unit
    worst = 0.0
    for g in _signals(cfg, rng):
        f = g.sample(cfg.n, cfg.half_width)
        lhs = cft_forward(central_difference(f, order=8), plan)
        spec = cft_forward(f, plan)
        factor = -np.multiply.outer(spec.xi_values, mu.value.coeffs.astype(float))
        rhs = gp_array(f.signature, spec.values, factor)
        worst = max(worst, _rel(lhs.values - rhs, rhs))
    return worst, {"stencil_order": 8}


def _convolution(cfg: VerifyConfig, rng):
    mu = cfg.unit
    plan = TransformPlan(mu)
    worst = 0.0
    for _ in range(3):
        f = GaussianMixture.random(cfg.signature, cfg.half_width, rng).sample(cfg.n, cfg.half_width)
        g = GaussianMixture.random(cfg.signature, cfg.half_width, rng).sample(cfg.n, cfg.half_width)
        conv = convolve_direct(f, g)
        # 2N grid at the same dx: its even bins coincide with the N-point frequency grid.
        lhs = cft_forward(pad_signal(conv, 2 * cfg.n), plan).values[::2]
        rhs = convolution_via_spectra(f, g, mu).values
        worst = max(worst, _rel(lhs - rhs, lhs))
    return worst, {}


def nagy_sides(values: np.ndarray, derivative: np.ndarray, dx: float) -> tuple[float, float]:
    """``sup |f|^2`` and ``||f||_2 ||f'||_2`` from samples."""
    sup = float(np.max(np.sum(values**2, axis=-1))) if values.size else 0.0
    norm_f = math.sqrt(dx * float(np.sum(values**2)))
    norm_d = math.sqrt(dx * float(np.sum(derivative**2)))
    return sup, norm_f * norm_d


def _nagy(cfg: VerifyConfig, rng):
    worst, min_slack = 0.0, math.inf
    dx = 2.0 * cfg.half_width / cfg.n
    x = -cfg.half_width + dx * np.arange(cfg.n)
    for g in _signals(cfg, rng, count=100):
        lhs, rhs = nagy_sides(g(x), g.derivative(x), dx)
        worst = max(worst, _violation(lhs, rhs))
        if lhs > 0:
            min_slack = min(min_slack, rhs / lhs)
    zero_lhs, zero_rhs = nagy_sides(np.zeros((cfg.n, cfg.signature.size)), np.zeros((cfg.n, cfg.signature.size)), dx)
    worst = max(worst, _violation(zero_lhs, zero_rhs))
    ex = np.exp(-(x**2) / 2)
    _, witness = nagy_sides(ex[:, None], (-x * ex)[:, None], dx)
    return worst, {
        "min_rhs_over_lhs": min_slack,
        "gaussian_witness_bound": witness,
        "gaussian_witness_error": abs(witness - math.sqrt(math.pi / 2)),
    }


UNCERTAINTY_FAMILIES = (
    ("gaussian(0.25)", Gaussian(0.25)),
    ("gaussian(0.5)", Gaussian(0.5)),
    ("gaussian(1)", Gaussian(1.0)),
    ("gaussian(2)", Gaussian(2.0)),
    ("smoothed_uniform(-0.5,0.5,0.1)", SmoothedUniform(-0.5, 0.5, 0.1)),
    ("smoothed_uniform(-0.5,0.5,0.5)", SmoothedUniform(-0.5, 0.5, 0.5)),
    ("exponential(1)", Exponential(1.0)),
    ("exponential(2)", Exponential(2.0)),
)


def _uncertainty(cfg: VerifyConfig, rng):
    sig = cfg.signature
    blades = [0, sig.size - 1] if sig.size > 1 else [0]
    worst, rows = 0.0, {}
    for name, comp in UNCERTAINTY_FAMILIES:
        d = CliffordDensity(sig, {b: comp for b in blades})
        for b in blades:
            chk = uncertainty_check(d, cfg.unit, b, n=max(cfg.n, 4096), half_width=cfg.half_width)
            worst = max(worst, _violation(1.0, chk.product))
        rows[name] = {
            "product": chk.product,
            "product_unsquared": chk.product_unsquared,
            "window": list(chk.window),
        }
    return worst, {"families": rows}


def _submultiplicativity(cfg: VerifyConfig, rng):
    sig = cfg.signature
    a = rng.uniform(-1.0, 1.0, (cfg.pairs, sig.size))
    b = rng.uniform(-1.0, 1.0, (cfg.pairs, sig.size))
    prod = gp_array(sig, a, b)
    ratio = np.sqrt(np.sum(prod**2, axis=1)) / (np.sqrt(np.sum(a**2, axis=1)) * np.sqrt(np.sum(b**2, axis=1)))
    bound = float(2**sig.n)
    max_ratio = float(np.max(ratio))
    return _violation(max_ratio, bound), {"max_ratio": max_ratio, "bound": bound, "pairs": cfg.pairs}


def _riemann_lebesgue(cfg: VerifyConfig, rng):
    plan = TransformPlan(cfg.unit)
    worst, peak_share = 0.0, 0.0
    for g in _signals(cfg, rng):
        spec = cft_forward(g.sample(cfg.n, cfg.half_width), plan)
        mag = np.sqrt(np.sum(spec.values**2, axis=1))
        axi = np.abs(spec.xi_values)
        top = float(np.max(mag[axi >= np.quantile(axi, 0.9)]))
        peak = float(np.max(mag))
        peak_share = max(peak_share, top / peak)
        worst = max(worst, _violation(top, DECAY_FRACTION * peak))
    return worst, {"max_top_decile_share": peak_share, "threshold": DECAY_FRACTION}


def _linearity(cfg: VerifyConfig, rng):
    plan = TransformPlan(cfg.unit)
    sig = cfg.signature
    worst = 0.0
    for _ in range(5):
        f = GaussianMixture.random(sig, cfg.half_width, rng).sample(cfg.n, cfg.half_width)
        g = GaussianMixture.random(sig, cfg.half_width, rng).sample(cfg.n, cfg.half_width)
        c = Multivector(sig, rng.uniform(-1, 1, sig.size))
        d = Multivector(sig, rng.uniform(-1, 1, sig.size))
        combo = signal_left_mul(c, f)
        combo = SampledSignal(sig, f.x0, f.dx, combo.values + signal_left_mul(d, g).values)
        lhs = cft_forward(combo, plan).values
        rhs = gp_array(sig, c.coeffs, cft_forward(f, plan).values) + gp_array(sig, d.coeffs, cft_forward(g, plan).values)
        worst = max(worst, _rel(lhs - rhs, lhs))
    return worst, {}


def _cf_moments(cfg: VerifyConfig, rng):
    sig = cfg.signature
    mu = cfg.unit
    worst = 0.0
    for _ in range(3):
        comps = {}
        for b in range(sig.size):
            kind = b % 3
            if kind == 0:
                comps[b] = Gaussian(float(rng.uniform(0.25, 2.0)))
            elif kind == 1:
                comps[b] = Exponential(float(rng.uniform(0.5, 3.0)))
            else:
                a = float(rng.uniform(-1.0, 1.0))
                comps[b] = Uniform(a, a + 1.0)
        d = CliffordDensity(sig, comps)
        phi = characteristic_function(d, mu)
        for ell in (0, 1, 2):
            got = moment_from_cf(phi, ell).value.coeffs
            ref = moment_direct(d, ell).value.coeffs
            for b in range(sig.size):
                err = abs(got[b] - ref[b])
                worst = max(worst, err / abs(ref[b]) if abs(ref[b]) > 1e-12 else err)
    return worst, {"orders": [0, 1, 2]}


PROCEDURES: dict[str, Callable] = {
    "parseval": _parseval,
    "inversion": _inversion,
    "translation": _translation,
    "derivative": _derivative,
    "convolution": _convolution,
    "nagy": _nagy,
    "uncertainty": _uncertainty,
    "submultiplicativity": _submultiplicativity,
    "riemann_lebesgue": _riemann_lebesgue,
    "linearity": _linearity,
    "cf_moments": _cf_moments,
}


def identity_defect(ident: str, config: VerifyConfig | None = None) -> IdentityReport:
    if ident not in PROCEDURES:
        raise UnknownIdentity(f"unknown identity {ident!r}; choose from {', '.join(IDENTITIES)}")
    cfg = config or VerifyConfig()
    rng = np.random.default_rng([cfg.seed, IDENTITIES.index(ident)])
    tol = cfg.tolerance(ident)
    defect, details = PROCEDURES[ident](cfg, rng)
    notes = details.pop("_warnings", [])
    return IdentityReport(ident, float(defect), tol, bool(defect <= tol), cfg.digest(), details, notes)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CLIFFT_THREADS", "1")))
    except ValueError:
        return 1


def run_suite(ids: Iterable[str], config: VerifyConfig | None = None) -> tuple[list[IdentityReport], int]:
    """Run identities in canonical order; exit status 0 iff every report passed."""
    ids = list(dict.fromkeys(ids))
    if not ids:
        raise ValueError("no identities requested")
    unknown = [i for i in ids if i not in PROCEDURES]
    if unknown:
        raise UnknownIdentity(f"unknown identity {unknown[0]!r}; choose from {', '.join(IDENTITIES)}")
    cfg = config or VerifyConfig()
    ordered = [i for i in IDENTITIES if i in ids]

    def one(ident: str) -> IdentityReport:
        try:
            return identity_defect(ident, cfg)
        except Exception as exc:  # reported, not raised: one broken identity must not hide the rest
            return IdentityReport(ident, None, cfg.tolerance(ident), False, cfg.digest(), {"error": repr(exc)})

    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        reports = list(pool.map(one, ordered))
    return reports, 0 if all(r.passed for r in reports) else 1
