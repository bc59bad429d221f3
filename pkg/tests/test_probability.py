import math
import warnings

import numpy as np
import pytest
from scipy import integrate, special

from clifft.algebra import ImaginaryUnit, Multivector, Signature, SignatureMismatch, sum_blades
from clifft.probability import (
    CharacteristicFunction,
    CliffordDensity,
    DivergentTailWarning,
    Exponential,
    Gaussian,
    InsufficientSupport,
    InvalidDensity,
    MomentResult,
    Sampled,
    SmoothedUniform,
    Uniform,
    blade_variance,
    cdf_build,
    cf_pair_identity_defect,
    cf_pair_sides,
    characteristic_function,
    density_from_cf,
    moment_direct,
    moment_from_cf,
    moment_modulus,
    require_valid,
    uncertainty_check,
    validate_density,
    variance,
    variance_cf_shortcut,
    variance_from_cf,
)
from clifft.transform import AliasingWarning, Spectrum

CL11 = Signature(1, 1)
CL01 = Signature(0, 1)
CL30 = Signature(3, 0)


def unit(sig, text):
    return ImaginaryUnit(Multivector.parse(sig, text))


def density(sig, comp, blades=(0,)):
    return CliffordDensity(sig, {b: comp for b in blades})


def quad_cf(pdf, lo, hi, t):
    """Independent oracle: integral of pdf(x) exp(i t x) over [lo, hi]."""
    re = integrate.quad(lambda x: pdf(x) * math.cos(t * x), lo, hi, limit=200)[0]
    im = integrate.quad(lambda x: pdf(x) * math.sin(t * x), lo, hi, limit=200)[0]
    return complex(re, im)


ANALYTIC = [
    Uniform(0.0, 1.0),
    Uniform(-0.5, 0.5),
    Gaussian(0.25),
    Gaussian(0.5),
    Gaussian(2.0),
    Exponential(1.0),
    Exponential(2.0),
    SmoothedUniform(-0.5, 0.5, 0.3),
]


class TestValidation:
    def test_uniform_unit(self):
        assert validate_density(density(CL30, Uniform(0, 1))).passed

    def test_gaussian(self):
        report = validate_density(density(CL30, Gaussian(2.0)))
        assert report.passed
        assert report.checks[0].integral == 1.0

    def test_sampled_indicator_mass_two(self):
        x = np.linspace(0, 2, 201)
        report = validate_density(density(CL30, Sampled(0.0, x[1] - x[0], np.ones_like(x))))
        assert not report.passed
        assert report.failures()[0].integral == pytest.approx(2.0, abs=1e-12)

    def test_negative_values(self):
        d = density(CL30, Sampled(0.0, 0.5, [0.0, 2.5, -0.5, 0.0]))
        assert not validate_density(d).passed
        with pytest.raises(InvalidDensity):
            require_valid(d, unnormalized=True)

    def test_unnormalized_escape(self):
        d = density(CL30, Uniform(0, 2))
        with pytest.raises(InvalidDensity):
            require_valid(d)
        require_valid(d, unnormalized=True)

    @pytest.mark.parametrize("make", [lambda: Uniform(1, 1), lambda: Gaussian(0), lambda: Exponential(-1)])
    def test_bad_parameters(self, make):
        with pytest.raises(InvalidDensity):
            make()

    def test_blade_range(self):
        with pytest.raises(InvalidDensity):
            CliffordDensity(CL01, {2: Gaussian(1.0)})


class TestCharacteristicFunction:
    @pytest.mark.parametrize("comp", ANALYTIC, ids=repr)
    def test_closed_form_matches_quadrature(self, comp):
        lo, hi = comp.support()
        for t in (-4.0, -0.7, 0.0, 1.3, 5.0):
            assert comp.cf(np.array([t]))[0] == pytest.approx(quad_cf(comp.pdf, lo, hi, t), abs=1e-9)

    def test_gaussian_half(self):
        mu = unit(CL30, "e12")
        phi = characteristic_function(density(CL30, Gaussian(0.5), (0, 5)), mu)
        t = np.linspace(-5, 5, 11)
        vals = phi(t)
        assert np.allclose(vals[:, 0], np.exp(-(t**2) / 2), atol=1e-15)
        assert np.allclose(vals[:, 5], np.exp(-(t**2) / 2), atol=1e-15)
        assert not np.any(vals[:, [1, 2, 3, 4, 6, 7]])

    def test_exponential_two(self):
        mu = unit(CL11, "e2")
        phi = characteristic_function(density(CL11, Exponential(2.0)), mu)
        t = np.linspace(-5, 5, 11)
        vals = phi(t)
        # 2 / (2 - mu t) = 2 (2 + mu t) / (4 + t^2)
        assert np.allclose(vals[:, 0], 4 / (4 + t**2), atol=1e-15)
        assert np.allclose(vals[:, 2], 2 * t / (4 + t**2), atol=1e-15)

    def test_blade_times_mu_ordering(self):
        # e1 blade, mu = e2 in Cl(1,1): phi = e1 (a + b e2) so the mu part lands on e12
        mu = unit(CL11, "e2")
        phi = characteristic_function(density(CL11, Exponential(2.0), (1,)), mu)
        v = phi(np.array([1.0]))[0]
        assert v[1] == pytest.approx(0.8) and v[3] == pytest.approx(0.4)

    def test_uniform_shifted(self):
        mu = unit(CL01, "e1")
        comp = Uniform(0.3, 1.3)
        phi = characteristic_function(density(CL01, comp), mu)
        t = np.array([-2.0, 0.5, 3.0])
        v = phi(t)
        expect = 2 / t * np.sin(t / 2) * np.exp(1j * 0.8 * t)
        assert np.allclose(v[:, 0], expect.real) and np.allclose(v[:, 1], expect.imag)

    @pytest.mark.parametrize("comp", ANALYTIC, ids=repr)
    def test_value_at_zero(self, comp):
        sig = Signature(2, 1)
        d = density(sig, comp, (0, 3, 6))
        require_valid(d, unnormalized=True)
        phi = characteristic_function(d, unit(sig, "e12"))
        assert phi.at(0.0).allclose(comp.mass * sum_blades(sig, (0, 3, 6)), 1e-14)

    @pytest.mark.parametrize("lam", [0.25, 0.5, 1.0, 2.0])
    def test_gridded_gaussian(self, lam):
        mu = unit(CL30, "e12")
        phi = characteristic_function(density(CL30, Gaussian(lam)), mu, n=4096, half_width=16.0)
        assert phi.form == "gridded"
        t = phi.spectrum.xi_values
        t = t[np.abs(t) <= 6]
        assert np.max(np.abs(phi(t)[:, 0] - np.exp(-(t**2) / (4 * lam)))) <= 1e-6

    def test_gridded_off_grid(self):
        mu = unit(CL30, "e12")
        phi = characteristic_function(density(CL30, Gaussian(1.0)), mu, n=256, half_width=8.0)
        with pytest.raises(ValueError):
            phi(np.array([0.1234]))

    def test_sampled_blade_goes_gridded(self):
        x = np.linspace(-8, 8, 1025)
        comp = Sampled(-8.0, x[1] - x[0], Gaussian(1.0).pdf(x))
        phi = characteristic_function(density(CL30, comp), unit(CL30, "e12"))
        assert phi.form == "gridded"

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            characteristic_function(density(CL30, Gaussian(1.0)), unit(CL01, "e1"))

    def test_needs_exactly_one_source(self):
        with pytest.raises(ValueError):
            CharacteristicFunction(unit(CL01, "e1"))


def finite_difference(f, t, order, h=1e-3):
    w = {1: np.array([1, -8, 0, 8, -1]) / 12, 2: np.array([-1, 16, -30, 16, -1]) / 12}[order]
    return sum(wk * f(t + (k - 2) * h) for k, wk in enumerate(w)) / h**order


class TestCFDerivatives:
    @pytest.mark.parametrize("comp", ANALYTIC, ids=repr)
    @pytest.mark.parametrize("order", [1, 2])
    def test_against_finite_differences(self, comp, order):
        t = np.linspace(-5, 5, 41)
        closed = comp.cf_derivative(t, order)
        fd = finite_difference(comp.cf, t, order)
        assert np.max(np.abs(closed - fd)) <= 1e-8

    @pytest.mark.parametrize("comp", [Uniform(0, 1), Gaussian(0.7), Exponential(1.5)], ids=repr)
    def test_derivative_at_zero_is_moment(self, comp):
        for k in range(5):
            assert comp.cf_derivative(np.array([0.0]), k)[0] == pytest.approx(1j**k * comp.moment(k), abs=1e-12)

    def test_exponential_formula(self):
        t = np.array([-1.0, 0.0, 2.0])
        lam = 2.0
        got = Exponential(lam).cf_derivative(t, 1)
        assert np.allclose(got, 1j * lam / (lam - 1j * t) ** 2)


class TestMoments:
    def test_uniform_mean(self):
        m = moment_direct(density(CL30, Uniform(0, 1), (0, 1, 2)), 1)
        assert np.allclose(m.value.coeffs[[0, 1, 2]], 0.5) and m.method == "direct"

    @pytest.mark.parametrize("lam", [0.3, 1.0, 4.0])
    def test_gaussian_mean_zero(self, lam):
        assert moment_direct(density(CL30, Gaussian(lam)), 1).value == Multivector.zero(CL30)

    def test_exponential_second(self):
        m = moment_direct(density(CL11, Exponential(2.0), (0, 3)), 2)
        assert np.allclose(m.value.coeffs[[0, 3]], 0.5)

    def test_closed_forms_against_quadrature(self):
        for comp in ANALYTIC:
            lo, hi = comp.support()
            for ell in range(5):
                q = integrate.quad(lambda x: x**ell * comp.pdf(x), lo, hi, limit=200)[0]
                assert comp.moment(ell) == pytest.approx(q, rel=1e-9, abs=1e-12), (comp, ell)

    def test_sampled_tail_warning(self):
        x = np.linspace(0, 1, 101)
        d = density(CL30, Sampled(0.0, 0.01, np.ones_like(x)))
        with pytest.warns(DivergentTailWarning):
            moment_direct(d, 2)

    def test_sampled_no_warning(self):
        x = np.linspace(-10, 10, 2001)
        d = density(CL30, Sampled(-10.0, 0.01, Gaussian(1.0).pdf(x)))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            m = moment_direct(d, 2)
        assert m.value.coeffs[0] == pytest.approx(0.5, rel=1e-9)

    def test_negative_order(self):
        with pytest.raises(ValueError):
            moment_direct(density(CL30, Gaussian(1.0)), -1)

    @pytest.mark.parametrize("comp", [Uniform(0, 1), Gaussian(0.5), Gaussian(2.0), Exponential(2.0)], ids=repr)
    @pytest.mark.parametrize("sig,text,blades", [(CL30, "e12", (0, 1, 6)), (CL11, "e2", (0, 1, 2, 3)), (CL01, "e1", (0, 1))])
    def test_cf_route_matches_direct(self, comp, sig, text, blades):
        d = density(sig, comp, blades)
        phi = characteristic_function(d, unit(sig, text))
        for ell in range(3):
            direct = moment_direct(d, ell).value.coeffs
            via = moment_from_cf(phi, ell).value.coeffs
            scale = np.max(np.abs(direct))
            assert np.max(np.abs(direct - via)) <= 1e-4 * max(scale, 1e-12) + (1e-9 if scale == 0 else 0)

    def test_examples(self):
        mu = unit(CL30, "e12")
        g = characteristic_function(density(CL30, Gaussian(0.5)), mu)
        e = characteristic_function(density(CL30, Exponential(2.0)), mu)
        assert moment_from_cf(g, 2).value.coeffs[0] == pytest.approx(1.0, rel=1e-4)
        assert moment_from_cf(e, 1).value.coeffs[0] == pytest.approx(0.5, rel=1e-4)
        m0 = moment_from_cf(characteristic_function(density(CL30, Uniform(0, 1), (0, 3)), mu), 0)
        assert m0.value.allclose(sum_blades(CL30, (0, 3)), 1e-15)

    def test_gridded_needs_zero(self):
        mu = unit(CL01, "e1")
        spec = Spectrum(CL01, 0.05, 0.1, np.ones((16, 2)))
        with pytest.raises(ValueError):
            moment_from_cf(CharacteristicFunction(mu, spectrum=spec), 1)

    def test_gridded_moments(self):
        mu = unit(CL30, "e12")
        d = density(CL30, Gaussian(0.5), (0, 7))
        phi = characteristic_function(d, mu, n=4096, half_width=128.0)
        m2 = moment_from_cf(phi, 2).value.coeffs
        assert m2[0] == pytest.approx(1.0, rel=1e-4) and m2[7] == pytest.approx(1.0, rel=1e-4)

    def test_order_limit(self):
        phi = characteristic_function(density(CL30, Gaussian(1.0)), unit(CL30, "e12"))
        with pytest.raises(ValueError):
            moment_from_cf(phi, 5)

    def test_modulus(self):
        g = MomentResult(1, moment_direct(density(CL30, Gaussian(1.0)), 1).value, "direct")
        assert moment_modulus(g) == 0
        half = moment_direct(density(CL11, Uniform(0, 1), (0, 1)), 1)
        assert moment_modulus(half) == pytest.approx(0.5, abs=1e-15)
        c = moment_direct(density(CL11, Uniform(0, 1)), 1)
        assert moment_modulus(c) == pytest.approx(0.25, abs=1e-15)


class TestVariance:
    def test_uniform(self):
        v = variance(density(CL30, Uniform(0, 1)))
        assert v.coeffs[0] == pytest.approx(1 / 12, abs=1e-15)

    def test_unnormalized_uniform_blade(self):
        # indicator of [alpha, beta] taken literally: (beta^3 - alpha^3)/3 - ((beta^2 - alpha^2)/2)^2
        a, b = 1.0, 3.0
        v = variance(density(CL30, Uniform(a, b)))
        assert v.coeffs[0] == pytest.approx((b**3 - a**3) / 3 - ((b**2 - a**2) / 2) ** 2, abs=1e-13)

    @pytest.mark.parametrize("lam", [0.25, 0.5, 2.0])
    def test_gaussian(self, lam):
        d = density(CL30, Gaussian(lam), (0, 2, 7))
        v = variance(d)
        assert v.allclose(sum_blades(CL30, (0, 2, 7)) * (1 / (2 * lam)), 1e-14)

    @pytest.mark.parametrize("lam", [0.5, 2.0])
    def test_exponential(self, lam):
        assert variance(density(CL30, Exponential(lam))).coeffs[0] == pytest.approx(1 / lam**2, rel=1e-14)
        bv = blade_variance(density(CL30, Exponential(lam), (0, 1, 5)))
        assert bv.allclose(sum_blades(CL30, (0, 1, 5)) * (1 / lam**2), 1e-14)

    def test_geometric_square_cross_terms(self):
        # with m1 = a(1 + e1) in Cl(1,1), gp(m1, m1) = 2a^2 (1 + e1); not a per-blade square
        d = density(CL11, Exponential(2.0), (0, 1))
        v = variance(d)
        assert v.coeffs[0] == pytest.approx(0.5 - 2 * 0.25, abs=1e-15)
        assert v.coeffs[1] == pytest.approx(0.5 - 2 * 0.25, abs=1e-15)

    @pytest.mark.parametrize("comp", [Uniform(0, 1), Gaussian(0.5), Exponential(2.0)], ids=repr)
    def test_cf_paths(self, comp):
        mu = unit(CL11, "e2")
        d = density(CL11, comp, (0, 1, 3))
        phi = characteristic_function(d, mu)
        assert np.allclose(variance_from_cf(phi).coeffs, variance(d).coeffs, rtol=0, atol=1e-4 * 4)
        scalar = density(CL11, comp)
        shortcut = variance_cf_shortcut(characteristic_function(scalar, mu))
        assert shortcut.coeffs[0] == pytest.approx(variance(scalar).coeffs[0], rel=1e-4)


class TestCDF:
    def test_uniform_half(self):
        d = density(CL30, Uniform(0, 1), (0, 3))
        cdf = cdf_build(d, np.linspace(-1, 2, 301))
        v = cdf(0.5)[0]
        assert v[0] == pytest.approx(0.5) and v[3] == pytest.approx(0.5)
        assert cdf.values[0, 0] == 0 and cdf.values[-1, 0] == pytest.approx(1.0, abs=1e-15)

    def test_gaussian_median(self):
        cdf = cdf_build(density(CL30, Gaussian(0.5)), np.linspace(-12, 12, 2401))
        assert cdf(0.0)[0, 0] == pytest.approx(0.5, abs=1e-15)
        assert cdf.values[0, 0] < 1e-6 and cdf.values[-1, 0] > 1 - 1e-6

    def test_derivative_recovers_density(self):
        x = np.linspace(-12, 12, 4801)
        d = density(CL30, Gaussian(0.5), (0, 4))
        cdf = cdf_build(d, x)
        assert np.max(np.abs(cdf.derivative() - d.pdf(x))) <= 1e-4

    def test_sampled_trapezoid(self):
        x = np.linspace(-10, 10, 4001)
        d = density(CL30, Sampled(-10.0, x[1] - x[0], Gaussian(1.0).pdf(x)))
        cdf = cdf_build(d, x)
        h = x[1] - x[0]
        # composite trapezoid error is bounded by h^2 / 12 * (max f' - min f')
        fprime = -2 * x * Gaussian(1.0).pdf(x)
        bound = h**2 / 12 * (fprime.max() - fprime.min())
        assert np.max(np.abs(cdf.values[:, 0] - special.ndtr(x * math.sqrt(2)))) <= bound

    def test_insufficient_support(self):
        with pytest.raises(InsufficientSupport):
            cdf_build(density(CL30, Gaussian(0.5)), np.linspace(-1, 1, 101))

    def test_unnormalized_target(self):
        d = density(CL30, Uniform(0, 2))
        with pytest.raises(InsufficientSupport):
            cdf_build(d, np.linspace(-1, 3, 41))
        assert cdf_build(d, np.linspace(-1, 3, 41), unnormalized=True).values[-1, 0] == 2.0

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            cdf_build(density(CL30, Uniform(0, 1)), [0.0, 0.0, 1.0])


class TestDensityFromCF:
    def test_gaussian(self):
        mu = unit(CL30, "e12")
        phi = characteristic_function(density(CL30, Gaussian(0.5), (0, 3)), mu)
        out = density_from_cf(phi)
        x = out.components[0].x
        expect = np.exp(-(x**2) / 2) / math.sqrt(2 * math.pi)
        assert np.max(np.abs(out.components[0].values - expect)) <= 1e-6
        assert np.max(np.abs(out.components[3].values - expect)) <= 1e-6

    def test_round_trip_through_grid(self):
        mu = unit(CL30, "e12")
        phi = characteristic_function(density(CL30, Gaussian(1.0)), mu, n=1024, half_width=16.0)
        back = characteristic_function(density_from_cf(phi), mu, n=1024, half_width=16.0)
        assert np.max(np.abs(back.spectrum.values - phi.spectrum.values)) <= 1e-5

    def test_uniform_gibbs(self):
        mu = unit(CL01, "e1")
        phi = characteristic_function(density(CL01, Uniform(-0.5, 0.5)), mu)
        errs = []
        for n, half in [(1024, 16.0), (4096, 16.0), (4096, 4.0)]:
            with pytest.warns(AliasingWarning):
                comp = density_from_cf(phi, n=n, half_width=half).components[0]
            errs.append(comp.dx * np.sum(np.abs(comp.values - Uniform(-0.5, 0.5).pdf(comp.x))))
        # ringing from the truncated sinc shrinks roughly like dx log(1/dx)
        assert errs[0] > errs[1] > errs[2]
        assert errs[2] <= 1e-2

    def test_zero(self):
        mu = unit(CL01, "e1")
        spec = Spectrum(CL01, -math.pi, 2 * math.pi / 64, np.zeros((64, 2)))
        out = density_from_cf(CharacteristicFunction(mu, spectrum=spec))
        assert not np.any(out.pdf(np.linspace(-5, 5, 11)))


class TestCFPair:
    def test_zero_g(self):
        mu = unit(CL30, "e12")
        left, right = cf_pair_sides(density(CL30, Gaussian(1.0)), CliffordDensity(CL30, {}), mu, 0.3)
        assert left == Multivector.zero(CL30) and right == Multivector.zero(CL30)

    def test_same_gaussian(self):
        d = density(CL30, Gaussian(1.0))
        assert cf_pair_identity_defect(d, d, unit(CL30, "e12"), 0.0) <= 1e-5

    @pytest.mark.parametrize("sig,text", [(CL11, "e2"), (CL01, "e1")])
    @pytest.mark.parametrize("y", [0.0, 0.5, 1.0])
    def test_two_blade_g(self, sig, text, y):
        f = density(sig, Gaussian(1.0))
        g = density(sig, Gaussian(2.0), (0, 1))
        assert cf_pair_identity_defect(f, g, unit(sig, text), y) <= 1e-5

    def test_sides_are_nontrivial(self):
        sig = CL11
        f = density(sig, Gaussian(1.0))
        g = density(sig, Gaussian(2.0), (0, 1))
        left, right = cf_pair_sides(f, g, unit(sig, "e2"), 0.5)
        # scalar part: integral g(t) exp(-t^2/4) cos(0.5 t) dt, an ordinary Gaussian integral
        expect = math.sqrt(2 / math.pi) * math.sqrt(math.pi / (2 + 0.25)) * math.exp(-(0.25) / (4 * 2.25))
        assert left.coeffs[0] == pytest.approx(expect, rel=1e-10)

    def test_exponential_f(self):
        sig = CL01
        f = density(sig, Exponential(1.0))
        g = density(sig, Gaussian(1.0))
        assert cf_pair_identity_defect(f, g, unit(sig, "e1"), 0.5, n=8192, half_width=40.0) <= 1e-3

    def test_signature_mismatch(self):
        with pytest.raises(SignatureMismatch):
            cf_pair_sides(density(CL30, Gaussian(1.0)), density(CL11, Gaussian(1.0)), unit(CL30, "e12"), 0.0)


class TestUncertainty:
    @pytest.mark.parametrize(
        "comp",
        [Gaussian(0.25), Gaussian(0.5), Gaussian(1.0), Gaussian(2.0), SmoothedUniform(-0.5, 0.5, 0.2), Exponential(1.0)],
        ids=repr,
    )
    def test_holds(self, comp):
        d = density(CL30, comp, (0, 7))
        for b in (0, 7):
            chk = uncertainty_check(d, unit(CL30, "e12"), b)
            assert chk.holds, chk
            assert chk.window[0] < chk.window[1]

    def test_gaussian_value(self):
        # frequency factor has no truncation: integral of t^2 exp(-t^2 / 2) for lam = 1
        chk = uncertainty_check(density(CL30, Gaussian(1.0)), unit(CL30, "e12"), 0)
        xi_norm = integrate.quad(lambda t: t**2 * math.exp(-(t**2) / 2), -np.inf, np.inf)[0]
        assert chk.xi_cf_norm_sq == pytest.approx(xi_norm, rel=1e-9)
        assert chk.second_moment == 0.5
