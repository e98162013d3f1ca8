import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate as sp_integrate
from scipy.special import gamma

from weightseq.kernels import (AccuracyError, BorelPath, DomainError, GrowthHint, KernelOverflowError, SampledFunction, Sector,
                               TruncationError, borel_transform, builtin_function, inverse_one_plus, kernel_e,
                               kernel_moment, laplace_transform, mittag_leffler, moment_integral, monomial)


def ml_reference(alpha, z, dps=60):
    """Direct high-precision series; adequate for |z|^(1/alpha) up to a few dozen."""
    with mp.workdps(dps):
        z, a = mp.mpc(z), mp.mpf(alpha)
        total, n = mp.mpc(0), 0
        while True:
            term = z**n / mp.gamma(1 + a * n)  # a float alpha*n would be amplified by the cancellation
            total += term
            if n > 10 and abs(term) < mp.mpf(10) ** (-dps + 5) * max(abs(total), mp.mpf(10) ** -300):
                break
            n += 1
        return complex(total)


class TestKernelE:
    def test_alpha_one(self):
        assert kernel_e(1.0, 1.0) == pytest.approx(math.exp(-1), rel=1e-15)

    def test_vanishes_at_zero(self):
        assert abs(kernel_e(1.0, 1e-12)) < 1e-11

    def test_alpha_half(self):
        assert kernel_e(0.5, 1.0) == pytest.approx(2 * math.exp(-1), rel=1e-15)

    def test_riemann_surface_argument(self):
        # alpha = 1.5 allows |arg z| up to 3pi/4, beyond the principal-value cut of z^(1/alpha)
        z_arg = 2.2
        v = kernel_e(1.5, 0.7, z_arg)
        w = 0.7 ** (1 / 1.5) * cmath.exp(1j * z_arg / 1.5)
        assert v == pytest.approx(w * cmath.exp(-w) / 1.5, rel=1e-14)

    def test_outside_sector(self):
        with pytest.raises(DomainError):
            kernel_e(1.0, 1.0, 1.6)
        with pytest.raises(DomainError):
            kernel_e(2.0, 1.0)


class TestMoments:
    @pytest.mark.parametrize("alpha,lam,expected", [(1, 2, 2.0), (0.7, 0, 1.0), (2, 1, 2.0)])
    def test_closed_form(self, alpha, lam, expected):
        assert kernel_moment(alpha, lam) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    @pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
    def test_quadrature_grid(self, alpha, lam):
        r = moment_integral(alpha, lam)
        assert r.value.real == pytest.approx(gamma(1 + alpha * lam), rel=1e-8)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_direct_integral_oracle(self, alpha):
        # untransformed integrand with an off-the-shelf real quadrature
        lam = 1.0
        val, _ = sp_integrate.quad(lambda t: kernel_e(alpha, t).real * t ** (lam - 1), 0, np.inf, limit=200)
        assert val == pytest.approx(gamma(1 + alpha * lam), rel=1e-7)


class TestMittagLeffler:
    def test_exp(self):
        assert mittag_leffler(1.0, 1.0) == pytest.approx(math.e, rel=1e-14)

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.0, 1.5, 2.0, 2.5])
    def test_at_zero(self, alpha):
        assert mittag_leffler(alpha, 0.0) == 1.0

    def test_cosh(self):
        assert mittag_leffler(2.0, 1.0) == pytest.approx(math.cosh(1.0), rel=1e-14)

    def test_half_closed_form(self):
        for z in (0.3, -2.0, 1 + 1j, -5 + 0.5j):
            assert mittag_leffler(0.5, z) == pytest.approx(ml_reference(0.5, z), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.3, 0.7, 1.5, 1.9])
    def test_large_arguments(self, alpha):
        # beyond the plain series range; reference uses enough digits to absorb cancellation
        for r in (30.0, 80.0):
            for phi in (0.0, 0.4 * math.pi, math.pi):
                z = r ** alpha * cmath.exp(1j * phi)
                ref = ml_reference(alpha, z, dps=int(120 + 2 * r / math.log(10)))
                assert mittag_leffler(alpha, z) == pytest.approx(ref, rel=1e-10, abs=1e-300)

    def test_vectorized(self):
        z = np.array([[0.1, -1.0], [2j, 3.0]])
        out = mittag_leffler(0.8, z)
        assert out.shape == (2, 2)
        assert out[1, 1] == pytest.approx(ml_reference(0.8, 3.0), rel=1e-10)

    def test_rejects_order(self):
        with pytest.raises(DomainError):
            mittag_leffler(0.0, 1.0)


@settings(max_examples=60)
@given(st.floats(0.25, 1.95), st.floats(0.0, 60.0), st.floats(-math.pi, math.pi))
def test_mittag_leffler_matches_high_precision_series(alpha, rho, phi):
    # rho = |z|^(1/alpha) sets the size of the largest Taylor term, exp(rho)
    z = rho**alpha * cmath.exp(1j * phi)
    ref = ml_reference(alpha, z, dps=int(60 + 2 * rho / math.log(10)))
    assert mittag_leffler(alpha, z) == pytest.approx(ref, rel=1e-10, abs=1e-300)


class TestLaplace:
    def test_constant(self):
        r = laplace_transform(monomial(0), 1.0, 0.0, 0.5)
        assert r.value == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("p", range(7))
    @pytest.mark.parametrize("z", [0.2, 0.5])
    def test_monomials_alpha_one(self, p, z):
        r = laplace_transform(monomial(p), 1.0, 0.0, z)
        assert r.value == pytest.approx(gamma(1 + p) * z**p, rel=1e-8)

    def test_half_order_moment(self):
        r = laplace_transform(monomial(1), 0.5, 0.0, 0.3)
        assert r.value == pytest.approx(0.2658680776, rel=1e-9)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5])
    def test_matches_formal_transform_off_axis(self, alpha):
        z = 0.3 * cmath.exp(0.3j * alpha)
        for p in (1, 3, 5):
            r = laplace_transform(monomial(p), alpha, 0.0, z)
            assert r.value == pytest.approx(gamma(1 + alpha * p) * z**p, rel=1e-8)

    def test_refinement_within_error_estimate(self):
        f = monomial(3)
        coarse = laplace_transform(f, 0.8, 0.0, 0.4, rtol=1e-8)
        fine = laplace_transform(f, 0.8, 0.0, 0.4, rtol=5e-9)
        assert abs(coarse.value - fine.value) <= coarse.error

    def test_needs_growth_hint(self):
        f = SampledFunction(lambda m, a: np.ones_like(m, complex), Sector(0, 1))
        with pytest.raises(TruncationError):
            laplace_transform(f, 1.0, 0.0, 0.5)

    def test_hint_beyond_kernel_decay(self):
        f = SampledFunction(lambda m, a: np.exp(m), Sector(0, 1), GrowthHint(1, 0, 1.0, 5.0))
        with pytest.raises(TruncationError):
            laplace_transform(f, 1.0, 0.0, 0.5)

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            laplace_transform(monomial(1), 1.0, 0.0, 1j)  # |arg z - tau| = pi/2
        with pytest.raises(DomainError):
            laplace_transform(monomial(1), 2.0, 0.0, 0.5)
        with pytest.raises(DomainError):
            laplace_transform(inverse_one_plus(0.5), 1.0, 1.0, 0.5)


class TestBorel:
    @pytest.mark.parametrize("p", range(5))
    def test_monomials_half_order(self, p):
        path = BorelPath(0.0, 0.5, 1.0)
        for u in (0.1, 0.05):
            r = borel_transform(monomial(p), 0.5, 0.0, path, u)
            assert r.value == pytest.approx(u**p / gamma(1 + 0.5 * p), rel=1e-6)

    def test_constant(self):
        path = BorelPath(0.0, 1.0, 1.0)
        assert borel_transform(monomial(0), 1.0, 0.0, path, 0.07).value == pytest.approx(1.0, rel=1e-9)

    def test_at_origin(self):
        path = BorelPath(0.0, 1.0, 0.5)
        assert borel_transform(inverse_one_plus(), 1.0, 0.0, path, 0).value == pytest.approx(1.0)

    def test_matches_formal_borel_on_monomials(self):
        alpha, path = 1.0, BorelPath(0.0, 1.0, 1.0)
        u = 0.08 * cmath.exp(0.1j)
        for p in (1, 2, 3):
            r = borel_transform(monomial(p), alpha, 0.0, path, u)
            assert r.value == pytest.approx(u**p / gamma(1 + alpha * p), rel=1e-8)

    @pytest.mark.parametrize("alpha", [0.5, 1.0])
    def test_inverse_one_plus_is_mittag_leffler(self, alpha):
        f, path = inverse_one_plus(), BorelPath(0.0, alpha, 0.5)
        for u in (0.2, 1.0):
            r = borel_transform(f, alpha, 0.0, path, u)
            assert r.value == pytest.approx(mittag_leffler(alpha, -u), rel=1e-8)

    def test_path_independence(self):
        f = inverse_one_plus()
        a = borel_transform(f, 0.5, 0.0, BorelPath(0.0, 0.5, 0.5, epsilon=0.5), 0.3)
        b = borel_transform(f, 0.5, 0.0, BorelPath(0.0, 0.5, 0.5, epsilon=0.3), 0.3)
        assert abs(a.value - b.value) <= 5e-6 * abs(a.value)

    def test_rejects_path_outside_sector(self):
        with pytest.raises(DomainError):
            borel_transform(inverse_one_plus(0.5), 1.0, 0.0, BorelPath(0.0, 1.0, 0.5), 0.1)

    def test_rejects_u_outside_admissible_region(self):
        with pytest.raises(DomainError):
            borel_transform(monomial(1), 1.0, 0.0, BorelPath(0.0, 1.0, 1.0, epsilon=0.4), 0.1j)

    def test_cancellation_is_an_error(self):
        # a small arc against a large |u|: the legs cancel far below double precision
        with pytest.raises(AccuracyError):
            borel_transform(inverse_one_plus(), 0.5, 0.0, BorelPath(0.0, 0.5, 0.5), 3.0)
        r = borel_transform(inverse_one_plus(), 0.5, 0.0, BorelPath(0.0, 0.5, 2.0), 3.0)
        assert r.value == pytest.approx(mittag_leffler(0.5, -3.0), rel=1e-10)

    def test_kernel_overflow(self):
        with pytest.raises(KernelOverflowError):
            borel_transform(monomial(1), 0.5, 0.0, BorelPath(0.0, 0.5, 0.01), 1.0)


def _numerical_borel(f, alpha, epsilon=0.5, arc=0.5):
    path = BorelPath(0.0, alpha, arc, epsilon)

    def evaluate(m, a):
        out = np.empty(np.shape(m), complex)
        for i, (mi, ai) in enumerate(zip(np.ravel(m), np.ravel(a))):
            out.flat[i] = borel_transform(f, alpha, 0.0, path, mi * cmath.exp(1j * ai), u_argument=ai).value
        return out

    width = 0.9 * path.admissible_half_width
    return SampledFunction(evaluate, Sector(0.0, 2 * width / math.pi), GrowthHint(2.0))


@pytest.mark.parametrize("alpha,points", [(1.0, [0.1, 0.2, 0.15 * cmath.exp(0.2j)]), (0.5, [0.15])])
def test_laplace_of_borel_round_trip(alpha, points):
    f = inverse_one_plus()
    g = _numerical_borel(f, alpha)
    for z in points:
        r = laplace_transform(g, alpha, 0.0, z, rtol=1e-10)
        assert abs(r.value - 1 / (1 + z)) <= 1e-5


def test_builtin_lookup():
    assert builtin_function("monomial", p=2).at(0.5) == pytest.approx(0.25)
    with pytest.raises(DomainError):
        builtin_function("sinc")
