import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate
from scipy.stats import levy_stable

from stableheat import (
    DensityEval,
    StableParams,
    free_density,
    free_density_bound,
    free_density_radial,
    incomplete_kernel_integral,
    levy_constant,
    levy_density,
    levy_symbol_quadrature,
    peak_density,
)
from stableheat.stable import _p1_point


def cauchy_1d(t, z):
    return t / (math.pi * (t * t + z * z))


def cauchy_2d(t, z):
    return math.gamma(1.5) / math.pi ** 1.5 * t / (t * t + z * z) ** 1.5


class TestParams:
    def test_rejects_gaussian_endpoint(self):
        with pytest.raises(ValueError):
            StableParams(1, 2.0)

    @pytest.mark.parametrize("alpha", [0.0, -0.5, 2.5])
    def test_rejects_bad_alpha(self, alpha):
        with pytest.raises(ValueError):
            StableParams(1, alpha)

    def test_rejects_bad_dim(self):
        with pytest.raises(ValueError):
            StableParams(0, 1.0)

    def test_density_eval_invariants(self):
        with pytest.raises(ValueError):
            DensityEval(-1.0, 0.0)
        with pytest.raises(ValueError):
            DensityEval(1.0, math.inf)


class TestLevyDensity:
    def test_cauchy_coefficient(self, p11):
        # A_{1,1} = 1/pi, cross-checked against the Cauchy jump intensity
        assert levy_density(p11, 2.0) == pytest.approx(1.0 / (4 * math.pi), rel=1e-14)

    def test_isotropy(self, p11):
        assert levy_density(p11, -2.0) == levy_density(p11, 2.0)

    def test_singular_at_origin(self, p11):
        with pytest.raises(ValueError):
            levy_density(p11, 0.0)

    @pytest.mark.parametrize("d,alpha", [(1, 0.5), (1, 1.0), (1, 1.5), (2, 0.5), (3, 1.5)])
    def test_symbol_normalization(self, d, alpha):
        params = StableParams(d, alpha)
        for xi in (0.5, 1.0, 2.0):
            v = levy_symbol_quadrature(params, xi)
            assert v == pytest.approx(xi ** alpha, rel=1e-4)


class TestFreeDensity:
    def test_cauchy_1d_values(self, p11):
        ev = free_density(p11, 1.0, 0.0, 0.0)
        assert ev.value == pytest.approx(1 / math.pi, rel=1e-10)
        ev = free_density(p11, 4.0, 0.0, 2.0)
        assert ev.value == pytest.approx(1 / (5 * math.pi), rel=1e-10)

    def test_cauchy_2d_value(self, p21):
        ev = free_density(p21, 1.0, (0, 0), (0, 0))
        assert ev.value == pytest.approx(1 / (2 * math.pi), rel=1e-10)

    def test_cauchy_grids(self, p11, p21):
        worst = 0.0
        for t in np.geomspace(0.05, 50, 7):
            for z in np.geomspace(0.01, 100, 7):
                got = free_density(p11, t, 0.0, z).value
                worst = max(worst, abs(got - cauchy_1d(t, z)) / cauchy_1d(t, z))
                got2 = free_density(p21, t, (0, 0), (z, 0)).value
                worst = max(worst, abs(got2 - cauchy_2d(t, z)) / cauchy_2d(t, z))
        assert worst < 1e-8

    def test_against_independent_1d_implementation(self):
        # scipy's stable pdf is an unrelated numerical route
        for alpha in (0.6, 1.5, 1.9):
            params = StableParams(1, alpha)
            for z in (0.0, 0.3, 2.0, 8.0):
                got = free_density(params, 1.0, 0.0, z).value
                ref = levy_stable.pdf(z, alpha, 0)
                assert got == pytest.approx(ref, rel=5e-7)

    def test_rejects_nonpositive_time(self, p11):
        with pytest.raises(ValueError):
            free_density(p11, 0.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            free_density(p11, -1.0, 0.0, 1.0)

    def test_symmetry_exact(self, p15):
        a = free_density(p15, 0.7, 0.3, -0.8).value
        b = free_density(p15, 0.7, -0.8, 0.3).value
        assert a == b

    def test_self_similarity_residual(self, p15):
        d, a = 1, 1.5
        for t in (0.01, 1.0, 100.0):
            for z in (0.2, 1.0, 30.0):
                lhs = free_density(p15, t, 0.0, z).value
                rhs = t ** (-d / a) * free_density(p15, 1.0, 0.0, z * t ** (-1 / a)).value
                assert abs(lhs - rhs) <= 1e-10 * lhs

    @pytest.mark.parametrize(
        "d,alpha", [(d, a) for d in (1, 2, 3) for a in (0.5, 1.0, 1.5)]
    )
    def test_normalization(self, d, alpha):
        params = StableParams(d, alpha)
        sd = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
        f = lambda r: _p1_point(d, alpha, r)[0] * r ** (d - 1)
        v1, _ = integrate.quad(f, 0, 2.0, limit=200)
        v2, _ = integrate.quad(f, 2.0, np.inf, limit=200)
        assert sd * (v1 + v2) == pytest.approx(1.0, abs=1e-6)

    def test_peak_constant_matches_quadrature(self):
        # the 2^{1-d} prefactor, checked against direct Fourier inversion
        for d, alpha in ((1, 1.3), (2, 0.8), (3, 1.5)):
            params = StableParams(d, alpha)
            sd = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
            v, _ = integrate.quad(
                lambda u: math.exp(-(u ** alpha)) * u ** (d - 1), 0, np.inf, limit=200
            )
            assert peak_density(params) == pytest.approx(
                sd * v / (2 * math.pi) ** d, rel=1e-12
            )

    def test_reported_rel_err(self, p15):
        ev = free_density(p15, 1.0, 0.0, 3.0)
        assert ev.rel_err <= 1e-8

    def test_fast_path_matches_scalar(self, p15):
        radii = np.geomspace(0.01, 50.0, 40)
        fast = free_density_radial(p15, 2.0, radii)
        for r, v in zip(radii, fast):
            ref = free_density(p15, 2.0, 0.0, r).value
            assert v == pytest.approx(ref, rel=1e-6)


class TestFreeDensityBound:
    def test_origin_uses_uniform_branch(self, p11):
        assert free_density_bound(p11, 1.0, 0.0) == 1.0

    def test_tail_branch(self, p11):
        assert free_density_bound(p11, 1.0, 2.0) == pytest.approx(0.25)

    def test_direct_min(self, p11):
        assert free_density_bound(p11, 2.0, 1.0) == pytest.approx(0.5)

    def test_rejects_nonpositive_time(self, p11):
        with pytest.raises(ValueError):
            free_density_bound(p11, 0.0, 1.0)

    @pytest.mark.parametrize("d,alpha", [(1, 1.0), (2, 1.5), (1, 0.5)])
    def test_two_sided_comparison_stable_under_refinement(self, d, alpha):
        params = StableParams(d, alpha)

        def measured_c(nt, nz):
            c = 1.0
            for t in np.geomspace(0.01, 100, nt):
                for z in np.geomspace(0.05, 50, nz):
                    x = np.zeros(d)
                    x[0] = z
                    ratio = free_density(params, t, np.zeros(d), x).value / free_density_bound(
                        params, t, x
                    )
                    c = max(c, ratio, 1.0 / ratio)
            return c

        c1 = measured_c(12, 12)
        c2 = measured_c(24, 24)
        assert math.isfinite(c2)
        assert abs(c2 - c1) <= 0.10 * c1 + 1e-9

    def test_doubling_constant(self, p15):
        d, a = 1, 1.5
        bound = 2 ** (1 + (d + a) / a)
        worst = 1.0
        for t in np.geomspace(0.01, 100, 8):
            for z in np.geomspace(0.05, 50, 8):
                r1 = free_density(p15, t, 0.0, z).value
                r2 = free_density(p15, 2 * t, 0.0, z).value
                worst = max(worst, r1 / r2, r2 / r1)
        assert worst <= bound


class TestIncompleteKernelIntegral:
    def test_arctan_case(self):
        assert incomplete_kernel_integral(0.5, 1.0, 1.0) == pytest.approx(
            math.pi / 2, rel=1e-11
        )

    def test_empty_integral(self):
        assert incomplete_kernel_integral(0.7, 0.3, 0.0) == 0.0

    def test_asinh_case(self):
        assert incomplete_kernel_integral(0.5, 0.5, 3.0) == pytest.approx(
            2 * math.log(math.sqrt(3.0) + 2.0), rel=1e-11
        )

    def test_beta_limit(self):
        ref = math.gamma(0.75) * math.gamma(0.25) / math.gamma(1.0)
        # finite-w value approaches the Beta limit minus the analytic
        # remainder int_w^inf s^{a-1}(1+s)^{-b} ds ~ w^{a-b}/(b-a)
        w = 1e14
        remainder = w ** (-0.25) / 0.25
        assert incomplete_kernel_integral(0.75, 1.0, w) == pytest.approx(
            ref - remainder, rel=1e-7
        )
        assert incomplete_kernel_integral(0.75, 1.0, math.inf) == pytest.approx(ref, rel=1e-12)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            incomplete_kernel_integral(0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            incomplete_kernel_integral(1.0, -1.0, 1.0)
        with pytest.raises(ValueError):
            incomplete_kernel_integral(1.0, 1.0, -0.1)

    @settings(max_examples=40, deadline=None)
    @given(
        a=st.floats(0.1, 1.5),
        b=st.floats(0.1, 2.0),
        w1=st.floats(0.0, 20.0),
        w2=st.floats(0.0, 20.0),
    )
    def test_monotone_in_upper_limit(self, a, b, w1, w2):
        lo, hi = sorted((w1, w2))
        assert incomplete_kernel_integral(a, b, lo) <= incomplete_kernel_integral(
            a, b, hi
        ) + 1e-12


def test_levy_constant_against_tail_limit():
    # p_t(z) -> t nu(z) as |z| grows: leading tail coefficient equals A
    params = StableParams(1, 0.7)
    z = 2000.0
    tail = free_density(params, 1.0, 0.0, z).value
    assert tail == pytest.approx(levy_constant(params) * z ** (-1.7), rel=1e-2)
