import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from stableheat import (
    Ball,
    Bracket,
    CircularCone,
    ExteriorBall,
    HalfSpace,
    HyperplaneComplement,
    IntervalComplement,
    MissingParameterError,
    SpecialLipschitz,
    StableParams,
    UnsupportedRegimeError,
    ball_exit_tail,
    ball_exit_tail_exact,
    ball_green,
    ball_poisson,
    expected_exit_time_ball,
    exterior_ball_martin,
    free_density,
    heat_kernel_profile,
    peak_density,
    punctured_line_green,
    survival_profile,
)


class TestBallGreen:
    def test_log_case_value(self, p11):
        # independent oracle: antiderivative 2 asinh(sqrt(s)) at w = 3
        ref = 2.0 * math.asinh(math.sqrt(3.0)) / (2.0 * math.pi)
        assert ball_green(p11, 0.0, 1.0, 0.0, 0.5) == pytest.approx(ref, rel=1e-10)

    def test_symmetry(self, p15):
        a = ball_green(p15, 0.0, 1.0, 0.2, -0.7)
        b = ball_green(p15, 0.0, 1.0, -0.7, 0.2)
        assert a == b

    def test_diagonal_infinite_when_d_ge_alpha(self, p11, p21):
        assert ball_green(p11, 0.0, 1.0, 0.3, 0.3) == math.inf
        assert ball_green(p21, (0, 0), 1.0, (0.3, 0), (0.3, 0)) == math.inf

    def test_diagonal_finite_in_recurrent_line(self, p15):
        v = ball_green(p15, 0.0, 1.0, 0.0, 0.0)
        assert 0 < v < math.inf

    def test_rejects_outside_points(self, p11):
        with pytest.raises(ValueError):
            ball_green(p11, 0.0, 1.0, 1.5, 0.0)

    @pytest.mark.parametrize(
        "d,alpha,xfrac",
        [
            (1, 1.0, 0.0),
            (1, 1.0, 0.6),
            (1, 0.5, 0.0),
            (1, 0.5, 0.95),
            (2, 1.0, 0.0),
            (2, 1.5, 0.0),
        ],
    )
    def test_green_mass_equals_expected_exit_time(self, d, alpha, xfrac):
        params = StableParams(d, alpha)
        x = np.zeros(d)
        x[0] = xfrac
        if d == 1:
            f = lambda v: ball_green(params, 0.0, 1.0, x, (v,))
            mass, _ = integrate.quad(
                f, -1, 1, points=[float(x[0])], limit=300, epsabs=1e-10, epsrel=1e-9
            )
        else:
            sd = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
            f = lambda r: ball_green(params, (0.0,) * d, 1.0, x, _axis(r, d)) * r ** (d - 1)
            mass, _ = integrate.quad(
                f, 0, 1, points=[0.0], limit=300, epsabs=1e-10, epsrel=1e-9
            )
            mass *= sd
        assert mass == pytest.approx(
            expected_exit_time_ball(params, (0.0,) * d, 1.0, x), abs=1e-6
        )


def _axis(r, d):
    p = np.zeros(d)
    p[0] = r
    return p


class TestBallPoisson:
    @pytest.mark.parametrize("d,alpha", [(1, 1.0), (1, 0.5), (2, 1.0), (2, 1.5)])
    def test_normalization(self, d, alpha):
        from stableheat.harness import _poisson_mass

        params = StableParams(d, alpha)
        assert _poisson_mass(params, 0.3) == pytest.approx(1.0, abs=1e-6)

    def test_exit_by_jump_tail_third(self, p11):
        assert ball_exit_tail_exact(p11, 0.0, 2.0) == pytest.approx(1.0 / 3.0, abs=1e-9)

    def test_sign_symmetry(self, p11):
        assert ball_poisson(p11, 0.0, 1.0, 0.0, 2.0) == ball_poisson(
            p11, 0.0, 1.0, 0.0, -2.0
        )

    def test_rejects_interior_target(self, p11):
        with pytest.raises(ValueError):
            ball_poisson(p11, 0.0, 1.0, 0.0, 0.9)


class TestBallExitTail:
    def test_bracket_contains_exact(self, p11):
        br = ball_exit_tail(p11, 0.0, 2.0)
        assert br.lower <= 1.0 / 3.0 <= br.upper
        # comparator value is 1/2, the exact-to-comparator ratio 2/3
        assert br.lower <= (2.0 / 3.0) * 0.5 <= br.upper

    def test_vanishes_at_boundary(self, p11):
        br = ball_exit_tail(p11, 1.0 - 1e-12, 2.0)
        assert br.upper < 1e-5

    def test_threshold_scaling(self, p15):
        b2 = ball_exit_tail(p15, 0.0, 2.0)
        b4 = ball_exit_tail(p15, 0.0, 4.0)
        assert b4.upper / b2.upper == pytest.approx(2.0 ** -1.5, rel=1e-12)

    def test_rejects_small_threshold(self, p11):
        with pytest.raises(ValueError):
            ball_exit_tail(p11, 0.0, 1.5)


class TestExpectedExitTime:
    def test_unit_value(self, p11):
        assert expected_exit_time_ball(p11, 0.0, 1.0, 0.0) == pytest.approx(1.0, rel=1e-14)

    def test_zero_on_sphere(self, p15):
        assert expected_exit_time_ball(p15, 0.0, 1.0, 1.0) == 0.0

    def test_cauchy_interior(self, p11):
        assert expected_exit_time_ball(p11, 0.0, 1.0, 0.6) == pytest.approx(0.8, rel=1e-14)

    def test_rejects_outside(self, p11):
        with pytest.raises(ValueError):
            expected_exit_time_ball(p11, 0.0, 1.0, 1.2)


class TestExteriorBallMartin:
    def test_raw_value(self, p21):
        assert exterior_ball_martin(p21, (math.sqrt(2.0), 0.0), raw=True) == pytest.approx(
            math.pi / 2, rel=1e-10
        )

    def test_vanishes_on_sphere(self, p21):
        assert exterior_ball_martin(p21, (1.0, 0.0)) == 0.0

    def test_monotone(self, p21):
        a = exterior_ball_martin(p21, (math.sqrt(2.0), 0.0), raw=True)
        b = exterior_ball_martin(p21, (2.0, 0.0), raw=True)
        assert b > a

    def test_normalization_point(self, p21):
        assert exterior_ball_martin(p21, (2.0, 0.0)) == pytest.approx(1.0, rel=1e-14)

    def test_bounded_at_infinity(self, p21):
        limit = exterior_ball_martin(p21, (1e8, 0.0))
        beta_ref = math.gamma(0.5) * math.gamma(0.5) / math.gamma(1.0)
        norm = exterior_ball_martin(p21, (2.0, 0.0), raw=True)
        assert limit == pytest.approx(beta_ref / norm, rel=1e-3)

    def test_rejects_recurrent_range(self, p11):
        with pytest.raises(UnsupportedRegimeError):
            exterior_ball_martin(p11, 2.0)


class TestPuncturedLineGreen:
    def test_value(self):
        c = 1.0 / (2.0 * math.gamma(1.5) * abs(math.cos(3 * math.pi / 4)))
        ref = c * (2.0 - math.sqrt(2.0))
        assert punctured_line_green(1.5, 1.0, -1.0) == pytest.approx(ref, rel=1e-12)
        assert ref == pytest.approx(0.467, abs=5e-4)

    def test_zero_at_pole(self):
        assert punctured_line_green(1.5, 1.0, 0.0) == 0.0

    def test_diagonal(self):
        c = 1.0 / (2.0 * math.gamma(1.5) * abs(math.cos(3 * math.pi / 4)))
        assert punctured_line_green(1.5, 0.7, 0.7) == pytest.approx(
            2 * c * 0.7 ** 0.5, rel=1e-12
        )

    def test_symmetry(self):
        assert punctured_line_green(1.2, 0.5, -2.0) == punctured_line_green(1.2, -2.0, 0.5)

    def test_rejects_low_alpha(self):
        with pytest.raises(UnsupportedRegimeError):
            punctured_line_green(1.0, 1.0, 2.0)


PROFILE_DOMAINS = [
    (Ball((0.0,), 1.0), StableParams(1, 1.0), {}),
    (Ball((0.0,), 2.0), StableParams(1, 1.5), {"lambda1": 1.1}),
    (HalfSpace((1.0,)), StableParams(1, 1.0), {}),
    (ExteriorBall((0.0, 0.0), 1.0), StableParams(2, 1.0), {}),
    (ExteriorBall((0.0,), 1.0), StableParams(1, 1.0), {}),
    (ExteriorBall((0.0,), 1.0), StableParams(1, 1.5), {}),
    (CircularCone(math.pi / 3, (0.0, 1.0)), StableParams(2, 1.0), {"beta": 0.7}),
    (HyperplaneComplement(1), StableParams(1, 1.5), {}),
    (IntervalComplement(((-1.0, 1.0),)), StableParams(1, 1.0), {}),
    (IntervalComplement(((-1.0, 1.0), (2.0, 3.0))), StableParams(1, 1.5), {}),
]


class TestSurvivalProfile:
    def test_halfspace_quarter(self, p11):
        prof = survival_profile(HalfSpace((1.0,)), p11)
        assert prof.evaluate(16.0, 1.0) == pytest.approx(0.25)

    def test_hyperplane_clamps_at_one(self, p15):
        prof = survival_profile(HyperplaneComplement(1), p15)
        assert prof.evaluate(1e-12, 1.0) == 1.0

    def test_cone_halfspace_reduction(self, p21):
        cone = survival_profile(CircularCone(math.pi / 2, (0.0, 1.0)), p21)
        half = survival_profile(HalfSpace((0.0, 1.0)), p21)
        for t in np.geomspace(0.01, 100, 7):
            for x in [(0.2, 0.5), (3.0, 0.1), (0.0, 2.0)]:
                assert cone.evaluate(t, x) == pytest.approx(half.evaluate(t, x), abs=1e-12)

    @pytest.mark.parametrize("domain,params,kw", PROFILE_DOMAINS)
    def test_range_monotonicity_limits(self, domain, params, kw):
        from stableheat import contains, domains as dm

        prof = survival_profile(domain, params, **kw)
        d = dm.dim(domain)
        probe = {
            1: (1.5,) if not contains(domain, (0.5,) * 1) else (0.5,),
            2: (0.3, 0.4) if contains(domain, (0.3, 0.4)) else (2.0, 0.0),
        }[min(d, 2)]
        values = [prof.evaluate(t, probe) for t in np.geomspace(1e-4, 1e4, 25)]
        assert all(0.0 <= v <= 1.0 for v in values)
        assert all(a >= b - 1e-12 for a, b in zip(values, values[1:]))
        assert values[0] == pytest.approx(1.0, abs=1e-6)

    @pytest.mark.parametrize("domain,params,kw", PROFILE_DOMAINS)
    def test_zero_outside(self, domain, params, kw):
        from stableheat import domains as dm

        prof = survival_profile(domain, params, **kw)
        d = dm.dim(domain)
        outside = {1: (0.0,), 2: (0.0, -1.0)}[min(d, 2)]
        if dm.contains(domain, outside):
            pytest.skip("probe not outside this variant")
        assert prof.evaluate(1.0, outside) == 0.0

    def test_scaling_consistency(self):
        # profile(rD) at (r^alpha t, r x) matches profile(D) at (t, x)
        cases = [
            (Ball((0.0,), 1.0), StableParams(1, 1.5), (0.4,)),
            (HalfSpace((1.0,)), StableParams(1, 1.0), (0.7,)),
            (CircularCone(math.pi / 2, (0.0, 1.0)), StableParams(2, 1.0), (0.1, 0.4)),
            (HyperplaneComplement(1), StableParams(1, 1.5), (0.6,)),
        ]
        from stableheat import scale_domain

        r = 3.0
        for domain, params, x in cases:
            p0 = survival_profile(domain, params)
            p1 = survival_profile(scale_domain(domain, r), params)
            for t in (0.1, 1.0, 10.0):
                rx = tuple(r * v for v in x)
                assert p1.evaluate(r ** params.alpha * t, rx) == pytest.approx(
                    p0.evaluate(t, x), rel=1e-12
                )

    def test_exterior_regime_selection(self):
        assert survival_profile(ExteriorBall((0.0, 0.0), 1.0), StableParams(2, 1.0)).form == "exterior_gt"
        assert survival_profile(ExteriorBall((0.0,), 1.0), StableParams(1, 1.0)).form == "exterior_log"
        assert survival_profile(ExteriorBall((0.0,), 1.0), StableParams(1, 1.5)).form == "exterior_rec"
        assert survival_profile(ExteriorBall((0.0,), 1.0), StableParams(1, 0.5)).form == "exterior_gt"

    def test_cone_needs_beta(self, p21):
        with pytest.raises(MissingParameterError):
            survival_profile(CircularCone(math.pi / 3, (0.0, 1.0)), p21)

    def test_hyperplane_needs_alpha_above_one(self, p11):
        with pytest.raises(UnsupportedRegimeError):
            survival_profile(HyperplaneComplement(1), p11)

    def test_interval_needs_recurrent_alpha(self):
        with pytest.raises(UnsupportedRegimeError):
            survival_profile(IntervalComplement(((-1.0, 1.0),)), StableParams(1, 0.5))

    def test_lipschitz_not_in_profile_catalog(self, p21):
        dom_sl = SpecialLipschitz(((-1.0, 0.0), (1.0, 0.0)), 0.5)
        with pytest.raises(UnsupportedRegimeError):
            survival_profile(dom_sl, StableParams(2, 1.0))


class TestTangentBallBracket:
    def test_lower_below_upper_and_unit_limit(self, p21):
        domain = ExteriorBall((0.0, 0.0), 1.0)
        prof = survival_profile(domain, p21, lambda1=1.1, c11=True)
        for t in np.geomspace(1e-3, 1e3, 13):
            br = prof.evaluate_bracket(t, (3.0, 0.0))
            assert br.lower <= br.upper
        early = prof.evaluate_bracket(1e-8, (3.0, 0.0))
        assert early.lower == pytest.approx(1.0, abs=1e-3)
        assert early.upper == pytest.approx(1.0, abs=1e-6)

    def test_diam_improvement_bounds_long_time(self, p21):
        # with a bounded complement the lower envelope stays proportional
        # to the plain shape instead of decaying exponentially
        domain = ExteriorBall((0.0, 0.0), 1.0)
        prof = survival_profile(domain, p21, lambda1=1.1, c11=True)
        br = prof.evaluate_bracket(1e6, (3.0, 0.0))
        assert br.lower > 0.0
        assert br.lower >= (1.0 / 2.0) ** p21.alpha * br.upper * 0.2

    def test_needs_lambda1(self, p11):
        with pytest.raises(MissingParameterError):
            survival_profile(Ball((0.0,), 1.0), p11, c11=True)

    def test_needs_tangent_scale(self, p21):
        with pytest.raises(UnsupportedRegimeError):
            survival_profile(HyperplaneComplement(2), StableParams(2, 1.5), c11=True)


class TestHeatKernelProfile:
    def test_diagonal_dominated_by_peak(self, p11):
        br = heat_kernel_profile(Ball((0.0,), 1.0), p11, 0.3, 0.2, 0.2)
        assert br.upper <= peak_density(p11, 0.3) * (1 + 1e-12)

    def test_ball_composition_at_origin(self, p11):
        br = heat_kernel_profile(Ball((0.0,), 1.0), p11, 1.0, 0.0, 0.0)
        assert br.lower == br.upper == pytest.approx(1.0 / math.pi, rel=1e-9)

    def test_halfspace_long_time_decay_scan(self, p11):
        dom_h = HalfSpace((1.0,))
        values = [
            heat_kernel_profile(dom_h, p11, t, 1.0, 2.0).upper
            for t in np.geomspace(1.0, 1e4, 12)
        ]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_bracket_type(self, p11):
        br = heat_kernel_profile(Ball((0.0,), 1.0), p11, 0.5, 0.1, -0.3)
        assert isinstance(br, Bracket)


@settings(max_examples=30, deadline=None)
@given(t=st.floats(1e-3, 1e3), x=st.floats(-0.999, 0.999))
def test_ball_profile_bounds_property(t, x):
    prof = survival_profile(Ball((0.0,), 1.0), StableParams(1, 1.2))
    v = prof.evaluate(t, (x,))
    assert 0.0 <= v <= 1.0
