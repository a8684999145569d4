import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stableheat import domains as dom


BALL = dom.Ball((0.0,), 1.0)
HS = dom.HalfSpace((0.0, 1.0))
EXT = dom.ExteriorBall((0.0,), 1.0)
CONE = dom.CircularCone(math.pi / 4, (0.0, 0.0, 1.0))
HALF_CONE = dom.CircularCone(math.pi / 2, (0.0, 1.0))
HYP = dom.HyperplaneComplement(2)
SLIP = dom.SpecialLipschitz(((-5.0, 0.0), (0.0, 0.0), (1.0, 1.0), (5.0, 1.0)), 1.0)
IC = dom.IntervalComplement(((-1.0, 1.0), (2.0, 3.0)))
ANN = dom.BallUnionExteriorBall((0.0,), 1.0, 3.0)

CATALOG = [BALL, HS, EXT, CONE, HALF_CONE, HYP, SLIP, IC, ANN]


class TestDistance:
    def test_ball(self):
        assert dom.dist_to_complement(dom.Ball((0.0,), 1.0), 0.25) == pytest.approx(0.75)

    def test_exterior_ball(self):
        assert dom.dist_to_complement(EXT, 3.0) == pytest.approx(2.0)

    def test_hyperplane_complement(self):
        assert dom.dist_to_complement(HYP, (5.0, -0.3)) == pytest.approx(0.3)

    def test_boundary_gives_zero(self):
        assert dom.dist_to_complement(BALL, 1.0) == 0.0
        assert dom.dist_to_complement(BALL, 1.5) == 0.0

    def test_lipschitz_graph_distance(self):
        # above the flat part the nearest boundary point is vertical
        assert dom.dist_to_complement(SLIP, (-2.0, 0.5)) == pytest.approx(0.5)
        # above the unit-slope segment the distance picks up 1/sqrt(2)
        assert dom.dist_to_complement(SLIP, (0.5, 1.5)) == pytest.approx(
            1.0 / math.sqrt(2), rel=1e-12
        )

    def test_cone_halfaperture_pi_2_is_halfspace(self):
        for p in [(0.3, 0.4), (2.0, 1.0), (-1.0, 0.5)]:
            assert dom.dist_to_complement(HALF_CONE, p) == pytest.approx(
                max(p[1], 0.0), rel=1e-12
            )


class TestContains:
    def test_halfspace_boundary_open(self):
        assert not dom.contains(HS, (3.0, 0.0))

    def test_interval_complement(self):
        assert dom.contains(dom.IntervalComplement(((-1.0, 1.0),)), 2.0)
        assert not dom.contains(IC, 2.5)

    def test_annulus_gap(self):
        assert not dom.contains(ANN, 2.0)
        assert dom.contains(ANN, 0.5)
        assert dom.contains(ANN, 4.0)

    @pytest.mark.parametrize("domain", CATALOG, ids=lambda d: type(d).__name__)
    def test_membership_iff_positive_distance(self, domain):
        rng = np.random.default_rng(7)
        d = dom.dim(domain)
        pts = rng.uniform(-4, 4, size=(400, d))
        inside = dom.contains_many(domain, pts)
        dists = dom.dist_many(domain, pts)
        assert np.array_equal(inside, dists > 0)


class TestFatWitness:
    def test_ball_boundary_point(self):
        w = dom.fat_witness(BALL, 1.0, 1.0)
        assert w.kappa == pytest.approx(0.5)
        assert w.center[0] == pytest.approx(0.5)

    def test_halfspace(self):
        w = dom.fat_witness(HS, (2.0, 0.0), 1.0)
        assert w.kappa == pytest.approx(0.5)
        assert w.center == pytest.approx((2.0, 0.5))

    def test_special_lipschitz_constant(self):
        w = dom.fat_witness(SLIP, (0.5, 0.5 + 1e-9), 1.0)
        assert w.kappa == pytest.approx(1.0 / (2.0 * math.sqrt(2.0)))

    def test_ball_absent_at_oversized_scale(self):
        assert dom.fat_witness(BALL, 1.0, 10.0) is None

    def test_interval_complement_picks_reachable_component(self):
        w = dom.fat_witness(IC, 1.5, 0.4)
        assert w is not None
        assert 1.0 < w.center[0] < 2.0

    WITNESS_CASES = [
        (BALL, (0.9,), 0.5),
        (BALL, (0.0,), 1.5),
        (HS, (1.0, 0.2), 2.0),
        (EXT, (2.0,), 1.0),
        (CONE, (0.0, 0.0, 1.0), 0.8),
        (CONE, (0.3, 0.0, 1.0), 0.5),
        (HALF_CONE, (0.5, 0.1), 1.0),
        (HYP, (3.0, -0.2), 1.0),
        (SLIP, (0.5, 1.2), 1.0),
        (IC, (1.5,), 0.4),
        (IC, (5.0,), 2.0),
        (ANN, (0.5,), 0.7),
        (ANN, (4.0,), 2.0),
    ]

    @pytest.mark.parametrize("domain,x,r", WITNESS_CASES)
    def test_witness_ball_containment_by_rejection(self, domain, x, r):
        w = dom.fat_witness(domain, x, r)
        assert w is not None
        rng = np.random.default_rng(13)
        d = dom.dim(domain)
        z = rng.standard_normal((10_000, d))
        z /= np.linalg.norm(z, axis=1)[:, None]
        u = rng.random(10_000) ** (1.0 / d)
        pts = np.asarray(w.center) + (w.kappa * r) * (1 - 1e-12) * u[:, None] * z
        assert dom.contains_many(domain, pts).all()
        assert (np.linalg.norm(pts - np.atleast_1d(np.asarray(x, float)), axis=1) < r).all()

    @pytest.mark.parametrize("domain,x,r", WITNESS_CASES)
    def test_witness_dominates_distance(self, domain, x, r):
        # delta(A) >= c (r v delta(x)) with the variant's declared constant
        w = dom.fat_witness(domain, x, r)
        c = dom.declared_kappa(domain) / 2.0
        da = dom.dist_to_complement(domain, w.center)
        dx = dom.dist_to_complement(domain, x)
        assert da >= c * max(r, dx) - 1e-12


class TestScaling:
    def test_ball(self):
        s = dom.scale_domain(dom.Ball((0.0,), 1.0), 3.0)
        assert s == dom.Ball((0.0,), 3.0)

    def test_cone_fixed_point(self):
        assert dom.scale_domain(CONE, 5.0) is CONE
        assert dom.scale_domain(HYP, 0.5) is HYP

    def test_interval_complement(self):
        s = dom.scale_domain(dom.IntervalComplement(((-1.0, 1.0),)), 2.0)
        assert s.intervals == ((-2.0, 2.0),)

    @settings(max_examples=30, deadline=None)
    @given(r=st.floats(0.1, 10.0), z=st.floats(-3.0, 3.0))
    def test_scaling_respects_distance(self, r, z):
        for domain in (BALL, EXT, dom.IntervalComplement(((-1.0, 1.0),))):
            x = (z,)
            lhs = dom.dist_to_complement(dom.scale_domain(domain, r), (r * z,))
            rhs = r * dom.dist_to_complement(domain, x)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


class TestTangentScale:
    def test_ball(self):
        assert dom.c11_scale(dom.Ball((0.0,), 2.0)) == 2.0

    def test_single_interval(self):
        assert dom.c11_scale(dom.IntervalComplement(((0.0, 4.0),))) == 2.0

    def test_interval_with_gap(self):
        assert dom.c11_scale(IC) == 0.5  # gap (1, 2) limits the outer ball

    def test_cone_corner(self):
        assert dom.c11_scale(CONE) is None

    def test_halfspace_flat(self):
        assert dom.c11_scale(HS) == math.inf

    def test_hyperplane_and_graph_absent(self):
        assert dom.c11_scale(HYP) is None
        assert dom.c11_scale(SLIP) is None

    def test_annulus(self):
        assert dom.c11_scale(ANN) == 1.0

    def test_exterior_ball(self):
        assert dom.c11_scale(EXT) == 1.0


class TestComplementDiameter:
    def test_values(self):
        assert dom.complement_diameter(EXT) == 2.0
        assert dom.complement_diameter(IC) == 4.0
        assert dom.complement_diameter(ANN) == 6.0
        assert dom.complement_diameter(BALL) == math.inf


class TestSerialization:
    @pytest.mark.parametrize(
        "domain",
        [BALL, HS, EXT, CONE, HYP, SLIP, IC, ANN],
        ids=lambda d: type(d).__name__,
    )
    def test_round_trip(self, domain):
        doc = dom.domain_to_dict(domain)
        back = dom.domain_from_dict(doc)
        assert back == domain

    def test_dimension_validation(self):
        doc = {"type": "ball", "center": [0.0, 0.0], "radius": 1.0}
        with pytest.raises(ValueError):
            dom.domain_from_dict(doc, expect_dim=1)

    def test_unknown_type(self):
        with pytest.raises(ValueError):
            dom.domain_from_dict({"type": "moebius"})

    def test_missing_field(self):
        with pytest.raises(ValueError):
            dom.domain_from_dict({"type": "ball", "center": [0.0]})


class TestValidation:
    def test_interval_overlap_rejected(self):
        with pytest.raises(ValueError):
            dom.IntervalComplement(((0.0, 2.0), (1.0, 3.0)))

    def test_annulus_ordering(self):
        with pytest.raises(ValueError):
            dom.BallUnionExteriorBall((0.0,), 2.0, 1.0)

    def test_lipschitz_slope_check(self):
        with pytest.raises(ValueError):
            dom.SpecialLipschitz(((0.0, 0.0), (1.0, 5.0)), 1.0)

    def test_cone_angle_range(self):
        with pytest.raises(ValueError):
            dom.CircularCone(0.0, (1.0, 0.0))
