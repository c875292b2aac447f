import numpy as np
import pytest

from abstract_safe_control import geometry
from abstract_safe_control.errors import (
    AssumptionViolation,
    DimensionMismatch,
    InfeasiblePolytope,
    UnboundedDirection,
)
from abstract_safe_control.geometry import Interval, Polytope

from oracles import (
    direction_sampling_radius,
    enumerate_vertices,
    random_polytope_containing_origin,
    support_value,
)

UNIT_BOX = Polytope.box([-1, -1], [1, 1])


class TestPolytope:
    def test_box_construction(self):
        assert UNIT_BOX.dim == 2
        assert UNIT_BOX.A.shape == (4, 2)

    def test_empty_polytope_rejected(self):
        # v <= -1 and v >= 1 simultaneously
        with pytest.raises(InfeasiblePolytope):
            Polytope([[1.0], [-1.0]], [-1.0, -1.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            Polytope(np.eye(2), [1.0, 1.0, 1.0])

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            Polytope([[np.inf, 0.0]], [1.0])


class TestInterval:
    def test_ordering_enforced(self):
        with pytest.raises(ValueError):
            Interval(1.0, 0.0)

    def test_contains(self):
        iv = Interval(-1.0, 2.0)
        assert iv.contains(0.0)
        assert iv.contains(2.0 + 1e-12)
        assert not iv.contains(2.1)


class TestContains:
    def test_origin_in_unit_box(self):
        assert geometry.contains(UNIT_BOX, [0.0, 0.0])

    def test_outside_bound(self):
        assert not geometry.contains(UNIT_BOX, [1.5, 0.0])

    def test_tolerance_contract(self):
        assert geometry.contains(UNIT_BOX, [1.0 + geometry.EPS_GEOM / 2, 0.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            geometry.contains(UNIT_BOX, [0.0, 0.0, 0.0])


class TestLpExtreme:
    def test_box_support(self):
        val, v = geometry.lp_extreme(UNIT_BOX, [1.0, 0.0], "max")
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_box_corner(self):
        val, v = geometry.lp_extreme(UNIT_BOX, [1.0, 1.0], "max")
        assert val == pytest.approx(2.0, abs=1e-9)
        np.testing.assert_allclose(v, [1.0, 1.0], atol=1e-9)

    def test_simplex_support_matches_vertex_oracle(self):
        # {v >= 0, v1 + v2 <= 1}
        P = Polytope([[-1.0, 0.0], [0.0, -1.0], [1.0, 1.0]], [0.0, 0.0, 1.0])
        val, _ = geometry.lp_extreme(P, [1.0, 0.0], "max")
        oracle = support_value(P.A, P.b, [1.0, 0.0])
        assert val == pytest.approx(oracle, abs=1e-9)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_min_sense(self):
        val, v = geometry.lp_extreme(UNIT_BOX, [1.0, 0.0], "min")
        assert val == pytest.approx(-1.0, abs=1e-9)

    def test_unbounded_direction(self):
        halfplane = Polytope([[-1.0, 0.0]], [0.0])  # v1 >= 0
        with pytest.raises(UnboundedDirection):
            geometry.lp_extreme(halfplane, [1.0, 0.0], "max")

    def test_random_lps_match_vertex_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(60):
            dim = int(rng.integers(1, 5))
            A, b = random_polytope_containing_origin(rng, dim)
            P = Polytope(A, b)
            c = rng.standard_normal(dim)
            val, v = geometry.lp_extreme(P, c, "max")
            oracle = support_value(A, b, c)
            assert val == pytest.approx(oracle, abs=1e-7)
            assert geometry.contains(P, v, tol=1e-7)


class TestLpFeasible:
    def test_equality_inside_box(self):
        # u1 + u2 = 1 crosses the unit box
        assert geometry.lp_feasible(UNIT_BOX.A, UNIT_BOX.b, [[1.0, 1.0]], [1.0])

    def test_equality_outside_box(self):
        assert not geometry.lp_feasible(UNIT_BOX.A, UNIT_BOX.b, [[1.0, 1.0]], [5.0])


class TestAffineImageInterval:
    def test_coordinate_projection(self):
        iv = geometry.affine_image_interval([1.0, 0.0], 0.0, UNIT_BOX)
        assert (iv.lo, iv.hi) == (pytest.approx(-1.0, abs=1e-9), pytest.approx(1.0, abs=1e-9))

    def test_sum_map_matches_vertex_oracle(self):
        iv = geometry.affine_image_interval([1.0, 1.0], 0.5, UNIT_BOX)
        hi = support_value(UNIT_BOX.A, UNIT_BOX.b, [1.0, 1.0]) + 0.5
        lo = -support_value(UNIT_BOX.A, UNIT_BOX.b, [-1.0, -1.0]) + 0.5
        assert iv.lo == pytest.approx(lo, abs=1e-9)
        assert iv.hi == pytest.approx(hi, abs=1e-9)
        assert (iv.lo, iv.hi) == (pytest.approx(-1.5), pytest.approx(2.5))

    def test_constant_map(self):
        iv = geometry.affine_image_interval([0.0, 0.0], 0.3, UNIT_BOX)
        assert iv.lo == pytest.approx(0.3, abs=1e-12)
        assert iv.hi == pytest.approx(0.3, abs=1e-12)


class TestInnerBallRadius:
    def test_rectangle(self):
        P = Polytope.box([-1, -2], [1, 2])
        assert geometry.inner_ball_radius(P, 2) == pytest.approx(1.0, abs=1e-12)

    def test_scalar_interval(self):
        for p in (1, 2, np.inf):
            P = Polytope.box([-3.5], [3.5])
            assert geometry.inner_ball_radius(P, p) == pytest.approx(3.5, abs=1e-12)

    def test_oblique_facet(self):
        # facet v1 + v2 <= sqrt(2) sits at Euclidean distance 1 from the origin
        P = Polytope(
            [[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], [np.sqrt(2.0), 1.0, 1.0]
        )
        assert geometry.inner_ball_radius(P, 2) == pytest.approx(1.0, abs=1e-12)

    def test_zero_outside_raises(self):
        P = Polytope.box([0.1, 0.1], [1.0, 1.0])
        with pytest.raises(AssumptionViolation):
            geometry.inner_ball_radius(P, 2)

    def test_zero_row_raises(self):
        P = Polytope([[0.0, 0.0], [1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]],
                     [1.0, 1.0, 1.0, 1.0, 1.0])
        with pytest.raises(ValueError, match="zero row"):
            geometry.inner_ball_radius(P, 2)

    def test_scaling(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            dim = int(rng.integers(1, 5))
            A, b = random_polytope_containing_origin(rng, dim)
            alpha = float(rng.uniform(0.2, 4.0))
            r1 = geometry.inner_ball_radius(Polytope(A, b), 2)
            r2 = geometry.inner_ball_radius(Polytope(A, alpha * b), 2)
            assert r2 == pytest.approx(alpha * r1, rel=1e-12)

    def test_ball_containment_property(self):
        rng = np.random.default_rng(11)
        for p in (1, 2, np.inf):
            for _ in range(10):
                dim = int(rng.integers(1, 5))
                A, b = random_polytope_containing_origin(rng, dim)
                P = Polytope(A, b)
                r = geometry.inner_ball_radius(P, p)
                pts = rng.standard_normal((1000, dim))
                lens = np.linalg.norm(pts, ord=(p if p != np.inf else np.inf), axis=1)
                pts = pts / lens[:, None] * rng.uniform(0, 1, (1000, 1))
                pts *= r * (1 - 1e-9)
                assert np.all(P.A @ pts.T <= P.b[:, None] + geometry.EPS_GEOM)


class TestInnerBallRadiusSampled:
    def test_axes_hit_box_facets(self):
        assert geometry.inner_ball_radius_sampled(UNIT_BOX, 2, n_dirs=4) == pytest.approx(1.0)

    def test_many_directions_converge(self):
        r = geometry.inner_ball_radius_sampled(UNIT_BOX, 2, n_dirs=10000)
        assert r == pytest.approx(1.0, abs=1e-3)

    def test_scalar_interval(self):
        P = Polytope.box([-2.0], [3.0])
        assert geometry.inner_ball_radius_sampled(P, 2, n_dirs=2) == pytest.approx(2.0)

    def test_requires_enough_directions(self):
        with pytest.raises(ValueError):
            geometry.inner_ball_radius_sampled(UNIT_BOX, 2, n_dirs=3)

    def test_always_over_approximates(self):
        rng = np.random.default_rng(5)
        for _ in range(15):
            dim = int(rng.integers(1, 4))
            A, b = random_polytope_containing_origin(rng, dim)
            P = Polytope(A, b)
            exact = geometry.inner_ball_radius(P, 2)
            gaps = []
            for n_dirs in (2 * dim, 8 * dim, 64 * dim):
                approx = geometry.inner_ball_radius_sampled(P, 2, n_dirs=n_dirs)
                assert approx >= exact - 1e-9
                gaps.append(approx - exact)
            assert gaps[-1] <= gaps[0] + 1e-9

    def test_matches_direction_sampling_oracle(self):
        rng = np.random.default_rng(19)
        for _ in range(10):
            dim = int(rng.integers(1, 4))
            A, b = random_polytope_containing_origin(rng, dim)
            P = Polytope(A, b)
            exact = geometry.inner_ball_radius(P, 2)
            oracle = direction_sampling_radius(A, b, p=2, n_dirs=2000, seed=1)
            assert exact == pytest.approx(oracle, rel=2e-3, abs=1e-6)


class TestDualNormOrder:
    def test_pairs(self):
        assert geometry.dual_norm_order(2) == pytest.approx(2.0)
        assert geometry.dual_norm_order(1) == np.inf
        assert geometry.dual_norm_order(np.inf) == pytest.approx(1.0)
        assert geometry.dual_norm_order(3) == pytest.approx(1.5)

    def test_invalid(self):
        with pytest.raises(ValueError):
            geometry.dual_norm_order(0.5)


def test_vertex_oracle_sanity():
    verts = enumerate_vertices(UNIT_BOX.A, UNIT_BOX.b)
    assert verts.shape == (4, 2)
    assert np.max(np.abs(verts)) == pytest.approx(1.0)
