"""Signed distance primitives, CSG combinations, and point sampling.

The CSG invariant under test throughout: min/max combinations keep the sign
of the true signed distance and never overstate the distance magnitude.
"""

import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hausdorff_grid import (
    Ball,
    Box,
    Complement,
    Difference,
    Intersection,
    Union,
    ring_with_inner_ball,
    sample_boundary,
    sample_volume,
)
from hausdorff_grid.shapes import lattice_points

_BOUNDARY_CACHE = {}


def _boundary_cloud(shape):
    key = type(shape).__name__
    if key not in _BOUNDARY_CACHE:
        _BOUNDARY_CACHE[key] = sample_boundary(shape, 0.002).points
    return _BOUNDARY_CACHE[key]


class TestPrimitives:
    def test_ball_sd_values(self):
        b = Ball((1.0, 2.0), 0.5)
        pts = np.array([[1.0, 2.0], [1.5, 2.0], [1.0, 3.5]])
        npt.assert_allclose(b.evaluate_sd(pts), [-0.5, 0.0, 1.0])

    def test_ball_broadcasting(self):
        b = Ball((0.0, 0.0), 1.0)
        pts = np.zeros((4, 5, 2))
        assert b.evaluate_sd(pts).shape == (4, 5)

    def test_box_sd_outside_corner(self):
        box = Box((0.0, 0.0), (1.0, 1.0))
        # diagonal distance from the corner
        npt.assert_allclose(box.evaluate_sd(np.array([2.0, 2.0])), np.sqrt(2.0))

    def test_box_sd_inside(self):
        box = Box((0.0, 0.0), (2.0, 1.0))
        npt.assert_allclose(box.evaluate_sd(np.array([1.0, 0.5])), -0.5)

    def test_dim_mismatch_rejected(self):
        with pytest.raises(ValueError):
            Ball((0.0, 0.0), 1.0).evaluate_sd(np.zeros((3, 3)))

    @pytest.mark.parametrize(
        "ctor",
        [
            lambda: Ball((0.0,), 0.0),
            lambda: Ball((0.0,) * 4, 1.0),
            lambda: Box((0.0, 0.0), (1.0,)),
            lambda: Box((0.0, 1.0), (1.0, 1.0)),
        ],
    )
    def test_invalid_primitives(self, ctor):
        with pytest.raises(ValueError):
            ctor()


class TestCSG:
    def test_union_is_min(self):
        u = Union((Ball((0.0,), 1.0), Ball((5.0,), 1.0)))
        npt.assert_allclose(u.evaluate_sd(np.array([[2.5]])), [1.5])
        assert not u.exact

    def test_intersection_is_max(self):
        i = Intersection((Ball((0.0, 0.0), 2.0), Ball((1.0, 0.0), 2.0)))
        npt.assert_allclose(i.evaluate_sd(np.array([[0.0, 0.0]])), [-1.0])

    def test_complement_flips_sign_and_is_unbounded(self):
        c = Complement(Ball((0.0,), 1.0))
        npt.assert_allclose(c.evaluate_sd(np.array([[0.0], [2.0]])), [1.0, -1.0])
        assert c.exact
        with pytest.raises(ValueError):
            c.bounding_box()

    def test_difference_annulus_is_exact_everywhere(self):
        ring = Difference(Ball((0.0, 0.0), 2.0), Ball((0.0, 0.0), 1.0), exact=True)
        pts = np.array([[0.0, 0.0], [1.5, 0.0], [3.0, 0.0], [0.25, 0.0]])
        npt.assert_allclose(ring.evaluate_sd(pts), [1.0, -0.5, 1.0, 0.75])

    def test_children_dim_mismatch(self):
        with pytest.raises(ValueError):
            Union((Ball((0.0,), 1.0), Ball((0.0, 0.0), 1.0)))

    def test_empty_union_rejected(self):
        with pytest.raises(ValueError):
            Union(())

    @given(
        x=st.floats(-4.0, 4.0),
        y=st.floats(-4.0, 4.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_csg_value_is_conservative(self, x, y):
        """|combined sd| never exceeds the distance to the combined boundary.

        The reference distance comes from a boundary point cloud of the
        combined set, which can only overstate the true distance (by at most
        a curvature term of the sampling pitch, absorbed in the tolerance).
        """
        a = Ball((0.0, 0.0), 1.5)
        b = Box((-0.5, -2.0), (0.5, 2.0))
        p = np.array([x, y])
        for combined in (Union((a, b)), Intersection((a, b)), Difference(a, b)):
            val = float(combined.evaluate_sd(p))
            cloud = _boundary_cloud(combined)
            ref = float(np.min(np.linalg.norm(cloud - p, axis=1)))
            assert abs(val) <= ref + 1e-3


class TestRingWithInnerBall:
    def test_exactness_flags_and_displacement(self):
        a, b = ring_with_inner_ball(2, (3.0, 0.0))
        assert a.exact and b.exact
        # ball surface point towards the origin
        npt.assert_allclose(a.evaluate_sd(np.array([2.0, 0.0])), 0.0, atol=1e-15)
        # cavity rim belongs to the ring
        npt.assert_allclose(b.evaluate_sd(np.array([8.0, 0.0])), 0.0, atol=1e-15)

    def test_centered_variant_shares_ring(self):
        a, b = ring_with_inner_ball(2, None)
        assert a is b

    def test_ball_must_fit_in_cavity(self):
        with pytest.raises(ValueError):
            ring_with_inner_ball(2, (7.2, 0.0))  # 7.2 + 1 >= 8

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            ring_with_inner_ball(3, (1.0, 0.0))


class TestSampling:
    def test_lattice_points_pitch(self):
        pts = lattice_points((0.0, 0.0), (1.0, 2.0), 0.3)
        assert pts.shape[1] == 2
        xs = np.unique(pts[:, 0])
        assert np.all(np.diff(xs) <= 0.3 + 1e-12)

    def test_sample_volume_ball(self):
        cloud = sample_volume(Ball((0.0, 0.0), 1.0), 0.05)
        assert cloud.kind == "volume"
        assert np.all(np.linalg.norm(cloud.points, axis=1) <= 1.0 + 1e-12)
        # the covering property backs the oracle error budget
        probe = np.array([0.99, 0.0])
        d = np.min(np.linalg.norm(cloud.points - probe, axis=1))
        assert d <= np.sqrt(2) * 0.05

    def test_sample_volume_empty(self):
        hollow = Difference(Box((0.0, 0.0), (1.0, 1.0)), Ball((0.5, 0.5), 2.0))
        with pytest.raises(ValueError, match="empty set"):
            sample_volume(hollow, 0.3)

    def test_sample_boundary_circle(self):
        cloud = sample_boundary(Ball((1.0, 0.0), 2.0), 0.1)
        assert cloud.kind == "boundary"
        radii = np.linalg.norm(cloud.points - np.array([1.0, 0.0]), axis=1)
        npt.assert_allclose(radii, 2.0, atol=1e-9)
        # adjacent parameter points are close along the circle
        assert cloud.points.shape[0] >= int(np.ceil(2 * np.pi * 2.0 / 0.1))

    def test_sample_boundary_csg_filters_hidden_parts(self):
        ring = Difference(Ball((0.0, 0.0), 2.0), Ball((0.0, 0.0), 1.0), exact=True)
        cloud = sample_boundary(ring, 0.05)
        radii = np.linalg.norm(cloud.points, axis=1)
        assert np.all((np.abs(radii - 2.0) < 1e-6) | (np.abs(radii - 1.0) < 1e-6))

    def test_sample_boundary_box_3d(self):
        box = Box((0.0, 0.0, 0.0), (1.0, 1.0, 1.0))
        cloud = sample_boundary(box, 0.25)
        sd = box.evaluate_sd(cloud.points)
        npt.assert_allclose(sd, 0.0, atol=1e-9)

    def test_point_cloud_is_readonly(self):
        cloud = sample_volume(Ball((0.0,), 1.0), 0.25)
        with pytest.raises(ValueError):
            cloud.points[0, 0] = 7.0
