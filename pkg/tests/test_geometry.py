import math

import numpy as np
import pytest

from expander_net.geometry import (HalfLine, PlaneCurve, angle_between, menger_curvature,
                                   nearest_segment, normalize_angle, polyline_intersections,
                                   polyline_length, rotate, self_intersects, signed_side)


def test_normalize_angle_range():
    assert normalize_angle(-math.pi / 2) == pytest.approx(3 * math.pi / 2)
    assert normalize_angle(2 * math.pi) == 0.0
    assert 0.0 <= normalize_angle(-1e-18) < 2 * math.pi


def test_half_line_contains_and_distance():
    l = HalfLine(math.pi / 2)
    assert l.contains((0.0, 3.0))
    assert not l.contains((0.0, -3.0))
    assert l.contains((0.0, 0.0))
    d = l.distance([[1.0, 5.0], [0.0, -2.0]])
    assert d == pytest.approx([1.0, 2.0])


def test_half_line_rejects_nonfinite():
    with pytest.raises(ValueError):
        HalfLine(float("nan"))


def test_menger_curvature_of_circle():
    r = 2.5
    t = np.linspace(0.0, math.pi, 200)
    ccw = np.column_stack([r * np.cos(t), r * np.sin(t)])
    k = menger_curvature(ccw)
    assert np.allclose(k, 1.0 / r, rtol=1e-12)
    assert np.allclose(menger_curvature(ccw[::-1]), -1.0 / r, rtol=1e-12)


def test_menger_curvature_straight_line_is_zero():
    pts = np.column_stack([np.linspace(0, 1, 10), 2 * np.linspace(0, 1, 10)])
    assert np.allclose(menger_curvature(pts), 0.0, atol=1e-12)


def test_polyline_intersections_cross():
    a = np.array([[-1.0, 0.0], [1.0, 0.0]])
    b = np.array([[0.0, -1.0], [0.0, 1.0]])
    pts = polyline_intersections(a, b)
    assert pts.shape == (1, 2)
    assert np.allclose(pts[0], 0.0)
    assert polyline_intersections(a, a + [0.0, 1.0]).shape == (0, 2)


def test_self_intersection_and_length():
    bow = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float)
    assert self_intersects(bow)
    assert not self_intersects(bow[:3])
    assert polyline_length([[0, 0], [3, 4]]) == pytest.approx(5.0)


def test_signed_side_and_nearest_segment():
    line = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    assert signed_side(line, (0.5, 0.3)) == pytest.approx(0.3)
    assert signed_side(line, (1.5, -0.2)) == pytest.approx(-0.2)
    # beyond the last vertex the end segment acts as a ray
    assert signed_side(line, (10.0, 0.1)) == pytest.approx(0.1)
    i, s, d = nearest_segment(line, (1.25, 1.0))
    assert (i, s, d) == (1, pytest.approx(0.25), pytest.approx(1.0))


def test_rotation_and_angle_between():
    v = rotate(np.array([1.0, 0.0]), math.pi / 3)
    assert angle_between(v, [1.0, 0.0]) == pytest.approx(math.pi / 3)
    assert angle_between([1.0, 0.0], [-1.0, 0.0]) == pytest.approx(math.pi)


def test_plane_curve_is_read_only_and_scales():
    c = PlaneCurve(np.array([[1.0, 0.0], [2.0, 0.0]]), np.array([[1.0, 0.0], [1.0, 0.0]]),
                   HalfLine(0.0), 0.0, 0.0)
    with pytest.raises(ValueError):
        c.vertices[0, 0] = 5.0
    assert np.allclose(c.scaled(2.0).vertices, [[2.0, 0.0], [4.0, 0.0]])
    assert np.allclose(c.normals(), [[0.0, -1.0], [0.0, -1.0]])
