import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from entroscope import geometry as g
from entroscope.errors import DimensionError, DomainError, InvalidShapeError, ZeroSeparationError


def test_circle_measure():
    m = g.discretize_boundary(g.Circle(1.0), 1000, 2)
    assert m.total_measure == pytest.approx(2 * math.pi, abs=1e-5)
    assert m.weights.sum() == pytest.approx(m.total_measure, rel=1e-9)


def test_sphere_measure():
    m = g.discretize_boundary(g.Sphere(2.0), 2000, 3)
    assert m.total_measure == pytest.approx(16 * math.pi, abs=1e-3)
    assert m.weights.sum() == pytest.approx(m.total_measure, rel=1e-9)


def test_wedge_normals_perpendicular_to_arms():
    m = g.discretize_boundary(g.Wedge(math.pi / 2, 1.0), 100, 2)
    assert m.total_measure == pytest.approx(2.0, abs=1e-12)
    directions = m.midpoints / np.linalg.norm(m.midpoints, axis=1)[:, None]
    assert np.max(np.abs(np.einsum("ij,ij->i", directions, m.normals))) < 1e-12
    assert not m.closed


@pytest.mark.parametrize("shape,dim,n", [
    (g.Circle(1.3, (0.5, -2.0)), 2, 300),
    (g.Sphere(0.7, (1.0, 0.0, -1.0)), 3, 800),
    (g.Strip(1.0, 4.0), 2, 200),
    (g.polyline([(0, 0), (3, 0), (3, 1), (1, 2)]), 2, 120),
])
def test_unit_outward_normals(shape, dim, n):
    m = g.discretize_boundary(shape, n, dim)
    assert np.max(np.abs(np.linalg.norm(m.normals, axis=1) - 1)) < 1e-12
    centroid = m.weights @ m.midpoints / m.weights.sum()
    assert np.all(np.einsum("ij,ij->i", m.midpoints - centroid, m.normals) > 0)
    assert np.linalg.norm(m.flux()) < 1e-9 * m.total_measure


def test_clockwise_polyline_is_reoriented():
    cw = g.polyline([(0, 0), (0, 1), (1, 1), (1, 0)])
    m = g.discretize_boundary(cw, 40, 2)
    assert np.all(np.einsum("ij,ij->i", m.midpoints - 0.5, m.normals) > 0)


@pytest.mark.parametrize("n", [50, 100, 200, 400])
def test_measure_converges_for_polyline(n):
    m = g.discretize_boundary(g.Strip(2.0, 3.0), n, 2)
    assert m.weights.sum() == pytest.approx(10.0, rel=1e-12)


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        g.discretize_boundary(g.Circle(1.0), 100, 3)
    with pytest.raises(DimensionError):
        g.discretize_boundary(g.Sphere(1.0), 100, 2)
    with pytest.raises(DimensionError):
        g.check_dim(4)


@pytest.mark.parametrize("factory", [
    lambda: g.Circle(0.0),
    lambda: g.Sphere(-1.0),
    lambda: g.Interval(1.0, 1.0),
    lambda: g.Wedge(0.0, 1.0),
    lambda: g.Wedge(math.pi, 1.0),
    lambda: g.Segment((0, 0), (0, 0)),
    lambda: g.polyline([(0, 0), (1, 0), (2, 0)]),
    lambda: g.polyline([(0, 0), (1, 1), (1, 0), (0, 1)]),
])
def test_invalid_shapes(factory):
    with pytest.raises(InvalidShapeError):
        factory()


def test_too_few_panels():
    with pytest.raises(DomainError):
        g.discretize_boundary(g.Circle(1.0), 3, 2)


def test_pair_distance_and_normals():
    m = g.discretize_boundary(g.Circle(1.0), 4, 2)
    sep, dot = g.pair_distance_and_normals(m, 0, m, 2)
    assert sep == pytest.approx(2.0)
    assert dot == pytest.approx(-1.0)
    with pytest.raises(ZeroSeparationError):
        g.pair_distance_and_normals(m, 1, m, 1)
    with pytest.raises(DomainError):
        g.pair_distance_and_normals(m, 0, m, 9)


def test_interval_mesh():
    m = g.discretize_boundary(g.Interval(-1.0, 2.0), 4, 1)
    assert len(m) == 2 and m.normals[0, 0] == -1 and m.normals[1, 0] == 1


def test_mesh_arrays_are_read_only():
    m = g.discretize_boundary(g.Circle(1.0), 16, 2)
    with pytest.raises(ValueError):
        m.weights[0] = 2.0


@given(st.floats(0.1, 10.0), st.integers(8, 400))
def test_circle_weights_sum_exactly(R, n):
    m = g.discretize_boundary(g.Circle(R), n, 2)
    assert m.weights.sum() == pytest.approx(2 * math.pi * R, rel=1e-9)
    assert m.max_extent == pytest.approx(2 * math.pi * R / n)


@given(st.floats(0.2, 5.0), st.integers(50, 3000))
def test_sphere_weights_sum(R, n):
    m = g.discretize_boundary(g.Sphere(R), n, 3)
    assert m.weights.sum() == pytest.approx(4 * math.pi * R * R, rel=1e-9)
    assert np.linalg.norm(m.flux()) < 1e-9 * m.total_measure


def test_mirror_shape_and_mesh_agree():
    seg = g.Segment((0.0, 0.0), (1.0, 2.0))
    a = g.discretize_boundary(g.mirror_shape(seg), 10, 2)
    b = g.mirror_mesh(g.discretize_boundary(seg, 10, 2))
    np.testing.assert_allclose(np.sort(a.midpoints, axis=0), np.sort(b.midpoints, axis=0), atol=1e-15)
    np.testing.assert_allclose(a.normals[0], b.normals[0], atol=1e-15)
