"""Regions, their boundaries, and midpoint-panel discretizations.

All lengths are dimensionless; the caller fixes the unit. Every shape is a
frozen dataclass that validates itself on construction, and
:func:`discretize_boundary` turns it into a :class:`BoundaryMesh` whose
normals come from the parametrization, never from finite differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, DomainError, InvalidShapeError, ZeroSeparationError

SUPPORTED_DIMS = (1, 2, 3)


def check_dim(d: int) -> int:
    if int(d) != d or d not in SUPPORTED_DIMS:
        raise DimensionError(f"dim must be one of {SUPPORTED_DIMS}, got {d!r}")
    return int(d)


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise InvalidShapeError(f"{name} must be a positive finite length, got {value!r}")
    return value


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (self.a < self.b):
            raise InvalidShapeError(f"interval needs a < b, got a={self.a}, b={self.b}")


@dataclass(frozen=True)
class Strip:
    """Rectangle of width ``w`` (x direction) and length ``L`` (y direction)."""

    w: float
    L: float

    def __post_init__(self):
        _positive("w", self.w)
        _positive("L", self.L)


@dataclass(frozen=True)
class Circle:
    R: float
    center: tuple = (0.0, 0.0)

    def __post_init__(self):
        _positive("R", self.R)
        if len(self.center) != 2:
            raise InvalidShapeError("circle center must have 2 coordinates")


@dataclass(frozen=True)
class Sphere:
    R: float
    center: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        _positive("R", self.R)
        if len(self.center) != 3:
            raise InvalidShapeError("sphere center must have 3 coordinates")


@dataclass(frozen=True)
class Wedge:
    """V-shaped region with apex at the origin, bisected by the +x axis.

    ``theta`` is the angle between the outward normals of the two arms, so the
    opening angle of the region is ``pi - theta``; ``theta -> 0`` is a straight
    boundary. A negative ``theta`` describes the complement of the wedge with
    ``|theta|`` (reflex opening ``pi + |theta|``).
    """

    theta: float
    arm_length: float

    def __post_init__(self):
        if not (-math.pi < self.theta < math.pi) or self.theta == 0.0:
            raise InvalidShapeError(f"wedge theta must lie in (-pi, pi) without 0, got {self.theta}")
        _positive("arm_length", self.arm_length)


@dataclass(frozen=True)
class Segment:
    """Open straight segment; the region is on the left of ``p0 -> p1``."""

    p0: tuple
    p1: tuple

    def __post_init__(self):
        if len(self.p0) != 2 or len(self.p1) != 2:
            raise InvalidShapeError("segment endpoints must be 2-vectors")
        if math.dist(self.p0, self.p1) == 0.0:
            raise InvalidShapeError("segment has zero length")


@dataclass(frozen=True)
class Polyline:
    """Closed, simple polygon. Vertices may be given in either orientation."""

    vertices: tuple

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2:
            raise InvalidShapeError("polyline vertices must be an (m, 2) array")
        if len(v) > 1 and np.array_equal(v[0], v[-1]):
            v = v[:-1]
        if len(v) < 3:
            raise InvalidShapeError("polyline needs at least 3 distinct vertices")
        if abs(_signed_area(v)) == 0.0:
            raise InvalidShapeError("polyline encloses zero area")
        if _self_intersects(v):
            raise InvalidShapeError("polyline is self-intersecting")
        object.__setattr__(self, "vertices", tuple(map(tuple, v)))


ShapeSpec = Union[Interval, Strip, Circle, Sphere, Wedge, Segment, Polyline]

_REQUIRED_DIM = {Interval: 1, Strip: 2, Circle: 2, Sphere: 3, Wedge: 2, Segment: 2, Polyline: 2}


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p, q, r, s) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(r, s, p), orient(r, s, q)
    d3, d4 = orient(p, q, r), orient(p, q, s)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and 0 not in (d1, d2, d3, d4):
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    return ((d1 == 0 and on_seg(r, s, p)) or (d2 == 0 and on_seg(r, s, q))
            or (d3 == 0 and on_seg(p, q, r)) or (d4 == 0 and on_seg(p, q, s)))


def _self_intersects(v: np.ndarray) -> bool:
    m = len(v)
    edges = [(v[k], v[(k + 1) % m]) for k in range(m)]
    for i in range(m):
        for j in range(i + 1, m):
            if j == i + 1 or (i == 0 and j == m - 1):
                continue  # adjacent edges share a vertex
            if _segments_cross(*edges[i], *edges[j]):
                return True
    return False


@dataclass(frozen=True)
class BoundaryMesh:
    """Midpoint panels of a region boundary.

    ``weights`` are arclengths (d=2), areas (d=3) or unit counts (d=1).
    ``extents`` is the linear size of each panel, used by the cutoff logic
    of the twist engine.
    """

    midpoints: np.ndarray
    normals: np.ndarray
    weights: np.ndarray
    total_measure: float
    dim: int
    closed: bool = True
    extents: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        mid = np.ascontiguousarray(self.midpoints, dtype=float)
        nrm = np.ascontiguousarray(self.normals, dtype=float)
        w = np.ascontiguousarray(self.weights, dtype=float)
        if mid.ndim != 2 or mid.shape != nrm.shape or mid.shape[0] != w.shape[0]:
            raise InvalidShapeError("midpoints, normals and weights must describe the same panels")
        if mid.shape[1] != self.dim:
            raise DimensionError(f"panel coordinates have {mid.shape[1]} components, dim={self.dim}")
        if np.any(w <= 0):
            raise InvalidShapeError("panel weights must be positive")
        if self.extents is None:
            ext = w ** (1.0 / (self.dim - 1)) if self.dim > 1 else np.zeros_like(w)
        else:
            ext = np.ascontiguousarray(self.extents, dtype=float)
        for name, arr in (("midpoints", mid), ("normals", nrm), ("weights", w), ("extents", ext)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return len(self.weights)

    @property
    def max_extent(self) -> float:
        return float(self.extents.max())

    def diameter(self) -> float:
        """Bounding-box diagonal of the panel midpoints (cheap upper bound)."""
        span = self.midpoints.max(axis=0) - self.midpoints.min(axis=0)
        return float(np.linalg.norm(span))

    def flux(self) -> np.ndarray:
        """Sum of weight times normal; zero for closed boundaries."""
        return self.weights @ self.normals


def _mesh(mid, nrm, w, dim, closed=True, extents=None, exact_measure=None):
    total = float(exact_measure) if exact_measure is not None else float(np.sum(w))
    if not total > 0:
        raise InvalidShapeError("boundary has zero measure")
    return BoundaryMesh(mid, nrm, w, total, dim, closed, extents)


def _polyline_mesh(vertices: np.ndarray, n_panels: int) -> BoundaryMesh:
    v = np.asarray(vertices, dtype=float)
    if _signed_area(v) < 0:
        v = v[::-1]
    edges = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(edges[:, 0], edges[:, 1])
    perimeter = lengths.sum()
    counts = np.maximum(1, np.round(n_panels * lengths / perimeter).astype(int))
    mids, nrms, ws = [], [], []
    for start, edge, length, k in zip(v, edges, lengths, counts):
        t = (np.arange(k) + 0.5) / k
        mids.append(start + t[:, None] * edge)
        normal = np.array([edge[1], -edge[0]]) / length
        nrms.append(np.tile(normal, (k, 1)))
        ws.append(np.full(k, length / k))
    return _mesh(np.vstack(mids), np.vstack(nrms), np.concatenate(ws), 2,
                 exact_measure=perimeter)


def _circle_mesh(shape: Circle, n: int) -> BoundaryMesh:
    phi = 2.0 * math.pi * (np.arange(n) + 0.5) / n
    nrm = np.column_stack([np.cos(phi), np.sin(phi)])
    mid = np.asarray(shape.center, dtype=float) + shape.R * nrm
    w = np.full(n, 2.0 * math.pi * shape.R / n)
    return _mesh(mid, nrm, w, 2, exact_measure=2.0 * math.pi * shape.R)


def _sphere_mesh(shape: Sphere, n: int) -> BoundaryMesh:
    # Bands uniform in polar angle; each band is split into equal-area
    # azimuthal panels, with a count proportional to sin(theta) so that no
    # panel is wider than the band height.
    n_bands = max(2, int(round(math.sqrt(math.pi * n / 4.0))))
    edges = np.linspace(0.0, math.pi, n_bands + 1)
    R = shape.R
    mids, nrms, ws, exts = [], [], [], []
    for t0, t1 in zip(edges[:-1], edges[1:]):
        tm = 0.5 * (t0 + t1)
        k = max(3, int(math.ceil(2 * n_bands * max(math.sin(t0), math.sin(t1)))))
        area = 2.0 * math.pi * R * R * (math.cos(t0) - math.cos(t1))
        phi = 2.0 * math.pi * (np.arange(k) + 0.5) / k
        st = math.sin(tm)
        nrm = np.column_stack([st * np.cos(phi), st * np.sin(phi), np.full(k, math.cos(tm))])
        nrms.append(nrm)
        mids.append(np.asarray(shape.center, dtype=float) + R * nrm)
        ws.append(np.full(k, area / k))
        # panel size: larger of the polar height and the widest azimuthal arc
        width = 2.0 * math.pi * R * max(math.sin(t0), math.sin(t1)) / k
        exts.append(np.full(k, max(R * (t1 - t0), width)))
    return _mesh(np.vstack(mids), np.vstack(nrms), np.concatenate(ws), 3,
                 extents=np.concatenate(exts), exact_measure=4.0 * math.pi * R * R)


def _wedge_mesh(shape: Wedge, n: int) -> BoundaryMesh:
    half = (math.pi - shape.theta) / 2.0
    k = max(2, n // 2)
    s = (np.arange(k) + 0.5) * shape.arm_length / k
    mids, nrms = [], []
    for sign in (1.0, -1.0):
        direction = np.array([math.cos(half), sign * math.sin(half)])
        normal = np.array([-math.sin(half), sign * math.cos(half)])
        mids.append(s[:, None] * direction)
        nrms.append(np.tile(normal, (k, 1)))
    w = np.full(2 * k, shape.arm_length / k)
    return _mesh(np.vstack(mids), np.vstack(nrms), w, 2, closed=False,
                 exact_measure=2.0 * shape.arm_length)


def _segment_mesh(shape: Segment, n: int) -> BoundaryMesh:
    p0, p1 = np.asarray(shape.p0, float), np.asarray(shape.p1, float)
    edge = p1 - p0
    length = float(np.hypot(*edge))
    t = (np.arange(n) + 0.5) / n
    normal = np.array([edge[1], -edge[0]]) / length
    return _mesh(p0 + t[:, None] * edge, np.tile(normal, (n, 1)), np.full(n, length / n), 2,
                 closed=False, exact_measure=length)


def discretize_boundary(shape: ShapeSpec, n_panels: int, dim: int) -> BoundaryMesh:
    """Midpoint-panel mesh of ``shape``'s boundary with outward unit normals.

    Parameters
    ----------
    shape : ShapeSpec
        One of :class:`Interval`, :class:`Strip`, :class:`Circle`,
        :class:`Sphere`, :class:`Wedge`, :class:`Segment`, :class:`Polyline`.
    n_panels : int
        Requested number of panels (at least 4). Spheres and polylines round
        the count to fit their band/edge structure; intervals always have 2.
    dim : int
        Spatial dimension; must match the shape.
    """
    dim = check_dim(dim)
    required = _REQUIRED_DIM.get(type(shape))
    if required is None:
        raise InvalidShapeError(f"unknown shape {shape!r}")
    if required != dim:
        raise DimensionError(f"{type(shape).__name__.lower()} needs dim={required}, got dim={dim}")
    if int(n_panels) != n_panels or n_panels < 4:
        raise DomainError(f"n_panels must be an integer >= 4, got {n_panels!r}")
    n = int(n_panels)

    if isinstance(shape, Interval):
        return _mesh([[shape.a], [shape.b]], [[-1.0], [1.0]], [1.0, 1.0], 1)
    if isinstance(shape, Circle):
        return _circle_mesh(shape, n)
    if isinstance(shape, Sphere):
        return _sphere_mesh(shape, n)
    if isinstance(shape, Wedge):
        return _wedge_mesh(shape, n)
    if isinstance(shape, Segment):
        return _segment_mesh(shape, n)
    if isinstance(shape, Strip):
        w, L = shape.w, shape.L
        rect = np.array([[0.0, -L / 2], [w, -L / 2], [w, L / 2], [0.0, L / 2]])
        return _polyline_mesh(rect, n)
    return _polyline_mesh(np.asarray(shape.vertices), n)


def pair_distance_and_normals(mesh_a: BoundaryMesh, i: int, mesh_b: BoundaryMesh, j: int):
    """Midpoint separation and normal dot product of panel ``i`` of A and ``j`` of B."""
    for name, mesh, k in (("i", mesh_a, i), ("j", mesh_b, j)):
        if not (-len(mesh) <= k < len(mesh)):
            raise DomainError(f"panel index {name}={k} out of range for mesh with {len(mesh)} panels")
    sep = float(np.linalg.norm(mesh_a.midpoints[i] - mesh_b.midpoints[j]))
    if sep == 0.0:
        raise ZeroSeparationError(
            f"panels i={i} and j={j} have coincident midpoints; apply a cutoff")
    dot = float(np.clip(mesh_a.normals[i] @ mesh_b.normals[j], -1.0, 1.0))
    return sep, dot


def mirror_shape(shape: ShapeSpec, axis: int = 0) -> ShapeSpec:
    """Reflect a shape through the hyperplane ``x[axis] = 0``."""

    def flip(p):
        p = list(map(float, p))
        p[axis] = -p[axis]
        return tuple(p)

    if isinstance(shape, Interval):
        return Interval(-shape.b, -shape.a)
    if isinstance(shape, Circle):
        return Circle(shape.R, flip(shape.center))
    if isinstance(shape, Sphere):
        return Sphere(shape.R, flip(shape.center))
    if isinstance(shape, Segment):
        # swap endpoints so the region stays on the left
        return Segment(flip(shape.p1), flip(shape.p0))
    if isinstance(shape, Polyline):
        return Polyline(tuple(flip(p) for p in shape.vertices))
    if isinstance(shape, Wedge) and axis == 1:
        return shape
    raise InvalidShapeError(f"cannot mirror {type(shape).__name__} through axis {axis}")


def mirror_mesh(mesh: BoundaryMesh, axis: int = 0) -> BoundaryMesh:
    s = np.ones(mesh.dim)
    s[axis] = -1.0
    return BoundaryMesh(mesh.midpoints * s, mesh.normals * s, mesh.weights,
                        mesh.total_measure, mesh.dim, mesh.closed, mesh.extents)


def polyline(vertices: Sequence[Sequence[float]]) -> Polyline:
    return Polyline(tuple(map(tuple, vertices)))
