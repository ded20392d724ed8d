"""Gaussian twist-operator kernel: boundary double integrals for S and I.

With a Gaussian boundary field of dimension ``d - 1`` the entropy of a
region is a double integral over its boundary,

    S = norm_alpha * int int n1 . n2 / |x1 - x2|^(2(d-1)),

cut off by excluding pairs closer than ``epsilon`` (chordal distance). The
mutual information of two disjoint regions only involves the cross term
between their boundaries and needs no cutoff.

``norm_alpha`` stands for the theory-dependent prefactor (the n-derivative
of the squared twist charge, halved) and defaults to 1. Panel sums run in
the compiled kernel when it is built, otherwise in numpy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate
from scipy.spatial import cKDTree

from . import _backend
from .errors import DimensionError, DomainError, ProximityError, ResolutionError
from .geometry import BoundaryMesh

RESOLUTION = 4.0  # panels per cutoff length


@dataclass(frozen=True)
class TwistKernelConfig:
    dim: int = 2
    include_transverse_term: bool = False
    norm_alpha: float = 1.0

    def __post_init__(self):
        if self.dim not in (2, 3):
            raise DimensionError(f"twist kernel needs dim in (2, 3), got dim={self.dim}")
        if not (self.norm_alpha > 0 and math.isfinite(self.norm_alpha)):
            raise DomainError(f"norm_alpha must be positive, got {self.norm_alpha}")

    @property
    def power(self) -> int:
        return 2 * (self.dim - 1)


@dataclass(frozen=True)
class EntropyFitResult:
    """``S = coeff_power x^(d-1) + coeff_log ln x + coeff_const + coeff_sub x^-(d-1)``, x = R/eps."""

    coeff_power: float
    coeff_log: float
    coeff_const: float
    residual_rms: float
    coeff_sub: float = 0.0
    window: tuple = ()


def kernel(separation: float, normal_dot: float, cfg: TwistKernelConfig,
           n1_along: float = 0.0, n2_along: float = 0.0) -> float:
    """Pair kernel ``(n1.n2 [+ (n1.x)(n2.x)]) / |x|^(2(d-1))``.

    ``n1_along``/``n2_along`` are the normal components along the unit
    separation vector; they only matter with ``include_transverse_term``.
    """
    if not separation > 0:
        raise DomainError(f"separation must be positive, got {separation}")
    num = normal_dot
    if cfg.include_transverse_term:
        num += n1_along * n2_along
    return num / separation ** cfg.power


def _check_mesh(mesh: BoundaryMesh, cfg: TwistKernelConfig, name="mesh"):
    if mesh.dim != cfg.dim:
        raise DimensionError(f"{name} has dim={mesh.dim} but kernel config has dim={cfg.dim}")


def self_entropy_integral(mesh: BoundaryMesh, epsilon: float, cfg: TwistKernelConfig = TwistKernelConfig(),
                          backend: str | None = None) -> float:
    """Cutoff-regulated panel double sum over one boundary.

    A panel straddling the cutoff sphere around another panel contributes the
    fraction of its extent lying beyond ``epsilon``, evaluated at the middle
    of that fraction; this removes the O(h/epsilon) jitter of a bare
    in/out test.
    """
    _check_mesh(mesh, cfg)
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    diam = mesh.diameter()
    if not epsilon < diam / 10:
        raise DomainError(f"epsilon={epsilon} must be below mesh diameter/10={diam / 10:.6g}")
    h = mesh.max_extent
    if h > epsilon / RESOLUTION:
        factor = (h * RESOLUTION / epsilon) ** (mesh.dim - 1)
        need = int(math.ceil(len(mesh) * factor))
        raise ResolutionError(
            f"panel size {h:.3g} exceeds epsilon/{RESOLUTION:g}={epsilon / RESOLUTION:.3g}; "
            f"about {need} panels required", required_panels=need)
    total = _backend.self_pair_sum(mesh.midpoints, mesh.normals, mesh.weights, mesh.extents,
                                   epsilon, cfg.power, cfg.include_transverse_term, backend=backend)
    return cfg.norm_alpha * total


def _mesh_key(mesh: BoundaryMesh):
    return (len(mesh), mesh.midpoints.tobytes(), mesh.normals.tobytes(), mesh.weights.tobytes())


def min_separation(mesh_a: BoundaryMesh, mesh_b: BoundaryMesh) -> float:
    return float(cKDTree(mesh_b.midpoints).query(mesh_a.midpoints, k=1)[0].min())


def cross_mutual_information(mesh_a: BoundaryMesh, mesh_b: BoundaryMesh,
                             cfg: TwistKernelConfig = TwistKernelConfig(),
                             backend: str | None = None) -> float:
    """``-norm_alpha * sum_{i in A, j in B} w_i w_j K_ij`` (positive for facing flat segments)."""
    _check_mesh(mesh_a, cfg, "mesh_a")
    _check_mesh(mesh_b, cfg, "mesh_b")
    gap = min_separation(mesh_a, mesh_b)
    h = max(mesh_a.max_extent, mesh_b.max_extent)
    if gap < h:
        raise ProximityError(
            f"meshes are {gap:.3g} apart but panels are {h:.3g} wide; refine the meshes "
            "or use an analytic path")
    if _mesh_key(mesh_b) < _mesh_key(mesh_a):
        mesh_a, mesh_b = mesh_b, mesh_a  # canonical order: I(A,B) == I(B,A) bit for bit
    total = _backend.cross_pair_sum(mesh_a.midpoints, mesh_a.normals, mesh_a.weights, mesh_a.extents,
                                    mesh_b.midpoints, mesh_b.normals, mesh_b.weights, mesh_b.extents,
                                    cfg.power, cfg.include_transverse_term, backend=backend)
    return -cfg.norm_alpha * total


def flat_segments_mutual_information(L: float, x: float, norm_alpha: float = 1.0) -> float:
    """Closed form for two facing parallel segments of length ``L`` at distance ``x`` (d=2)."""
    if not (L > 0 and x > 0):
        raise DomainError(f"L and x must be positive, got L={L}, x={x}")
    r = L / x
    return norm_alpha * 2.0 * (r * math.atan(r) - 0.5 * math.log1p(r * r))


# --- reduced one-dimensional paths for round regions -----------------------------

def _angular_numerator(theta, cfg):
    # n1.n2 = cos(theta); with the transverse term (n1.x)(n2.x) = -sin^2(theta/2)
    num = np.cos(theta)
    if cfg.include_transverse_term:
        num = num - np.sin(theta / 2) ** 2
    return num


def _log_quadrature(f, a, b, nodes=None):
    """int_a^b f(theta) dtheta in the variable t = ln(theta)."""
    g = lambda t: f(np.exp(t)) * np.exp(t)  # noqa: E731
    lo, hi = math.log(a), math.log(b)
    if nodes is None:
        return integrate.quad(lambda t: float(g(t)), lo, hi, epsabs=0.0, epsrel=1e-13, limit=500)[0]
    n_panels = max(1, int(nodes) // 16)
    x, wq = leggauss(16)
    edges = np.linspace(lo, hi, n_panels + 1)
    total = 0.0
    for p0, p1 in zip(edges[:-1], edges[1:]):
        t = 0.5 * (p1 - p0) * x + 0.5 * (p1 + p0)
        total += 0.5 * (p1 - p0) * float(np.dot(wq, g(t)))
    return total


def _check_round(R, epsilon):
    if not R > 0:
        raise DomainError(f"R must be positive, got {R}")
    if not 0 < epsilon < R / 10:
        raise DomainError(f"epsilon must lie in (0, R/10), got epsilon={epsilon}, R={R}")


def circle_entropy_reduced(R: float, epsilon: float, cfg: TwistKernelConfig = TwistKernelConfig(dim=2),
                           nodes: int | None = None) -> float:
    """``(2 pi R) * 2 * int_{eps/R}^{pi} R dtheta n1.n2 / (2R sin(theta/2))^2``."""
    _check_round(R, epsilon)
    cfg2 = replace(cfg, dim=2) if cfg.dim != 2 else cfg
    f = lambda th: _angular_numerator(th, cfg2) / (2 * R * np.sin(th / 2)) ** 2  # noqa: E731
    return cfg.norm_alpha * (2 * math.pi * R) * 2 * R * _log_quadrature(f, epsilon / R, math.pi, nodes)


def sphere_entropy_reduced(R: float, epsilon: float, cfg: TwistKernelConfig = TwistKernelConfig(dim=3),
                           nodes: int | None = None) -> float:
    """``(4 pi R^2)(2 pi R^2) int_{eps/R}^{pi} sin(theta) n1.n2 / (2R sin(theta/2))^4 dtheta``."""
    _check_round(R, epsilon)
    cfg3 = replace(cfg, dim=3) if cfg.dim != 3 else cfg
    f = lambda th: np.sin(th) * _angular_numerator(th, cfg3) / (2 * R * np.sin(th / 2)) ** 4  # noqa: E731
    measure = (4 * math.pi * R * R) * (2 * math.pi * R * R)
    return cfg.norm_alpha * measure * _log_quadrature(f, epsilon / R, math.pi, nodes)


def fit_entropy_scaling(ratios, values, dim: int) -> EntropyFitResult:
    """Least squares of S against ``x^(d-1), ln x, 1, x^-(d-1)`` with ``x = R/eps``.

    The last column soaks up the positive-power-of-epsilon corrections so
    they cannot leak into the log coefficient.
    """
    x = np.asarray(ratios, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.shape != y.shape or x.size < 6:
        raise DomainError("need at least 6 (ratio, value) pairs of equal length")
    p = dim - 1
    A = np.column_stack([x ** p, np.log(x), np.ones_like(x), x ** -p])
    scale = np.abs(A).max(axis=0)
    coef = np.linalg.lstsq(A / scale, y, rcond=None)[0] / scale
    resid = y - A @ coef
    return EntropyFitResult(float(coef[0]), float(coef[1]), float(coef[2]),
                            float(np.sqrt(np.mean(resid ** 2))), float(coef[3]),
                            (float(1 / x.max()), float(1 / x.min())))


def _eps_window(R, window, points):
    lo, hi = window
    if not 0 < lo < hi < 0.1:
        raise DomainError(f"fit window for eps/R must satisfy 0 < lo < hi < 0.1, got {window}")
    return R * np.geomspace(lo, hi, points)


def circle_entropy_fit(R: float = 1.0, window=(1e-4, 1e-2), points: int = 25,
                       cfg: TwistKernelConfig = TwistKernelConfig(dim=2)) -> EntropyFitResult:
    eps = _eps_window(R, window, points)
    values = [circle_entropy_reduced(R, e, cfg) for e in eps]
    return fit_entropy_scaling(R / eps, values, 2)


def sphere_entropy_fit(R: float = 1.0, window=(1e-4, 1e-2), points: int = 25,
                       cfg: TwistKernelConfig = TwistKernelConfig(dim=3)) -> EntropyFitResult:
    eps = _eps_window(R, window, points)
    values = [sphere_entropy_reduced(R, e, cfg) for e in eps]
    return fit_entropy_scaling(R / eps, values, 3)


# --- wedge ----------------------------------------------------------------------

def _wedge_cross(theta, arm, eps, normal_sign=1.0):
    """Both orderings of the arm-to-arm integral, reduced along rays t = u s."""
    c = math.cos(theta)
    log_ratio = math.log(arm / eps)

    def f(u):
        q = 1.0 + u * u + 2.0 * u * c
        return max(0.0, log_ratio + 0.5 * math.log(q)) / q

    cuts = [0.0, 1.0]
    if c < 0:
        cuts.insert(1, -c)  # q is smallest at u = -cos(theta)
    val = sum(integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
              for a, b in zip(cuts[:-1], cuts[1:]))
    return 4.0 * normal_sign * c * val


def wedge_self_integral(theta: float, arm_length: float, epsilon: float,
                        cfg: TwistKernelConfig = TwistKernelConfig(dim=2),
                        complement: bool = False) -> float:
    """Cutoff self-integral of a wedge boundary (two straight arms), delta term only.

    ``theta`` is the angle between the outward normals, ``|theta| < pi``;
    ``theta = 0`` is a straight segment of length ``2 * arm_length``. With
    ``complement`` the outward normals are reversed and the opening becomes
    ``pi + theta``.
    """
    if not -math.pi < theta < math.pi:
        raise DomainError(f"theta must lie in (-pi, pi), got {theta}")
    if not 0 < epsilon < arm_length:
        raise DomainError(f"epsilon must lie in (0, arm_length), got {epsilon}")
    normal_sign = 1.0
    if complement:
        # complement: opening pi + theta, both outward normals flipped
        theta = -theta
        normal_sign = (-1.0) * (-1.0)
    same_arm = 2.0 * (2.0 * arm_length / epsilon - 2.0 - 2.0 * math.log(arm_length / epsilon))
    return cfg.norm_alpha * (same_arm + _wedge_cross(theta, arm_length, epsilon, normal_sign))


LADDER_SIZE = 12
LADDER_START = 1e-3


def wedge_log_coefficient(theta: float, arm_length: float = 1.0,
                          cfg: TwistKernelConfig = TwistKernelConfig(dim=2),
                          complement: bool = False, normalize: bool = True) -> float:
    """ln(1/eps) coefficient of the corner contribution, 1 at theta = pi/2.

    The corner contribution is the wedge integral minus that of a straight
    segment of the same length, which removes the log terms produced by the
    free ends of the arms. It is sampled on 12 cutoffs
    ``eps = arm_length * 1e-3 * 2^-k`` and fitted to ``a + b ln(1/eps) + c eps``;
    the two smallest cutoffs are dropped if their residuals stand out.
    """
    if not 0 < theta < math.pi:
        raise DomainError(f"theta must lie in (0, pi), got {theta}")
    if not arm_length > 0:
        raise DomainError(f"arm_length must be positive, got {arm_length}")
    b = _corner_log_slope(theta, arm_length, cfg, complement)
    if not normalize:
        return b
    return b / _corner_log_slope(math.pi / 2, arm_length, cfg, complement)


def _corner_log_slope(theta, arm, cfg, complement):
    eps = arm * LADDER_START * 2.0 ** -np.arange(LADDER_SIZE)
    corner = np.array([wedge_self_integral(theta, arm, e, cfg, complement)
                       - wedge_self_integral(0.0, arm, e, cfg) for e in eps])
    A = np.column_stack([np.ones_like(eps), np.log(1.0 / eps), eps / arm])
    coef = np.linalg.lstsq(A, corner, rcond=None)[0]
    resid = corner - A @ coef
    rest = np.sqrt(np.mean(resid[:-2] ** 2))
    if np.max(np.abs(resid[-2:])) > 10 * rest and np.max(np.abs(resid[-2:])) > 1e-12 * np.abs(corner).max():
        coef = np.linalg.lstsq(A[:-2], corner[:-2], rcond=None)[0]
    # slope in ln(1/eps) of the corner part, sign flipped so a sharper corner is larger
    return -float(coef[1])
