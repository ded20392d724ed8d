"""Scale integrals, collision-exponent predictions and a divergence classifier.

The classifier takes a series ``value(param)`` measured as two regions
approach each other (``param`` is their separation) and decides between

    power:  value = coefficient * param**(-exponent) + offset
    log:    value = coefficient * ln(1/param) + offset

The power model is fitted by variable projection: for every trial exponent
the coefficient and offset solve a linear least-squares problem, leaving a
one-dimensional minimization over the exponent. Both models are scored by
the RMS residual in value space, so their residuals are comparable.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import minimize_scalar

from .errors import DimensionError, DomainError, InsufficientDataError, ScalingWindowWarning
from .geometry import check_dim

MIN_POINTS = 6
NONE_THRESHOLD = 0.1  # relative to the value range
EXPONENT_BOUNDS = (0.1, 8.0)
_GRID = 400


def _positive(name, value):
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


@dataclass(frozen=True)
class EntropySeries:
    """Ordered ``(param, value)`` pairs with free-form text metadata."""

    points: tuple
    param_name: str = "x"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        pts = tuple((float(p), float(v)) for p, v in self.points)
        for p, v in pts:
            if not (p > 0 and math.isfinite(p)):
                raise DomainError(f"{self.param_name} values must be positive, got {p!r}")
            if not math.isfinite(v):
                raise DomainError(f"series value at {self.param_name}={p!r} is not finite")
        if any(b[0] <= a[0] for a, b in zip(pts, pts[1:])):
            raise DomainError(f"{self.param_name} values must be strictly increasing")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "meta", {str(k): str(v) for k, v in dict(self.meta).items()})

    @classmethod
    def from_arrays(cls, params, values, param_name="x", meta=None):
        return cls(tuple(zip(np.asarray(params, float), np.asarray(values, float))),
                   param_name, meta or {})

    @property
    def params(self) -> np.ndarray:
        return np.array([p for p, _ in self.points])

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points])

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class DivergenceFit:
    kind: str
    exponent: float
    coefficient: float
    offset: float
    residual_rms: float
    window: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("power", "log", "none"):
            raise DomainError(f"fit kind must be power, log or none, got {self.kind!r}")
        if self.kind == "power" and not self.exponent > 0:
            raise DomainError(f"power fit needs a positive exponent, got {self.exponent}")
        if not math.isfinite(self.residual_rms):
            raise DomainError("residual_rms must be finite")

    def as_dict(self) -> dict:
        return {"kind": self.kind, "exponent": self.exponent, "coefficient": self.coefficient,
                "offset": self.offset, "residual_rms": self.residual_rms,
                "window": list(self.window), "meta": dict(self.meta)}


@dataclass(frozen=True)
class CollisionGeometry:
    """How two boundaries meet: ``flat`` (parameter = shared area V),
    ``parabolic`` (curvature radius R) or ``corner`` (opening slope m)."""

    kind: str
    parameter: float
    dim: int

    def __post_init__(self):
        if self.kind not in ("flat", "parabolic", "corner"):
            raise DomainError(f"collision kind must be flat, parabolic or corner, got {self.kind!r}")
        _positive("parameter", self.parameter)
        check_dim(self.dim)


def scale_integral_entropy(L: float, r_uv: float, r_ir: float, dim: int) -> float:
    """Entropy from counting degrees of freedom scale by scale.

    Each scale ``r`` between the UV and IR cutoffs contributes
    ``(L/r)^(d-1) dr/r``.

    Parameters
    ----------
    L : float
        Linear size of the region.
    r_uv, r_ir : float
        Short- and long-distance cutoffs, ``0 < r_uv < r_ir <= L``. For a
        gapped theory pass ``r_ir = min(L, correlation length)``.
    dim : int
        Spatial dimension.
    """
    dim = check_dim(dim)
    L, r_uv, r_ir = _positive("L", L), _positive("r_uv", r_uv), _positive("r_ir", r_ir)
    if not r_uv < r_ir:
        raise DomainError(f"r_uv={r_uv} must be below r_ir={r_ir}")
    if r_ir > L:
        raise DomainError(f"r_ir={r_ir} must not exceed L={L}")
    if dim == 1:
        return math.log(r_ir / r_uv)
    k = dim - 1
    return L ** k / k * (r_uv ** -k - r_ir ** -k)


def predicted_collision_exponent(geom: CollisionGeometry) -> DivergenceFit:
    """Expected divergence class; the coefficient is a placeholder of 1."""
    d = geom.dim
    meta = {"universal-prefactor-unfixed": "true"}
    if geom.kind == "corner" or (geom.kind == "flat" and d == 1):
        return DivergenceFit("log", math.nan, 1.0, 0.0, 0.0, meta=meta)
    if geom.kind == "parabolic" and d == 1:
        raise DimensionError("a parabolic collision needs dim >= 2")
    exponent = float(d - 1) if geom.kind == "flat" else (d - 1) / 2.0
    return DivergenceFit("power", exponent, 1.0, 0.0, 0.0, meta=meta)


def parabolic_collision_integral(R: float, x: float, rho_c: float, dim: int) -> float:
    """``int_0^rho_c rho^(d-2) / (x + rho^2/R)^(d-1) drho`` for ``d`` in (2, 3).

    Computed in the scaled variable ``rho = sqrt(R x) u``, where it becomes
    ``(R/x)^((d-1)/2) int u^(d-2) / (1 + u^2)^(d-1) du``.
    """
    dim = check_dim(dim)
    if dim == 1:
        raise DimensionError("the parabolic collision integral needs dim >= 2")
    R, x, rho_c = _positive("R", R), _positive("x", x), _positive("rho_c", rho_c)
    width = math.sqrt(R * x)
    if rho_c < 10 * width:
        raise DomainError(f"rho_c={rho_c} must be at least 10*sqrt(R*x)={10 * width:.6g}")
    k = dim - 1
    top = rho_c / width

    def f(u):
        return u ** (dim - 2) / (1.0 + u * u) ** k

    cuts = [0.0] + [10.0 ** j for j in range(0, int(math.log10(top)) + 1)] + [top]
    cuts = sorted(set(c for c in cuts if c <= top))
    total = sum(integrate.quad(f, a, b, epsabs=0.0, epsrel=1e-12, limit=200)[0]
                for a, b in zip(cuts[:-1], cuts[1:]))
    return (R / x) ** (k / 2.0) * total


def parabolic_collision_closed_form(R: float, x: float, rho_c: float, dim: int) -> float:
    if dim == 2:
        return math.sqrt(R / x) * math.atan(rho_c / math.sqrt(R * x))
    if dim == 3:
        return 0.5 * R * (1.0 / x - 1.0 / (x + rho_c * rho_c / R))
    raise DimensionError(f"closed form available for dim 2 and 3, got {dim}")


def fermi_liquid_mi(k_F: float, V: float, x: float, x_ref: float, dim: int,
                    coeff: float = 1.0) -> float:
    """``coeff * k_F^(d-1) * V * ln(x_ref / x)``.

    The additive constant is not universal, so it is fixed by the reference
    separation ``x_ref`` where the returned value vanishes.
    """
    dim = check_dim(dim)
    k_F, V = _positive("k_F", k_F), _positive("V", V)
    x, x_ref = _positive("x", x), _positive("x_ref", x_ref)
    if k_F * x < 3:
        warnings.warn(f"k_F*x = {k_F * x:.3g} < 3: outside the scaling window",
                      ScalingWindowWarning, stacklevel=2)
    if x >= x_ref:
        warnings.warn(f"x={x} is not below x_ref={x_ref}; the value is not positive",
                      ScalingWindowWarning, stacklevel=2)
    return coeff * k_F ** (dim - 1) * V * math.log(x_ref / x)


def loglog_slope(params, values) -> float:
    """Least-squares slope of ``ln|value|`` against ``ln(param)``."""
    p, v = np.asarray(params, float), np.asarray(values, float)
    return float(np.polyfit(np.log(p), np.log(np.abs(v)), 1)[0])


def _linear(columns, y):
    A = np.column_stack(columns)
    scale = np.abs(A).max(axis=0)
    scale[scale == 0] = 1.0
    coef = np.linalg.lstsq(A / scale, y, rcond=None)[0] / scale
    resid = y - A @ coef
    return coef, float(np.sqrt(np.mean(resid ** 2)))


def _power_model(x, y):
    ones = np.ones_like(x)

    def rms(p):
        return _linear([x ** -p, ones], y)[1]

    grid = np.geomspace(*EXPONENT_BOUNDS, _GRID)
    scores = np.array([rms(p) for p in grid])
    i = int(np.argmin(scores))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, _GRID - 1)]
    p = float(minimize_scalar(rms, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12}).x)
    if scores[i] < rms(p):
        p = float(grid[i])
    (c, off), r = _linear([x ** -p, ones], y)
    return p, float(c), float(off), r


def _log_model(x, y):
    (c, off), r = _linear([np.log(1.0 / x), np.ones_like(x)], y)
    return float(c), float(off), r


def fit_divergence(series: EntropySeries, window: tuple | None = None) -> DivergenceFit:
    """Classify the small-``param`` behaviour of a series as power, log or none.

    Parameters
    ----------
    series : EntropySeries
        At least six points spanning a decade in ``param``.
    window : tuple, optional
        ``(lo, hi)`` restricting the fitted params.

    Returns
    -------
    DivergenceFit
        The model with the smaller RMS residual; ``kind='none'`` when even
        that residual exceeds a tenth of the value range. ``meta`` records
        both residuals.
    """
    x, y = series.params, series.values
    if window is not None:
        lo, hi = map(float, window)
        keep = (x >= lo) & (x <= hi)
        x, y = x[keep], y[keep]
    if len(x) < MIN_POINTS:
        raise InsufficientDataError(f"need at least {MIN_POINTS} points to fit, got {len(x)}")
    if x[-1] / x[0] < 10.0:
        raise InsufficientDataError(
            f"{series.param_name} must span a decade, got {x[0]:.6g}..{x[-1]:.6g}")
    win = (float(x[0]), float(x[-1]))
    p, cp, op, rp = _power_model(x, y)
    cl, ol, rl = _log_model(x, y)
    meta = {"power_residual_rms": repr(rp), "log_residual_rms": repr(rl)}
    span = float(np.ptp(y))
    best = min(rp, rl)
    if best > NONE_THRESHOLD * span or span == 0.0:
        return DivergenceFit("none", math.nan, math.nan, math.nan, best, win, meta)
    if rp < rl:
        return DivergenceFit("power", p, cp, op, rp, win, meta)
    return DivergenceFit("log", math.nan, cl, ol, rl, win, meta)


def collision_series(fn, params: Sequence[float], param_name: str = "x", meta=None) -> EntropySeries:
    """Evaluate ``fn`` on each param and wrap the results as a series."""
    params = np.asarray(params, float)
    return EntropySeries.from_arrays(params, [fn(p) for p in params], param_name, meta)
