"""Minimal-surface entropies of strips in AdS4 (two boundary spatial dimensions).

All results are in units of ``L_AdS^2 / (4 G_N)``, carried by ``prefactor``.
With bulk radial coordinate ``r`` and a strip of width ``w``, the minimal
surface turns around at ``r_star`` where

    w / 2 = r_star * int_0^1 u^2 / sqrt(1 - u^4) du

and the regulated area per unit length is

    2 r_star^2 int_eps^{r_star} dr / (r^2 sqrt(r_star^4 - r^4)) = k1 / eps - k2 / w.

Both integrals have an inverse square-root singularity at ``u = 1``; it is
removed with ``u = 1 - v^2`` before handing them to Gauss-Kronrod.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gamma

from .errors import AdiabaticValidityWarning, DomainError, RegimeError

SLOPE_GUARD = 0.3
_SPLIT = 0.5


def _positive(name, value):
    if value is None:
        raise DomainError(f"{name} is required")
    value = float(value)
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value!r}")
    return value


def _turning_integrand(u):
    # u^2 / sqrt(1 - u^4) written so that v = sqrt(1-u) cancels analytically
    return u * u / math.sqrt((1.0 - u) * (1.0 + u) * (1.0 + u * u)) if u < 1.0 else math.inf


def _turning_tail(v):
    u = 1.0 - v * v
    return 2.0 * u * u / math.sqrt((1.0 + u) * (1.0 + u * u))


def turning_integral_quadrature() -> float:
    """``int_0^1 u^2/sqrt(1-u^4) du`` by quadrature."""
    head = integrate.quad(_turning_integrand, 0.0, _SPLIT, epsabs=0.0, epsrel=1e-13)[0]
    tail = integrate.quad(_turning_tail, 0.0, math.sqrt(1.0 - _SPLIT), epsabs=0.0, epsrel=1e-13)[0]
    return head + tail


def turning_integral_closed_form() -> float:
    """``sqrt(pi) Gamma(3/4) / Gamma(1/4)``."""
    return math.sqrt(math.pi) * gamma(0.75) / gamma(0.25)


def strip_turning_point(w: float) -> float:
    """Bulk depth ``r_star = w / (2 K)`` reached by the single-strip surface."""
    w = _positive("w", w)
    return w / (2.0 * _turning_constant())


@lru_cache(maxsize=None)
def _turning_constant() -> float:
    return turning_integral_quadrature()


def _area_tail(v):
    u = 1.0 - v * v
    return 2.0 / (u * u * math.sqrt((1.0 + u) * (1.0 + u * u)))


def reduced_area(delta: float) -> float:
    """``int_delta^1 du / (u^2 sqrt(1-u^4))`` by quadrature, ``0 < delta < 1``."""
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    head = 0.0
    lo = delta
    if lo < _SPLIT:
        # log variable flattens the 1/u^2 growth near the cutoff
        g = lambda t: math.exp(-t) / math.sqrt(1.0 - math.exp(4 * t))  # noqa: E731
        head = integrate.quad(g, math.log(lo), math.log(_SPLIT), epsabs=0.0, epsrel=1e-13, limit=200)[0]
        lo = _SPLIT
    tail = integrate.quad(_area_tail, 0.0, math.sqrt(1.0 - lo), epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return head + tail


def strip_area_quadrature(w: float, L: float, epsilon: float) -> float:
    """Regulated on-shell area of one strip (no expansion in ``epsilon``)."""
    w, L, epsilon = _positive("w", w), _positive("L", L), _positive("epsilon", epsilon)
    r_star = strip_turning_point(w)
    if epsilon >= r_star:
        raise RegimeError(f"epsilon={epsilon} must be below the turning point r_star={r_star:.6g}")
    return L * 2.0 / r_star * reduced_area(epsilon / r_star)


@lru_cache(maxsize=None)
def strip_constants() -> tuple:
    """``(k1, k2)`` from regulated quadrature of the area on a cutoff ladder.

    ``F(delta) = int_delta^1 du/(u^2 sqrt(1-u^4))`` behaves as
    ``a/delta + b - delta^3/6 + O(delta^7)``; a least-squares fit on a short
    ladder gives ``a`` and ``b``, then ``k1 = 2a`` and ``k2 = -4 b K``.
    """
    deltas = 1e-2 * 2.0 ** -np.arange(8)
    F = np.array([reduced_area(d) for d in deltas])
    A = np.column_stack([1.0 / deltas, np.ones_like(deltas), deltas ** 3])
    scale = np.abs(A).max(axis=0)
    coef = np.linalg.lstsq(A / scale, F, rcond=None)[0] / scale
    a, b = coef[0], coef[1]
    K = _turning_constant()
    return 2.0 * a, -4.0 * b * K


def k2_closed_form() -> float:
    """``4 pi (Gamma(3/4) / Gamma(1/4))^2``."""
    return 4.0 * math.pi * (gamma(0.75) / gamma(0.25)) ** 2


@dataclass(frozen=True)
class StripConfig:
    w: float
    L: float
    x: float
    epsilon: float
    prefactor: float = 1.0

    def __post_init__(self):
        for name in ("w", "L", "x", "epsilon", "prefactor"):
            _positive(name, getattr(self, name))
        if not self.epsilon < self.w / 10:
            raise RegimeError(f"epsilon={self.epsilon} must be below w/10={self.w / 10:g}")


def strip_entropy(w: float, L: float, epsilon: float, prefactor: float = 1.0) -> float:
    w, L = _positive("w", w), _positive("L", L)
    epsilon, prefactor = _positive("epsilon", epsilon), _positive("prefactor", prefactor)
    if not epsilon < w / 10:
        raise RegimeError(f"epsilon={epsilon} must be below w/10={w / 10:g}")
    k1, k2 = strip_constants()
    return prefactor * (k1 * L / epsilon - k2 * L / w)


def connected_candidate(w: float, L: float, x: float, prefactor: float = 1.0) -> float:
    """Mutual information if the connected surface were chosen (may be negative)."""
    k2 = strip_constants()[1]
    return prefactor * k2 * L * (1.0 / x + 1.0 / (2.0 * w + x) - 2.0 / w)


def two_strip_mutual_information(cfg: StripConfig) -> float:
    """Holographic MI of two parallel strips; zero in the disconnected phase.

    The cutoff cancels between the one- and two-strip areas, so
    ``cfg.epsilon`` only enters through validation.
    """
    return max(0.0, connected_candidate(cfg.w, cfg.L, cfg.x, cfg.prefactor))


def critical_separation_ratio() -> float:
    """x*/w where the connected surface stops dominating: root of t^2 + t - 1."""
    return (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class AdiabaticProfile:
    """Slowly varying separation ``x(y)`` between two long, nearly straight strips.

    ``kind='parabolic'``: ``x(y) = x0 + y^2 / R`` (two arcs of curvature radius R);
    ``kind='corner'``: ``x(y) = x0 + m |y|``. ``w0`` may be ``math.inf``.
    """

    kind: str
    x0: float
    w0: float
    y_range: tuple
    R: float | None = None
    m: float | None = None

    def __post_init__(self):
        if self.kind not in ("parabolic", "corner"):
            raise DomainError(f"profile kind must be 'parabolic' or 'corner', got {self.kind!r}")
        _positive("x0", self.x0)
        if not self.w0 > 0:
            raise DomainError(f"w0 must be positive, got {self.w0}")
        if self.kind == "parabolic":
            _positive("R", self.R)
        else:
            _positive("m", self.m)
        y0, y1 = map(float, self.y_range)
        if not y0 < y1:
            raise DomainError(f"y_range must be increasing, got {self.y_range}")
        object.__setattr__(self, "y_range", (y0, y1))

    def separation(self, y):
        if self.kind == "parabolic":
            return self.x0 + np.square(y) / self.R
        return self.x0 + self.m * np.abs(y)

    def slope(self, y):
        if self.kind == "parabolic":
            return 2.0 * np.abs(y) / self.R
        return np.full_like(np.asarray(y, dtype=float), self.m)

    def positive_range(self):
        """Sub-range of ``y_range`` where the local connected integrand is positive."""
        y0, y1 = self.y_range
        if math.isinf(self.w0):
            return y0, y1
        xmax = critical_separation_ratio() * self.w0
        if xmax <= self.x0:
            return None
        if self.kind == "parabolic":
            reach = math.sqrt(self.R * (xmax - self.x0))
        else:
            reach = (xmax - self.x0) / self.m
        lo, hi = max(y0, -reach), min(y1, reach)
        return (lo, hi) if lo < hi else None


def adiabatic_mutual_information(profile: AdiabaticProfile, prefactor: float = 1.0) -> float:
    """Integrate the local strip MI density along the slow direction."""
    prefactor = _positive("prefactor", prefactor)
    rng = profile.positive_range()
    if rng is None:
        return 0.0
    lo, hi = rng
    slopes = profile.slope(np.array([lo, hi, 0.0 if lo < 0 < hi else lo]))
    if float(np.max(slopes)) > SLOPE_GUARD:
        warnings.warn(
            f"adiabatic approximation: |dx/dy| reaches {float(np.max(slopes)):.3g} > {SLOPE_GUARD}",
            AdiabaticValidityWarning, stacklevel=2)
    w0 = profile.w0
    k2 = strip_constants()[1]

    def density(y):
        x = profile.separation(y)
        if math.isinf(w0):
            return 1.0 / x
        return max(0.0, 1.0 / x + 1.0 / (2.0 * w0 + x) - 2.0 / w0)

    # the integrand peaks at y = 0 with width ~ x0 (corner) or sqrt(R x0) (parabola)
    width = profile.x0 / profile.m if profile.kind == "corner" else math.sqrt(profile.R * profile.x0)
    cuts = sorted({lo, hi, *[c for c in (0.0, -width, width, -10 * width, 10 * width) if lo < c < hi]})
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += integrate.quad(density, a, b, epsabs=0.0, epsrel=1e-10, limit=400)[0]
    return prefactor * k2 * total
