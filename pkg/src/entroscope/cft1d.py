"""Exact 1+1D free-fermion CFT entropies and two-interval mutual information.

Everything is in nats. The central charge ``c`` multiplies the c=1
free-fermion expressions; that scaling is exact for the single interval and
for the leading small-separation singularity, while the two-interval
entropy for ``c != 1`` only keeps the free-fermion functional form
(see :data:`TWO_INTERVAL_FORM`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

TWO_INTERVAL_FORM = "free-fermion functional form"


def _check_c(c: float) -> float:
    c = float(c)
    if not (c > 0 and math.isfinite(c)):
        raise DomainError(f"central charge c must be positive, got {c!r}")
    return c


@dataclass(frozen=True)
class IntervalPair:
    a1: float
    b1: float
    a2: float
    b2: float
    epsilon: float

    def __post_init__(self):
        if not (self.a1 < self.b1 < self.a2 < self.b2):
            raise DomainError(
                "interval endpoints must satisfy a1 < b1 < a2 < b2, got "
                f"a1={self.a1}, b1={self.b1}, a2={self.a2}, b2={self.b2}")
        smallest = min(self.b1 - self.a1, self.b2 - self.a2, self.a2 - self.b1)
        if not (0 < self.epsilon < smallest):
            raise DomainError(
                f"epsilon must lie in (0, {smallest:g}) (shortest length or gap), got {self.epsilon}")

    @classmethod
    def equal(cls, L: float, x: float, epsilon: float) -> "IntervalPair":
        """Intervals [0, L] and [L + x, 2L + x]."""
        return cls(0.0, L, L + x, 2 * L + x, epsilon)

    def swapped(self) -> "IntervalPair":
        """Mirror image, so the second interval becomes the first."""
        return IntervalPair(-self.b2, -self.a2, -self.b1, -self.a1, self.epsilon)


def single_interval_entropy(L: float, epsilon: float, c: float = 1.0) -> float:
    c = _check_c(c)
    if not epsilon > 0:
        raise DomainError(f"epsilon must be positive, got {epsilon}")
    if not L > epsilon:
        raise DomainError(f"L must exceed the cutoff epsilon (L={L}, epsilon={epsilon})")
    return c / 3.0 * math.log(L / epsilon)


def two_interval_entropy(p: IntervalPair, c: float = 1.0) -> float:
    c = _check_c(c)
    eps = p.epsilon
    a = (p.a1, p.a2)
    b = (p.b1, p.b2)
    total = sum(math.log(abs(ai - bj) / eps) for ai in a for bj in b)
    total -= math.log(abs(a[0] - a[1]) / eps)
    total -= math.log(abs(b[0] - b[1]) / eps)
    return c / 3.0 * total


def mutual_information_equal_intervals(L: float, x: float, c: float = 1.0) -> float:
    """Mutual information of two length-``L`` intervals a distance ``x`` apart.

    Cutoff independent; ``(c/3) ln((L+x)^2 / (x (2L+x)))``.
    """
    c = _check_c(c)
    if not (L > 0 and math.isfinite(L)):
        raise DomainError(f"L must be positive, got {L}")
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"x must be positive, got {x}")
    r = L / x
    # ln((1+r)^2 / (1+2r)) = ln(1 + r^2/(1+2r)), stable for tiny r
    return c / 3.0 * math.log1p(r * r / (1.0 + 2.0 * r))


def mutual_information(p: IntervalPair, c: float = 1.0) -> float:
    """S_A + S_B - S_AB for an arbitrary interval pair (cutoff cancels)."""
    return (single_interval_entropy(p.b1 - p.a1, p.epsilon, c)
            + single_interval_entropy(p.b2 - p.a2, p.epsilon, c)
            - two_interval_entropy(p, c))


def singularity_coefficient(c: float = 1.0) -> float:
    """Coefficient of ln(1/x) in the mutual information as the intervals touch."""
    return _check_c(c) / 3.0
