"""Free-fermion chains: exact entropies from the two-point correlation matrix.

The default state is the ground state of the infinite tight-binding chain
filled up to Fermi momentum ``k_F``::

    C_ij = <c_i^dag c_j> = sin(k_F (i - j)) / (pi (i - j)),   C_ii = k_F / pi

For a block of sites the entanglement entropy follows from the eigenvalues
``nu`` of the restricted matrix,
``S = -sum[nu ln nu + (1 - nu) ln(1 - nu)]``. A finite open chain variant
is provided for purity checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, NumericalFailureError

CLIP = 1e-14
EIG_TOL = 1e-10


@dataclass(frozen=True)
class LatticeBlockSpec:
    """Disjoint, ascending, inclusive site intervals ``[(s0, e0), (s1, e1), ...]``."""

    blocks: tuple
    k_F: float = math.pi / 2

    def __post_init__(self):
        blocks = tuple((int(s), int(e)) for s, e in self.blocks)
        if not blocks:
            raise DomainError("blocks must contain at least one site interval")
        for s, e in blocks:
            if e < s:
                raise DomainError(f"block [{s}, {e}] is empty")
        for (s0, e0), (s1, e1) in zip(blocks, blocks[1:]):
            if s1 <= e0:
                raise DomainError(f"blocks [{s0}, {e0}] and [{s1}, {e1}] overlap or are unsorted")
        if not (0 < self.k_F < math.pi):
            raise DomainError(f"k_F must lie in (0, pi), got {self.k_F}")
        object.__setattr__(self, "blocks", blocks)

    def sites(self) -> np.ndarray:
        return np.concatenate([np.arange(s, e + 1) for s, e in self.blocks])


def correlation_from_sites(sites: Sequence[int], k_F: float = math.pi / 2) -> np.ndarray:
    s = np.asarray(sites, dtype=float)
    d = s[:, None] - s[None, :]
    off = d != 0
    C = np.full(d.shape, k_F / math.pi)
    C[off] = np.sin(k_F * d[off]) / (math.pi * d[off])
    return C


def build_correlation_matrix(spec: LatticeBlockSpec) -> np.ndarray:
    return correlation_from_sites(spec.sites(), spec.k_F)


def finite_chain_correlation(N: int, n_particles: int | None = None) -> np.ndarray:
    """Ground-state correlation matrix of an open N-site hopping chain.

    Modes are ``sqrt(2/(N+1)) sin(pi k i / (N+1))``; the ``n_particles``
    lowest-energy modes are filled (default: half filling, ``N // 2``).
    """
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    n_particles = N // 2 if n_particles is None else int(n_particles)
    if not 0 <= n_particles <= N:
        raise DomainError(f"n_particles must lie in [0, {N}], got {n_particles}")
    i = np.arange(1, N + 1)
    k = np.arange(1, n_particles + 1)  # energies -2 cos(pi k/(N+1)) increase with k
    phi = math.sqrt(2.0 / (N + 1)) * np.sin(np.pi * np.outer(i, k) / (N + 1))
    return phi @ phi.T


def _spectrum(C: np.ndarray) -> np.ndarray:
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DomainError("correlation matrix must be square")
    if C.size and np.max(np.abs(C - C.T)) > 1e-12:
        raise DomainError("correlation matrix must be symmetric")
    nu = np.linalg.eigvalsh(C)
    if nu.size and (nu.min() < -EIG_TOL or nu.max() > 1 + EIG_TOL):
        raise NumericalFailureError(
            f"correlation eigenvalues leave [0, 1]: min={nu.min():.3e}, max={nu.max():.3e}")
    return np.clip(nu, CLIP, 1.0 - CLIP)


def entropy_from_correlations(C: np.ndarray, n: float = 1.0) -> float:
    """Von Neumann (``n=1``) or Renyi-``n`` entropy in nats."""
    n = float(n)
    if not n >= 1:
        raise DomainError(f"Renyi index n must be >= 1, got {n}")
    nu = _spectrum(C)
    if n == 1.0:
        s = -(nu * np.log(nu) + (1 - nu) * np.log1p(-nu))
    elif math.isinf(n):
        s = -np.log(np.maximum(nu, 1 - nu))
    else:
        s = np.log(nu ** n + (1 - nu) ** n) / (1.0 - n)
    return float(np.sum(s))


def block_entropy(L: int, k_F: float = math.pi / 2, n: float = 1.0) -> float:
    return entropy_from_correlations(correlation_from_sites(np.arange(L), k_F), n)


def lattice_mutual_information(L: int, x: int, k_F: float = math.pi / 2, n: float = 1.0) -> float:
    """MI of blocks ``[0, L-1]`` and ``[L+x, 2L+x-1]`` (``x`` empty sites between)."""
    if int(L) != L or L < 1:
        raise DomainError(f"L must be a positive integer, got {L}")
    if int(x) != x or x < 1:
        raise DomainError(f"x must be a positive integer, got {x}")
    L, x = int(L), int(x)
    spec = LatticeBlockSpec(((0, L - 1), (L + x, 2 * L + x - 1)), k_F)
    # translation invariance: both blocks share one spectrum
    s_single = block_entropy(L, k_F, n)
    s_pair = entropy_from_correlations(build_correlation_matrix(spec), n)
    mi = 2.0 * s_single - s_pair
    if mi < -1e-9:
        raise NumericalFailureError(f"negative mutual information {mi:.3e} (L={L}, x={x})")
    return mi


def density_density_connected(C: np.ndarray, i: int, j: int) -> float:
    """<n_i n_j> - <n_i><n_j> = -C_ij^2 for a Gaussian number-conserving state."""
    return -float(C[i, j]) ** 2
