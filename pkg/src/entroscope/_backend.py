"""Pick the compiled pair-sum kernels when available, numpy otherwise.

Set ``ENTROSCOPE_PURE_PYTHON=1`` to force the numpy path. Worker count for
row-parallel sums comes from ``ENTROSCOPE_THREADS`` (0 or unset = all CPUs).
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _kernels_py

try:
    if os.environ.get("ENTROSCOPE_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure-python backend forced")
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

BACKEND = "cython" if _compiled is not None else "python"
_BACKENDS = {"python": _kernels_py}
if _compiled is not None:
    _BACKENDS["cython"] = _compiled


def worker_count() -> int:
    raw = os.environ.get("ENTROSCOPE_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _module(backend):
    name = backend or BACKEND
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} not available (have {sorted(_BACKENDS)})")
    return _BACKENDS[name]


def _run_rows(fn, n_rows, args, workers):
    out = np.zeros(n_rows)
    workers = max(1, min(workers, n_rows // 64 or 1))
    if workers == 1:
        fn(*args, 0, n_rows, out)
    else:
        bounds = np.linspace(0, n_rows, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            futures = [pool.submit(fn, *args, int(a), int(b), out)
                       for a, b in zip(bounds[:-1], bounds[1:])]
            for f in futures:
                f.result()
    # numpy's pairwise summation: same bits for any worker split
    return float(np.sum(out))


def panel_moments(w, ext, dim):
    """Half the positional variance of each panel, summed over its tangent axes
    per unit Laplacian: ``h^2/24`` for arcs, ``area/24`` for (near-square) patches."""
    w, ext = np.asarray(w, float), np.asarray(ext, float)
    if dim == 2:
        return ext * ext / 24.0
    if dim == 3:
        return w / 24.0
    return np.zeros_like(w)


def self_pair_sum(mid, nrm, w, ext, eps, power, transverse, backend=None, workers=None):
    mod = _module(backend)
    mid = np.ascontiguousarray(mid, float)
    mom = np.ascontiguousarray(panel_moments(w, ext, mid.shape[1]))
    args = (mid, np.ascontiguousarray(nrm, float),
            np.ascontiguousarray(w, float), np.ascontiguousarray(ext, float), mom,
            float(eps), float(power), bool(transverse))
    return _run_rows(mod.self_row_sums, len(w), args, workers or worker_count())


def cross_pair_sum(ma, na, wa, exa, mb, nb, wb, exb, power, transverse,
                   backend=None, workers=None):
    mod = _module(backend)
    ma, na, wa, mb, nb, wb = (np.ascontiguousarray(a, float) for a in (ma, na, wa, mb, nb, wb))
    dim = ma.shape[1]
    moma = np.ascontiguousarray(panel_moments(wa, exa, dim))
    momb = np.ascontiguousarray(panel_moments(wb, exb, dim))
    args = (ma, na, wa, moma, mb, nb, wb, momb, float(power), bool(transverse))
    return _run_rows(mod.cross_row_sums, len(wa), args, workers or worker_count())
