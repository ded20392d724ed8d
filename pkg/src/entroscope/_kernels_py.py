"""Pure numpy twin of ``_kernels.pyx``; same signatures, same row sums."""
import numpy as np

_BLOCK = 256


def _pair(ma, na, mb, nb, sep, at, power, transverse, mom_a, mom_b):
    dim = ma.shape[1]
    unit = (mb[None, :, :] - ma[:, None, :]) / sep[:, :, None]
    pa = np.einsum("ik,ijk->ij", na, unit)
    pb = np.einsum("jk,ijk->ij", nb, unit)
    dot = na @ nb.T
    if transverse:
        dot = dot + pa * pb
    lap_a = power * ((power + 2.0) * (1.0 - pa * pa) - (dim - 1))
    lap_b = power * ((power + 2.0) * (1.0 - pb * pb) - (dim - 1))
    corr = 1.0 + (mom_a * lap_a + mom_b * lap_b) / (at * at)
    return dot / at ** power * corr


def self_row_sums(mid, nrm, w, ext, mom, eps, power, transverse, start, stop, out):
    mid, nrm, w, ext, mom = map(np.asarray, (mid, nrm, w, ext, mom))
    for s in range(start, stop, _BLOCK):
        e = min(s + _BLOCK, stop)
        rows = np.arange(s, e)
        d = np.sqrt(((mid[None, :, :] - mid[rows, None, :]) ** 2).sum(axis=-1))
        half = 0.5 * ext[None, :]
        keep = (d > eps - half) & (d > 0.0)
        keep[np.arange(e - s), rows] = False
        full = d >= eps + half
        frac = np.where(full, 1.0, (d + half - eps) / ext[None, :])
        at = np.where(full, d, 0.5 * (eps + d + half))
        safe_d = np.where(keep, d, 1.0)
        safe_at = np.where(keep, at, 1.0)
        # straddling panels get no panel-average correction
        mom_a = np.where(full, mom[rows, None], 0.0)
        mom_b = np.where(full, mom[None, :], 0.0)
        k = _pair(mid[rows], nrm[rows], mid, nrm, safe_d, safe_at, power, transverse, mom_a, mom_b)
        terms = np.where(keep, w[None, :] * frac * k, 0.0)
        out[s:e] = w[rows] * terms.sum(axis=1)


def cross_row_sums(ma, na, wa, moma, mb, nb, wb, momb, power, transverse, start, stop, out):
    ma, na, wa, moma, mb, nb, wb, momb = map(np.asarray, (ma, na, wa, moma, mb, nb, wb, momb))
    for s in range(start, stop, _BLOCK):
        e = min(s + _BLOCK, stop)
        d = np.sqrt(((mb[None, :, :] - ma[s:e, None, :]) ** 2).sum(axis=-1))
        k = _pair(ma[s:e], na[s:e], mb, nb, d, d, power, transverse,
                  moma[s:e, None], momb[None, :])
        out[s:e] = wa[s:e] * (k * wb[None, :]).sum(axis=1)
