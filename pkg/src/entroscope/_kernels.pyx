# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled panel-pair sums for the twist kernel.

Both routines fill ``out[i]`` for rows ``start <= i < stop`` with the
weighted sum over partner panels; the caller reduces ``out`` with numpy so
the total does not depend on how rows were split across workers. The
numpy twin lives in ``_kernels_py.py`` and must stay numerically equivalent.

``mom`` holds each panel's second moment (variance of position along the
panel, halved); it feeds a second-order correction that turns the midpoint
value of ``1/r^p`` into a panel average.
"""
from libc.math cimport sqrt, pow


cdef inline double _inv_power(double at, double power) nogil:
    cdef double inv2 = 1.0 / (at * at)
    if power == 2.0:
        return inv2
    if power == 4.0:
        return inv2 * inv2
    return 1.0 / pow(at, power)


cdef inline double _pair(const double[:, ::1] ma, const double[:, ::1] na, Py_ssize_t i,
                         const double[:, ::1] mb, const double[:, ::1] nb, Py_ssize_t j,
                         double d2, double at, int dim, double power, bint transverse,
                         double mom_i, double mom_j) nogil:
    cdef double dot = 0.0, pa = 0.0, pb = 0.0, dx, inv_d2, lap_i, lap_j, at2
    cdef Py_ssize_t k
    for k in range(dim):
        dx = mb[j, k] - ma[i, k]
        dot += na[i, k] * nb[j, k]
        pa += na[i, k] * dx
        pb += nb[j, k] * dx
    inv_d2 = 1.0 / d2
    if transverse:
        dot += pa * pb * inv_d2
    at2 = at * at
    if mom_i == 0.0 and mom_j == 0.0:
        return dot * _inv_power(at, power)
    # in-panel Laplacian of r^-p, divided by r^-p-2
    lap_i = power * ((power + 2.0) * (1.0 - pa * pa * inv_d2) - (dim - 1))
    lap_j = power * ((power + 2.0) * (1.0 - pb * pb * inv_d2) - (dim - 1))
    return dot * _inv_power(at, power) * (1.0 + (mom_i * lap_i + mom_j * lap_j) / at2)


def self_row_sums(const double[:, ::1] mid, const double[:, ::1] nrm,
                  const double[::1] w, const double[::1] ext, const double[::1] mom,
                  double eps, double power, bint transverse,
                  Py_ssize_t start, Py_ssize_t stop, double[::1] out):
    cdef Py_ssize_t n = mid.shape[0], dim = mid.shape[1], i, j, k
    cdef double acc, d2, d, dx, half, frac, at
    with nogil:
        for i in range(start, stop):
            acc = 0.0
            for j in range(n):
                if j == i:
                    continue
                d2 = 0.0
                for k in range(dim):
                    dx = mid[j, k] - mid[i, k]
                    d2 = d2 + dx * dx
                d = sqrt(d2)
                half = 0.5 * ext[j]
                if d <= eps - half or d == 0.0:
                    continue
                if d >= eps + half:
                    acc = acc + w[j] * _pair(mid, nrm, i, mid, nrm, j, d2, d, dim, power,
                                             transverse, mom[i], mom[j])
                else:
                    # panel straddles the cutoff: keep the part beyond eps
                    frac = (d + half - eps) / ext[j]
                    at = 0.5 * (eps + d + half)
                    acc = acc + w[j] * frac * _pair(mid, nrm, i, mid, nrm, j, d2, at, dim, power,
                                                    transverse, 0.0, 0.0)
            out[i] = w[i] * acc


def cross_row_sums(const double[:, ::1] ma, const double[:, ::1] na, const double[::1] wa,
                   const double[::1] moma,
                   const double[:, ::1] mb, const double[:, ::1] nb, const double[::1] wb,
                   const double[::1] momb,
                   double power, bint transverse,
                   Py_ssize_t start, Py_ssize_t stop, double[::1] out):
    cdef Py_ssize_t m = mb.shape[0], dim = ma.shape[1], i, j, k
    cdef double acc, d2, d, dx
    with nogil:
        for i in range(start, stop):
            acc = 0.0
            for j in range(m):
                d2 = 0.0
                for k in range(dim):
                    dx = mb[j, k] - ma[i, k]
                    d2 = d2 + dx * dx
                d = sqrt(d2)
                acc = acc + wb[j] * _pair(ma, na, i, mb, nb, j, d2, d, dim, power,
                                          transverse, moma[i], momb[j])
            out[i] = wa[i] * acc
