# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops. ``airan._kernels_py`` mirrors every function here operation for operation."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


def energy_breakdown(cnp.int64_t[:, ::1] channels,
                     cnp.int64_t[:, ::1] carriers,
                     double[:, ::1] tx_power,
                     double pa_intercept, double pa_slope,
                     double transceiver, double digital_if,
                     double baseband, double static):
    """Per station-slot power of each component, shape (5, N, T), in watts."""
    cdef Py_ssize_t n_st = channels.shape[0]
    cdef Py_ssize_t n_t = channels.shape[1]
    out = np.empty((5, n_st, n_t), dtype=np.float64)
    cdef double[:, :, ::1] o = out
    cdef Py_ssize_t i, j
    cdef double m, c
    for i in range(n_st):
        for j in range(n_t):
            m = <double>channels[i, j]
            c = <double>carriers[i, j]
            o[0, i, j] = m * (pa_intercept + pa_slope * tx_power[i, j])
            o[1, i, j] = m * transceiver
            o[2, i, j] = m * c * digital_if
            o[3, i, j] = c * baseband
            o[4, i, j] = static
    return out


def best_split(double[:, ::1] X, cnp.int64_t[::1] y, cnp.int64_t[::1] idx,
               cnp.int64_t[::1] features, Py_ssize_t n_classes, Py_ssize_t min_leaf):
    """Best Gini split over ``features`` for the samples in ``idx``.

    Returns ``(feature, threshold, impurity_decrease)``; feature is -1 when no
    split leaves ``min_leaf`` samples on both sides.
    """
    cdef Py_ssize_t m = idx.shape[0]
    cdef Py_ssize_t fi, f, i, k, nl, nr
    cdef cnp.int64_t[::1] order
    cdef cnp.int64_t[::1] left = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.int64_t[::1] total = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.int64_t sq_tot = 0, sq_l, sq_r, lk, rk
    cdef double a, b, score, best_score = -1.0, best_thr = 0.0, parent
    cdef Py_ssize_t best_f = -1
    cdef double[::1] col

    for i in range(m):
        total[y[idx[i]]] += 1
    for k in range(n_classes):
        sq_tot += total[k] * total[k]
    parent = (<double>sq_tot) / (<double>m)

    idx_np = np.asarray(idx)
    for fi in range(features.shape[0]):
        f = features[fi]
        col_np = np.ascontiguousarray(np.asarray(X)[idx_np, f])
        col = col_np
        order = np.argsort(col_np, kind="stable").astype(np.int64)
        for k in range(n_classes):
            left[k] = 0
        sq_l = 0
        sq_r = sq_tot
        for i in range(m - 1):
            k = y[idx[order[i]]]
            lk = left[k]
            rk = total[k] - lk
            sq_l += 2 * lk + 1
            sq_r -= 2 * rk - 1
            left[k] = lk + 1
            nl = i + 1
            nr = m - nl
            if nl < min_leaf or nr < min_leaf:
                continue
            a = col[order[i]]
            b = col[order[i + 1]]
            if not a < b:
                continue
            score = (<double>sq_l) / (<double>nl) + (<double>sq_r) / (<double>nr)
            if score > best_score:
                best_score = score
                best_f = f
                best_thr = (a + b) / 2.0
                if best_thr == b:
                    best_thr = a
    if best_f < 0:
        return -1, 0.0, 0.0
    return best_f, best_thr, (best_score - parent) / (<double>m)
