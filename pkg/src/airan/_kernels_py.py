"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``.

Every expression is evaluated in the same order as the Cython loop so the two
backends agree bit for bit.
"""
import numpy as np

BACKEND = "python"


def energy_breakdown(channels, carriers, tx_power, pa_intercept, pa_slope,
                     transceiver, digital_if, baseband, static):
    m = np.asarray(channels, dtype=np.float64)
    c = np.asarray(carriers, dtype=np.float64)
    p = np.asarray(tx_power, dtype=np.float64)
    out = np.empty((5,) + m.shape, dtype=np.float64)
    out[0] = m * (pa_intercept + pa_slope * p)
    out[1] = m * transceiver
    out[2] = m * c * digital_if
    out[3] = c * baseband
    out[4] = static
    return out


def best_split(X, y, idx, features, n_classes, min_leaf):
    X = np.asarray(X)
    idx = np.asarray(idx, dtype=np.int64)
    m = idx.shape[0]
    ys_all = np.asarray(y)[idx]
    total = np.bincount(ys_all, minlength=n_classes).astype(np.int64)
    sq_tot = int((total * total).sum())
    parent = float(sq_tot) / float(m)
    if m < 2:
        return -1, 0.0, 0.0
    nl = np.arange(1, m, dtype=np.int64)
    nr = m - nl
    size_ok = (nl >= min_leaf) & (nr >= min_leaf)
    best_f, best_thr, best_score = -1, 0.0, -1.0
    for f in np.asarray(features, dtype=np.int64):
        col = X[idx, f]
        order = np.argsort(col, kind="stable")
        cs = col[order]
        onehot = np.zeros((m, n_classes), dtype=np.int64)
        onehot[np.arange(m), ys_all[order]] = 1
        left = np.cumsum(onehot, axis=0)[:-1]
        right = total - left
        sq_l = (left * left).sum(axis=1)
        sq_r = (right * right).sum(axis=1)
        valid = size_ok & (cs[:-1] < cs[1:])
        if not valid.any():
            continue
        score = sq_l / nl + sq_r / nr
        score[~valid] = -np.inf
        j = int(np.argmax(score))
        if score[j] > best_score:
            best_score = float(score[j])
            best_f = int(f)
            a, b = float(cs[j]), float(cs[j + 1])
            best_thr = (a + b) / 2.0
            if best_thr == b:
                best_thr = a
    if best_f < 0:
        return -1, 0.0, 0.0
    return best_f, best_thr, (best_score - parent) / float(m)
