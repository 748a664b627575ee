"""Pure-numpy split search kernel; fallback for the compiled extension.

Both kernels implement the same contract: exact greedy search over sorted
feature values (zeros implicit), variance-reduction gain on residuals,
midpoint thresholds, first feature / lowest threshold winning ties via a
strictly-greater comparison.
"""
from __future__ import annotations

import numpy as np

BACKEND = "python"

_MIN_GAIN = 1e-12


def best_split(indptr, rowidx, vals, in_node, n_node, sum_node, grad,
               min_leaf):
    """Find the best (feature, threshold, gain) for one tree node.

    indptr/rowidx/vals describe a CSC matrix whose nonzeros are sorted by
    value within each column; in_node is a uint8 membership mask over rows.
    Returns (-1, 0.0, 0.0) when no admissible split exists.
    """
    n_cols = indptr.shape[0] - 1
    base = sum_node * sum_node / n_node
    best_feat = -1
    best_thr = 0.0
    best_gain = _MIN_GAIN
    mask = in_node.astype(bool)
    for j in range(n_cols):
        lo, hi = indptr[j], indptr[j + 1]
        if lo == hi:
            continue
        rows = rowidx[lo:hi]
        sel = mask[rows]
        v = vals[lo:hi][sel]
        m = v.shape[0]
        if m == 0:
            continue
        g = grad[rows[sel]]
        n_zero = n_node - m
        if n_zero > 0:
            zero_sum = sum_node - g.sum()
            pos = int(np.searchsorted(v, 0.0, side="left"))
            v2 = np.insert(v, pos, 0.0)
            g2 = np.insert(g, pos, zero_sum)
            c2 = np.ones(m + 1)
            c2[pos] = n_zero
        else:
            v2, g2, c2 = v, g, np.ones(m)
        cs = np.cumsum(g2)
        cn = np.cumsum(c2)
        bound = np.nonzero(v2[:-1] < v2[1:])[0]
        if bound.size == 0:
            continue
        nl = cn[bound]
        sl = cs[bound]
        nr = n_node - nl
        sr = sum_node - sl
        valid = (nl >= min_leaf) & (nr >= min_leaf)
        if not valid.any():
            continue
        gain = sl * sl / nl + sr * sr / nr - base
        gain[~valid] = -np.inf
        i = int(np.argmax(gain))
        if gain[i] > best_gain:
            best_gain = float(gain[i])
            best_feat = j
            best_thr = float((v2[bound[i]] + v2[bound[i] + 1]) / 2.0)
    if best_feat < 0:
        return -1, 0.0, 0.0
    return best_feat, best_thr, best_gain
