# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled split search kernel; same contract as _split_py.best_split."""

import numpy as np
cimport numpy as cnp

BACKEND = "cython"

cdef double _MIN_GAIN = 1e-12


def best_split(cnp.int64_t[::1] indptr,
               cnp.int64_t[::1] rowidx,
               double[::1] vals,
               cnp.uint8_t[::1] in_node,
               long n_node,
               double sum_node,
               double[::1] grad,
               long min_leaf):
    cdef long n_cols = indptr.shape[0] - 1
    cdef double base = sum_node * sum_node / n_node
    cdef long best_feat = -1
    cdef double best_thr = 0.0
    cdef double best_gain = _MIN_GAIN

    cdef cnp.ndarray vbuf_arr = np.empty(in_node.shape[0], dtype=np.float64)
    cdef cnp.ndarray gbuf_arr = np.empty(in_node.shape[0], dtype=np.float64)
    cdef double[::1] vbuf = vbuf_arr
    cdef double[::1] gbuf = gbuf_arr

    cdef long j, p, lo, hi, m, n_zero, i, gc
    cdef long cum_n, row
    cdef double sum_nz, zero_sum, cum_s, gv, gs, last_v
    cdef double score, gain, nl, nr
    cdef bint zero_pending, have_prev

    for j in range(n_cols):
        lo = indptr[j]
        hi = indptr[j + 1]
        if lo == hi:
            continue
        m = 0
        sum_nz = 0.0
        for p in range(lo, hi):
            row = rowidx[p]
            if in_node[row]:
                vbuf[m] = vals[p]
                gbuf[m] = grad[row]
                sum_nz += grad[row]
                m += 1
        if m == 0:
            continue
        n_zero = n_node - m
        zero_sum = sum_node - sum_nz
        zero_pending = n_zero > 0

        cum_n = 0
        cum_s = 0.0
        last_v = 0.0
        have_prev = False
        i = 0
        while i < m or zero_pending:
            if zero_pending and (i >= m or vbuf[i] > 0.0):
                gv = 0.0
                gs = zero_sum
                gc = n_zero
                zero_pending = False
            else:
                gv = vbuf[i]
                gs = 0.0
                gc = 0
                while i < m and vbuf[i] == gv:
                    gs += gbuf[i]
                    gc += 1
                    i += 1
            if have_prev:
                if cum_n >= min_leaf and (n_node - cum_n) >= min_leaf:
                    nl = <double>cum_n
                    nr = <double>(n_node - cum_n)
                    score = (cum_s * cum_s / nl
                             + (sum_node - cum_s) * (sum_node - cum_s) / nr)
                    gain = score - base
                    if gain > best_gain:
                        best_gain = gain
                        best_feat = j
                        best_thr = (last_v + gv) / 2.0
            cum_n += gc
            cum_s += gs
            last_v = gv
            have_prev = True

    if best_feat < 0:
        return -1, 0.0, 0.0
    return best_feat, best_thr, best_gain
