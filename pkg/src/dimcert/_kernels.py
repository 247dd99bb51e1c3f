"""Compiled inner loops: sliding-window maxima over monotone index windows."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def window_max(values, lo, hi, out):
    """out[k] = max(values[lo[k]..hi[k]]) after clipping to the array, 0 if empty.

    ``lo`` and ``hi`` must be nondecreasing.  A monotonic deque keeps the
    candidates, so the cost is O(len(values) + len(lo)).
    """
    n = values.shape[0]
    dq = np.empty(n, np.int64)
    head = 0
    tail = 0
    nxt = 0
    for k in range(lo.shape[0]):
        a = lo[k]
        b = hi[k]
        if a < 0:
            a = 0
        if b > n - 1:
            b = n - 1
        if a > b:
            out[k] = 0.0
            continue
        if nxt < a:
            nxt = a
            head = 0
            tail = 0
        while nxt <= b:
            v = values[nxt]
            while tail > head and values[dq[tail - 1]] <= v:
                tail -= 1
            dq[tail] = nxt
            tail += 1
            nxt += 1
        while dq[head] < a:
            head += 1
        out[k] = values[dq[head]]


@njit(cache=True, nogil=True)
def weighted_window_sum(values, lo, hi, weights, partner, inflate, out):
    """out = sum of weights[t] * window_max(values, lo[t], hi[t]), inflated by ``inflate``.

    Terms with partner[t] >= 0 are added as w * (M_t + M_partner) so that
    mirrored cells see the same floating-point expression; partner[t] == -2
    marks the second member of a pair.
    """
    nterms, ncells = lo.shape
    buf = np.empty((nterms, ncells))
    for t in range(nterms):
        window_max(values, lo[t], hi[t], buf[t])
    for k in range(ncells):
        out[k] = 0.0
    for t in range(nterms):
        p = partner[t]
        if p == -2:
            continue
        w = weights[t]
        if p >= 0:
            for k in range(ncells):
                out[k] += w * (buf[t, k] + buf[p, k])
        else:
            for k in range(ncells):
                out[k] += w * buf[t, k]
    for k in range(ncells):
        # an exact zero (all maxima zero) needs no rounding margin
        if out[k] > 0.0:
            out[k] = np.nextafter(out[k] * inflate, np.inf)
