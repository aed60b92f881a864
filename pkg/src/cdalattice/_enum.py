"""Numba kernels for Fincke-Pohst enumeration."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def enumerate_subtree(qdiag, mu, bound2, top, out_coords, out_norms):
    """All integer x with x[d-1] == top and sum_i q_i (x_i + sum_{j>i} mu_ij x_j)^2 <= bound2.

    Writes into the preallocated outputs and returns the number found, or -1
    when the outputs are too small (the caller grows them and retries).
    The zero vector is skipped.
    """
    d = qdiag.shape[0]
    cap = out_coords.shape[0]
    x = np.zeros(d, dtype=np.int64)
    center = np.zeros(d)
    hi = np.zeros(d, dtype=np.int64)
    partial = np.zeros(d + 1)
    count = 0

    x[d - 1] = top
    partial[d - 1] = qdiag[d - 1] * top * top
    if partial[d - 1] > bound2:
        return 0
    if d == 1:
        if top != 0:
            if cap < 1:
                return -1
            out_coords[0, 0] = top
            out_norms[0] = partial[0]
            return 1
        return 0

    k = d - 2
    c = 0.0
    for j in range(k + 1, d):
        c -= mu[k, j] * x[j]
    center[k] = c
    rad = np.sqrt(max(bound2 - partial[k + 1], 0.0) / qdiag[k])
    x[k] = np.int64(np.ceil(c - rad))
    hi[k] = np.int64(np.floor(c + rad))

    while True:
        if x[k] > hi[k]:
            k += 1
            if k >= d - 1:
                break
            x[k] += 1
            continue
        t = x[k] - center[k]
        val = partial[k + 1] + qdiag[k] * t * t
        if val > bound2:
            x[k] += 1
            continue
        if k == 0:
            nonzero = False
            for j in range(d):
                if x[j] != 0:
                    nonzero = True
                    break
            if nonzero:
                if count >= cap:
                    return -1
                for j in range(d):
                    out_coords[count, j] = x[j]
                out_norms[count] = val
                count += 1
            x[0] += 1
            continue
        partial[k] = val
        k -= 1
        c = 0.0
        for j in range(k + 1, d):
            c -= mu[k, j] * x[j]
        center[k] = c
        rad = np.sqrt(max(bound2 - partial[k + 1], 0.0) / qdiag[k])
        x[k] = np.int64(np.ceil(c - rad))
        hi[k] = np.int64(np.floor(c + rad))
    return count
