"""Numba kernels for the per-cell reconstruction loops.

Both kernels walk a batch of rows and, for every cell that borders an
interior interface, produce the reconstructed value at its right edge
(feeding the interface's left state) and at its left edge (the interface's
right state).  Stencil choice near the ends of the array is clamped to the
available data.
"""

import numpy as np
from numba import njit


@njit(cache=True, error_model="numpy")
def eno_edges_kernel(vals, lo, m, r, c_right, c_left, left_state, right_state):
    """ENO-selected edge values.

    left_state[b, i]  = right-edge value of cell lo-1+i   (i = 0..m)
    right_state[b, i] = left-edge value of cell lo+i
    """
    nrows, n = vals.shape
    diffs = np.empty((r, n))
    for b in range(nrows):
        row = vals[b]
        for i in range(n):
            diffs[0, i] = row[i]
        for k in range(1, r):
            for i in range(n - k):
                diffs[k, i] = diffs[k - 1, i + 1] - diffs[k - 1, i]
        for c in range(lo - 1, lo + m + 1):
            i0 = c
            npts = 1
            while npts < r:
                can_left = i0 - 1 >= 0
                can_right = i0 + npts + 1 <= n
                if can_left and (
                    not can_right or abs(diffs[npts, i0 - 1]) <= abs(diffs[npts, i0])
                ):
                    i0 -= 1
                elif not can_right:
                    break
                npts += 1
            s = c - i0
            if c >= lo:
                acc = 0.0
                for k in range(r):
                    acc += c_left[s, k] * row[i0 + k]
                right_state[b, c - lo] = acc
            if c <= lo + m - 1:
                acc = 0.0
                for k in range(r):
                    acc += c_right[s, k] * row[i0 + k]
                left_state[b, c - lo + 1] = acc


@njit(cache=True, error_model="numpy")
def weno_edges_kernel(vals, lo, m, r, c_right, c_left, gamma_right, gamma_left,
                      eps_w, left_state, right_state):
    """WENO-blended edge values; r is the sub-stencil width (2 or 3)."""
    nrows, _ = vals.shape
    beta = np.empty(r)
    for b in range(nrows):
        row = vals[b]
        for c in range(lo - 1, lo + m + 1):
            if r == 2:
                beta[0] = (row[c + 1] - row[c]) ** 2
                beta[1] = (row[c] - row[c - 1]) ** 2
            else:
                q0, q1, q2 = row[c], row[c + 1], row[c + 2]
                beta[0] = (13.0 / 12.0) * (q0 - 2 * q1 + q2) ** 2 \
                    + 0.25 * (3 * q0 - 4 * q1 + q2) ** 2
                q0, q1, q2 = row[c - 1], row[c], row[c + 1]
                beta[1] = (13.0 / 12.0) * (q0 - 2 * q1 + q2) ** 2 \
                    + 0.25 * (q0 - q2) ** 2
                q0, q1, q2 = row[c - 2], row[c - 1], row[c]
                beta[2] = (13.0 / 12.0) * (q0 - 2 * q1 + q2) ** 2 \
                    + 0.25 * (q0 - 4 * q1 + 3 * q2) ** 2
            if c <= lo + m - 1:
                acc = 0.0
                wsum = 0.0
                for s in range(r):
                    w = gamma_right[s] / (eps_w + beta[s]) ** 2
                    pval = 0.0
                    for k in range(r):
                        pval += c_right[s, k] * row[c - s + k]
                    acc += w * pval
                    wsum += w
                left_state[b, c - lo + 1] = acc / wsum
            if c >= lo:
                acc = 0.0
                wsum = 0.0
                for s in range(r):
                    w = gamma_left[s] / (eps_w + beta[s]) ** 2
                    pval = 0.0
                    for k in range(r):
                        pval += c_left[s, k] * row[c - s + k]
                    acc += w * pval
                    wsum += w
                right_state[b, c - lo] = acc / wsum
