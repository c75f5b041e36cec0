"""Numba @njit kernel implementations. See _kernels_np for the contracts."""

from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def k_weight_summands(c_hat, kappa, nu, dim):
    n = kappa.shape[0]
    out = np.empty(n, dtype=np.float64)
    root_d = math.sqrt(float(dim))
    for i in range(n):
        a = c_hat + kappa[i] / root_d
        out[i] = a / math.sqrt(a * a + nu[i] / float(dim))
    return out


@njit(cache=True)
def grid_neighbor_replace(x, bits, u, height, width, radius):
    out = x.copy()
    m = 0
    for d in range(x.shape[0]):
        if bits[d] == 0:
            continue
        i = d // width
        j = d % width
        r0 = max(i - radius, 0)
        r1 = min(i + radius, height - 1)
        c0 = max(j - radius, 0)
        c1 = min(j + radius, width - 1)
        ncols = c1 - c0 + 1
        nvalid = (r1 - r0 + 1) * ncols - 1
        k = int(u[m] * nvalid)
        if k > nvalid - 1:
            k = nvalid - 1
        center = (i - r0) * ncols + (j - c0)
        if k >= center:
            k += 1
        row = r0 + k // ncols
        col = c0 + k % ncols
        out[d] = x[row * width + col]
        m += 1
    return out


@njit(cache=True)
def window_neighbor_replace(x, bits, u, delta):
    n = x.shape[0]
    out = x.copy()
    m = 0
    for t in range(n):
        if bits[t] == 0:
            continue
        lo = max(t - delta, 0)
        hi = min(t + delta, n - 1)
        nvalid = hi - lo
        k = int(u[m] * nvalid)
        if k > nvalid - 1:
            k = nvalid - 1
        if k >= t - lo:
            k += 1
        out[t] = x[lo + k]
        m += 1
    return out


@njit(cache=True)
def radial_ratios(eps, t):
    n, d = eps.shape
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        acc = 0.0
        for j in range(d):
            acc += eps[i, j] * eps[i, j]
        sq = acc + 2.0 * t * eps[i, 0] + t * t
        out[i] = (eps[i, 0] + t) / math.sqrt(sq)
    return out
