"""Pure-numpy kernel implementations.

Same call contracts as ``_kernels_nb``. Both backends consume the caller's
pre-drawn random numbers in the same order, so they produce the same
replacements / summands for the same inputs (up to summation-order float
effects inside reductions, which live in the callers, not here).
"""

from __future__ import annotations

import numpy as np


def k_weight_summands(c_hat: float, kappa: np.ndarray, nu: np.ndarray, dim: int) -> np.ndarray:
    """Per-draw weight-estimator summands (c+kappa/sqrt(D)) / sqrt((c+kappa/sqrt(D))^2 + nu/D)."""
    a = c_hat + kappa / np.sqrt(float(dim))
    return a / np.sqrt(a * a + nu / float(dim))


def grid_neighbor_replace(
    x: np.ndarray,
    bits: np.ndarray,
    u: np.ndarray,
    height: int,
    width: int,
    radius: int,
) -> np.ndarray:
    """Replace every masked pixel by a uniform pick from its clipped mini-patch.

    ``u`` holds one uniform in [0,1) per masked coordinate, in ascending
    coordinate order. The patch is the (2r+1)x(2r+1) square centered on the
    pixel, intersected with the image, minus the center itself.
    """
    out = x.copy()
    idx = np.nonzero(bits)[0]
    if idx.size == 0:
        return out
    i = idx // width
    j = idx % width
    r0 = np.maximum(i - radius, 0)
    r1 = np.minimum(i + radius, height - 1)
    c0 = np.maximum(j - radius, 0)
    c1 = np.minimum(j + radius, width - 1)
    ncols = c1 - c0 + 1
    nvalid = (r1 - r0 + 1) * ncols - 1
    k = np.minimum((u * nvalid).astype(np.int64), nvalid - 1)
    center = (i - r0) * ncols + (j - c0)
    k = k + (k >= center)
    row = r0 + k // ncols
    col = c0 + k % ncols
    out[idx] = x[row * width + col]
    return out


def window_neighbor_replace(
    x: np.ndarray,
    bits: np.ndarray,
    u: np.ndarray,
    delta: int,
) -> np.ndarray:
    """1-D analogue: masked step t draws uniformly from [t-delta, t+delta]\\{t} clipped to range."""
    n = x.shape[0]
    out = x.copy()
    idx = np.nonzero(bits)[0]
    if idx.size == 0:
        return out
    lo = np.maximum(idx - delta, 0)
    hi = np.minimum(idx + delta, n - 1)
    nvalid = hi - lo
    k = np.minimum((u * nvalid).astype(np.int64), nvalid - 1)
    k = k + (k >= idx - lo)
    out[idx] = x[lo + k]
    return out


def radial_ratios(eps: np.ndarray, t: float) -> np.ndarray:
    """Row-wise (eps_1 + t) / ||eps + t*e_1||_2 for a (n, D) block of noise draws."""
    num = eps[:, 0] + t
    sq = np.einsum("ij,ij->i", eps, eps) + 2.0 * t * eps[:, 0] + t * t
    return num / np.sqrt(sq)
