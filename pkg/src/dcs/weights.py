"""Signal-to-noise ratio and shrinkage-weight estimation.

Given two noisy views ``x = s + eps`` and ``x_tilde = s + eps_tilde`` of
the same clean vector, the SN ratio ``c = ||s|| / (sigma * sqrt(D))`` is
estimated as

    c_hat = sqrt(2 * max(x . x_tilde, 0)) / ||x - x_tilde||

and the shrinkage weight k_D(c) = E[(eps_1 + ||s||) / ||eps + ||s|| e_1||]
is estimated by Monte Carlo over two scalar variables,

    k_hat = mean_i (c_hat + kappa_i/sqrt(D)) / sqrt((c_hat + kappa_i/sqrt(D))^2 + nu_i/D)

with kappa ~ N(0,1) and nu ~ chi^2_{D-1}. For large D the weight tends to
the closed form c / sqrt(c^2 + 1). A brute-force oracle that samples the
full D-dimensional noise directly is provided for verification.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .masking import MaskedPair
from .numerics import (
    RngStream,
    ScaleMixture,
    mean_and_stderr,
    sample_isotropic_noise_batch,
)

__all__ = [
    "OracleEstimate",
    "WeightEstimate",
    "estimate_c",
    "estimate_c_batch",
    "estimate_c_from_pair",
    "estimate_k_mc",
    "floor_k",
    "k_closed_form",
    "k_oracle_isotropic",
    "theorem2_bound",
    "theorem2_delta_max",
    "theorem2_min_dim",
]

DEFAULT_K_FLOOR = 0.05


@dataclass(frozen=True)
class WeightEstimate:
    """SN-ratio estimate plus the Monte Carlo weight and its precision."""

    c_hat: float
    k_hat: float
    n_samples: int
    std_error: float


@dataclass(frozen=True)
class OracleEstimate:
    """Brute-force Monte Carlo estimate with its standard error."""

    value: float
    std_error: float
    n_samples: int


def estimate_c(x: np.ndarray, x_tilde: np.ndarray) -> float:
    """SN-ratio estimate from a raw pair of noisy views.

    The inner product is cut off at 0 (its expectation ||s||^2 is
    nonnegative). Raises when the two views are identical, since the
    denominator carries the noise scale.
    """
    x = np.asarray(x, dtype=np.float64)
    x_tilde = np.asarray(x_tilde, dtype=np.float64)
    if x.shape != x_tilde.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {x_tilde.shape}")
    denom = float(np.linalg.norm(x - x_tilde))
    if denom == 0.0:
        raise ValueError("degenerate pair: x and x_tilde are identical")
    num = max(float(np.dot(x, x_tilde)), 0.0)
    return math.sqrt(2.0 * num) / denom


def estimate_c_batch(x_rows: np.ndarray, xt_rows: np.ndarray) -> np.ndarray:
    """Row-wise estimate_c over (n, D) stacks of paired views."""
    if x_rows.shape != xt_rows.shape:
        raise ValueError("dimension mismatch")
    dots = np.einsum("ij,ij->i", x_rows, xt_rows)
    denom = np.linalg.norm(x_rows - xt_rows, axis=1)
    if np.any(denom == 0.0):
        raise ValueError("degenerate pair in batch")
    return np.sqrt(2.0 * np.maximum(dots, 0.0)) / denom


def estimate_c_from_pair(pair: MaskedPair) -> float:
    """estimate_c on the masked-coordinate subvectors of a pair.

    Unmasked coordinates are identical by construction and carry no noise
    information, so the estimate is computed on the support only.
    """
    support = pair.support()
    return estimate_c(pair.x[support], pair.x_tilde[support])


def estimate_k_mc(
    rng: RngStream, c_hat: float, dim: int, n_samples: int = 128
) -> WeightEstimate:
    """Monte Carlo weight estimate at SN ratio ``c_hat`` in dimension ``dim``.

    Every summand lies in [-1, 1], hence so does the estimate. Requires
    dim >= 2 (the chi-square factor has dim-1 degrees of freedom).
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    if c_hat < 0:
        raise ValueError(f"c_hat must be >= 0, got {c_hat}")
    kappa = rng.generator.standard_normal(n_samples)
    nu = rng.generator.gamma((dim - 1) / 2.0, 2.0, size=n_samples)
    summands = kernels.k_weight_summands(float(c_hat), kappa, nu, dim)
    k_hat, std_error = mean_and_stderr(summands)
    return WeightEstimate(
        c_hat=float(c_hat), k_hat=k_hat, n_samples=n_samples, std_error=std_error
    )


def floor_k(k_hat: float, floor: float = DEFAULT_K_FLOOR) -> float:
    """Clamp a weight estimate away from zero before dividing a loss by it."""
    return max(k_hat, floor)


def k_closed_form(c: float) -> float:
    """Large-dimension weight limit c / sqrt(c^2 + 1)."""
    if c < 0:
        raise ValueError(f"c must be >= 0, got {c}")
    return float(c / np.hypot(c, 1.0))


def k_oracle_isotropic(
    rng: RngStream,
    s: np.ndarray,
    sigma: float,
    n_samples: int,
    mixture: ScaleMixture | None = None,
    chunk_elems: int = 4_000_000,
) -> OracleEstimate:
    """Brute-force weight oracle: direct Monte Carlo over full noise vectors.

    Estimates E[(eps_1 + t) / ||eps + t e_1||] with t = ||s|| by sampling
    eps in blocks. Used only for verification; the training-time estimator
    is :func:`estimate_k_mc`.
    """
    s = np.asarray(s, dtype=np.float64)
    dim = s.size
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    t = float(np.linalg.norm(s))
    rows_per_chunk = max(1, chunk_elems // dim)
    total = 0
    acc_sum = 0.0
    acc_sumsq = 0.0
    while total < n_samples:
        n = min(rows_per_chunk, n_samples - total)
        eps = sample_isotropic_noise_batch(rng, n, dim, sigma, mixture)
        ratios = kernels.radial_ratios(eps, t)
        acc_sum += float(ratios.sum())
        acc_sumsq += float(np.dot(ratios, ratios))
        total += n
    mean = acc_sum / n_samples
    if n_samples > 1:
        var = max(acc_sumsq - n_samples * mean * mean, 0.0) / (n_samples - 1)
        stderr = math.sqrt(var / n_samples)
    else:
        stderr = 0.0
    return OracleEstimate(value=mean, std_error=stderr, n_samples=n_samples)


def theorem2_delta_max(c: float) -> float:
    """Largest admissible failure probability for the c-hat error bound."""
    if c <= 0:
        raise ValueError(f"c must be > 0, got {c}")
    return min(1.0, 8.0 * math.exp(-c * c / 4.0))


def theorem2_min_dim(c: float, sigma_bar_sq: float, sigma_sq: float, delta: float) -> int:
    """Smallest dimension at which the c-hat error bound is in force."""
    if c <= 0:
        raise ValueError(f"c must be > 0, got {c}")
    if not 0.0 < delta < theorem2_delta_max(c):
        raise ValueError(f"delta {delta} outside (0, {theorem2_delta_max(c)})")
    base = 12.0 / min(c * c, 1.0) * (sigma_bar_sq / sigma_sq) * math.log(12.0 / delta)
    return int(math.ceil(base * base))


def theorem2_bound(
    c: float, sigma_bar_sq: float, sigma_sq: float, delta: float, dim: int
) -> float:
    """High-probability upper bound on |c - c_hat|:

        12 * (sbar^2/s^2) * (c + 1/c) * log(12/delta) / sqrt(D)

    valid for delta below :func:`theorem2_delta_max` and D at least
    :func:`theorem2_min_dim`.
    """
    if c <= 0:
        raise ValueError("bound undefined at c == 0 (contains 1/c)")
    if not 0.0 < delta < theorem2_delta_max(c):
        raise ValueError(
            f"delta {delta} outside admissible range (0, {theorem2_delta_max(c)})"
        )
    min_dim = theorem2_min_dim(c, sigma_bar_sq, sigma_sq, delta)
    if dim < min_dim:
        raise ValueError(f"dim {dim} below bound threshold {min_dim}")
    return (
        12.0
        * (sigma_bar_sq / sigma_sq)
        * (c + 1.0 / c)
        * math.log(12.0 / delta)
        / math.sqrt(dim)
    )
