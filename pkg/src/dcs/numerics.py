"""Seedable counter-based random streams and the dense-vector primitives
everything else builds on.

All sampling goes through :class:`RngStream`, a thin handle over numpy's
Philox generator keyed by ``(seed, stream_id)`` plus an optional child
path. Equal keys replay identical sequences on any platform; distinct
keys give statistically independent streams with no coordination, which
is what lets per-sample / per-check work run in parallel deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RngStream",
    "ScaleMixture",
    "as_signal",
    "dot",
    "hadamard",
    "norm2",
    "sample_chi_square",
    "sample_isotropic_noise",
    "sample_isotropic_noise_batch",
    "sample_standard_normal",
]


class RngStream:
    """Reproducible random stream keyed by ``(seed, stream_id)``.

    ``child(*indices)`` derives a fresh independent stream; this is how a
    master seed is split into per-sample, per-epoch, or per-check streams
    without any shared state. A stream is stateful across calls (call
    order matters); ``clone()`` returns a new stream that replays the
    full sequence from the beginning.
    """

    __slots__ = ("seed", "stream_id", "path", "_gen")

    def __init__(self, seed: int, stream_id: int = 0, path: tuple[int, ...] = ()):
        seed = int(seed)
        stream_id = int(stream_id)
        path = tuple(int(p) for p in path)
        if seed < 0 or stream_id < 0 or any(p < 0 for p in path):
            raise ValueError("seed, stream_id and child indices must be nonnegative")
        self.seed = seed
        self.stream_id = stream_id
        self.path = path
        ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id, *path))
        self._gen = np.random.Generator(np.random.Philox(ss))

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def child(self, *indices: int) -> "RngStream":
        """Independent stream derived from this stream's key and ``indices``."""
        return RngStream(self.seed, self.stream_id, self.path + tuple(indices))

    def clone(self) -> "RngStream":
        return RngStream(self.seed, self.stream_id, self.path)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id}, path={self.path})"


@dataclass(frozen=True)
class ScaleMixture:
    """Finite discrete distribution over noise scales.

    Draws are Gaussian vectors multiplied by a random scale ``S`` from this
    distribution. The resulting noise is isotropic with per-coordinate
    variance ``E[S^2]``; the scales must be positive and finite (bounded
    support) and the probabilities must sum to one.
    """

    scales: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        scales = np.asarray(self.scales, dtype=np.float64)
        probs = np.asarray(self.probs, dtype=np.float64)
        if scales.ndim != 1 or scales.size == 0 or scales.shape != probs.shape:
            raise ValueError("scales and probs must be equal-length nonempty sequences")
        if not np.all(np.isfinite(scales)) or np.any(scales <= 0):
            raise ValueError("scales must be finite and positive")
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise ValueError("probs must be nonnegative and sum to 1")

    def mean_square(self) -> float:
        s = np.asarray(self.scales, dtype=np.float64)
        p = np.asarray(self.probs, dtype=np.float64)
        return float(np.sum(p * s * s))


def sample_standard_normal(rng: RngStream, n: int) -> np.ndarray:
    """``n`` iid N(0,1) draws, deterministic given the stream state."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return rng.generator.standard_normal(n)


def sample_chi_square(rng: RngStream, dof: int, n: int) -> np.ndarray:
    """``n`` iid chi-square draws with ``dof`` degrees of freedom.

    Sampled as gamma(shape=dof/2, scale=2), O(1) per draw for any dof;
    the sum-of-squares construction is kept as a test oracle only.
    """
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return rng.generator.gamma(dof / 2.0, 2.0, size=n)


def _check_mixture(sigma: float, mixture: ScaleMixture) -> None:
    ms = mixture.mean_square()
    if abs(ms - sigma * sigma) > 1e-9:
        raise ValueError(
            f"mixture mean square {ms!r} does not match sigma^2 = {sigma * sigma!r}"
        )


def sample_isotropic_noise_batch(
    rng: RngStream,
    n: int,
    dim: int,
    sigma: float,
    mixture: ScaleMixture | None = None,
) -> np.ndarray:
    """``n`` independent isotropic noise vectors as an (n, dim) array.

    Pure Gaussian when ``mixture`` is None; otherwise a scale mixture of
    Gaussians (one scale draw per vector). Either way the noise has zero
    mean and per-coordinate variance ``sigma**2``.
    """
    if n < 1 or dim < 1:
        raise ValueError("n and dim must be >= 1")
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    if mixture is None:
        return sigma * rng.generator.standard_normal((n, dim))
    _check_mixture(sigma, mixture)
    scales = rng.generator.choice(
        np.asarray(mixture.scales, dtype=np.float64), size=n, p=np.asarray(mixture.probs)
    )
    z = rng.generator.standard_normal((n, dim))
    return z * scales[:, None]


def sample_isotropic_noise(
    rng: RngStream,
    dim: int,
    sigma: float,
    mixture: ScaleMixture | None = None,
) -> np.ndarray:
    """One isotropic noise draw of dimension ``dim``."""
    return sample_isotropic_noise_batch(rng, 1, dim, sigma, mixture)[0]


def as_signal(values) -> np.ndarray:
    """Validate and return a finite 1-D float64 vector."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"expected a nonempty 1-D vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("vector entries must be finite")
    return arr


def _check_dims(u: np.ndarray, v: np.ndarray) -> None:
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")


def dot(u: np.ndarray, v: np.ndarray) -> float:
    _check_dims(u, v)
    return float(np.dot(u, v))


def norm2(u: np.ndarray) -> float:
    return float(np.linalg.norm(u))


def hadamard(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    _check_dims(u, v)
    return u * v


def mean_and_stderr(values: np.ndarray) -> tuple[float, float]:
    """Sample mean and its standard error (0 stderr for a single value)."""
    n = values.size
    mean = float(values.mean())
    if n < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(n))
