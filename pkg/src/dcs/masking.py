"""Masked-counterpart construction: Bernoulli masks, blind-spot masking on
grids, and windowed neighbor masking for 1-D sequences.

Both procedures replace each selected coordinate with a uniformly chosen
neighbor (never the coordinate itself) and copy everything else verbatim,
so ``x`` and ``x_tilde`` agree exactly wherever the mask bit is 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .numerics import RngStream

__all__ = [
    "GridShape",
    "MaskSpec",
    "MaskVec",
    "MaskedPair",
    "blind_spot_mask",
    "draw_mask",
    "make_masked_pair",
    "tau_amn_mask",
]


@dataclass(frozen=True)
class GridShape:
    """Image geometry for grid masking; for sequences use height=1, width=T."""

    height: int
    width: int

    def __post_init__(self):
        if self.height < 1 or self.width < 1:
            raise ValueError(f"grid sides must be positive, got {self.height}x{self.width}")

    @property
    def dim(self) -> int:
        return self.height * self.width


@dataclass
class MaskVec:
    """Bernoulli 0/1 selection vector together with its draw probability."""

    bits: np.ndarray
    rho: float

    def __post_init__(self):
        bits = np.asarray(self.bits, dtype=np.uint8)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("bits must be a nonempty 1-D vector")
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("bits must be 0/1")
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (0,1), got {self.rho}")
        self.bits = bits

    @property
    def popcount(self) -> int:
        return int(self.bits.sum())

    @property
    def dim(self) -> int:
        return self.bits.size


@dataclass
class MaskedPair:
    """A noisy vector, its masked counterpart, and the mask that built it."""

    x: np.ndarray
    x_tilde: np.ndarray
    mask: MaskVec

    def __post_init__(self):
        if self.x.shape != self.x_tilde.shape or self.x.shape != self.mask.bits.shape:
            raise ValueError("x, x_tilde and mask must share one dimension")
        off = self.mask.bits == 0
        if not np.array_equal(self.x[off], self.x_tilde[off]):
            raise ValueError("x and x_tilde must agree exactly on unmasked coordinates")

    @property
    def dim(self) -> int:
        return self.x.size

    def support(self) -> np.ndarray:
        """Indices of the masked coordinates."""
        return np.nonzero(self.mask.bits)[0]


def draw_mask(rng: RngStream, dim: int, rho: float, min_popcount: int = 1) -> MaskVec:
    """iid Bernoulli(rho) mask over ``dim`` coordinates.

    Draws with fewer than ``min_popcount`` selected coordinates are
    redrawn: an empty mask makes the masked losses degenerate, and the
    weight estimator additionally needs at least 2 masked coordinates.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must lie in (0,1), got {rho}")
    if not 1 <= min_popcount <= dim:
        raise ValueError(f"min_popcount must lie in [1, dim], got {min_popcount}")
    while True:
        bits = (rng.generator.random(dim) < rho).astype(np.uint8)
        if int(bits.sum()) >= min_popcount:
            return MaskVec(bits=bits, rho=rho)


def blind_spot_mask(
    rng: RngStream,
    x: np.ndarray,
    shape: GridShape,
    rho: float,
    patch_radius: int = 1,
    min_popcount: int = 1,
) -> MaskedPair:
    """Grid masking: each selected pixel becomes a uniform draw from the
    (2r+1)x(2r+1) mini-patch around it, clipped at the borders, center
    excluded.
    """
    x = np.asarray(x, dtype=np.float64)
    if shape.dim != x.size:
        raise ValueError(f"shape {shape.height}x{shape.width} does not match dim {x.size}")
    if patch_radius < 1:
        raise ValueError(f"patch_radius must be >= 1, got {patch_radius}")
    if shape.dim < 2:
        raise ValueError("a 1x1 image has no neighbors to draw from")
    mask = draw_mask(rng, x.size, rho, min_popcount)
    u = rng.generator.random(mask.popcount)
    x_tilde = kernels.grid_neighbor_replace(
        x, mask.bits, u, shape.height, shape.width, patch_radius
    )
    return MaskedPair(x=x, x_tilde=x_tilde, mask=mask)


def tau_amn_mask(
    rng: RngStream,
    x: np.ndarray,
    rho: float,
    delta: int,
    min_popcount: int = 1,
) -> MaskedPair:
    """Sequence masking: each selected step t becomes a uniform draw from
    [t-delta, t+delta] \\ {t} intersected with the valid range."""
    x = np.asarray(x, dtype=np.float64)
    if x.size < 2:
        raise ValueError(f"sequence length must be >= 2, got {x.size}")
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    mask = draw_mask(rng, x.size, rho, min_popcount)
    u = rng.generator.random(mask.popcount)
    x_tilde = kernels.window_neighbor_replace(x, mask.bits, u, delta)
    return MaskedPair(x=x, x_tilde=x_tilde, mask=mask)


@dataclass(frozen=True)
class MaskSpec:
    """Configuration for producing masked pairs.

    kind 'bsm' needs ``grid``; kind 'tau-amn' uses ``delta``. Defaults
    rho=0.10 and patch_radius=1 (3x3 mini-patch) for grids, delta=2 for
    sequences.
    """

    kind: str = "bsm"
    rho: float = 0.10
    patch_radius: int = 1
    delta: int = 2
    grid: GridShape | None = None

    def __post_init__(self):
        if self.kind not in ("bsm", "tau-amn"):
            raise ValueError(f"unknown mask kind {self.kind!r}")


def make_masked_pair(
    rng: RngStream, x: np.ndarray, spec: MaskSpec, min_popcount: int = 1
) -> MaskedPair:
    """Dispatch to the configured masking procedure."""
    if spec.kind == "bsm":
        grid = spec.grid
        if grid is None:
            raise ValueError("mask kind 'bsm' requires a grid shape")
        return blind_spot_mask(rng, x, grid, spec.rho, spec.patch_radius, min_popcount)
    return tau_amn_mask(rng, x, spec.rho, spec.delta, min_popcount)
