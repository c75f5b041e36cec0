"""Loss functions: plain MSE and cosine similarity, masked-MSE (blind-spot
style), and the weighted masked cosine loss in both its Monte Carlo and
closed-form-weight variants, with analytic gradients with respect to the
reconstruction.

Gradients flow only through the reconstruction; masks, masked inputs and
weight estimates are constants of the step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import masking, weights
from .masking import MaskSpec, MaskedPair
from .numerics import RngStream

__all__ = [
    "BatchRisk",
    "LOSS_KINDS",
    "LossSettings",
    "LossValue",
    "batch_risk",
    "cs_loss",
    "dcs_loss",
    "dcs_loss_approx",
    "mse_loss",
    "n2v_loss",
    "prepare_sample",
]

LOSS_KINDS = ("mse", "cs", "n2v", "dcs", "dcs-approx")
DEFAULT_ETA = 1e-8


@dataclass
class LossValue:
    value: float
    grad: np.ndarray


@dataclass
class BatchRisk:
    mean_value: float
    per_sample: list[LossValue]
    batch_size: int


def cs_loss(u: np.ndarray, v: np.ndarray, eta: float = DEFAULT_ETA) -> LossValue:
    """Negative cosine similarity -<u,v> / max(||u|| ||v||, eta).

    The gradient is taken with respect to ``v``. At the guard boundary the
    guarded branch's derivative (-u / eta) is used.
    """
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    prod = nu * nv
    inner = float(np.dot(u, v))
    if prod <= eta:
        return LossValue(value=-inner / eta, grad=-u / eta)
    value = -inner / prod
    grad = -u / prod + inner * v / (nu * nv**3)
    return LossValue(value=value, grad=grad)


def mse_loss(x: np.ndarray, s_hat: np.ndarray) -> LossValue:
    """Squared reconstruction error ||x - s_hat||^2, gradient 2(s_hat - x)."""
    if x.shape != s_hat.shape:
        raise ValueError(f"dimension mismatch: {x.shape} vs {s_hat.shape}")
    diff = s_hat - x
    return LossValue(value=float(np.dot(diff, diff)), grad=2.0 * diff)


def n2v_loss(pair: MaskedPair, s_hat: np.ndarray) -> LossValue:
    """Masked squared error ||b*(s_hat) - b*x||^2 over masked coordinates only.

    The reconstruction is expected to come from the masked input
    ``pair.x_tilde``; that wiring is the caller's responsibility.
    """
    if s_hat.shape != pair.x.shape:
        raise ValueError("reconstruction dimension mismatch")
    b = pair.mask.bits.astype(np.float64)
    diff = b * (s_hat - pair.x)
    return LossValue(value=float(np.dot(diff, diff)), grad=2.0 * diff)


def dcs_loss(
    pair: MaskedPair, s_hat: np.ndarray, k_hat: float, eta: float = DEFAULT_ETA
) -> LossValue:
    """Masked cosine loss divided by the weight estimate:
    cs_loss(b*x, b*s_hat) / k_hat.

    ``k_hat`` must already be floored away from zero by the caller (see
    weights.floor_k); it is treated as a constant of the step.
    """
    if s_hat.shape != pair.x.shape:
        raise ValueError("reconstruction dimension mismatch")
    b = pair.mask.bits.astype(np.float64)
    base = cs_loss(b * pair.x, b * s_hat, eta)
    return LossValue(value=base.value / k_hat, grad=(b * base.grad) / k_hat)


def dcs_loss_approx(
    pair: MaskedPair, s_hat: np.ndarray, eta: float = DEFAULT_ETA
) -> LossValue:
    """Closed-form-weight variant: sqrt(c_hat^2+1)/(c_hat+eta) times the
    masked cosine loss, with c_hat estimated from the pair's masked
    subvectors. Cheap (no Monte Carlo), accurate for large mask support.
    """
    if s_hat.shape != pair.x.shape:
        raise ValueError("reconstruction dimension mismatch")
    c_hat = weights.estimate_c_from_pair(pair)
    weight = math.sqrt(c_hat * c_hat + 1.0) / (c_hat + eta)
    b = pair.mask.bits.astype(np.float64)
    base = cs_loss(b * pair.x, b * s_hat, eta)
    return LossValue(value=weight * base.value, grad=weight * (b * base.grad))


@dataclass(frozen=True)
class LossSettings:
    """Per-step loss configuration shared by batch_risk and training."""

    mask: MaskSpec = field(default_factory=MaskSpec)
    eta: float = DEFAULT_ETA
    n_weight_samples: int = 128
    k_floor: float = weights.DEFAULT_K_FLOOR


class PreparedSample:
    """One sample's per-step state: the network input and a loss closure.

    For masked losses this holds the drawn pair (and, for the Monte Carlo
    variant, the floored weight estimate); ``evaluate`` maps the
    reconstruction to a LossValue.
    """

    __slots__ = ("kind", "net_input", "pair", "weight", "settings")

    def __init__(self, kind, net_input, pair, weight, settings):
        self.kind = kind
        self.net_input = net_input
        self.pair = pair
        self.weight = weight
        self.settings = settings

    def evaluate(self, s_hat: np.ndarray) -> LossValue:
        if self.kind == "mse":
            return mse_loss(self.net_input, s_hat)
        if self.kind == "cs":
            return cs_loss(self.net_input, s_hat, self.settings.eta)
        if self.kind == "n2v":
            return n2v_loss(self.pair, s_hat)
        if self.kind == "dcs":
            return dcs_loss(self.pair, s_hat, self.weight, self.settings.eta)
        return dcs_loss_approx(self.pair, s_hat, self.settings.eta)


def prepare_sample(
    kind: str, x: np.ndarray, rng: RngStream, settings: LossSettings
) -> PreparedSample:
    """Draw the per-sample randomness for one step of the given loss.

    'mse' and 'cs' feed the raw noisy vector to the network. The masked
    losses draw one Bernoulli mask, build the masked counterpart, and (for
    'dcs') estimate the weight from the pair; the network then sees the
    masked input.
    """
    if kind not in LOSS_KINDS:
        raise ValueError(f"unknown loss kind {kind!r}; expected one of {LOSS_KINDS}")
    if kind in ("mse", "cs"):
        return PreparedSample(kind, x, None, None, settings)
    min_pop = 2 if kind in ("dcs", "dcs-approx") else 1
    pair = masking.make_masked_pair(rng, x, settings.mask, min_popcount=min_pop)
    weight = None
    if kind == "dcs":
        c_hat = weights.estimate_c_from_pair(pair)
        est = weights.estimate_k_mc(
            rng, c_hat, pair.mask.popcount, settings.n_weight_samples
        )
        weight = weights.floor_k(est.k_hat, settings.k_floor)
    return PreparedSample(kind, pair.x_tilde, pair, weight, settings)


def batch_risk(
    kind: str,
    xs,
    forward_fn,
    rng: RngStream,
    settings: LossSettings,
    streams: list[RngStream] | None = None,
) -> BatchRisk:
    """Mini-batch empirical risk: per-sample mask/weight draws, one forward
    per sample through ``forward_fn``, then the exactly rounded mean.

    Per-sample randomness comes from child streams of ``rng`` indexed by
    batch position, so samples are independent and the computation could
    be parallelized; pass ``streams`` to control the draws explicitly.
    """
    xs = [np.asarray(x, dtype=np.float64) for x in xs]
    if len(xs) == 0:
        raise ValueError("empty batch")
    if streams is None:
        streams = [rng.child(i) for i in range(len(xs))]
    elif len(streams) != len(xs):
        raise ValueError("streams must match batch length")
    per_sample = []
    for x, stream in zip(xs, streams):
        prep = prepare_sample(kind, x, stream, settings)
        s_hat = forward_fn(prep.net_input)
        per_sample.append(prep.evaluate(s_hat))
    mean = math.fsum(lv.value for lv in per_sample) / len(per_sample)
    return BatchRisk(mean_value=mean, per_sample=per_sample, batch_size=len(per_sample))
