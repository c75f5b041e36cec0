"""Denoising cosine-similarity loss library.

Self-supervised losses for noisy data built around the masked cosine
similarity divided by an estimated shrinkage weight, together with the
masking procedures, weight estimators, a small trainable autoencoder,
and a Monte Carlo harness that verifies the underlying theory at desk
scale.
"""

from .backend import active_backend
from .losses import (
    LOSS_KINDS,
    LossSettings,
    batch_risk,
    cs_loss,
    dcs_loss,
    dcs_loss_approx,
    mse_loss,
    n2v_loss,
)
from .masking import GridShape, MaskSpec, MaskVec, MaskedPair, blind_spot_mask, draw_mask, tau_amn_mask
from .numerics import RngStream, ScaleMixture
from .weights import (
    WeightEstimate,
    estimate_c,
    estimate_k_mc,
    k_closed_form,
    k_oracle_isotropic,
    theorem2_bound,
)

__version__ = "0.1.0"

__all__ = [
    "GridShape",
    "LOSS_KINDS",
    "LossSettings",
    "MaskSpec",
    "MaskVec",
    "MaskedPair",
    "RngStream",
    "ScaleMixture",
    "WeightEstimate",
    "active_backend",
    "batch_risk",
    "blind_spot_mask",
    "cs_loss",
    "dcs_loss",
    "dcs_loss_approx",
    "draw_mask",
    "estimate_c",
    "estimate_k_mc",
    "k_closed_form",
    "k_oracle_isotropic",
    "mse_loss",
    "n2v_loss",
    "tau_amn_mask",
    "theorem2_bound",
]
