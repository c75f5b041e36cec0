"""Minimal fully-connected autoencoder with hand-written forward/backward
passes, SGD/Adam optimizers, a training loop, and a linear probe for
evaluating frozen encodings.

Parameter updates are functional (fresh arrays each step) so a forward
cache is tied to exactly one parameter version; backward refuses a cache
built from different parameters.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import losses
from .losses import LossSettings
from .numerics import RngStream

__all__ = [
    "AEParams",
    "OptimizerState",
    "TrainConfig",
    "TrainResult",
    "apply_gradients",
    "backward",
    "forward",
    "init_optimizer",
    "init_params",
    "linear_probe",
    "load_checkpoint",
    "save_checkpoint",
    "train",
]

ACTIVATIONS = ("relu", "tanh", "identity")
CHECKPOINT_FORMAT = "dcs-ae-v1"

# Child-stream tags used by the training loop.
_TAG_INIT = 0
_TAG_SHUFFLE = 1
_TAG_SAMPLE = 2


@dataclass
class AEParams:
    layer_dims: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activations: tuple[str, ...]
    code_index: int

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    @property
    def code_dim(self) -> int:
        return self.layer_dims[self.code_index]

    def all_finite(self) -> bool:
        return all(np.all(np.isfinite(w)) for w in self.weights) and all(
            np.all(np.isfinite(b)) for b in self.biases
        )


def init_params(
    rng: RngStream,
    layer_dims,
    activations: tuple[str, ...] | None = None,
    code_index: int | None = None,
) -> AEParams:
    """Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.

    Default activations are relu on hidden layers and identity on the
    output; the code is read after the middle layer.
    """
    layer_dims = tuple(int(d) for d in layer_dims)
    if len(layer_dims) < 2 or any(d < 1 for d in layer_dims):
        raise ValueError(f"bad layer_dims {layer_dims}")
    n_layers = len(layer_dims) - 1
    if activations is None:
        activations = tuple(["relu"] * (n_layers - 1) + ["identity"])
    activations = tuple(activations)
    if len(activations) != n_layers or any(a not in ACTIVATIONS for a in activations):
        raise ValueError(f"bad activations {activations}")
    if code_index is None:
        code_index = len(layer_dims) // 2
    if not 0 < code_index < len(layer_dims):
        raise ValueError(f"bad code_index {code_index}")
    gen = rng.generator
    ws, bs = [], []
    for fan_in, fan_out in zip(layer_dims[:-1], layer_dims[1:]):
        limit = math.sqrt(6.0 / (fan_in + fan_out))
        ws.append(gen.uniform(-limit, limit, size=(fan_in, fan_out)))
        bs.append(np.zeros(fan_out))
    return AEParams(layer_dims, ws, bs, activations, code_index)


def _activate(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return np.maximum(z, 0.0)
    if kind == "tanh":
        return np.tanh(z)
    return z


def _activate_grad(z: np.ndarray, kind: str) -> np.ndarray:
    if kind == "relu":
        return (z > 0.0).astype(np.float64)
    if kind == "tanh":
        t = np.tanh(z)
        return 1.0 - t * t
    return np.ones_like(z)


@dataclass
class ForwardCache:
    params: AEParams
    inputs: list[np.ndarray]          # activation input to each layer
    pre_activations: list[np.ndarray]


@dataclass
class ForwardResult:
    reconstruction: np.ndarray
    encoding: np.ndarray
    cache: ForwardCache


def forward(params: AEParams, x: np.ndarray) -> ForwardResult:
    """Affine + activation composition; accepts a single vector or an
    (n, D) batch. The cache retains per-layer inputs and pre-activations."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    a = x[None, :] if single else x
    if a.shape[1] != params.layer_dims[0]:
        raise ValueError(
            f"input dim {a.shape[1]} does not match layer_dims[0]={params.layer_dims[0]}"
        )
    inputs, pres = [], []
    encoding = None
    for i, (w, b, act) in enumerate(zip(params.weights, params.biases, params.activations)):
        inputs.append(a)
        z = a @ w + b
        pres.append(z)
        a = _activate(z, act)
        if i + 1 == params.code_index:
            encoding = a
    recon = a
    cache = ForwardCache(params=params, inputs=inputs, pre_activations=pres)
    if single:
        return ForwardResult(recon[0], encoding[0], cache)
    return ForwardResult(recon, encoding, cache)


@dataclass
class ParamGrads:
    weights: list[np.ndarray]
    biases: list[np.ndarray]


def backward(params: AEParams, cache: ForwardCache, grad_out: np.ndarray) -> ParamGrads:
    """Exact reverse-mode gradients of sum_i loss_i through the network.

    ``grad_out`` holds per-row upstream gradients (already scaled by any
    1/batch factor); rows are summed into the parameter gradients.
    """
    if cache.params is not params:
        raise ValueError("stale cache: built from different parameters")
    g = np.asarray(grad_out, dtype=np.float64)
    if g.ndim == 1:
        g = g[None, :]
    if g.shape != cache.pre_activations[-1].shape:
        raise ValueError("grad_out shape does not match the forward pass")
    ws_g = [None] * params.n_layers
    bs_g = [None] * params.n_layers
    delta = g
    for i in range(params.n_layers - 1, -1, -1):
        delta = delta * _activate_grad(cache.pre_activations[i], params.activations[i])
        ws_g[i] = cache.inputs[i].T @ delta
        bs_g[i] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ params.weights[i].T
    return ParamGrads(weights=ws_g, biases=bs_g)


@dataclass
class OptimizerState:
    kind: str
    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    m_weights: list[np.ndarray] = field(default_factory=list)
    m_biases: list[np.ndarray] = field(default_factory=list)
    v_weights: list[np.ndarray] = field(default_factory=list)
    v_biases: list[np.ndarray] = field(default_factory=list)
    step: int = 0


def init_optimizer(
    kind: str,
    params: AEParams,
    learning_rate: float = 0.001,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
) -> OptimizerState:
    if kind not in ("sgd", "adam"):
        raise ValueError(f"unknown optimizer {kind!r}")
    zeros_w = [np.zeros_like(w) for w in params.weights]
    zeros_b = [np.zeros_like(b) for b in params.biases]
    return OptimizerState(
        kind=kind,
        learning_rate=learning_rate,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
        m_weights=zeros_w,
        m_biases=[b.copy() for b in zeros_b],
        v_weights=[w.copy() for w in zeros_w],
        v_biases=[b.copy() for b in zeros_b],
    )


def _adam_update(p, g, m, v, state, bc1, bc2):
    m_new = state.beta1 * m + (1.0 - state.beta1) * g
    v_new = state.beta2 * v + (1.0 - state.beta2) * (g * g)
    p_new = p - state.learning_rate * (m_new / bc1) / (np.sqrt(v_new / bc2) + state.eps)
    return p_new, m_new, v_new


def apply_gradients(
    params: AEParams, grads: ParamGrads, state: OptimizerState
) -> tuple[AEParams, OptimizerState]:
    """One optimizer step; returns fresh parameter and state objects."""
    step = state.step + 1
    if state.kind == "sgd":
        ws = [w - state.learning_rate * g for w, g in zip(params.weights, grads.weights)]
        bs = [b - state.learning_rate * g for b, g in zip(params.biases, grads.biases)]
        new_state = replace(state, step=step)
    else:
        bc1 = 1.0 - state.beta1**step
        bc2 = 1.0 - state.beta2**step
        ws, mws, vws = [], [], []
        for p, g, m, v in zip(params.weights, grads.weights, state.m_weights, state.v_weights):
            p_new, m_new, v_new = _adam_update(p, g, m, v, state, bc1, bc2)
            ws.append(p_new)
            mws.append(m_new)
            vws.append(v_new)
        bs, mbs, vbs = [], [], []
        for p, g, m, v in zip(params.biases, grads.biases, state.m_biases, state.v_biases):
            p_new, m_new, v_new = _adam_update(p, g, m, v, state, bc1, bc2)
            bs.append(p_new)
            mbs.append(m_new)
            vbs.append(v_new)
        new_state = replace(
            state, step=step, m_weights=mws, v_weights=vws, m_biases=mbs, v_biases=vbs
        )
    new_params = AEParams(
        params.layer_dims, ws, bs, params.activations, params.code_index
    )
    return new_params, new_state


@dataclass(frozen=True)
class TrainConfig:
    layer_dims: tuple[int, ...]
    epochs: int = 100
    batch_size: int = 64
    optimizer: str = "adam"
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    activations: tuple[str, ...] | None = None
    loss_settings: LossSettings = field(default_factory=LossSettings)


@dataclass
class TrainResult:
    params: AEParams
    history: list[dict]
    diverged: bool = False
    diverged_epoch: int | None = None


def train(
    x_data: np.ndarray,
    loss_kind: str,
    config: TrainConfig,
    rng: RngStream,
    params0: AEParams | None = None,
    sample_ids: np.ndarray | None = None,
) -> TrainResult:
    """Epochs of shuffled mini-batch steps, deterministic given the stream.

    Per-sample mask/noise/weight draws come from child streams keyed by
    (epoch, sample id); ids default to dataset positions, and passing the
    ids explicitly keeps draws attached to samples under reordering, which
    makes the full-batch per-epoch mean loss order-invariant. If
    parameters go non-finite the loop stops and reports the last good
    epoch.
    """
    x_data = np.asarray(x_data, dtype=np.float64)
    if x_data.ndim != 2 or x_data.shape[0] == 0:
        raise ValueError("dataset must be a nonempty (n, D) array")
    if config.batch_size < 1:
        raise ValueError("batch size must be >= 1")
    n = x_data.shape[0]
    if sample_ids is None:
        sample_ids = np.arange(n)
    else:
        sample_ids = np.asarray(sample_ids, dtype=np.int64)
        if sample_ids.shape != (n,):
            raise ValueError("sample_ids must have one id per sample")
    params = params0 if params0 is not None else init_params(
        rng.child(_TAG_INIT), config.layer_dims, config.activations
    )
    state = init_optimizer(
        config.optimizer, params, config.learning_rate, config.beta1, config.beta2
    )
    history: list[dict] = []
    for epoch in range(config.epochs):
        order = rng.child(_TAG_SHUFFLE, epoch).generator.permutation(n)
        epoch_values: list[float] = []
        for start in range(0, n, config.batch_size):
            batch_idx = order[start : start + config.batch_size]
            preps = [
                losses.prepare_sample(
                    loss_kind,
                    x_data[i],
                    rng.child(_TAG_SAMPLE, epoch, int(sample_ids[i])),
                    config.loss_settings,
                )
                for i in batch_idx
            ]
            net_in = np.stack([p.net_input for p in preps])
            result = forward(params, net_in)
            m = len(preps)
            grad_rows = np.empty_like(result.reconstruction)
            for r, prep in enumerate(preps):
                lv = prep.evaluate(result.reconstruction[r])
                epoch_values.append(lv.value)
                grad_rows[r] = lv.grad / m
            grads = backward(params, result.cache, grad_rows)
            new_params, state = apply_gradients(params, grads, state)
            if not new_params.all_finite():
                return TrainResult(
                    params=params,
                    history=history,
                    diverged=True,
                    diverged_epoch=epoch,
                )
            params = new_params
        history.append(
            {"epoch": epoch, "mean_loss": math.fsum(epoch_values) / len(epoch_values)}
        )
    return TrainResult(params=params, history=history)


def encode_batch(params: AEParams, x: np.ndarray) -> np.ndarray:
    return forward(params, x).encoding


def reconstruct_batch(params: AEParams, x: np.ndarray) -> np.ndarray:
    return forward(params, x).reconstruction


def linear_probe(
    z_train: np.ndarray,
    y_train: np.ndarray,
    z_test: np.ndarray,
    y_test: np.ndarray,
    iters: int = 500,
    learning_rate: float = 0.1,
    l2: float = 1e-4,
) -> float:
    """Multinomial logistic regression on frozen encodings.

    Deterministic full-batch gradient descent from zero init (the problem
    is convex); returns test accuracy in [0, 100].
    """
    z_train = np.asarray(z_train, dtype=np.float64)
    z_test = np.asarray(z_test, dtype=np.float64)
    y_train = np.asarray(y_train, dtype=np.int64)
    y_test = np.asarray(y_test, dtype=np.int64)
    classes = np.unique(y_train)
    if classes.size < 2:
        raise ValueError("linear probe needs at least 2 classes")
    n_classes = int(classes.max()) + 1
    n, d = z_train.shape
    w = np.zeros((d, n_classes))
    b = np.zeros(n_classes)
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), y_train] = 1.0
    for _ in range(iters):
        logits = z_train @ w + b
        logits -= logits.max(axis=1, keepdims=True)
        expl = np.exp(logits)
        probs = expl / expl.sum(axis=1, keepdims=True)
        err = (probs - onehot) / n
        w -= learning_rate * (z_train.T @ err + l2 * w)
        b -= learning_rate * err.sum(axis=0)
    pred = np.argmax(z_test @ w + b, axis=1)
    return 100.0 * float(np.mean(pred == y_test))


def save_checkpoint(params: AEParams, path, extra: dict | None = None) -> None:
    """Write the model as JSON: dims, activations, and row-major arrays."""
    payload = {
        "format": CHECKPOINT_FORMAT,
        "layer_dims": list(params.layer_dims),
        "activations": list(params.activations),
        "code_index": params.code_index,
        "weights": [w.tolist() for w in params.weights],
        "biases": [b.tolist() for b in params.biases],
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh)


def load_checkpoint(path) -> AEParams:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != CHECKPOINT_FORMAT:
        raise ValueError(f"unsupported checkpoint format {payload.get('format')!r}")
    return AEParams(
        layer_dims=tuple(payload["layer_dims"]),
        weights=[np.asarray(w, dtype=np.float64) for w in payload["weights"]],
        biases=[np.asarray(b, dtype=np.float64) for b in payload["biases"]],
        activations=tuple(payload["activations"]),
        code_index=int(payload["code_index"]),
    )
