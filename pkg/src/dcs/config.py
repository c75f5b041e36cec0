"""Experiment configuration: a flat ``key = value`` text format with typed
parsing, defaults for everything except seeds and the output path, an
exhaustive unknown-key error, and a content hash for provenance checks.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, fields, replace

__all__ = ["ExperimentConfig", "SEED_ENV_VAR", "parse_config", "parse_config_text"]

SEED_ENV_VAR = "DCS_SEED"


def _parse_int_tuple(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(p) for p in text.split(",") if p.strip()) if text else ()


def _parse_float_tuple(text: str) -> tuple[float, ...]:
    text = text.strip()
    return tuple(float(p) for p in text.split(",") if p.strip()) if text else ()


def _parse_str_tuple(text: str) -> tuple[str, ...]:
    text = text.strip()
    return tuple(p.strip() for p in text.split(",") if p.strip()) if text else ()


_PARSERS = {
    "n_train": int,
    "n_test": int,
    "grid_height": int,
    "grid_width": int,
    "n_classes": int,
    "noise_kind": str,
    "sigmas": _parse_float_tuple,
    "mixture_scales": _parse_float_tuple,
    "mixture_probs": _parse_float_tuple,
    "mask_kind": str,
    "rho": float,
    "patch_radius": int,
    "delta": int,
    "losses": _parse_str_tuple,
    "eta": float,
    "n_weight_samples": int,
    "k_floor": float,
    "hidden_dims": _parse_int_tuple,
    "optimizer": str,
    "learning_rate": float,
    "beta1": float,
    "beta2": float,
    "epochs": int,
    "batch_size": int,
    "probe_iters": int,
    "probe_lr": float,
    "probe_l2": float,
    "template_blobs": int,
    "template_jitter": float,
    "template_contrast": float,
    "seeds": _parse_int_tuple,
    "out": str,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a grid run needs; serializes losslessly to flat text."""

    n_train: int = 2000
    n_test: int = 400
    grid_height: int = 16
    grid_width: int = 16
    n_classes: int = 4
    noise_kind: str = "gaussian"
    sigmas: tuple[float, ...] = (0.01, 0.1, 0.3, 0.5, 0.7)
    mixture_scales: tuple[float, ...] = ()
    mixture_probs: tuple[float, ...] = ()
    mask_kind: str = "bsm"
    rho: float = 0.10
    patch_radius: int = 1
    delta: int = 2
    losses: tuple[str, ...] = ("mse", "cs", "n2v", "dcs")
    eta: float = 1e-8
    n_weight_samples: int = 128
    k_floor: float = 0.05
    hidden_dims: tuple[int, ...] = (64, 16, 64)
    optimizer: str = "adam"
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epochs: int = 100
    batch_size: int = 64
    probe_iters: int = 500
    probe_lr: float = 0.1
    probe_l2: float = 1e-4
    template_blobs: int = 3
    template_jitter: float = 2.0
    template_contrast: float = 0.55
    seeds: tuple[int, ...] = ()
    out: str = ""

    @property
    def dim(self) -> int:
        return self.grid_height * self.grid_width

    def validate(self) -> None:
        if not self.seeds:
            raise ValueError(
                f"seeds is required (set it in the config, via --set seeds=..., "
                f"or through the {SEED_ENV_VAR} environment variable)"
            )
        if not self.out:
            raise ValueError("out is required (config key 'out' or --out)")
        if self.dim < 4:
            raise ValueError("grid must have at least 4 cells")
        if self.n_classes < 2:
            raise ValueError("need at least 2 classes")
        if self.noise_kind not in ("gaussian", "mixture"):
            raise ValueError(f"unknown noise_kind {self.noise_kind!r}")
        if self.mask_kind not in ("bsm", "tau-amn"):
            raise ValueError(f"unknown mask_kind {self.mask_kind!r}")
        from .losses import LOSS_KINDS

        for kind in self.losses:
            if kind not in LOSS_KINDS:
                raise ValueError(f"unknown loss kind {kind!r}")

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                rendered = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
            elif isinstance(value, float):
                rendered = repr(value)
            else:
                rendered = str(value)
            lines.append(f"{f.name} = {rendered}")
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_text().encode()).hexdigest()[:16]

    def with_overrides(self, overrides: dict[str, str]) -> "ExperimentConfig":
        """Apply raw ``key=value`` overrides (same parsing as the file)."""
        parsed = {}
        for key, raw in overrides.items():
            if key not in _PARSERS:
                raise ValueError(f"unknown config key {key!r}")
            parsed[key] = _parse_value(key, raw)
        return replace(self, **parsed)


def _parse_value(key: str, raw: str):
    try:
        return _PARSERS[key](raw.strip())
    except ValueError as exc:
        raise ValueError(f"bad value for config key {key!r}: {raw!r}") from exc


def parse_config_text(text: str) -> ExperimentConfig:
    values: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ValueError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in _PARSERS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        if key in values:
            raise ValueError(f"line {lineno}: duplicate config key {key!r}")
        values[key] = _parse_value(key, raw)
    cfg = ExperimentConfig(**values)
    if not cfg.seeds:
        env_seed = os.environ.get(SEED_ENV_VAR)
        if env_seed is not None:
            cfg = replace(cfg, seeds=(int(env_seed),))
    return cfg


def parse_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config_text(fh.read())
