"""Command-line entry point.

Subcommands: estimate, verify, train, run-experiment, denoise. Config
files are flat ``key = value`` text; any key can be overridden on the
command line with ``--set key=value``. The DCS_SEED environment variable
supplies a default seed where none is given.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import experiment, model, verify, weights
from .config import SEED_ENV_VAR, ExperimentConfig, parse_config
from .numerics import RngStream


def _default_seed() -> int:
    return int(os.environ.get(SEED_ENV_VAR, "0"))


def _read_vector(path) -> np.ndarray:
    return np.loadtxt(path, dtype=np.float64, ndmin=1)


def _cmd_estimate(args) -> int:
    x = _read_vector(args.x)
    x_tilde = _read_vector(args.x_tilde)
    if args.mask is not None:
        bits = _read_vector(args.mask).astype(np.int64)
        keep = bits == 1
        x, x_tilde = x[keep], x_tilde[keep]
    c_hat = weights.estimate_c(x, x_tilde)
    rng = RngStream(args.seed, experiment.stable_stream_id("cli-estimate"))
    est = weights.estimate_k_mc(rng, c_hat, x.size, args.n_samples)
    payload = {
        "c_hat": est.c_hat,
        "k_hat": est.k_hat,
        "std_error": est.std_error,
        "k_closed_form": weights.k_closed_form(c_hat),
        "n_samples": est.n_samples,
        "dim": int(x.size),
    }
    print(json.dumps(payload))
    return 0


def _cmd_verify(args) -> int:
    ids = verify.CHECK_IDS if args.check == "all" else (args.check,)
    reports = verify.run_all(seed=args.seed, check_ids=ids)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.check_id}: statistic={r.statistic:.6g} threshold={r.threshold:g}")
    if args.out:
        verify.write_report(reports, args.out)
    return 0 if all(r.passed for r in reports) else 1


def _load_config(args) -> ExperimentConfig:
    cfg = parse_config(args.config)
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise SystemExit(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value
    if args.out_flag:
        overrides["out"] = args.out_flag
    if overrides:
        cfg = cfg.with_overrides(overrides)
    return cfg


def _cmd_train(args) -> int:
    cfg = _load_config(args)
    if not cfg.seeds:
        cfg = cfg.with_overrides({"seeds": str(_default_seed())})
    seed = cfg.seeds[0]
    sigma = cfg.sigmas[0]
    loss_kind = args.loss or cfg.losses[0]
    if args.data:
        noisy = experiment.read_matrix_csv(args.data)
        if noisy.shape[1] != cfg.dim:
            raise SystemExit(
                f"data dim {noisy.shape[1]} does not match config grid dim {cfg.dim}"
            )
    else:
        data_rng = RngStream(seed, experiment.stable_stream_id(f"data|{sigma!r}"))
        noisy = experiment.generate_split(cfg, data_rng, sigma)[0].noisy
    train_cfg = experiment._train_config(cfg)
    rng = RngStream(seed, experiment.stable_stream_id(f"train|{loss_kind}|{sigma!r}"))
    result = model.train(noisy, loss_kind, train_cfg, rng)
    model.save_checkpoint(
        result.params, args.checkpoint, extra={"config_hash": cfg.config_hash()}
    )
    summary = {
        "loss": loss_kind,
        "epochs_completed": len(result.history),
        "final_mean_loss": result.history[-1]["mean_loss"] if result.history else math.nan,
        "diverged": result.diverged,
        "checkpoint": args.checkpoint,
    }
    print(json.dumps(summary))
    return 1 if result.diverged else 0


def _cmd_run_experiment(args) -> int:
    cfg = _load_config(args)
    rows = experiment.run_experiment(cfg)
    print(f"wrote {len(rows)} result rows to {cfg.out}")
    return 0


def _cmd_denoise(args) -> int:
    experiment.denoise_file(args.checkpoint, args.input, args.output, args.rescale)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dcs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="estimate the SN ratio and weight from a masked pair")
    p.add_argument("--x", required=True, help="CSV with one float per line")
    p.add_argument("--x-tilde", required=True, dest="x_tilde")
    p.add_argument("--mask", help="optional 0/1 per line; restrict to masked coordinates")
    p.add_argument("--n-samples", type=int, default=128)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("verify", help="run the theory checks")
    p.add_argument("--check", default="all", choices=("all",) + verify.CHECK_IDS)
    p.add_argument("--seed", type=int, default=_default_seed())
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("train", help="train one autoencoder and save a checkpoint")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", dest="out_flag", help="override the config's out path")
    p.add_argument("--data", help="headerless CSV of noisy samples; default: synthetic")
    p.add_argument("--loss", help="loss kind; default: first configured loss")
    p.add_argument("--checkpoint", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("run-experiment", help="run the full (loss x sigma x seed) grid")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--out", dest="out_flag", help="override the config's out path")
    p.set_defaults(func=_cmd_run_experiment)

    p = sub.add_parser("denoise", help="reconstruct CSV rows through a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--rescale", action="store_true", help="min-max rescale each row to [0,1]")
    p.set_defaults(func=_cmd_denoise)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
