"""Command-line front end: run, sweep, train-codebook, validate."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from . import harness
from .bussgang import estimate_bussgang
from .errors import ConfigError, NumericalError
from .quantizer import save_codebook

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def _add_config_arg(parser):
    parser.add_argument("--config", required=True, help="JSON experiment configuration")
    parser.add_argument("--seed", type=int, default=None, help="override master_seed")


def _load(args) -> harness.ExperimentConfig:
    cfg = harness.load_config(args.config)
    if args.seed is not None:
        cfg = replace(cfg, master_seed=args.seed)
        cfg.validate()
    return cfg


def _emit_csv(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def cmd_run(args) -> int:
    cfg = _load(args)
    result = harness.run_experiment(cfg, progress=_progress if args.verbose else None)
    _emit_csv(harness.rows_to_csv(result.rows), args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = _load(args)
    values = [float(v) for v in args.values.split(",") if v.strip() != ""]
    if not values:
        raise ConfigError(["--values must contain at least one number"])
    result = harness.sweep(cfg, args.axis, values, progress=_progress if args.verbose else None)
    _emit_csv(harness.rows_to_csv(result.rows), args.out)
    return EXIT_OK


def cmd_train_codebook(args) -> int:
    cfg = _load(args)
    ctx = harness.build_context(cfg, args.realization)
    books = ctx.vq_qe_codebooks if args.kind == "qe" else ctx.vq_eq_codebooks
    if books is None:
        raise ConfigError([f"scheme VQ_{args.kind.upper()} is not enabled in the config"])
    if not 0 <= args.ap < cfg.n_aps:
        raise ConfigError([f"--ap must be in [0, {cfg.n_aps})"])
    book = books[args.ap]
    save_codebook(book, args.out)
    meta = book.training_meta
    print(
        f"wrote {args.kind.upper()} codebook for AP {args.ap}: dim={book.dim} size={book.size} "
        f"bits/dim={book.bits_per_dim:g} trained on {meta.n_training_samples} vectors "
        f"({meta.iterations} iterations, final distortion {meta.final_distortion:.3e})"
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    checks = harness.validate()
    for check in checks:
        print(check.line())
    if args.dump_bussgang:
        _dump_bussgang()
    return EXIT_OK if all(c.passed for c in checks) else EXIT_VALIDATION


def _dump_bussgang() -> None:
    """Diagnostic (F, C_dd) of a one-bit sign quantizer on correlated input."""
    rng = np.random.default_rng(0)
    raw = rng.standard_normal((20_000, 2)) @ np.array([[1.0, 0.6], [0.0, 0.8]])
    x = raw.astype(complex)
    model = estimate_bussgang(x, lambda y: np.sign(y.real).astype(complex))
    with np.printoptions(precision=4, suppress=True):
        print("F =")
        print(model.gain)
        print("C_dd =")
        print(model.distortion_cov)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfcsi",
        description="Monte Carlo comparison of CSI acquisition schemes over bit-limited fronthaul",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every enabled scheme at the configured point")
    _add_config_arg(p_run)
    p_run.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p_run.add_argument("--verbose", action="store_true", help="progress lines on stderr")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one parameter axis")
    _add_config_arg(p_sweep)
    p_sweep.add_argument("--axis", required=True, choices=harness.SWEEP_AXES)
    p_sweep.add_argument(
        "--values", required=True, help="comma-separated axis values (use --values=-30,-20 for negatives)"
    )
    p_sweep.add_argument("--out", default=None, help="CSV output path (default: stdout)")
    p_sweep.add_argument("--verbose", action="store_true", help="progress lines on stderr")
    p_sweep.set_defaults(func=cmd_sweep)

    p_train = sub.add_parser("train-codebook", help="train and save one AP's vector codebook")
    _add_config_arg(p_train)
    p_train.add_argument("--out", required=True, help="codebook JSON output path")
    p_train.add_argument("--kind", choices=("eq", "qe"), default="qe", help="pipeline to train for")
    p_train.add_argument("--ap", type=int, default=0, help="AP index")
    p_train.add_argument("--realization", type=int, default=0, help="network realization index")
    p_train.set_defaults(func=cmd_train_codebook)

    p_val = sub.add_parser("validate", help="run the closed-form oracle checks")
    p_val.add_argument("--dump-bussgang", action="store_true", help="print a sample (F, C_dd)")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
