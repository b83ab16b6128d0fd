"""Command-line interface: generate, train, sweep, analyze.

The ``sweep`` subcommand reads a flat key = value config file::

    architectures = ffn, gru
    neurons = 64, 128
    depths = 1
    laminations = 1, 2
    windows = 5, 12
    levels = SL:2, CS
    instance_seeds = 0
    replicate_seeds = 0, 1, 2, 3, 4
    per_class = 500
    train_fraction = 0.8

Lines starting with ``#`` are comments. Levels are ``NAME:k`` pairs; the
k suffix is optional only for CF and CS. Command-line flags override the
corresponding config entries. All subcommands exit 0 on success and
nonzero with a diagnostic on stderr otherwise.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .analysis import DEFAULT_RESAMPLES, analyze
from .grammars import VALID_K, normalize_level, write_corpus
from .sweep import (
    RESULT_COLUMNS,
    JobSpec,
    SweepGrid,
    corpus_for,
    enumerate_grid,
    read_results,
    run_job,
    run_sweep,
)

_GRID_KEYS = {
    "architectures": "architectures",
    "neurons": "neuron_values",
    "depths": "depth_values",
    "laminations": "lamination_values",
    "windows": "window_values",
    "levels": "levels",
    "instance_seeds": "instance_seeds",
    "replicate_seeds": "replicate_seeds",
    "per_class": "per_class",
    "train_fraction": "train_fraction",
}


def _parse_level(text: str):
    name, _, suffix = text.strip().partition(":")
    level = normalize_level(name)
    if suffix:
        return level.value, int(suffix)
    if VALID_K[level] == (0,):
        return level.value, 0
    raise ValueError(
        f"level {level.value} needs an explicit k, e.g. {level.value}:{VALID_K[level][0]}"
    )


def parse_levels(text: str):
    return tuple(_parse_level(part) for part in text.split(",") if part.strip())


def _resolve_level(level_text: str, k_flag):
    """Combine a --level value (possibly NAME:k) with an optional --k flag."""
    if ":" in level_text:
        level, k = _parse_level(level_text)
        if k_flag is not None and k_flag != k:
            raise ValueError(
                f"conflicting k: --level gave {level}:{k} but --k gave {k_flag}"
            )
        return level, k
    level = normalize_level(level_text)
    if k_flag is not None:
        return level.value, int(k_flag)
    if VALID_K[level] == (0,):
        return level.value, 0
    raise ValueError(f"level {level.value} needs --k (one of {VALID_K[level]})")


def _ints(text: str):
    return tuple(int(part) for part in text.split(",") if part.strip())


def _names(text: str):
    return tuple(part.strip().lower() for part in text.split(",") if part.strip())


def parse_grid_config(text: str) -> dict:
    """Config file text to SweepGrid keyword arguments."""
    kwargs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or not key or not value:
            raise ValueError(f"config line {lineno} is not 'key = value': {raw!r}")
        if key not in _GRID_KEYS:
            raise ValueError(
                f"unknown config key {key!r} on line {lineno}; "
                f"expected one of {sorted(_GRID_KEYS)}"
            )
        field = _GRID_KEYS[key]
        if key == "architectures":
            kwargs[field] = _names(value)
        elif key == "levels":
            kwargs[field] = parse_levels(value)
        elif key == "per_class":
            kwargs[field] = int(value)
        elif key == "train_fraction":
            kwargs[field] = float(value)
        else:
            kwargs[field] = _ints(value)
    return kwargs


def _grid_from_args(args) -> SweepGrid:
    kwargs = {}
    if args.config:
        kwargs = parse_grid_config(Path(args.config).read_text())
    if args.arch:
        kwargs["architectures"] = (args.arch,)
    if args.neurons is not None:
        kwargs["neuron_values"] = (args.neurons,)
    if args.depth is not None:
        kwargs["depth_values"] = (args.depth,)
    if args.laminations is not None:
        kwargs["lamination_values"] = (args.laminations,)
    if args.window is not None:
        kwargs["window_values"] = (args.window,)
    if args.level:
        k = args.k if args.k is not None else None
        text = args.level if k is None else f"{args.level}:{k}"
        kwargs["levels"] = parse_levels(text)
    if args.seed is not None:
        kwargs["replicate_seeds"] = (args.seed,)
    if args.per_class is not None:
        kwargs["per_class"] = args.per_class
    if args.train_fraction is not None:
        kwargs["train_fraction"] = args.train_fraction
    return SweepGrid(**kwargs)


def _cmd_generate(args) -> int:
    level, k = _resolve_level(args.level, args.k)
    corpus = corpus_for(level, k, args.seed, args.per_class)
    write_corpus(corpus, args.out)
    print(f"wrote {len(corpus)} strings to {args.out}")
    return 0


def _cmd_train(args) -> int:
    level, k = _resolve_level(args.level, args.k)
    job = JobSpec(
        level=level,
        k=k,
        instance_seed=args.instance_seed,
        replicate_seed=args.seed,
        architecture=args.arch,
        neurons=args.neurons,
        depth=args.depth,
        laminations=args.laminations,
        window=args.window,
        per_class=args.per_class,
        train_fraction=args.train_fraction,
    )
    outcome = run_job(job)
    if args.out:
        with Path(args.out).open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(RESULT_COLUMNS)
            writer.writerow(outcome.csv_row() + [""])
    print(
        f"{job.architecture} on {job.level} k={job.k}: "
        f"percent_correct={outcome.percent_correct:.2f} "
        f"brier={outcome.brier:.4f} epochs={outcome.epochs_run} "
        f"stopped_early={outcome.stopped_early}"
    )
    return 0


def _cmd_sweep(args) -> int:
    grid = _grid_from_args(args)
    jobs = enumerate_grid(grid)
    path = run_sweep(
        grid, args.out, parallelism=args.parallelism, resume=args.resume
    )
    rows = read_results(path)
    failed = sum(1 for row in rows if row["error"])
    print(f"{len(rows)} of {len(jobs)} jobs recorded in {path} ({failed} errors)")
    return 0


def _cmd_analyze(args) -> int:
    factors = [part.strip() for part in args.by.split(",") if part.strip()]
    summary, summary_path, plots = analyze(
        args.results,
        factors,
        args.out,
        bootstrap_seed=args.bootstrap_seed,
        resamples=args.resamples,
    )
    for warning in plots.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    written = ", ".join(str(p) for p in (summary_path, *plots.paths))
    print(f"{len(summary.frame)} groups ({summary.error_rows} error rows skipped)")
    print(f"wrote {written}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="grammarnet",
        description="Train small networks to classify strings from a hierarchy "
        "of formal grammars.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    generate = commands.add_parser(
        "generate", help="sample a labeled corpus for one grammar instance"
    )
    generate.add_argument("--level", required=True, help="grammar level, e.g. SL or MSO:2")
    generate.add_argument("--k", type=int, default=None, help="k-gram width where applicable")
    generate.add_argument("--seed", type=int, default=0, help="grammar instance seed")
    generate.add_argument("--per-class", type=int, default=500, dest="per_class")
    generate.add_argument("--out", required=True, help="corpus CSV destination")
    generate.set_defaults(func=_cmd_generate)

    train = commands.add_parser("train", help="run a single training job")
    train.add_argument("--level", required=True)
    train.add_argument("--k", type=int, default=None)
    train.add_argument("--arch", default="gru", choices=("ffn", "rnn", "gru"))
    train.add_argument("--neurons", type=int, default=64)
    train.add_argument("--depth", type=int, default=1)
    train.add_argument("--laminations", type=int, default=1)
    train.add_argument("--window", type=int, default=12)
    train.add_argument("--seed", type=int, default=0, help="replicate seed")
    train.add_argument("--instance-seed", type=int, default=0, dest="instance_seed")
    train.add_argument("--per-class", type=int, default=500, dest="per_class")
    train.add_argument("--train-fraction", type=float, default=0.8, dest="train_fraction")
    train.add_argument("--out", default=None, help="optional single-row results CSV")
    train.set_defaults(func=_cmd_train)

    sweep = commands.add_parser("sweep", help="run a grid of training jobs")
    sweep.add_argument("--config", default=None, help="grid config file")
    sweep.add_argument("--arch", default=None, choices=("ffn", "rnn", "gru"))
    sweep.add_argument("--neurons", type=int, default=None)
    sweep.add_argument("--depth", type=int, default=None)
    sweep.add_argument("--laminations", type=int, default=None)
    sweep.add_argument("--window", type=int, default=None)
    sweep.add_argument("--level", default=None)
    sweep.add_argument("--k", type=int, default=None)
    sweep.add_argument("--seed", type=int, default=None, help="single replicate seed")
    sweep.add_argument("--per-class", type=int, default=None, dest="per_class")
    sweep.add_argument("--train-fraction", type=float, default=None, dest="train_fraction")
    sweep.add_argument("--out", required=True, help="results CSV path")
    sweep.add_argument("--parallelism", type=int, default=1)
    sweep.add_argument("--resume", action="store_true")
    sweep.set_defaults(func=_cmd_sweep)

    analyze_cmd = commands.add_parser(
        "analyze", help="summarize a results file and emit plots"
    )
    analyze_cmd.add_argument("--results", required=True)
    analyze_cmd.add_argument(
        "--by", required=True, help="comma-separated grouping factors"
    )
    analyze_cmd.add_argument("--out", required=True, help="output directory")
    analyze_cmd.add_argument("--bootstrap-seed", type=int, default=0, dest="bootstrap_seed")
    analyze_cmd.add_argument("--resamples", type=int, default=DEFAULT_RESAMPLES)
    analyze_cmd.set_defaults(func=_cmd_analyze)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
