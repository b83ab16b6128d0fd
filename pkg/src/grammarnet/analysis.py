"""Aggregation of sweep results: group means, bootstrap intervals, plots.

Summaries are raw group means of the test metrics with percentile
bootstrap intervals for the mean percent correct. Group order, bootstrap
draws, and the emitted SVG bytes are all deterministic functions of the
input rows and the bootstrap seed; row order never matters because the
values are sorted before resampling and groups are keyed, not positional.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402 - backend must be pinned first

from .sweep import derive_seed

FACTORS = ("architecture", "level", "laminations", "window", "neurons", "depth")

DEFAULT_RESAMPLES = 10_000
DEFAULT_LEVEL = 0.95

_SVG_SALT = "grammarnet"
_RESAMPLE_BLOCK = 2_000


def bootstrap_interval(values, resamples: int = DEFAULT_RESAMPLES,
                       level: float = DEFAULT_LEVEL, rng=None):
    """Percentile bootstrap interval for the mean of ``values``.

    Sorting first makes the draw sequence, and therefore the interval,
    independent of input order for a given seed.
    """
    values = np.sort(np.asarray(values, dtype=np.float64))
    if values.size == 0:
        raise ValueError("cannot bootstrap an empty value list")
    if not 0.0 < level < 1.0:
        raise ValueError(f"confidence level must lie in (0, 1), got {level}")
    if resamples < 1:
        raise ValueError(f"resamples must be positive, got {resamples}")
    generator = np.random.default_rng(rng)
    means = np.empty(resamples)
    done = 0
    while done < resamples:
        block = min(_RESAMPLE_BLOCK, resamples - done)
        picks = generator.integers(0, values.size, size=(block, values.size))
        means[done : done + block] = values[picks].mean(axis=1)
        done += block
    lower = float(np.quantile(means, (1.0 - level) / 2.0))
    upper = float(np.quantile(means, (1.0 + level) / 2.0))
    return lower, upper


@dataclass(frozen=True)
class SummaryTable:
    """Per-group metric summary plus the settings that produced it."""

    factors: tuple
    frame: pd.DataFrame
    error_rows: int
    bootstrap_seed: int
    resamples: int
    level: float

    def __post_init__(self):
        bad = self.frame[
            (self.frame["percent_low"] > self.frame["percent_mean"])
            | (self.frame["percent_mean"] > self.frame["percent_high"])
        ]
        if len(bad):
            raise ValueError(f"interval does not bracket the mean:\n{bad}")


def _load_results(results) -> pd.DataFrame:
    if isinstance(results, pd.DataFrame):
        return results.copy()
    return pd.read_csv(Path(results), float_precision="round_trip")


def aggregate(
    results,
    factors,
    *,
    bootstrap_seed: int = 0,
    resamples: int = DEFAULT_RESAMPLES,
    level: float = DEFAULT_LEVEL,
) -> SummaryTable:
    """Group the results by ``factors`` and summarize the test metrics.

    ``results`` is a sweep results path or an equivalent DataFrame. Rows
    carrying an error marker are excluded from every statistic and
    reported through ``SummaryTable.error_rows``.
    """
    factors = tuple(factors)
    if not factors:
        raise ValueError("need at least one grouping factor")
    unknown = [f for f in factors if f not in FACTORS]
    if unknown:
        raise ValueError(f"unknown factors {unknown}; choose from {FACTORS}")
    if len(set(factors)) != len(factors):
        raise ValueError(f"duplicate factors in {factors}")

    frame = _load_results(results)
    missing = {*factors, "percent_correct", "brier", "error"} - set(frame.columns)
    if missing:
        raise ValueError(f"results are missing columns {sorted(missing)}")
    errored = frame["error"].notna() & (frame["error"].astype(str) != "")
    good = frame[~errored]

    rows = []
    grouper = list(factors) if len(factors) > 1 else factors[0]
    for key, chunk in good.groupby(grouper, sort=True):
        key = key if isinstance(key, tuple) else (key,)
        seed = derive_seed(
            "bootstrap",
            bootstrap_seed,
            *(f"{factor}={value}" for factor, value in zip(factors, key)),
        )
        low, high = bootstrap_interval(
            chunk["percent_correct"], resamples, level, rng=seed
        )
        rows.append(
            (
                *key,
                len(chunk),
                float(chunk["percent_correct"].mean()),
                low,
                high,
                float(chunk["brier"].mean()),
            )
        )
    columns = list(factors) + [
        "count",
        "percent_mean",
        "percent_low",
        "percent_high",
        "brier_mean",
    ]
    summary = pd.DataFrame(rows, columns=columns)
    return SummaryTable(
        factors=factors,
        frame=summary,
        error_rows=int(errored.sum()),
        bootstrap_seed=bootstrap_seed,
        resamples=resamples,
        level=level,
    )


def _full_precision(value) -> str:
    return repr(float(value))


def write_summary(summary: SummaryTable, path) -> Path:
    path = Path(path)
    summary.frame.to_csv(path, index=False, float_format=_full_precision)
    return path


def read_summary(path) -> pd.DataFrame:
    return pd.read_csv(Path(path), float_precision="round_trip")


@dataclass(frozen=True)
class PlotOutput:
    paths: tuple
    warnings: tuple


def emit_plots(summary: SummaryTable, out_dir) -> PlotOutput:
    """Render the summary as a grouped-points SVG with interval bars.

    The first factor spans the x axis; remaining factors become one
    series each. Factor combinations with no rows are omitted and noted
    in the returned warnings. Output bytes are deterministic for a given
    summary: the SVG id salt is pinned and no timestamps are embedded.
    """
    frame = summary.frame
    if frame.empty:
        raise ValueError("cannot plot an empty summary")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    x_factor = summary.factors[0]
    rest = list(summary.factors[1:])
    x_values = sorted(frame[x_factor].unique().tolist())
    positions = {value: i for i, value in enumerate(x_values)}

    if rest:
        grouper = rest if len(rest) > 1 else rest[0]
        series = [(key if isinstance(key, tuple) else (key,), chunk)
                  for key, chunk in frame.groupby(grouper, sort=True)]
    else:
        series = [((), frame)]

    warnings = []
    expected = len(x_values) * len(series)
    if len(frame) < expected:
        for key, chunk in series:
            present = set(chunk[x_factor])
            for value in x_values:
                if value not in present:
                    label = ", ".join(
                        f"{f}={v}" for f, v in zip([x_factor] + rest, (value, *key))
                    )
                    warnings.append(f"no rows for {label}; point omitted")

    name = "percent_correct_by_" + "_".join(summary.factors)
    svg_path = out_dir / f"{name}.svg"
    csv_path = out_dir / f"{name}.csv"

    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        fig, ax = plt.subplots(figsize=(7.0, 4.5))
        width = 0.8 / max(len(series), 1)
        for index, (key, chunk) in enumerate(series):
            offset = (index - (len(series) - 1) / 2.0) * width
            xs = np.array([positions[v] for v in chunk[x_factor]], dtype=float)
            means = chunk["percent_mean"].to_numpy()
            yerr = np.vstack(
                [
                    means - chunk["percent_low"].to_numpy(),
                    chunk["percent_high"].to_numpy() - means,
                ]
            )
            label = ", ".join(f"{f}={v}" for f, v in zip(rest, key)) or None
            ax.errorbar(
                xs + offset, means, yerr=yerr, fmt="o", capsize=3, label=label
            )
        ax.set_xticks(range(len(x_values)))
        ax.set_xticklabels([str(v) for v in x_values])
        ax.set_xlabel(x_factor)
        ax.set_ylabel("mean percent correct (test)")
        ax.set_ylim(40.0, 105.0)
        ax.grid(True, axis="y", alpha=0.3)
        if rest:
            ax.legend(loc="lower left", fontsize="small")
        fig.savefig(svg_path, format="svg", metadata={"Date": None})
        plt.close(fig)

    summary.frame.to_csv(csv_path, index=False, float_format=_full_precision)
    return PlotOutput(paths=(svg_path, csv_path), warnings=tuple(warnings))


def analyze(
    results,
    factors,
    out_dir,
    *,
    bootstrap_seed: int = 0,
    resamples: int = DEFAULT_RESAMPLES,
    level: float = DEFAULT_LEVEL,
):
    """Aggregate a results file and write the summary CSV plus plots."""
    summary = aggregate(
        results,
        factors,
        bootstrap_seed=bootstrap_seed,
        resamples=resamples,
        level=level,
    )
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary_path = write_summary(summary, out_dir / "summary.csv")
    plots = emit_plots(summary, out_dir)
    return summary, summary_path, plots
