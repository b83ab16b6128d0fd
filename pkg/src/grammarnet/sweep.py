"""Grid enumeration, job seeding, and resumable sweep execution.

A sweep walks the Cartesian product of grammar and network factors in a
fixed nesting order (levels, instance seeds, replicate seeds,
architectures, neurons, depths, laminations, windows) and trains one
network per combination. Results append to a CSV as jobs finish; a
sibling ``<results>.manifest`` file lists finished job keys so an
interrupted sweep resumes without repeating work.

Seeds derive from each job's own fields through a keyed blake2b hash, so
extending the grid never reshuffles existing jobs. The corpus and split
seeds ignore the network fields entirely: every architecture sees the
same strings and the same train/test partition for a given grammar
instance and replicate.
"""
from __future__ import annotations

import csv
import hashlib
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .encoding import split
from .engine import NetworkConfig
from .grammars import VALID_K, build_corpus, feasible_instance, normalize_level
from .training import OUTCOME_COLUMNS, train_model

RESULT_COLUMNS = OUTCOME_COLUMNS + ("error",)

_SEED_SPACE = 2**63


def derive_seed(purpose: str, *parts) -> int:
    """Stable 63-bit seed from a purpose tag and job fields."""
    text = purpose + "|" + "|".join(str(part) for part in parts)
    digest = hashlib.blake2b(text.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % _SEED_SPACE


@dataclass(frozen=True)
class JobSpec:
    """Everything needed to run one training job, and nothing else."""

    level: str
    k: int
    instance_seed: int
    replicate_seed: int
    architecture: str
    neurons: int
    depth: int
    laminations: int
    window: int
    per_class: int
    train_fraction: float

    @property
    def key(self) -> str:
        """Manifest identity; also the sort key for result comparisons."""
        return (
            f"{self.level}:{self.k}:{self.instance_seed}:{self.replicate_seed}"
            f":{self.architecture}:{self.neurons}:{self.depth}"
            f":{self.laminations}:{self.window}"
            f":{self.per_class}:{self.train_fraction}"
        )

    @property
    def corpus_seed(self) -> int:
        return derive_seed("corpus", self.level, self.k, self.instance_seed)

    @property
    def split_seed(self) -> int:
        return derive_seed(
            "split", self.level, self.k, self.instance_seed, self.replicate_seed
        )

    @property
    def init_seed(self) -> int:
        return derive_seed(
            "init",
            self.level,
            self.k,
            self.instance_seed,
            self.replicate_seed,
            self.architecture,
            self.neurons,
            self.depth,
            self.laminations,
            self.window,
        )

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(
            architecture=self.architecture,
            neurons=self.neurons,
            depth=self.depth,
            laminations=self.laminations,
            window=self.window,
        )


@dataclass(frozen=True)
class SweepGrid:
    """Declarative description of a sweep.

    ``levels`` holds (level, k) pairs; use k=0 for CF and CS where no
    k-gram width applies. ``window_values`` is ignored for FFNs, whose
    window is pinned at 12.
    """

    architectures: tuple = ("ffn", "rnn", "gru")
    neuron_values: tuple = (32,)
    depth_values: tuple = (1,)
    lamination_values: tuple = (1,)
    window_values: tuple = (12,)
    levels: tuple = (("SL", 1),)
    instance_seeds: tuple = (0,)
    replicate_seeds: tuple = (0,)
    per_class: int = 500
    train_fraction: float = 0.8

    def __post_init__(self):
        for name in (
            "architectures",
            "neuron_values",
            "depth_values",
            "lamination_values",
            "window_values",
            "levels",
            "instance_seeds",
            "replicate_seeds",
        ):
            value = tuple(getattr(self, name))
            if not value:
                raise ValueError(f"{name} must not be empty")
            object.__setattr__(self, name, value)
        normalized = []
        for level, k in self.levels:
            level = normalize_level(level)
            if k not in VALID_K[level]:
                raise ValueError(f"level {level.value} does not accept k={k}")
            normalized.append((level.value, int(k)))
        object.__setattr__(self, "levels", tuple(normalized))
        if self.per_class < 1:
            raise ValueError(f"per_class must be positive, got {self.per_class}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(
                f"train_fraction must lie in (0, 1), got {self.train_fraction}"
            )
        # surface bad network factors now rather than mid-sweep
        for architecture in self.architectures:
            for neurons in self.neuron_values:
                for depth in self.depth_values:
                    for laminations in self.lamination_values:
                        for window in self._windows_for(architecture):
                            NetworkConfig(
                                architecture=architecture,
                                neurons=neurons,
                                depth=depth,
                                laminations=laminations,
                                window=window,
                            )

    def _windows_for(self, architecture: str) -> tuple:
        if architecture == "ffn":
            return (12,)
        return tuple(dict.fromkeys(self.window_values))


def enumerate_grid(grid: SweepGrid) -> list[JobSpec]:
    """The grid's jobs in their fixed, documented nesting order."""
    jobs = []
    for level, k in grid.levels:
        for instance_seed in grid.instance_seeds:
            for replicate_seed in grid.replicate_seeds:
                for architecture in grid.architectures:
                    for neurons in grid.neuron_values:
                        for depth in grid.depth_values:
                            for laminations in grid.lamination_values:
                                for window in grid._windows_for(architecture):
                                    jobs.append(
                                        JobSpec(
                                            level=level,
                                            k=k,
                                            instance_seed=instance_seed,
                                            replicate_seed=replicate_seed,
                                            architecture=architecture,
                                            neurons=neurons,
                                            depth=depth,
                                            laminations=laminations,
                                            window=window,
                                            per_class=grid.per_class,
                                            train_fraction=grid.train_fraction,
                                        )
                                    )
    return jobs


@lru_cache(maxsize=64)
def corpus_for(level: str, k: int, instance_seed: int, per_class: int):
    """Corpora are pure functions of the grammar identity, cached per worker."""
    instance = feasible_instance(level, k or None, seed=instance_seed)
    rng = np.random.default_rng(derive_seed("corpus", level, k, instance_seed))
    return tuple(build_corpus(instance, per_class, rng))


def run_job(job: JobSpec, overrides: dict | None = None):
    """Train the job's network and return its outcome."""
    corpus = corpus_for(job.level, job.k, job.instance_seed, job.per_class)
    data = split(corpus, job.train_fraction, rng=job.split_seed)
    outcome, _ = train_model(
        job.network_config(), data, init_seed=job.init_seed, **(overrides or {})
    )
    return outcome


def _execute(job: JobSpec, overrides: dict | None):
    """Worker entry point: never raises, errors become marker rows."""
    try:
        outcome = run_job(job, overrides)
        row = outcome.csv_row() + [""]
    except Exception as err:  # noqa: BLE001 - a sweep must survive bad jobs
        note = f"{type(err).__name__}: {err}".replace("\n", " ")
        row = [
            job.level,
            str(job.k),
            str(job.instance_seed),
            job.architecture,
            str(job.neurons),
            str(job.depth),
            str(job.laminations),
            str(job.window),
            str(job.split_seed),
            str(job.init_seed),
            "",
            "",
            "",
            "",
            "",
            note,
        ]
    return job.key, row


def _manifest_path(results_path: Path) -> Path:
    return results_path.with_name(results_path.name + ".manifest")


def _read_completed(results_path: Path) -> set[str]:
    """Reconcile the results file with its manifest, returning finished keys.

    The writer appends the result row before its manifest line, so an
    interruption can leave at most one trailing row without a manifest
    entry (or a torn final line); both are dropped here.
    """
    manifest_path = _manifest_path(results_path)
    keys = []
    if manifest_path.exists():
        keys = [line for line in manifest_path.read_text().splitlines() if line]
    if not results_path.exists():
        if keys:
            raise ValueError(
                f"{manifest_path} lists jobs but {results_path} is missing"
            )
        return set()
    with results_path.open(newline="") as handle:
        rows = list(csv.reader(handle))
    if not rows or tuple(rows[0]) != RESULT_COLUMNS:
        raise ValueError(f"{results_path} is not a sweep results file")
    data = [row for row in rows[1:] if len(row) == len(RESULT_COLUMNS)]
    if len(data) == len(keys) + 1:
        data = data[:-1]  # orphan from an interruption mid-append
    if len(data) != len(keys):
        raise ValueError(
            f"{results_path} has {len(data)} rows but the manifest lists "
            f"{len(keys)} jobs; refusing to resume from inconsistent state"
        )
    with results_path.open("w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        writer.writerows(data)
    return set(keys)


def run_sweep(
    grid: SweepGrid,
    output_path,
    parallelism: int = 1,
    *,
    resume: bool = False,
    limit: int | None = None,
    overrides: dict | None = None,
) -> Path:
    """Execute every job in ``grid``, appending rows to ``output_path``.

    ``resume=True`` skips jobs already listed in the manifest. ``limit``
    caps how many pending jobs run before returning, which makes
    interruption reproducible in tests. Individual job failures are
    recorded in the ``error`` column and never abort the sweep.
    """
    if parallelism < 1:
        raise ValueError(f"parallelism must be positive, got {parallelism}")
    results_path = Path(output_path)
    if results_path.exists() and not resume:
        raise FileExistsError(
            f"{results_path} already exists; pass resume=True to continue it"
        )
    results_path.parent.mkdir(parents=True, exist_ok=True)

    completed = _read_completed(results_path) if resume else set()
    jobs = enumerate_grid(grid)
    duplicates = len(jobs) - len({job.key for job in jobs})
    if duplicates:
        raise ValueError(f"grid enumerates {duplicates} duplicate jobs")
    pending = [job for job in jobs if job.key not in completed]
    if limit is not None:
        pending = pending[: max(0, int(limit))]

    fresh = not results_path.exists()
    with results_path.open("a", newline="") as results, _manifest_path(
        results_path
    ).open("a") as manifest:
        writer = csv.writer(results, lineterminator="\n")
        if fresh:
            writer.writerow(RESULT_COLUMNS)
            results.flush()

        def record(key: str, row: list) -> None:
            writer.writerow(row)
            results.flush()
            manifest.write(key + "\n")
            manifest.flush()

        if parallelism == 1:
            for job in pending:
                record(*_execute(job, overrides))
        else:
            with ProcessPoolExecutor(max_workers=parallelism) as pool:
                futures = [pool.submit(_execute, job, overrides) for job in pending]
                for future in as_completed(futures):
                    record(*future.result())
    return results_path


def read_results(path):
    """Load a results file into a list of column dicts (strings as written)."""
    path = Path(path)
    with path.open(newline="") as handle:
        reader = csv.reader(handle)
        header = tuple(next(reader, ()))
        if header != RESULT_COLUMNS:
            raise ValueError(f"{path} is not a sweep results file")
        return [dict(zip(RESULT_COLUMNS, row)) for row in reader]


def sorted_rows(path, *, drop_wall_time: bool = True):
    """Rows sorted by job identity, for order-insensitive comparisons.

    ``wall_time`` is the one nondeterministic column; it is stripped by
    default so two runs of the same grid compare equal.
    """
    rows = read_results(path)
    if drop_wall_time:
        for row in rows:
            row.pop("wall_time", None)
    rows.sort(key=lambda row: [row[name] for name in RESULT_COLUMNS if name in row])
    return rows
