"""Experiment configuration, single runs and parameter sweeps."""

import csv
import io as _io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional

from .baselines import sparse_components_deflation
from .cssp import SelectionStrategy, check_seed
from .encoder import adaptive_schedule, batch_encoder, iterative_encoder
from .errors import ConfigError, InvalidArgumentError, InvalidInputError, NumericalError, SparseLAEError
from .io import load_matrix
from .linalg import as_matrix
from .metrics import LossReport, build_report
from .synthetic import check_dataset_shape

ALGORITHMS = ("batch", "iterative", "tpower-deflation")
SEED_ENV = "SPARSELAE_SEED"
DEFAULT_REPETITIONS = 25

SWEEP_COLUMNS = (
    "grid_index",
    "repetition",
    "algorithm",
    "strategy",
    "k",
    "r",
    "eps",
    "seed",
    "n_columns",
    "avg_column_sparsity",
    "combined_sparsity",
    "info_loss",
    "info_loss_normalized",
    "sym_explained_variance",
    "pca_loss",
    "status",
    "error",
)


def default_seed():
    """Seed from ``$SPARSELAE_SEED`` if set, else 0."""
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return check_seed(int(raw))
    except ValueError:
        raise ConfigError(f"{SEED_ENV}={raw!r} is not an unsigned integer") from None


@dataclass(frozen=True)
class ExperimentConfig:
    k: int
    r: Optional[int] = None
    schedule: Optional[tuple] = None
    eps: Optional[float] = None
    algorithm: str = "batch"
    strategy: str = "greedy"
    trials: int = 1
    seed: int = 0
    input_path: Optional[str] = None
    input_format: Optional[str] = None
    dataset: Optional[str] = None
    output_path: Optional[str] = None
    output_format: str = "json"
    max_iters: int = 1000

    def validate(self):
        specs = [x is not None for x in (self.r, self.schedule, self.eps)]
        if sum(specs) != 1:
            raise ConfigError("exactly one of r, schedule, eps must be given")
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if self.algorithm != "iterative" and self.r is None:
            raise ConfigError(f"{self.algorithm} needs a fixed sparsity r")
        if self.schedule is not None and len(self.schedule) != self.k:
            raise ConfigError(f"schedule has {len(self.schedule)} entries, expected k={self.k}")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        check_seed(self.seed)
        SelectionStrategy(self.strategy, self.seed, self.trials)
        return self

    def selection_strategy(self):
        return SelectionStrategy(self.strategy, self.seed, self.trials)


def load_input(config):
    if config.input_path is None:
        raise ConfigError("no input matrix given")
    X = load_matrix(config.input_path, config.input_format)
    if config.dataset:
        check_dataset_shape(config.dataset, X)
    return X


def execute(config, X=None):
    """Run one configuration; returns ``(encoder, decoder, report)``."""
    config.validate()
    X = as_matrix(load_input(config) if X is None else X)
    if config.algorithm == "batch":
        enc, G, report = batch_encoder(X, config.k, config.r, config.selection_strategy())
    elif config.algorithm == "iterative":
        if config.schedule is not None:
            schedule = list(config.schedule)
        elif config.eps is not None:
            schedule = adaptive_schedule(config.k, config.eps)
        else:
            schedule = [config.r] * config.k
        enc, G, report = iterative_encoder(
            X, config.k, schedule, config.selection_strategy(), eps=config.eps
        )
    else:
        enc = sparse_components_deflation(X, config.k, config.r, seed=config.seed, max_iters=config.max_iters)
        G = None
        report = build_report(
            X, enc, config.k, algorithm="tpower-deflation", sparsity=config.r, seed=config.seed
        )
    return enc, G, report


def run(config, X=None):
    """Run one configuration and return its :class:`LossReport`."""
    return execute(config, X)[2]


@dataclass(frozen=True)
class SweepSpec:
    k_values: tuple
    r_values: Optional[tuple] = None
    eps_values: Optional[tuple] = None
    repetitions: int = DEFAULT_REPETITIONS

    def validate(self):
        if not self.k_values:
            raise ConfigError("k grid is empty")
        grids = [g for g in (self.r_values, self.eps_values) if g is not None]
        if len(grids) != 1 or not grids[0]:
            raise ConfigError("give exactly one non-empty grid of r values or eps values")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        return self

    def points(self):
        """Grid points in output order: k outermost, then sparsity, then repetition."""
        sparsities = [("r", v) for v in self.r_values] if self.r_values is not None else [
            ("eps", v) for v in self.eps_values
        ]
        out = []
        for k in self.k_values:
            for name, value in sparsities:
                for rep in range(self.repetitions):
                    out.append((k, name, value, rep))
        return out


@dataclass
class SweepRow:
    grid_index: int
    repetition: int
    config: ExperimentConfig
    report: Optional[LossReport] = None
    error: Optional[str] = None

    @property
    def status(self):
        return "ok" if self.error is None else "failed"

    def as_record(self):
        rep = self.report
        c = self.config
        return {
            "grid_index": self.grid_index,
            "repetition": self.repetition,
            "algorithm": c.algorithm,
            "strategy": c.strategy if c.algorithm != "tpower-deflation" else None,
            "k": c.k,
            "r": c.r,
            "eps": c.eps,
            "seed": c.seed,
            "n_columns": rep.n_columns if rep else None,
            "avg_column_sparsity": rep.avg_column_sparsity if rep else None,
            "combined_sparsity": rep.combined_sparsity if rep else None,
            "info_loss": rep.info_loss if rep else None,
            "info_loss_normalized": rep.info_loss_normalized if rep else None,
            "sym_explained_variance": rep.sym_explained_variance if rep else None,
            "pca_loss": rep.pca_loss if rep else None,
            "status": self.status,
            "error": self.error,
        }


def _run_point(args):
    index, rep, config, X = args
    try:
        return SweepRow(index, rep, config, report=run(config, X))
    except SparseLAEError as exc:
        return SweepRow(index, rep, config, error=f"{type(exc).__name__}: {exc}")


def sweep(spec, base, X=None, workers=1):
    """Run ``base`` at every grid point; repetition ``i`` uses seed ``base.seed + i``.

    Failed points are recorded with their error and the sweep continues.
    Rows come back in grid order whatever ``workers`` is.
    """
    spec.validate()
    if X is None:
        X = load_input(base)
    X = as_matrix(X)
    jobs = []
    for index, (k, name, value, rep) in enumerate(spec.points()):
        cfg = replace(
            base,
            k=k,
            r=value if name == "r" else None,
            eps=value if name == "eps" else None,
            schedule=None,
            seed=(base.seed + rep) % 2**64,
        )
        jobs.append((index, rep, cfg, X))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_point, jobs))
    return [_run_point(job) for job in jobs]


def _csv_cell(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        rec = row.as_record() if isinstance(row, SweepRow) else row
        writer.writerow([_csv_cell(rec[c]) for c in SWEEP_COLUMNS])
    return buf.getvalue()


def reports_to_json(reports, include_timings=False, extra=None):
    """``{"runs": [...]}`` document; numbers use shortest round-trip decimals."""
    runs = []
    for item in reports:
        if isinstance(item, SweepRow):
            entry = {k: v for k, v in item.as_record().items() if k in ("grid_index", "repetition", "status", "error")}
            entry["report"] = item.report.to_dict(include_timings) if item.report else None
            runs.append(entry)
        else:
            runs.append(item.to_dict(include_timings))
    doc = {"runs": runs}
    if extra:
        doc.update(extra)
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def single_row(config, report):
    return SweepRow(0, 0, config, report=report)


def error_document(exc):
    return json.dumps(
        {"runs": [], "error": {"type": type(exc).__name__, "message": str(exc), "exit_code": exit_code_for(exc)}},
        indent=2,
    ) + "\n"


def exit_code_for(exc):
    """0 success, 1 input or argument problem, 2 numerical failure."""
    if isinstance(exc, NumericalError):
        return 2
    if isinstance(exc, (InvalidInputError, InvalidArgumentError, OSError)):
        return 1
    return 1
