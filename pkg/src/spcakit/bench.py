"""Benchmark harness comparing the rounding pipeline to the baselines.

One record is produced per (dataset, k, algorithm). For every (dataset, k)
pair the SDP is solved once and shared by the randomized-rounding entry,
whose record also carries the SDP statistics (solve time, objective, the
normalized diagonal budget c0). Failures are captured per record and never
abort the batch. Reports pivot the records into one wide row per
(dataset, k) with a stable column grouping and a trailing average row, as
CSV or JSON; emitting and re-parsing a report reproduces the records
exactly (timing included, which is why floats are written at full
precision).
"""

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import baselines
from .certificates import ssr_report
from .matio import load_matrix
from .rounding import multi_round
from .sdp import CgalConfig, solve_spca_sdp

ALGORITHMS = ("greedy", "local_search", "chan", "low_rank", "ra")

DEFAULT_TRIALS = 3000
DEFAULT_SEED = 42

# Extra per-record fields, only populated for the "ra" algorithm.
_RA_EXTRAS = ("sdp_seconds", "sdp_objective", "c0", "sampling_seconds", "total_seconds")


@dataclass
class MatrixSource:
    """A named input matrix, from disk or preloaded."""

    name: str
    path: str | None = None
    format: str = "csv"
    center: bool = False
    matrix: np.ndarray | None = None

    def load(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        if self.path is None:
            raise ValueError(f"source {self.name!r} has neither path nor matrix")
        return load_matrix(self.path, self.format, self.center)


@dataclass
class BenchConfig:
    sources: list[MatrixSource]
    ks: list[int]
    algorithms: tuple[str, ...] = ALGORITHMS
    cgal: CgalConfig = field(default_factory=CgalConfig)
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    time_limits: dict[str, float] | None = None

    def __post_init__(self):
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ValueError(f"unknown algorithms {unknown}; choose from {ALGORITHMS}")
        if not self.ks:
            raise ValueError("at least one k is required")


@dataclass
class BenchRecord:
    dataset: str
    d: int
    k: int
    algorithm: str
    objective: float | None
    elapsed_seconds: float | None
    error: str | None = None
    extras: dict = field(default_factory=dict)


def chan_gap(objective: float, chan_objective: float) -> float:
    """Percent improvement of an objective over the chan baseline."""
    if chan_objective <= 0:
        raise ValueError("chan objective must be positive for a relative gap")
    return (objective - chan_objective) / chan_objective * 100.0


def _run_one(
    name: str, A: np.ndarray, k: int, algorithm: str, config: BenchConfig
) -> BenchRecord:
    d = int(A.shape[0])
    if algorithm == "ra":
        t0 = time.perf_counter()
        sdp = solve_spca_sdp(A, k, config.cgal)
        sdp_seconds = time.perf_counter() - t0
        c0 = ssr_report(sdp.W, k).c0
        t1 = time.perf_counter()
        best = multi_round(A, sdp.W, k, config.trials, config.seed)
        sampling = time.perf_counter() - t1
        return BenchRecord(
            dataset=name,
            d=d,
            k=k,
            algorithm="ra",
            objective=best.objective,
            elapsed_seconds=sampling,
            extras={
                "sdp_seconds": sdp_seconds,
                "sdp_objective": sdp.objective,
                "c0": c0,
                "sampling_seconds": sampling,
                "total_seconds": sdp_seconds + sampling,
            },
        )
    result = baselines.BASELINE_FUNCS[algorithm](A, k)
    return BenchRecord(
        dataset=name,
        d=d,
        k=k,
        algorithm=algorithm,
        objective=result.solution.objective,
        elapsed_seconds=result.elapsed_seconds,
    )


def run_bench(config: BenchConfig) -> list[BenchRecord]:
    """Run every requested algorithm on every (source, k) pair.

    Any exception (unreadable input, infeasible k, solver failure) lands in
    the record's error field; remaining rows still run. A declared time
    limit marks records that exceeded it after the fact, without killing
    the run.
    """
    records: list[BenchRecord] = []
    limits = config.time_limits or {}
    for source in config.sources:
        try:
            A = source.load()
        except Exception as exc:  # noqa: BLE001 - row errors must not abort
            for k in config.ks:
                for algorithm in config.algorithms:
                    records.append(
                        BenchRecord(source.name, 0, k, algorithm, None, None, str(exc))
                    )
            continue
        for k in config.ks:
            for algorithm in config.algorithms:
                try:
                    rec = _run_one(source.name, A, k, algorithm, config)
                    limit = limits.get(algorithm)
                    if limit is not None and rec.elapsed_seconds is not None:
                        if rec.elapsed_seconds > limit:
                            rec = BenchRecord(
                                rec.dataset,
                                rec.d,
                                rec.k,
                                rec.algorithm,
                                None,
                                rec.elapsed_seconds,
                                f"time limit {limit}s exceeded "
                                f"({rec.elapsed_seconds:.3f}s)",
                            )
                except Exception as exc:  # noqa: BLE001
                    rec = BenchRecord(
                        source.name, int(A.shape[0]), k, algorithm, None, None, str(exc)
                    )
                records.append(rec)
    return records


def _columns(algorithms: list[str]) -> list[str]:
    cols = ["dataset", "d", "k"]
    for algo in ALGORITHMS:
        if algo not in algorithms:
            continue
        if algo == "ra":
            cols += ["sdp_seconds", "sdp_objective", "c0"]
            cols += ["ra_objective", "ra_sampling_seconds", "ra_total_seconds"]
        else:
            cols += [f"{algo}_objective", f"{algo}_seconds"]
    cols.append("error")
    return cols


def _pivot(records: list[BenchRecord]) -> tuple[list[str], list[dict]]:
    algorithms = sorted({r.algorithm for r in records}, key=ALGORITHMS.index)
    cols = _columns(algorithms)
    groups: dict[tuple[str, int], list[BenchRecord]] = {}
    order: list[tuple[str, int]] = []
    for rec in records:
        key = (rec.dataset, rec.k)
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(rec)
    rows = []
    for dataset, k in order:
        row: dict = {c: None for c in cols}
        row["dataset"] = dataset
        row["k"] = k
        errors: dict[str, str] = {}
        for rec in groups[(dataset, k)]:
            row["d"] = rec.d
            if rec.error is not None:
                errors[rec.algorithm] = rec.error
                continue
            if rec.algorithm == "ra":
                row["ra_objective"] = rec.objective
                row["ra_sampling_seconds"] = rec.extras["sampling_seconds"]
                row["ra_total_seconds"] = rec.extras["total_seconds"]
                row["sdp_seconds"] = rec.extras["sdp_seconds"]
                row["sdp_objective"] = rec.extras["sdp_objective"]
                row["c0"] = rec.extras["c0"]
            else:
                row[f"{rec.algorithm}_objective"] = rec.objective
                row[f"{rec.algorithm}_seconds"] = rec.elapsed_seconds
        row["error"] = json.dumps(errors, sort_keys=True) if errors else ""
        rows.append(row)
    avg: dict = {c: None for c in cols}
    avg["dataset"] = "average"
    avg["error"] = ""
    for c in cols:
        if c in ("dataset", "d", "k", "error"):
            continue
        vals = [row[c] for row in rows if row[c] is not None]
        if vals:
            avg[c] = float(np.mean(vals))
    rows.append(avg)
    return cols, rows


def _format_cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def emit_report(records: list[BenchRecord], path: str, format: str = "csv") -> None:
    """Write the pivoted report; format is 'csv' or 'json' (same content)."""
    cols, rows = _pivot(records)
    if format == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_format_cell(row[c]) for c in cols])
    elif format == "json":
        with open(path, "w") as fh:
            json.dump({"columns": cols, "rows": rows}, fh, indent=2)
            fh.write("\n")
    else:
        raise ValueError(f"unsupported report format {format!r}")


def _unpivot(cols: list[str], rows: list[dict]) -> list[BenchRecord]:
    records: list[BenchRecord] = []
    algorithms = []
    for algo in ALGORITHMS:
        probe = "ra_objective" if algo == "ra" else f"{algo}_objective"
        if probe in cols:
            algorithms.append(algo)
    for row in rows:
        if row["dataset"] == "average":
            continue
        errors = json.loads(row["error"]) if row["error"] else {}
        for algo in algorithms:
            d = int(row["d"]) if row["d"] is not None else 0
            k = int(row["k"])
            if algo in errors:
                records.append(
                    BenchRecord(row["dataset"], d, k, algo, None, None, errors[algo])
                )
                continue
            if algo == "ra":
                if row["ra_objective"] is None:
                    continue
                records.append(
                    BenchRecord(
                        row["dataset"],
                        d,
                        k,
                        "ra",
                        row["ra_objective"],
                        row["ra_sampling_seconds"],
                        None,
                        {
                            "sdp_seconds": row["sdp_seconds"],
                            "sdp_objective": row["sdp_objective"],
                            "c0": row["c0"],
                            "sampling_seconds": row["ra_sampling_seconds"],
                            "total_seconds": row["ra_total_seconds"],
                        },
                    )
                )
            else:
                if row[f"{algo}_objective"] is None:
                    continue
                records.append(
                    BenchRecord(
                        row["dataset"],
                        d,
                        k,
                        algo,
                        row[f"{algo}_objective"],
                        row[f"{algo}_seconds"],
                    )
                )
    return records


def read_report(path: str, format: str = "csv") -> list[BenchRecord]:
    """Parse a report back into records; inverse of emit_report."""
    if format == "csv":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            cols = next(reader)
            rows = []
            for raw in reader:
                row: dict = {}
                for c, cell in zip(cols, raw):
                    if c in ("dataset", "error"):
                        row[c] = cell
                    elif cell == "":
                        row[c] = None
                    elif c in ("d", "k"):
                        row[c] = int(cell)
                    else:
                        row[c] = float(cell)
                rows.append(row)
    elif format == "json":
        with open(path) as fh:
            payload = json.load(fh)
        cols, rows = payload["columns"], payload["rows"]
    else:
        raise ValueError(f"unsupported report format {format!r}")
    return _unpivot(cols, rows)
