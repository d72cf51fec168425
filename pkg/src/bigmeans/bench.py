"""Experiment runner: n_exec seeded repetitions per (dataset, algorithm, k)."""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from bigmeans.big_means import BigMeansConfig, big_means
from bigmeans.core import Dataset, EvalCounter
from bigmeans.exceptions import ConfigurationError
from bigmeans.init import InitConfig
from bigmeans.io import DatasetSpec, load, load_registry, registry_f_best, registry_spec
from bigmeans.local_search import SearchConfig, kmeans
from bigmeans.metrics import (
    RunSummary,
    ScoreTable,
    failed_summary,
    mean_over_k,
    score_table,
    summarize_runs,
    write_summary_csv,
    write_summary_json,
)

log = logging.getLogger(__name__)

ALGORITHMS = ("big_means", "forgy", "kmeans_pp", "kmeans_parallel")


@dataclass
class DatasetEntry:
    name: str
    spec: DatasetSpec | None = None
    chunk_size: int | None = None
    cpu_max: float | None = None
    max_chunks: int | None = None
    # f_best per k; missing k fall back to the registry, then to the best local run
    f_best: dict[int, float] = field(default_factory=dict)
    points: np.ndarray | None = None


@dataclass
class ExperimentPlan:
    datasets: list[DatasetEntry]
    algorithms: list[str]
    k_values: list[int]
    n_exec: int = 15
    base_seed: int = 0
    # 0 reruns every repetition with base_seed
    seed_stride: int = 1
    search: SearchConfig = SearchConfig()
    candidates_per_step: int = 3
    kmeans_parallel_rounds: int | str = 5
    # algorithm -> maximum m it may be run on; larger datasets count as failures
    row_limits: dict[str, int] = field(default_factory=dict)
    parallel_cells: bool = False

    def __post_init__(self):
        if not self.algorithms:
            raise ConfigurationError("plan lists no algorithms")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigurationError(f"unknown algorithm id(s) {unknown}; expected {ALGORITHMS}")
        if not self.k_values:
            raise ConfigurationError("plan lists no k values")
        if self.n_exec < 1:
            raise ConfigurationError("n_exec must be >= 1")
        if not self.datasets:
            raise ConfigurationError("plan lists no datasets")

    def seed(self, run: int) -> int:
        return self.base_seed + self.seed_stride * run


@dataclass
class RunRecord:
    algorithm: str
    dataset: str
    k: int
    run: int
    seed: int
    objective: float
    cpu_init: float
    cpu_full: float
    n_d: int
    iterations: int
    n_s: int

    @property
    def cpu(self) -> float:
        return self.cpu_init + self.cpu_full


@dataclass
class BenchResult:
    summaries: list[RunSummary]
    scores: ScoreTable
    runs: list[RunRecord]
    overall: dict
    errors: list[str]
    metadata: dict

    @property
    def ok(self) -> bool:
        return not self.errors


def _entry_from_json(d: dict, base: Path, registry: dict) -> DatasetEntry:
    name = d["name"]
    if "path" in d:
        path = Path(d["path"])
        if not path.is_absolute():
            path = base / path
        spec = DatasetSpec(str(path), d.get("format", "csv"), bool(d.get("has_header", False)),
                           bool(d.get("normalize", False)), d.get("columns"))
    else:
        spec = registry_spec(name, registry, d.get("data_dir"))
    f_best = {int(k): float(v) for k, v in d.get("f_best", {}).items()}
    return DatasetEntry(name, spec, d.get("chunk_size"), d.get("cpu_max"), d.get("max_chunks"), f_best)


def plan_from_dict(d: dict, base: Path | str = ".", registry: dict | None = None) -> ExperimentPlan:
    registry = registry if registry is not None else load_registry()
    base = Path(base)
    search = SearchConfig(int(d.get("max_iterations", 300)), float(d.get("rel_tolerance", 1e-4)))
    return ExperimentPlan(
        datasets=[_entry_from_json(x, base, registry) for x in d.get("datasets", [])],
        algorithms=list(d.get("algorithms", [])),
        k_values=[int(k) for k in d.get("k_values", [])],
        n_exec=int(d.get("n_exec", 15)),
        base_seed=int(d.get("base_seed", 0)),
        seed_stride=int(d.get("seed_stride", 1)),
        search=search,
        candidates_per_step=int(d.get("candidates_per_step", 3)),
        kmeans_parallel_rounds=d.get("kmeans_parallel_rounds", 5),
        row_limits={k: int(v) for k, v in d.get("row_limits", {}).items()},
        parallel_cells=bool(d.get("parallel_cells", False)),
    )


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    with open(path) as fh:
        d = json.load(fh)
    return plan_from_dict(d, path.parent)


def run_once(X, algorithm: str, k: int, seed: int, plan: ExperimentPlan, entry: DatasetEntry):
    """One seeded execution; returns (objective, counter, n_s)."""
    if algorithm == "big_means":
        if entry.chunk_size is None:
            raise ConfigurationError(f"dataset {entry.name}: big_means needs chunk_size")
        if entry.cpu_max is None and entry.max_chunks is None:
            raise ConfigurationError(f"dataset {entry.name}: big_means needs cpu_max or max_chunks")
        cfg = BigMeansConfig(
            k=k,
            chunk_size=min(entry.chunk_size, X.shape[0]),
            max_cpu_seconds=entry.cpu_max,
            max_chunks=entry.max_chunks,
            search=plan.search,
            init=InitConfig("kmeans_pp", plan.candidates_per_step, seed=seed),
            seed=seed,
        )
        out, _ = big_means(X, cfg)
        return out.objective, out.counter, out.n_chunks
    init = InitConfig(algorithm, plan.candidates_per_step, rounds_r=plan.kmeans_parallel_rounds, seed=seed)
    out = kmeans(X, k, init, plan.search, EvalCounter())
    return out.objective, out.counter, 0


def _run_cell(X, algorithm, k, plan, entry) -> list[RunRecord]:
    records = []
    for r in range(plan.n_exec):
        seed = plan.seed(r)
        f, counter, n_s = run_once(X, algorithm, k, seed, plan, entry)
        records.append(RunRecord(algorithm, entry.name, k, r, seed, f, counter.cpu_init, counter.cpu_full,
                                 counter.distance_evals, counter.iterations, n_s))
    return records


def run_plan(plan: ExperimentPlan) -> BenchResult:
    registry = load_registry()
    runs: list[RunRecord] = []
    summaries: list[RunSummary] = []
    errors: list[str] = []
    overall: dict = {}
    raw_scores: dict = {}

    for entry in plan.datasets:
        if entry.points is not None:
            X = Dataset(entry.points, name=entry.name).points
        else:
            X = load(entry.spec).points
        m = X.shape[0]

        cells = [(alg, k) for alg in plan.algorithms for k in plan.k_values]
        results: dict = {}

        def work(cell):
            alg, k = cell
            limit = plan.row_limits.get(alg)
            if limit is not None and m > limit:
                raise MemoryError(f"{alg}: m={m} exceeds the row limit {limit}")
            return _run_cell(X, alg, k, plan, entry)

        if plan.parallel_cells:
            with ThreadPoolExecutor() as pool:
                futures = {cell: pool.submit(work, cell) for cell in cells}
                for cell, fut in futures.items():
                    try:
                        results[cell] = fut.result()
                    except Exception as exc:  # recorded as a failed cell
                        results[cell] = exc
        else:
            for cell in cells:
                try:
                    results[cell] = work(cell)
                except Exception as exc:  # recorded as a failed cell
                    results[cell] = exc

        ds_summaries: dict[str, list[RunSummary]] = {a: [] for a in plan.algorithms}
        for k in plan.k_values:
            ok_objs = [rec.objective for alg in plan.algorithms
                       if not isinstance(results[(alg, k)], Exception) for rec in results[(alg, k)]]
            f_best, source = entry.f_best.get(k), "plan"
            if f_best is None:
                f_best, source = registry_f_best(entry.name, k, registry), "registry"
            if f_best is None and ok_objs:
                f_best, source = min(ok_objs), "local"
            for alg in plan.algorithms:
                res = results[(alg, k)]
                if isinstance(res, Exception):
                    msg = f"{entry.name}/{alg}/k={k}: {type(res).__name__}: {res}"
                    log.error(msg)
                    if not isinstance(res, MemoryError):
                        errors.append(msg)
                    s = failed_summary(alg, entry.name, k, str(res))
                else:
                    runs.extend(res)
                    s = summarize_runs(
                        alg, entry.name, k,
                        [r.objective for r in res], [r.cpu for r in res], [r.n_d for r in res],
                        f_best, source, [r.n_s for r in res], [r.iterations for r in res],
                    )
                summaries.append(s)
                ds_summaries[alg].append(s)

        raw_scores[entry.name] = {}
        overall[entry.name] = {}
        for alg in plan.algorithms:
            e, c, excluded = mean_over_k(ds_summaries[alg])
            failed = any(s.failed for s in ds_summaries[alg])
            overall[entry.name][alg] = {"mean_e": e, "mean_cpu": c, "excluded_k": excluded}
            raw_scores[entry.name][alg] = None if failed else {"accuracy": e, "cpu": c}

    scores = score_table(raw_scores)
    metadata = {
        "timing_reliable": not plan.parallel_cells,
        "plan": _plan_echo(plan),
    }
    return BenchResult(summaries, scores, runs, overall, errors, metadata)


def _plan_echo(plan: ExperimentPlan) -> dict:
    return {
        "datasets": [
            {"name": e.name, "path": e.spec.path if e.spec else None, "chunk_size": e.chunk_size,
             "cpu_max": e.cpu_max, "max_chunks": e.max_chunks, "f_best": e.f_best}
            for e in plan.datasets
        ],
        "algorithms": plan.algorithms,
        "k_values": plan.k_values,
        "n_exec": plan.n_exec,
        "base_seed": plan.base_seed,
        "seed_stride": plan.seed_stride,
        "search": asdict(plan.search),
        "candidates_per_step": plan.candidates_per_step,
        "kmeans_parallel_rounds": plan.kmeans_parallel_rounds,
        "row_limits": plan.row_limits,
        "parallel_cells": plan.parallel_cells,
    }


def write_results(result: BenchResult, out_prefix) -> tuple[Path, Path]:
    prefix = Path(out_prefix)
    csv_path = prefix.with_suffix(".csv")
    json_path = prefix.with_suffix(".json")
    write_summary_csv(csv_path, result.summaries, result.scores)
    write_summary_json(json_path, result.summaries, result.scores, extra={
        "runs": [asdict(r) | {"cpu": r.cpu} for r in result.runs],
        "overall": result.overall,
        "errors": result.errors,
        "metadata": result.metadata,
    })
    return csv_path, json_path


def format_scores(scores: ScoreTable) -> str:
    lines = ["algorithm\taccuracy\tcpu\taccuracy_pct\tcpu_pct\tmean_score"]
    for alg in scores.algorithms:
        s = scores.sum_scores[alg]
        p = scores.efficiency_percent[alg]
        lines.append(f"{alg}\t{s['accuracy']:.3f}\t{s['cpu']:.3f}\t{p['accuracy']:.0f}\t{p['cpu']:.0f}\t"
                     f"{scores.sum_mean_scores[alg]:.3f}")
    return "\n".join(lines)


def overall_mean_error(result: BenchResult, dataset: str, algorithm: str) -> float:
    v = result.overall.get(dataset, {}).get(algorithm, {}).get("mean_e", math.nan)
    return v
