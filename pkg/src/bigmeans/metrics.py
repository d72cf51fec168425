"""Evaluation arithmetic: relative error, run summaries and the score system."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Mapping, Sequence

import numpy as np

from bigmeans.exceptions import IncompleteInputError

METRICS = ("accuracy", "cpu")

SUMMARY_COLUMNS = [
    "algorithm", "dataset", "k",
    "e_min", "e_mean", "e_max",
    "cpu_min", "cpu_mean", "cpu_max",
    "n_d", "score_accuracy", "score_cpu",
]


def relative_error(f_bar: float, f_best: float) -> float:
    """Percent excess of ``f_bar`` over the best known value. Negative when it beats it."""
    if not f_best > 0:
        raise ValueError(f"f_best must be positive, got {f_best}")
    return (f_bar - f_best) / f_best * 100.0


def score(value: float, all_values: Sequence[float]) -> float:
    """Min-max normalized score: 1 for the lowest value, 0 for the highest.

    When every value is equal all of them score 1.
    """
    vals = list(all_values)
    if not vals:
        raise ValueError("score needs at least one value")
    lo, hi = min(vals), max(vals)
    if hi == lo:
        return 1.0
    return 1.0 - (value - lo) / (hi - lo)


def score_values(values: Mapping[str, float | None]) -> dict[str, float]:
    """Score every algorithm's value; a None (failed run) scores 0 and is not compared."""
    ok = [v for v in values.values() if v is not None]
    return {a: (0.0 if v is None else score(v, ok)) for a, v in values.items()}


@dataclass
class RunSummary:
    algorithm: str
    dataset: str
    k: int
    n_exec: int
    e_min: float
    e_mean: float
    e_max: float
    cpu_min: float
    cpu_mean: float
    cpu_max: float
    nd_mean: float
    f_best_used: float
    f_best_source: str = "registry"
    n_s_mean: float = 0.0
    iterations_mean: float = 0.0
    argmin_run: int = 0
    failed: bool = False
    error: str | None = None


def summarize_runs(algorithm: str, dataset: str, k: int, objectives, cpus, n_d, f_best: float,
                   f_best_source: str = "registry", n_s=None, iterations=None) -> RunSummary:
    objectives = np.asarray(objectives, dtype=np.float64)
    errs = np.array([relative_error(f, f_best) for f in objectives])
    cpus = np.asarray(cpus, dtype=np.float64)
    return RunSummary(
        algorithm=algorithm,
        dataset=dataset,
        k=k,
        n_exec=len(objectives),
        e_min=float(errs.min()),
        e_mean=float(errs.mean()),
        e_max=float(errs.max()),
        cpu_min=float(cpus.min()),
        cpu_mean=float(cpus.mean()),
        cpu_max=float(cpus.max()),
        nd_mean=float(np.mean(n_d)),
        f_best_used=float(f_best),
        f_best_source=f_best_source,
        n_s_mean=float(np.mean(n_s)) if n_s is not None else 0.0,
        iterations_mean=float(np.mean(iterations)) if iterations is not None else 0.0,
        argmin_run=int(np.argmin(objectives)),
    )


def failed_summary(algorithm: str, dataset: str, k: int, error: str) -> RunSummary:
    nan = math.nan
    return RunSummary(algorithm, dataset, k, 0, nan, nan, nan, nan, nan, nan, nan, nan,
                      f_best_source="none", failed=True, error=error)


def mean_over_k(summaries: Sequence[RunSummary]) -> tuple[float, float, int]:
    """Plain average of e_mean and cpu_mean over the k rows; failed rows are skipped.

    Returns ``(mean_e, mean_cpu, n_excluded)``.
    """
    ok = [s for s in summaries if not s.failed]
    excluded = len(summaries) - len(ok)
    if not ok:
        return math.nan, math.nan, excluded
    return (float(np.mean([s.e_mean for s in ok])), float(np.mean([s.cpu_mean for s in ok])), excluded)


@dataclass
class ScoreTable:
    datasets: list[str]
    algorithms: list[str]
    # scores[algorithm][dataset][metric]
    scores: dict[str, dict[str, dict[str, float]]]
    sum_scores: dict[str, dict[str, float]] = field(default_factory=dict)
    mean_scores: dict[str, dict[str, float]] = field(default_factory=dict)
    sum_mean_scores: dict[str, float] = field(default_factory=dict)
    efficiency_percent: dict[str, dict[str, float]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def aggregate_scores(table: Mapping[str, Mapping[str, Mapping[str, float] | None]]) -> ScoreTable:
    """Sum and mean scores from per-dataset scores.

    ``table[dataset][algorithm]`` maps each metric in ``METRICS`` to a score,
    or is None when the algorithm failed on that dataset (it then scores 0).
    Sums run over datasets in insertion order.
    """
    datasets = list(table)
    algorithms: list[str] = []
    for ds in datasets:
        for alg in table[ds]:
            if alg not in algorithms:
                algorithms.append(alg)

    scores: dict[str, dict[str, dict[str, float]]] = {a: {} for a in algorithms}
    for ds in datasets:
        for alg in algorithms:
            entry = table[ds].get(alg)
            if entry is None:
                scores[alg][ds] = {q: 0.0 for q in METRICS}
                continue
            missing = [q for q in METRICS if q not in entry]
            if missing:
                raise IncompleteInputError(f"{alg} on {ds}: missing metric(s) {missing}")
            scores[alg][ds] = {q: float(entry[q]) for q in METRICS}

    out = ScoreTable(datasets, algorithms, scores)
    n_ds = len(datasets)
    for alg in algorithms:
        sums = {}
        for q in METRICS:
            total = 0.0
            for ds in datasets:
                total += scores[alg][ds][q]
            sums[q] = total
        out.sum_scores[alg] = sums
        out.mean_scores[alg] = {ds: 0.5 * (scores[alg][ds]["accuracy"] + scores[alg][ds]["cpu"]) for ds in datasets}
        total = 0.0
        for ds in datasets:
            total += out.mean_scores[alg][ds]
        out.sum_mean_scores[alg] = total
        out.efficiency_percent[alg] = {q: sums[q] / n_ds * 100.0 for q in METRICS} if n_ds else {}
    return out


def score_table(values: Mapping[str, Mapping[str, Mapping[str, float] | None]]) -> ScoreTable:
    """Scores from raw metric values.

    ``values[dataset][algorithm]`` maps "accuracy" (mean E_A) and "cpu" to
    raw values, or is None for a failed algorithm.
    """
    per_ds = {}
    for ds, algs in values.items():
        per_metric = {}
        for q in METRICS:
            per_metric[q] = score_values({a: (None if v is None else v[q]) for a, v in algs.items()})
        per_ds[ds] = {a: (None if algs[a] is None else {q: per_metric[q][a] for q in METRICS}) for a in algs}
    return aggregate_scores(per_ds)


def summary_rows(summaries: Sequence[RunSummary], scores: ScoreTable | None = None) -> list[dict]:
    rows = []
    for s in summaries:
        sc = scores.scores.get(s.algorithm, {}).get(s.dataset) if scores is not None else None
        rows.append({
            "algorithm": s.algorithm,
            "dataset": s.dataset,
            "k": s.k,
            "e_min": s.e_min,
            "e_mean": s.e_mean,
            "e_max": s.e_max,
            "cpu_min": s.cpu_min,
            "cpu_mean": s.cpu_mean,
            "cpu_max": s.cpu_max,
            "n_d": s.nd_mean,
            "score_accuracy": sc["accuracy"] if sc else math.nan,
            "score_cpu": sc["cpu"] if sc else math.nan,
        })
    return rows


def write_summary_csv(path, summaries: Sequence[RunSummary], scores: ScoreTable | None = None):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in summary_rows(summaries, scores):
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def write_summary_json(path, summaries: Sequence[RunSummary], scores: ScoreTable | None = None, extra=None):
    doc = {
        "columns": SUMMARY_COLUMNS,
        "rows": summary_rows(summaries, scores),
        "summaries": [asdict(s) for s in summaries],
        "scores": scores.to_dict() if scores is not None else None,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(_jsonable(doc), fh, indent=2)
