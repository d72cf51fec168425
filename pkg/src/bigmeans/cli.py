"""Command-line interface.

Results go to stdout; diagnostics go to stderr. Exit status 2 means a
configuration error, 1 a runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys

DEFAULT_SEED = 20240101
THREADS_ENV = "BIGMEANS_THREADS"
ALGOS = {
    "big-means": "big_means",
    "forgy": "forgy",
    "kmeans-pp": "kmeans_pp",
    "kmeans-parallel": "kmeans_parallel",
}

log = logging.getLogger("bigmeans")


class CliConfigError(Exception):
    pass


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _seed(text):
    if text == "random":
        return text
    return int(text)


def _columns(text):
    return [int(c) for c in text.split(",") if c.strip()]


def _add_input(p, required=True):
    p.add_argument("--input", required=required, help="dataset file")
    p.add_argument("--format", required=required, choices=["csv", "whitespace", "tsplib"])
    p.add_argument("--header", action="store_true", help="first data line is a header")
    p.add_argument("--columns", type=_columns, default=None, help="comma-separated 0-based columns to keep")


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help=f"kernel worker threads (default: ${THREADS_ENV} or all cores)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(prog="bigmeans", description="Big-means clustering for large datasets",
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("cluster", help="cluster one dataset", parents=[common])
    _add_input(c)
    c.add_argument("--k", type=_positive_int, required=True)
    c.add_argument("--algo", choices=list(ALGOS), default="big-means")
    c.add_argument("--chunk-size", type=_positive_int, default=None)
    c.add_argument("--max-seconds", type=_positive_float, default=None)
    c.add_argument("--max-chunks", type=_positive_int, default=None)
    c.add_argument("--seed", type=_seed, default=DEFAULT_SEED, help="integer, or 'random' for entropy")
    c.add_argument("--tol", type=float, default=1e-4)
    c.add_argument("--max-iters", type=_positive_int, default=300)
    c.add_argument("--candidates", type=_positive_int, default=3, help="K-means++ candidates per step")
    c.add_argument("--rounds", default="5", help="K-means|| rounds: integer or 'log'")
    c.add_argument("--normalize", action="store_true", help="min-max scale columns before clustering")
    c.add_argument("--no-final-assignment", action="store_true")
    c.add_argument("--out-centroids")
    c.add_argument("--out-labels")
    c.add_argument("--out-json")

    b = sub.add_parser("bench", help="run a benchmark plan", parents=[common])
    b.add_argument("--plan", required=True)
    b.add_argument("--out", default=None, help="output prefix for .csv/.json (default: next to the plan)")

    n = sub.add_parser("normalize", help="min-max normalize a dataset to CSV", parents=[common])
    _add_input(n)
    n.add_argument("--output", default=None, help="CSV path (default: stdout)")

    h = sub.add_parser("hint-chunk-size", help="probe a ladder of chunk sizes", parents=[common])
    _add_input(h)
    h.add_argument("--k", type=_positive_int, required=True)
    h.add_argument("--chunks-per-probe", type=_positive_int, default=20)
    h.add_argument("--repeats", type=_positive_int, default=3)
    h.add_argument("--seed", type=int, default=DEFAULT_SEED)
    h.add_argument("--normalize", action="store_true")
    return parser


def _resolve_threads(requested):
    if requested is None:
        env = os.environ.get(THREADS_ENV)
        if env:
            try:
                requested = int(env)
            except ValueError:
                raise CliConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if requested is not None and requested < 1:
        raise CliConfigError("--threads must be >= 1")
    if requested is not None and "numba" not in sys.modules:
        # numba fixes its pool size at import
        current = int(os.environ.get("NUMBA_NUM_THREADS", os.cpu_count() or 1))
        os.environ["NUMBA_NUM_THREADS"] = str(max(current, requested))
    return requested


def _load(args):
    from bigmeans.io import DatasetSpec, load

    spec = DatasetSpec(args.input, args.format, args.header, getattr(args, "normalize", False), args.columns)
    return load(spec)


def cmd_cluster(args) -> int:
    from bigmeans.big_means import BigMeansConfig, big_means
    from bigmeans.init import InitConfig
    from bigmeans.io import write_csv, write_labels
    from bigmeans.local_search import SearchConfig, kmeans

    seed = random.SystemRandom().randrange(2**32) if args.seed == "random" else args.seed
    algo = ALGOS[args.algo]
    rounds = args.rounds if args.rounds == "log" else int(args.rounds)
    if algo == "big_means":
        if args.chunk_size is None:
            raise CliConfigError("big-means needs --chunk-size")
        if args.max_seconds is None and args.max_chunks is None:
            raise CliConfigError("big-means needs --max-seconds and/or --max-chunks")
    search = SearchConfig(args.max_iters, args.tol)
    init = InitConfig("kmeans_pp" if algo == "big_means" else algo, args.candidates, rounds_r=rounds, seed=seed)

    data = _load(args)
    if args.k > data.m:
        raise CliConfigError(f"--k {args.k} exceeds the number of points ({data.m})")
    if algo == "big_means":
        if args.chunk_size > data.m:
            raise CliConfigError(f"--chunk-size {args.chunk_size} exceeds the number of points ({data.m})")
        cfg = BigMeansConfig(args.k, args.chunk_size, args.max_seconds, args.max_chunks, search, init, seed,
                             not args.no_final_assignment)
        out, _ = big_means(data, cfg)
    else:
        out = kmeans(data, args.k, init, search)

    counter = out.counter
    report = {
        "objective": out.objective,
        "best_chunk_objective": out.best_chunk_objective,
        "iterations": out.iterations,
        "n_d": counter.distance_evals,
        "cpu_init": counter.cpu_init,
        "cpu_full": counter.cpu_full,
        "cpu": counter.cpu,
        "n_s": out.n_chunks,
        "seed": seed,
        "degenerate_rows": [int(j) for j in range(out.centroids.k) if out.centroids.degenerate[j]],
        "config": {
            "input": args.input, "format": args.format, "header": args.header, "columns": args.columns,
            "k": args.k, "algo": args.algo, "chunk_size": args.chunk_size, "max_seconds": args.max_seconds,
            "max_chunks": args.max_chunks, "seed": seed, "tol": args.tol, "max_iters": args.max_iters,
            "candidates": args.candidates, "rounds": rounds, "normalize": args.normalize,
            "final_assignment": not args.no_final_assignment, "threads": _current_threads(),
        },
    }
    if args.out_centroids:
        centers = out.centroids.centers.copy()
        centers[out.centroids.degenerate] = float("nan")
        write_csv(centers, args.out_centroids)
    if args.out_labels:
        if out.labels is None:
            raise CliConfigError("--out-labels needs the final assignment pass")
        write_labels(out.labels, args.out_labels)
    if args.out_json:
        with open(args.out_json, "w") as fh:
            json.dump(report, fh, indent=2)
    print(repr(out.objective))
    return 0


def _current_threads():
    from bigmeans.core import get_num_threads

    return get_num_threads()


def cmd_bench(args) -> int:
    from pathlib import Path

    from bigmeans.bench import format_scores, load_plan, run_plan, write_results

    plan = load_plan(args.plan)
    result = run_plan(plan)
    prefix = args.out or str(Path(args.plan).with_suffix("")) + "_results"
    csv_path, json_path = write_results(result, prefix)
    log.info("wrote %s and %s", csv_path, json_path)
    print(format_scores(result.scores))
    for msg in result.errors:
        log.error(msg)
    return 0 if result.ok else 1


def cmd_normalize(args) -> int:
    from bigmeans.io import format_float, min_max_normalize, write_csv

    data = min_max_normalize(_load(args))
    if args.output:
        write_csv(data, args.output)
    else:
        for row in data.points:
            sys.stdout.write(",".join(format_float(v) for v in row) + "\n")
    return 0


def cmd_hint(args) -> int:
    from bigmeans.big_means import choose_chunk_size_hint

    data = _load(args)
    if args.k > data.m:
        raise CliConfigError(f"--k {args.k} exceeds the number of points ({data.m})")
    s = choose_chunk_size_hint(data, args.k, args.chunks_per_probe, args.repeats, seed=args.seed)
    print(s)
    return 0


COMMANDS = {
    "cluster": cmd_cluster,
    "bench": cmd_bench,
    "normalize": cmd_normalize,
    "hint-chunk-size": cmd_hint,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = getattr(args, "threads", None)
    args.verbose = getattr(args, "verbose", False)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s: %(message)s")
    try:
        threads = _resolve_threads(args.threads)
        from bigmeans.core import set_num_threads

        set_num_threads(threads)
        return COMMANDS[args.command](args)
    except CliConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:
        from bigmeans.exceptions import ConfigurationError

        if isinstance(exc, ConfigurationError):
            print(f"error: {exc}", file=sys.stderr)
            return 2
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
