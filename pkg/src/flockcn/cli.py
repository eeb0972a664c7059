"""Command-line front end: cluster one dataset, or sweep a parameter grid.

Outputs are plain CSV/JSON files written deterministically, so two runs
with the same flags and seed produce byte-identical results.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .cluster import ClusterAssignment, extract_clusters, merge_to_target
from .config import RunConfig, VARIANTS
from .data import Dataset, ImputationError, ParseError, impute_missing, load_csv, normalize_minmax
from .dynamics import AgentState, DivergenceError, RunTrace, iterate
from .evaluation import AccuracyReport, score
from .network import build_complex_network, network_statistics

log = logging.getLogger("flockcn")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MAX_ITERS = 2


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


@dataclass
class RunResult:
    """Everything one clustering run produced."""

    config: RunConfig  # resolved values
    state: AgentState
    trace: RunTrace
    pre_merge: ClusterAssignment
    final: ClusterAssignment
    report: AccuracyReport | None


def run_clustering(dataset: Dataset, config: RunConfig) -> RunResult:
    """Impute, iterate, extract clusters, merge if asked, score if labeled."""
    data = impute_missing(dataset, config.seed)
    resolved = config.resolve(data.n_points)
    state, trace = iterate(data, resolved)
    pre_merge = extract_clusters(state.current, resolved.delta)
    final = pre_merge
    if resolved.target_clusters is not None:
        final = merge_to_target(pre_merge, state.current, resolved.target_clusters)
    report = score(final, data.labels) if data.labels is not None else None
    return RunResult(resolved, state, trace, pre_merge, final, report)


def emit_trace(trace: RunTrace, out_dir: str | Path, n_digits: int | None = None) -> None:
    """Write totals.csv and positions.csv for a traced run.

    Refuses runs executed without tracing: their snapshots were never
    recorded, so there is nothing faithful to write.
    """
    if not trace.traced:
        raise ValueError("run was not traced; rerun with tracing enabled to emit a trace")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "totals.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iteration", "total_step_length"])
        for it, total in enumerate(trace.totals_per_iteration, start=1):
            writer.writerow([it, repr(float(total))])
    with open(out_dir / "positions.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        m = trace.snapshots[0].shape[1]
        writer.writerow(["iteration", "point_index"] + [f"x{j}" for j in range(m)])
        for it, snap in enumerate(trace.snapshots, start=1):
            for idx in range(snap.shape[0]):
                writer.writerow([it, idx] + [repr(float(v)) for v in snap[idx]])


def _write_assignment(assignment: ClusterAssignment, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["point_index", "cluster_id"])
        for idx, label in enumerate(assignment.label_of):
            writer.writerow([idx, int(label)])


def _write_json(record: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _metrics_record(dataset: Dataset, result: RunResult) -> dict:
    record = {
        "dataset": {
            "name": dataset.name,
            "n_points": dataset.n_points,
            "n_features": dataset.n_features,
        },
        "config": result.config.as_record(),
        "iterations": result.trace.iterations,
        "converged": result.trace.converged,
        "final_total_step_length": result.trace.totals_per_iteration[-1],
        "clusters_pre_merge": result.pre_merge.cluster_count,
        "clusters_post_merge": result.final.cluster_count,
    }
    if result.report is not None:
        record["evaluation"] = result.report.to_record()
    return record


def cmd_cluster(args: argparse.Namespace) -> int:
    dataset = load_csv(
        args.data,
        label_column=_parse_label_col(args.label_col),
        missing_token=args.missing_token,
        delimiter=args.delimiter,
        has_header=args.header,
    )
    config = _config_from_args(args)
    result = run_clustering(dataset, config)

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_assignment(result.final, out_dir / "assignment.csv")
    _write_json(_metrics_record(dataset, result), out_dir / "metrics.json")
    if result.config.trace:
        emit_trace(result.trace, out_dir)
    if args.network_stats:
        # diagnostics of the network the run started from
        data = impute_missing(dataset, result.config.seed)
        if result.config.normalize:
            data = normalize_minmax(data)
        net = build_complex_network(
            data.points, result.config.k, result.config.r,
            variant=result.config.variant, eta=result.config.eta,
        )
        _write_json(network_statistics(net).to_record(), out_dir / "network_stats.json")

    print(f"{dataset.name}: {result.trace.iterations} iterations, "
          f"converged={result.trace.converged}, "
          f"clusters={result.pre_merge.cluster_count}->{result.final.cluster_count}"
          + (f", accuracy={result.report.accuracy:.4f}" if result.report else ""))
    return EXIT_OK if result.trace.converged else EXIT_MAX_ITERS


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.k_range is None and args.eta_range is None:
        raise UsageError("sweep needs --k-range and/or --eta-range")
    ks = _parse_range(args.k_range, int) if args.k_range else [args.k]
    etas = _parse_range(args.eta_range, float) if args.eta_range else [args.eta]
    if not ks or not etas:
        raise UsageError("empty sweep range")

    dataset = load_csv(
        args.data,
        label_column=_parse_label_col(args.label_col),
        missing_token=args.missing_token,
        delimiter=args.delimiter,
        has_header=args.header,
    )

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = ["variant", "k", "r", "eta", "theta", "seed", "iterations", "converged",
              "clusters_pre_merge", "clusters_post_merge", "accuracy", "status"]
    rows = []
    index = 0
    for k in ks:
        for eta in etas:
            row_seed = int(np.random.SeedSequence([args.seed, index]).generate_state(1)[0])
            config = _config_from_args(args, k=k, eta=eta, seed=row_seed, trace=False)
            try:
                result = run_clustering(dataset, config)
            except (ValueError, DivergenceError) as exc:
                log.warning("k=%s eta=%s failed: %s", k, eta, exc)
                rows.append([args.variant, k, "", repr(float(eta)), repr(float(args.theta)),
                             row_seed, "", "", "", "", "", f"failed: {exc}"])
            else:
                acc = repr(round(result.report.accuracy, 6)) if result.report else ""
                rows.append([
                    result.config.variant, k, result.config.r, repr(float(eta)),
                    repr(float(result.config.theta)), row_seed, result.trace.iterations,
                    result.trace.converged, result.pre_merge.cluster_count,
                    result.final.cluster_count, acc, "ok",
                ])
                log.info("k=%s eta=%s: %s iterations, accuracy=%s", k, eta,
                         result.trace.iterations, acc or "n/a")
            index += 1

    with open(out_dir / "sweep.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)
    print(f"swept {index} runs -> {out_dir / 'sweep.csv'}")
    return EXIT_OK


class UsageError(ValueError):
    """Bad command-line usage detected after parsing."""


def _parse_label_col(text: str | None) -> int | str | None:
    if text is None:
        return None
    try:
        return int(text)
    except ValueError:
        return text


def _parse_range(text: str, cast) -> list:
    """Parse 'start:stop[:step]' (inclusive) or a comma list like '5,8,11'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise UsageError(f"bad range {text!r}; expected start:stop[:step]")
        start, stop = cast(parts[0]), cast(parts[1])
        step = cast(parts[2]) if len(parts) == 3 else cast(1)
        if step <= 0:
            raise UsageError("range step must be positive")
        values = []
        value = start
        while value <= stop + (1e-9 if cast is float else 0):
            values.append(cast(value))
            value += step
        return values
    return [cast(part) for part in text.split(",") if part.strip()]


def _config_from_args(args: argparse.Namespace, **overrides) -> RunConfig:
    base = dict(
        k=args.k,
        variant=args.variant,
        r=args.r,
        eta=args.eta,
        theta=args.theta,
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        seed=args.seed,
        normalize=not args.no_normalize,
        target_clusters=args.target_clusters,
        delta=args.delta,
        trace=getattr(args, "trace", False),
    )
    base.update(overrides)
    return RunConfig(**base)


def _add_common_flags(parser: argparse.ArgumentParser, *, require_k: bool) -> None:
    data = parser.add_argument_group("data")
    data.add_argument("--data", required=True, help="input file (delimiter-separated values)")
    data.add_argument("--label-col", default=None,
                      help="label column: zero-based index (negative from the end) or header name")
    data.add_argument("--missing-token", default="?", help="cell text marking a missing value")
    data.add_argument("--delimiter", default=",", help="field separator (default comma)")
    data.add_argument("--header", action="store_true", help="first row is a header")

    run = parser.add_argument_group("run")
    run.add_argument("--variant", default="flcn2", choices=list(VARIANTS),
                     help="long-range selection variant")
    run.add_argument("--k", type=int, required=require_k, default=None if require_k else 10,
                     help="near-neighbor count")
    run.add_argument("--r", type=int, default=None, help="long-range links per node (default k//2)")
    run.add_argument("--eta", type=float, default=0.1,
                     help="candidate pool fraction for the frozen-pool variant")
    run.add_argument("--theta", type=float, default=0.1, help="separating distance threshold")
    run.add_argument("--epsilon", type=float, default=None,
                     help="convergence threshold on summed step length (default 1e-3 * N * theta)")
    run.add_argument("--max-iters", type=int, default=100, help="iteration budget")
    run.add_argument("--seed", type=int, default=0, help="seed for imputation (and sweep rows)")
    run.add_argument("--no-normalize", action="store_true",
                     help="skip min-max feature scaling")
    run.add_argument("--target-clusters", type=int, default=None,
                     help="merge clusters down to this count")
    run.add_argument("--delta", type=float, default=None,
                     help="linkage distance for cluster extraction (default 2 * theta)")
    parser.add_argument("--out-dir", default="out", help="directory for output files")


def main(argv: list[str] | None = None) -> int:
    parser = _Parser(prog="flockcn", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_cluster = sub.add_parser("cluster", help="cluster one dataset and write results")
    _add_common_flags(p_cluster, require_k=True)
    p_cluster.add_argument("--trace", action="store_true",
                           help="record per-iteration totals and position snapshots")
    p_cluster.add_argument("--network-stats", action="store_true",
                           help="also write diagnostics of the starting network")
    p_cluster.set_defaults(func=cmd_cluster)

    p_sweep = sub.add_parser("sweep", help="run a grid over k and/or eta")
    _add_common_flags(p_sweep, require_k=False)
    p_sweep.add_argument("--k-range", default=None,
                         help="k values: 'start:stop[:step]' or comma list")
    p_sweep.add_argument("--eta-range", default=None,
                         help="eta values: 'start:stop:step' or comma list")
    p_sweep.set_defaults(func=cmd_sweep)

    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ParseError, ImputationError, DivergenceError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
