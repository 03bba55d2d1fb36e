"""Command-line front end: simulate, track, eval, triplets, sweep.

Exit codes: 0 success, 1 runtime or data error, 2 usage error (bad
flags, bad combinations, missing input files).
"""

from __future__ import annotations

import argparse
import sys
from collections import defaultdict
from pathlib import Path

from . import fileio
from .embedding import (
    INTRA_PLANT_TEMPORAL_WINDOW,
    STRATEGY_KINDS,
    SamplingStrategy,
    sample_triplets,
)
from .metrics import (
    evaluate,
    format_report,
    format_report_machine,
    leaf_accuracy_matrix,
)
from .simulator import generate
from .tracker import TrackerParams, run_sequence, tracked_boxes

_SWEEP_COLUMNS = ("tau_s", "alpha", "mode", "hota", "deta", "assa", "mota", "idf1")


class _UsageError(Exception):
    """Bad invocation that argparse cannot catch; maps to exit code 2."""


def _require_file(path: str) -> str:
    if not Path(path).is_file():
        raise _UsageError(f"no such file: {path}")
    return path


def _cmd_simulate(args) -> int:
    config = fileio.read_scenario_config(_require_file(args.config))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    gt, det, truth_map = generate(config)
    fileio.write_detections(det, out_dir / "det.txt")
    fileio.write_gt(gt, out_dir / "gt.txt")
    fileio.write_truth_map(truth_map, out_dir / "truth_map.txt")
    n_det = sum(len(rows) for rows in det.values())
    print(f"wrote {len(gt)} gt boxes, {n_det} detections to {out_dir}")
    return 0


def _cmd_track(args) -> int:
    frames = fileio.read_detections(_require_file(args.detections))
    if args.params is not None:
        params = fileio.read_tracker_params(_require_file(args.params))
    else:
        params = TrackerParams()
    results = run_sequence(frames, params)
    fileio.write_results(results, args.out)
    created = sum(len(r.new_track_ids) for r in results)
    pruned = sum(len(r.pruned_track_ids) for r in results)
    print(f"tracks created: {created}")
    print(f"tracks pruned: {pruned}")
    return 0


def _cmd_eval(args) -> int:
    gt = fileio.read_gt(_require_file(args.gt))
    pred = fileio.read_results(_require_file(args.results))
    report = evaluate(gt, pred, args.iou)
    if args.machine:
        print(format_report_machine(report))
    else:
        print(format_report(report))
    if args.leaf_matrix is not None:
        matrix = leaf_accuracy_matrix(gt, pred, iou_threshold=args.iou)
        fileio.write_leaf_matrix_csv(matrix, args.leaf_matrix)
    return 0


def _cmd_triplets(args) -> int:
    if args.strategy == INTRA_PLANT_TEMPORAL_WINDOW and args.delta_t is None:
        raise _UsageError(f"--strategy {INTRA_PLANT_TEMPORAL_WINDOW} requires --delta-t")
    if args.strategy != INTRA_PLANT_TEMPORAL_WINDOW and args.delta_t is not None:
        raise _UsageError(f"--delta-t is only valid with --strategy {INTRA_PLANT_TEMPORAL_WINDOW}")
    corpus = {}
    for plant_id, path in enumerate(args.gt_corpus):
        times = defaultdict(set)
        for row in fileio.read_gt(_require_file(path)):
            times[row.leaf_id].add(row.frame)
        corpus[plant_id] = {leaf: sorted(ts) for leaf, ts in times.items()}
    strategy = SamplingStrategy(args.strategy, args.delta_t)
    triplets = sample_triplets(corpus, strategy, args.count, args.seed)
    fileio.write_triplets(triplets, args.out)
    print(f"wrote {len(triplets)} triplets to {args.out}")
    return 0


def _parse_float_list(raw: str, flag: str) -> list[float]:
    try:
        return [float(part) for part in raw.split(",") if part.strip() != ""]
    except ValueError:
        raise _UsageError(f"{flag} expects a comma-separated float list, got {raw!r}") from None


def _cmd_sweep(args) -> int:
    tau_s_values = _parse_float_list(args.tau_s, "--tau-s")
    alpha_values = _parse_float_list(args.alpha, "--alpha")
    modes = [part for part in args.ema_mode.split(",") if part.strip() != ""]
    if not tau_s_values or not alpha_values or not modes:
        raise _UsageError("sweep grid must be non-empty on every axis")
    for mode in modes:
        if mode not in ("ema", "mean"):
            raise _UsageError(f"--ema-mode entries must be 'ema' or 'mean', got {mode!r}")
    frames = fileio.read_detections(_require_file(args.detections))
    gt = fileio.read_gt(_require_file(args.gt))
    lines = [",".join(_SWEEP_COLUMNS)]
    for tau_s in tau_s_values:
        for alpha in alpha_values:
            for mode in modes:
                params = TrackerParams(tau_s=tau_s, alpha=alpha, ema_mode=mode)
                rows = tracked_boxes(run_sequence(frames, params))
                report = evaluate(gt, rows, args.iou)
                lines.append(
                    ",".join(
                        [repr(tau_s), repr(alpha), mode]
                        + [
                            repr(value)
                            for value in (
                                report.hota,
                                report.deta,
                                report.assa,
                                report.mota,
                                report.idf1,
                            )
                        ]
                    )
                )
    text = "\n".join(lines) + "\n"
    if args.out is not None:
        with open(args.out, "w", newline="\n") as handle:
            handle.write(text)
    else:
        print(text, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frond", description="leaf tracking, evaluation, and simulation toolkit"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    simulate = commands.add_parser("simulate", help="synthesize a scenario to files")
    simulate.add_argument("--config", required=True, help="scenario config (key=value lines)")
    simulate.add_argument("--out-dir", required=True, help="directory for det/gt/truth_map files")
    simulate.set_defaults(func=_cmd_simulate)

    track = commands.add_parser("track", help="run the tracker over a detection file")
    track.add_argument("--detections", required=True)
    track.add_argument("--params", default=None, help="tracker config; defaults when omitted")
    track.add_argument("--out", required=True, help="results file to write")
    track.set_defaults(func=_cmd_track)

    evaluate_cmd = commands.add_parser("eval", help="score a results file against ground truth")
    evaluate_cmd.add_argument("--gt", required=True)
    evaluate_cmd.add_argument("--results", required=True)
    evaluate_cmd.add_argument("--iou", type=float, default=0.5)
    evaluate_cmd.add_argument("--machine", action="store_true", help="key=value output")
    evaluate_cmd.add_argument("--leaf-matrix", default=None, help="write per-leaf heatmap CSV here")
    evaluate_cmd.set_defaults(func=_cmd_eval)

    triplets = commands.add_parser("triplets", help="sample training triplets from gt files")
    triplets.add_argument("--gt-corpus", nargs="+", required=True, help="one gt file per plant")
    triplets.add_argument("--strategy", choices=STRATEGY_KINDS, required=True)
    triplets.add_argument("--delta-t", type=int, default=None)
    triplets.add_argument("--count", type=int, required=True)
    triplets.add_argument("--seed", type=int, default=0)
    triplets.add_argument("--out", required=True)
    triplets.set_defaults(func=_cmd_triplets)

    sweep = commands.add_parser("sweep", help="grid-run the tracker and tabulate metrics")
    sweep.add_argument("--detections", required=True)
    sweep.add_argument("--gt", required=True)
    sweep.add_argument("--tau-s", default="0.4", help="comma-separated gate thresholds")
    sweep.add_argument("--alpha", default="0.5", help="comma-separated EMA weights")
    sweep.add_argument("--ema-mode", default="ema", help="comma-separated modes (ema, mean)")
    sweep.add_argument("--iou", type=float, default=0.5)
    sweep.add_argument("--out", default=None, help="CSV path; stdout when omitted")
    sweep.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
