"""Detection and association quality metrics for identity-labeled box sequences.

All metrics run at a single localization threshold: a prediction counts
as a true positive only where a per-frame minimum-cost matching pairs it
with a ground-truth box at IoU >= iou_threshold.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .assignment import hungarian
from .geometry import BBox, iou_matrix
from .tracker import TrackedBox

# Forbidden pairs (IoU below threshold) get this cost.  It dwarfs any sum
# of real costs, so the solver first maximizes the number of admissible
# pairs and only then minimizes cost among them.
_FORBIDDEN = 1.0e6

CELL_CORRECT = 1
CELL_FAILURE = 0
CELL_ABSENT = -1


@dataclass(frozen=True)
class GtAnnotation:
    """Ground-truth box for one leaf in one frame."""

    frame: int
    leaf_id: int
    box: BBox

    def __post_init__(self):
        if self.leaf_id < 1:
            raise ValueError(f"leaf ids start at 1, got {self.leaf_id}")


@dataclass
class MatchTable:
    """Per-frame localization outcomes.

    matches maps frame -> [(gt_id, pred_id, iou)] for true positives;
    misses and false_alarms list the frame's unmatched gt and pred ids.
    """

    frames: list
    matches: dict
    misses: dict
    false_alarms: dict

    @property
    def tp(self) -> int:
        return sum(len(rows) for rows in self.matches.values())

    @property
    def fn(self) -> int:
        return sum(len(ids) for ids in self.misses.values())

    @property
    def fp(self) -> int:
        return sum(len(ids) for ids in self.false_alarms.values())


def match_frames(
    gt: Iterable[GtAnnotation],
    pred: Iterable[TrackedBox],
    iou_threshold: float = 0.5,
) -> MatchTable:
    """Match ground truth against predictions frame by frame.

    Within each frame a minimum-cost assignment on (1 - IoU) runs over
    pairs with IoU >= iou_threshold; surviving pairs are true positives,
    leftover gt are misses, leftover predictions are false alarms.

    Raises:
        ValueError: on a duplicated (frame, id) on either side, or an
            iou_threshold outside (0, 1].
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must lie in (0, 1], got {iou_threshold}")
    gt_by_frame: dict = defaultdict(list)
    for row in gt:
        if any(row.leaf_id == other.leaf_id for other in gt_by_frame[row.frame]):
            raise ValueError(f"duplicate ground-truth id {row.leaf_id} in frame {row.frame}")
        gt_by_frame[row.frame].append(row)
    pred_by_frame: dict = defaultdict(list)
    for row in pred:
        if any(row.track_id == other.track_id for other in pred_by_frame[row.frame]):
            raise ValueError(f"duplicate prediction id {row.track_id} in frame {row.frame}")
        pred_by_frame[row.frame].append(row)

    frames = sorted(set(gt_by_frame) | set(pred_by_frame))
    matches: dict = {}
    misses: dict = {}
    false_alarms: dict = {}
    for frame in frames:
        g_rows = gt_by_frame.get(frame, [])
        p_rows = pred_by_frame.get(frame, [])
        frame_matches = []
        matched_g: set = set()
        matched_p: set = set()
        if g_rows and p_rows:
            overlap = iou_matrix([r.box for r in g_rows], [r.box for r in p_rows])
            eligible = overlap >= iou_threshold
            if eligible.any():
                cost = np.where(eligible, 1.0 - overlap, _FORBIDDEN)
                for gi, pj in hungarian(cost).pairs:
                    if eligible[gi, pj]:
                        frame_matches.append(
                            (g_rows[gi].leaf_id, p_rows[pj].track_id, float(overlap[gi, pj]))
                        )
                        matched_g.add(gi)
                        matched_p.add(pj)
        matches[frame] = frame_matches
        misses[frame] = sorted(r.leaf_id for i, r in enumerate(g_rows) if i not in matched_g)
        false_alarms[frame] = sorted(
            r.track_id for j, r in enumerate(p_rows) if j not in matched_p
        )
    return MatchTable(frames=frames, matches=matches, misses=misses, false_alarms=false_alarms)


def det_a(table: MatchTable) -> float:
    """Detection accuracy TP / (TP + FP + FN); vacuously 1.0 on empty input."""
    tp, fp, fn = table.tp, table.fp, table.fn
    if tp + fp + fn == 0:
        return 1.0
    return tp / (tp + fp + fn)


def _establishment(table: MatchTable) -> dict:
    """First frame each prediction id appears in, matched or not."""
    first: dict = {}
    for frame in table.frames:
        for _, pred_id, _ in table.matches[frame]:
            first.setdefault(pred_id, frame)
        for pred_id in table.false_alarms[frame]:
            first.setdefault(pred_id, frame)
    return first


def _majority_bijection(table: MatchTable) -> dict:
    """One-to-one gt -> pred map from majority vote over true positives.

    Candidate pairs are taken in order of descending match count; count
    ties prefer the earlier-established prediction id.  Each gt and each
    pred id is used at most once.
    """
    counts: dict = defaultdict(int)
    for frame in table.frames:
        for gt_id, pred_id, _ in table.matches[frame]:
            counts[(gt_id, pred_id)] += 1
    established = _establishment(table)
    ranked = sorted(
        counts.items(),
        key=lambda item: (-item[1], established[item[0][1]], item[0][0], item[0][1]),
    )
    bijection: dict = {}
    used_preds: set = set()
    for (gt_id, pred_id), _ in ranked:
        if gt_id in bijection or pred_id in used_preds:
            continue
        bijection[gt_id] = pred_id
        used_preds.add(pred_id)
    return bijection


def ass_a(table: MatchTable) -> float:
    """Association accuracy under the majority-vote identity bijection.

    Each frame with at least one TP contributes the fraction of its TPs
    whose (gt, pred) pair agrees with the bijection; frames without TPs
    are skipped.  Returns 0.0 when no TP exists at all.
    """
    bijection = _majority_bijection(table)
    ratios = []
    for frame in table.frames:
        rows = table.matches[frame]
        if not rows:
            continue
        agree = sum(1 for gt_id, pred_id, _ in rows if bijection.get(gt_id) == pred_id)
        ratios.append(agree / len(rows))
    if not ratios:
        return 0.0
    return sum(ratios) / len(ratios)


def hota(table: MatchTable) -> float:
    """Geometric mean of detection and association accuracy."""
    return math.sqrt(det_a(table) * ass_a(table))


def id_switches(table: MatchTable) -> int:
    """Count TPs whose prediction id differs from the gt's most recent prior TP."""
    switches = 0
    last_pred: dict = {}
    for frame in table.frames:
        for gt_id, pred_id, _ in table.matches[frame]:
            if gt_id in last_pred and last_pred[gt_id] != pred_id:
                switches += 1
            last_pred[gt_id] = pred_id
    return switches


def mota(table: MatchTable) -> float:
    """1 - (FN + FP + IDSW) / total gt detections; unclamped, may go negative.

    Raises:
        ValueError: on empty ground truth.
    """
    total_gt = table.tp + table.fn
    if total_gt == 0:
        raise ValueError("empty ground truth")
    return 1.0 - (table.fn + table.fp + id_switches(table)) / total_gt


def _idf1_counts(table: MatchTable):
    """(idtp, idfp, idfn, bijection) under the optimal identity bijection.

    The bijection maximizes the summed per-pair TP counts (minimum-cost
    assignment on negated counts).
    """
    counts: dict = defaultdict(int)
    for frame in table.frames:
        for gt_id, pred_id, _ in table.matches[frame]:
            counts[(gt_id, pred_id)] += 1
    total_gt = table.tp + table.fn
    total_pred = table.tp + table.fp
    bijection: dict = {}
    idtp = 0
    if counts:
        gt_ids = sorted({g for g, _ in counts})
        pred_ids = sorted({p for _, p in counts})
        gt_index = {g: i for i, g in enumerate(gt_ids)}
        pred_index = {p: j for j, p in enumerate(pred_ids)}
        matrix = np.zeros((len(gt_ids), len(pred_ids)))
        for (g, p), c in counts.items():
            matrix[gt_index[g], pred_index[p]] = c
        for gi, pj in hungarian(-matrix).pairs:
            if matrix[gi, pj] > 0:
                bijection[gt_ids[gi]] = pred_ids[pj]
                idtp += int(matrix[gi, pj])
    return idtp, total_pred - idtp, total_gt - idtp, bijection


def idf1(table: MatchTable) -> float:
    """Identity F1: 2*IDTP / (2*IDTP + IDFP + IDFN); 1.0 on fully empty input."""
    idtp, idfp, idfn, _ = _idf1_counts(table)
    if idtp + idfp + idfn == 0:
        return 1.0
    return 2.0 * idtp / (2.0 * idtp + idfp + idfn)


@dataclass(frozen=True)
class MetricReport:
    """All five metrics plus the underlying counts for one evaluation."""

    hota: float
    deta: float
    assa: float
    mota: float
    idf1: float
    tp: int
    fp: int
    fn: int
    idsw: int
    idtp: int
    idfp: int
    idfn: int


def report_from_table(table: MatchTable) -> MetricReport:
    deta = det_a(table)
    assa = ass_a(table)
    idtp, idfp, idfn, _ = _idf1_counts(table)
    return MetricReport(
        hota=math.sqrt(deta * assa),
        deta=deta,
        assa=assa,
        mota=mota(table),
        idf1=idf1(table),
        tp=table.tp,
        fp=table.fp,
        fn=table.fn,
        idsw=id_switches(table),
        idtp=idtp,
        idfp=idfp,
        idfn=idfn,
    )


def evaluate(
    gt: Iterable[GtAnnotation],
    pred: Iterable[TrackedBox],
    iou_threshold: float = 0.5,
) -> MetricReport:
    """Match one sequence and compute every metric."""
    return report_from_table(match_frames(gt, pred, iou_threshold))


def merge_match_tables(tables: Sequence[MatchTable]) -> MatchTable:
    """Pool several sequences into one table for aggregate metrics.

    Frame keys and identity labels are namespaced by sequence position,
    so identical frame indices or ids in different sequences stay
    distinct.  Counts pool; association terms average over the union of
    steps.
    """
    frames = []
    matches: dict = {}
    misses: dict = {}
    false_alarms: dict = {}
    for seq_index, table in enumerate(tables):
        for frame in table.frames:
            key = (seq_index, frame)
            frames.append(key)
            matches[key] = [
                ((seq_index, g), (seq_index, p), ov) for g, p, ov in table.matches[frame]
            ]
            misses[key] = [(seq_index, g) for g in table.misses[frame]]
            false_alarms[key] = [(seq_index, p) for p in table.false_alarms[frame]]
    return MatchTable(frames=frames, matches=matches, misses=misses, false_alarms=false_alarms)


def evaluate_sequences(
    pairs: Sequence[tuple[Iterable[GtAnnotation], Iterable[TrackedBox]]],
    iou_threshold: float = 0.5,
) -> MetricReport:
    """Evaluate several (gt, pred) sequences pooled into one report."""
    tables = [match_frames(gt, pred, iou_threshold) for gt, pred in pairs]
    return report_from_table(merge_match_tables(tables))


@dataclass
class LeafAccuracyMatrix:
    """Per-leaf, per-frame tracking outcome grid.

    cells[i, j] is CELL_CORRECT, CELL_FAILURE, or CELL_ABSENT for leaf
    leaf_ids[i] at frames[j].
    """

    leaf_ids: list[int]
    frames: list[int]
    cells: np.ndarray


def leaf_accuracy_matrix(
    gt: Iterable[GtAnnotation],
    pred: Iterable[TrackedBox],
    iou_min: float = 0.75,
    iou_threshold: float = 0.5,
) -> LeafAccuracyMatrix:
    """Grade every annotated leaf-frame cell.

    A cell is correct when its TP match carries the leaf's persistent
    identity (the idf1 bijection) and overlaps at IoU >= iou_min; any
    other annotated cell is a failure; unannotated cells are absent.
    """
    gt = list(gt)
    table = match_frames(gt, list(pred), iou_threshold)
    _, _, _, bijection = _idf1_counts(table)
    leaf_ids = sorted({row.leaf_id for row in gt})
    frames = list(table.frames)
    row_of = {leaf: i for i, leaf in enumerate(leaf_ids)}
    col_of = {frame: j for j, frame in enumerate(frames)}
    cells = np.full((len(leaf_ids), len(frames)), CELL_ABSENT, dtype=np.int8)
    for row in gt:
        cells[row_of[row.leaf_id], col_of[row.frame]] = CELL_FAILURE
    for frame in frames:
        for gt_id, pred_id, overlap in table.matches[frame]:
            if bijection.get(gt_id) == pred_id and overlap >= iou_min:
                cells[row_of[gt_id], col_of[frame]] = CELL_CORRECT
    return LeafAccuracyMatrix(leaf_ids=leaf_ids, frames=frames, cells=cells)


def daily_accuracy(matrix: LeafAccuracyMatrix) -> dict[int, float]:
    """Fraction of graded leaves correct per frame.

    Frames where every leaf is absent have no defined value and are left
    out of the result.
    """
    out: dict[int, float] = {}
    for j, frame in enumerate(matrix.frames):
        column = matrix.cells[:, j]
        graded = int(np.sum(column != CELL_ABSENT))
        if graded:
            out[frame] = int(np.sum(column == CELL_CORRECT)) / graded
    return out


def format_report(report: MetricReport) -> str:
    """Human-readable report: metric values as percent, two decimals."""
    lines = [
        f"HOTA  {report.hota * 100.0:6.2f}",
        f"DetA  {report.deta * 100.0:6.2f}",
        f"AssA  {report.assa * 100.0:6.2f}",
        f"MOTA  {report.mota * 100.0:6.2f}",
        f"IDF1  {report.idf1 * 100.0:6.2f}",
        f"TP={report.tp} FP={report.fp} FN={report.fn} IDSW={report.idsw}",
        f"IDTP={report.idtp} IDFP={report.idfp} IDFN={report.idfn}",
    ]
    return "\n".join(lines)


def format_report_machine(report: MetricReport) -> str:
    """Line-oriented key=value report with raw fractions at full precision."""
    parts = [
        ("hota", report.hota),
        ("deta", report.deta),
        ("assa", report.assa),
        ("mota", report.mota),
        ("idf1", report.idf1),
        ("tp", report.tp),
        ("fp", report.fp),
        ("fn", report.fn),
        ("idsw", report.idsw),
        ("idtp", report.idtp),
        ("idfp", report.idfp),
        ("idfn", report.idfn),
    ]
    return "\n".join(f"{key}={value!r}" for key, value in parts)
