"""Line-oriented text formats: detections, ground truth, tracker results,
truth maps, triplet lists, key-value configs, plain PPM images, and the
per-leaf accuracy CSV.

Floats are written with shortest round-trip formatting, files end with a
trailing newline, and line endings are always LF, so equal inputs produce
byte-identical files.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .embedding import CropRef, TripletSpec
from .geometry import BBox, Raster
from .metrics import CELL_ABSENT, CELL_CORRECT, GtAnnotation, LeafAccuracyMatrix
from .simulator import ScenarioConfig
from .tracker import Detection, FrameResult, TrackedBox, TrackerParams, tracked_boxes

_HEADER_RE = re.compile(r"#dim=(\d+)$")


def _fmt(value: float) -> str:
    return repr(float(value))


def _parse_int(token: str, path, lineno: int, what: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise ValueError(f"{path}:{lineno}: malformed {what}: {token!r}") from None


def _parse_float(token: str, path, lineno: int, what: str) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ValueError(f"{path}:{lineno}: malformed {what}: {token!r}") from None
    if not np.isfinite(value):
        raise ValueError(f"{path}:{lineno}: non-finite {what}: {token!r}")
    return value


def _write_lines(path, lines: list[str]) -> None:
    with open(path, "w", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n" if lines else "")


# ---------------------------------------------------------------------------
# detections: "#dim=D" header, then frame,track_id,x,y,w,h,conf,e_1..e_D
# ---------------------------------------------------------------------------

def read_detections(path) -> dict[int, list[Detection]]:
    """Read a detection file into frame -> detection list.

    Embeddings are L2-normalized on load.  Raw (untracked) rows carry
    track id -1; the id column is validated but otherwise ignored.

    Raises:
        ValueError: naming the offending line on any malformed field,
            a missing header, or decreasing frame indices.
    """
    lines = Path(path).read_text().splitlines()
    if not lines:
        raise ValueError(f"{path}:1: missing #dim header")
    header = _HEADER_RE.match(lines[0].strip())
    if not header:
        raise ValueError(f"{path}:1: missing #dim header, got {lines[0]!r}")
    dim = int(header.group(1))
    if dim < 1:
        raise ValueError(f"{path}:1: embedding dimension must be at least 1")
    frames: dict[int, list[Detection]] = {}
    last_frame = None
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 7 + dim:
            raise ValueError(f"{path}:{lineno}: expected {7 + dim} fields, got {len(fields)}")
        frame = _parse_int(fields[0], path, lineno, "frame")
        if frame < 1:
            raise ValueError(f"{path}:{lineno}: frame indices start at 1, got {frame}")
        if last_frame is not None and frame < last_frame:
            raise ValueError(f"{path}:{lineno}: frames must be non-decreasing")
        last_frame = frame
        _parse_int(fields[1], path, lineno, "track id")
        x = _parse_float(fields[2], path, lineno, "x")
        y = _parse_float(fields[3], path, lineno, "y")
        w = _parse_float(fields[4], path, lineno, "w")
        h = _parse_float(fields[5], path, lineno, "h")
        conf = _parse_float(fields[6], path, lineno, "confidence")
        embedding = np.array(
            [_parse_float(token, path, lineno, "embedding component") for token in fields[7:]]
        )
        try:
            detection = Detection(BBox(x, y, w, h), conf, embedding)
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: {err}") from None
        frames.setdefault(frame, []).append(detection)
    return frames


def write_detections(frames: Mapping[int, list[Detection]], path) -> None:
    """Write a detection sequence; raw rows get track id -1.

    A frame whose detection list is empty produces no lines, so it is
    indistinguishable from an absent frame on read-back.
    """
    dims = {det.embedding.shape[0] for dets in frames.values() for det in dets}
    if len(dims) > 1:
        raise ValueError(f"mixed embedding dimensions: {sorted(dims)}")
    if not dims:
        raise ValueError("empty detection sequence: embedding dimension unknown")
    (dim,) = dims
    lines = [f"#dim={dim}"]
    for frame in sorted(frames):
        for det in frames[frame]:
            box = det.box
            values = [_fmt(box.u), _fmt(box.v), _fmt(box.w), _fmt(box.h), _fmt(det.confidence)]
            values += [_fmt(component) for component in det.embedding]
            lines.append(f"{frame},-1," + ",".join(values))
    _write_lines(path, lines)


# ---------------------------------------------------------------------------
# ground truth: frame,leaf_id,x,y,w,h
# ---------------------------------------------------------------------------

def read_gt(path) -> list[GtAnnotation]:
    """Read ground-truth annotations; (frame, leaf_id) must be unique."""
    rows = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        fields = line.split(",")
        if len(fields) != 6:
            raise ValueError(f"{path}:{lineno}: expected 6 fields, got {len(fields)}")
        frame = _parse_int(fields[0], path, lineno, "frame")
        if frame < 1:
            raise ValueError(f"{path}:{lineno}: frame indices start at 1, got {frame}")
        leaf_id = _parse_int(fields[1], path, lineno, "leaf id")
        if (frame, leaf_id) in seen:
            raise ValueError(f"{path}:{lineno}: duplicate (frame, leaf_id) = ({frame}, {leaf_id})")
        seen.add((frame, leaf_id))
        x = _parse_float(fields[2], path, lineno, "x")
        y = _parse_float(fields[3], path, lineno, "y")
        w = _parse_float(fields[4], path, lineno, "w")
        h = _parse_float(fields[5], path, lineno, "h")
        try:
            rows.append(GtAnnotation(frame, leaf_id, BBox(x, y, w, h)))
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: {err}") from None
    return rows


def write_gt(annotations: Iterable[GtAnnotation], path) -> None:
    rows = sorted(annotations, key=lambda r: (r.frame, r.leaf_id))
    lines = [
        f"{r.frame},{r.leaf_id},{_fmt(r.box.u)},{_fmt(r.box.v)},{_fmt(r.box.w)},{_fmt(r.box.h)}"
        for r in rows
    ]
    _write_lines(path, lines)


# ---------------------------------------------------------------------------
# results: frame,track_id,x,y,w,h,1.0  sorted by (frame, track_id)
# ---------------------------------------------------------------------------

def read_results(path) -> list[TrackedBox]:
    """Read a tracker results file into evaluation rows."""
    rows = []
    seen = set()
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        fields = line.split(",")
        if len(fields) != 7:
            raise ValueError(f"{path}:{lineno}: expected 7 fields, got {len(fields)}")
        frame = _parse_int(fields[0], path, lineno, "frame")
        if frame < 1:
            raise ValueError(f"{path}:{lineno}: frame indices start at 1, got {frame}")
        track_id = _parse_int(fields[1], path, lineno, "track id")
        if track_id < 1:
            raise ValueError(f"{path}:{lineno}: track ids start at 1, got {track_id}")
        if (frame, track_id) in seen:
            raise ValueError(f"{path}:{lineno}: duplicate (frame, track_id) = ({frame}, {track_id})")
        seen.add((frame, track_id))
        x = _parse_float(fields[2], path, lineno, "x")
        y = _parse_float(fields[3], path, lineno, "y")
        w = _parse_float(fields[4], path, lineno, "w")
        h = _parse_float(fields[5], path, lineno, "h")
        _parse_float(fields[6], path, lineno, "confidence")
        try:
            rows.append(TrackedBox(frame, track_id, BBox(x, y, w, h)))
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: {err}") from None
    return rows


def write_results(results, path) -> None:
    """Write tracker output (frame results or evaluation rows) as a results file."""
    rows = list(results)
    if rows and isinstance(rows[0], FrameResult):
        rows = tracked_boxes(rows)
    rows = sorted(rows, key=lambda r: (r.frame, r.track_id))
    lines = [
        f"{r.frame},{r.track_id},{_fmt(r.box.u)},{_fmt(r.box.v)},{_fmt(r.box.w)},{_fmt(r.box.h)},1.0"
        for r in rows
    ]
    _write_lines(path, lines)


# ---------------------------------------------------------------------------
# truth map: frame,det_index,leaf_id
# ---------------------------------------------------------------------------

def read_truth_map(path) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        fields = line.split(",")
        if len(fields) != 3:
            raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
        frame = _parse_int(fields[0], path, lineno, "frame")
        det_index = _parse_int(fields[1], path, lineno, "detection index")
        leaf_id = _parse_int(fields[2], path, lineno, "leaf id")
        if (frame, det_index) in out:
            raise ValueError(f"{path}:{lineno}: duplicate (frame, det_index)")
        out[(frame, det_index)] = leaf_id
    return out


def write_truth_map(truth_map: Mapping[tuple[int, int], int], path) -> None:
    lines = [
        f"{frame},{det_index},{leaf_id}"
        for (frame, det_index), leaf_id in sorted(truth_map.items())
    ]
    _write_lines(path, lines)


# ---------------------------------------------------------------------------
# triplets: plant,leaf,t_a,t_p,neg_plant,neg_leaf,t_n
# ---------------------------------------------------------------------------

def read_triplets(path) -> list[TripletSpec]:
    rows = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        fields = line.split(",")
        if len(fields) != 7:
            raise ValueError(f"{path}:{lineno}: expected 7 fields, got {len(fields)}")
        plant, leaf, t_a, t_p, neg_plant, neg_leaf, t_n = (
            _parse_int(token, path, lineno, "triplet field") for token in fields
        )
        try:
            rows.append(
                TripletSpec(
                    anchor=CropRef(plant, leaf, t_a),
                    positive=CropRef(plant, leaf, t_p),
                    negative=CropRef(neg_plant, neg_leaf, t_n),
                )
            )
        except ValueError as err:
            raise ValueError(f"{path}:{lineno}: {err}") from None
    return rows


def write_triplets(triplets: Iterable[TripletSpec], path) -> None:
    lines = [
        f"{t.anchor.plant_id},{t.anchor.leaf_id},{t.anchor.t},{t.positive.t},"
        f"{t.negative.plant_id},{t.negative.leaf_id},{t.negative.t}"
        for t in triplets
    ]
    _write_lines(path, lines)


# ---------------------------------------------------------------------------
# key=value configs
# ---------------------------------------------------------------------------

def _read_kv(path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key in values:
            raise ValueError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value.strip()
    return values


def _cast(kind, raw: str, key: str, path):
    try:
        return kind(raw)
    except ValueError:
        raise ValueError(f"{path}: malformed value for {key}: {raw!r}") from None


def read_tracker_params(path) -> TrackerParams:
    """Read tracker parameters; unknown keys are an error, missing keys default."""
    schema = {"tau_s": float, "tau_a": int, "alpha": float, "conf_min": float, "ema_mode": str}
    values = _read_kv(path)
    kwargs = {}
    for key, raw in values.items():
        if key not in schema:
            raise ValueError(f"{path}: unknown config key: {key}")
        kwargs[key] = _cast(schema[key], raw, key, path)
    try:
        return TrackerParams(**kwargs)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


def _parse_rotation_events(raw: str, path) -> tuple[tuple[int, float], ...]:
    if not raw:
        return ()
    events = []
    for part in raw.split(","):
        pieces = part.split(":")
        if len(pieces) != 2:
            raise ValueError(f"{path}: malformed value for rotation_events: {part!r}")
        frame = _cast(int, pieces[0], "rotation_events", path)
        angle = _cast(float, pieces[1], "rotation_events", path)
        events.append((frame, angle))
    return tuple(events)


def _parse_occlusion_windows(raw: str, path) -> tuple[tuple[int, int, int], ...]:
    if not raw:
        return ()
    windows = []
    for part in raw.split(","):
        pieces = part.split(":")
        if len(pieces) != 3:
            raise ValueError(f"{path}: malformed value for occlusion_windows: {part!r}")
        windows.append(tuple(_cast(int, piece, "occlusion_windows", path) for piece in pieces))
    return tuple(windows)


def read_scenario_config(path) -> ScenarioConfig:
    """Read a scenario config; n_frames and n_leaves are required."""
    schema = {
        "n_frames": int,
        "n_leaves": int,
        "frame_width": int,
        "frame_height": int,
        "occlusion_prob": float,
        "miss_prob": float,
        "fp_rate": float,
        "box_jitter_std": float,
        "conf_lo": float,
        "conf_hi": float,
        "embedding_dim": int,
        "embedding_noise_std": float,
        "embedding_drift_rate": float,
        "latent_similarity": float,
        "birth_window": int,
        "death_prob": float,
        "seed": int,
    }
    values = _read_kv(path)
    kwargs = {}
    for key, raw in values.items():
        if key == "rotation_events":
            kwargs[key] = _parse_rotation_events(raw, path)
        elif key == "occlusion_windows":
            kwargs[key] = _parse_occlusion_windows(raw, path)
        elif key in schema:
            kwargs[key] = _cast(schema[key], raw, key, path)
        else:
            raise ValueError(f"{path}: unknown config key: {key}")
    for required in ("n_frames", "n_leaves"):
        if required not in kwargs:
            raise ValueError(f"{path}: missing required key: {required}")
    try:
        return ScenarioConfig(**kwargs)
    except ValueError as err:
        raise ValueError(f"{path}: {err}") from None


# ---------------------------------------------------------------------------
# plain PPM (P3) images
# ---------------------------------------------------------------------------

def write_ppm(raster: Raster, path) -> None:
    """Write a raster as a plain (ASCII, P3) PPM with maxval 255."""
    levels = np.clip(np.rint(raster.data * 255.0), 0, 255).astype(int)
    lines = ["P3", f"{raster.width} {raster.height}", "255"]
    for row in levels:
        lines.append(" ".join(str(v) for v in row.reshape(-1)))
    _write_lines(path, lines)


def read_ppm(path) -> Raster:
    """Read a plain (P3) PPM; samples scale to [0, 1] by the file's maxval."""
    text = Path(path).read_text()
    tokens = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P3":
        raise ValueError(f"{path}: not a plain PPM (P3) file")
    try:
        width, height, maxval = (int(t) for t in tokens[1:4])
        samples = np.array([int(t) for t in tokens[4:]], dtype=np.float64)
    except ValueError:
        raise ValueError(f"{path}: malformed PPM token") from None
    if width < 1 or height < 1 or maxval < 1:
        raise ValueError(f"{path}: bad PPM dimensions {width}x{height} maxval {maxval}")
    if samples.size != width * height * 3:
        raise ValueError(
            f"{path}: expected {width * height * 3} samples, got {samples.size}"
        )
    if samples.min() < 0 or samples.max() > maxval:
        raise ValueError(f"{path}: sample out of range [0, {maxval}]")
    return Raster(samples.reshape(height, width, 3) / maxval)


# ---------------------------------------------------------------------------
# per-leaf accuracy heatmap CSV
# ---------------------------------------------------------------------------

def write_leaf_matrix_csv(matrix: LeafAccuracyMatrix, path) -> None:
    """One row per leaf, one column per frame; 1 correct, 0 failure, empty absent."""
    lines = ["leaf_id," + ",".join(str(frame) for frame in matrix.frames)]
    for i, leaf_id in enumerate(matrix.leaf_ids):
        cells = []
        for value in matrix.cells[i]:
            if value == CELL_ABSENT:
                cells.append("")
            elif value == CELL_CORRECT:
                cells.append("1")
            else:
                cells.append("0")
        lines.append(f"{leaf_id}," + ",".join(cells))
    _write_lines(path, lines)
