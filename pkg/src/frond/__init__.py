"""frond: appearance-based multi-leaf tracking, evaluation, and simulation.

A tracking-by-detection engine that matches per-frame leaf detections to
a memory bank of prototype embeddings, the metrics to score identity
persistence, triplet sampling for training the underlying embedding, a
synthetic scenario generator, and the text formats tying them together.
"""

from .assignment import (
    Assignment,
    cost_from_similarity,
    gate_assignment,
    hungarian,
    similarity_matrix,
)
from .embedding import (
    CROSS_PLANT_FLEXIBLE,
    INTRA_PLANT_FULL_CYCLE,
    INTRA_PLANT_TEMPORAL_WINDOW,
    CropRef,
    SamplingStrategy,
    TripletSpec,
    cosine_similarity,
    normalize,
    sample_triplets,
    triplet_margin_loss,
)
from .fileio import (
    read_detections,
    read_gt,
    read_ppm,
    read_results,
    read_scenario_config,
    read_tracker_params,
    read_triplets,
    read_truth_map,
    write_detections,
    write_gt,
    write_leaf_matrix_csv,
    write_ppm,
    write_results,
    write_triplets,
    write_truth_map,
)
from .geometry import BBox, Raster, crop_and_resize, iou, iou_matrix
from .metrics import (
    CELL_ABSENT,
    CELL_CORRECT,
    CELL_FAILURE,
    GtAnnotation,
    LeafAccuracyMatrix,
    MatchTable,
    MetricReport,
    ass_a,
    daily_accuracy,
    det_a,
    evaluate,
    evaluate_sequences,
    format_report,
    format_report_machine,
    hota,
    id_switches,
    idf1,
    leaf_accuracy_matrix,
    match_frames,
    merge_match_tables,
    mota,
    report_from_table,
)
from .simulator import (
    LeafModel,
    ScenarioConfig,
    baseline_iou_tracker,
    generate,
    logistic_area,
)
from .tracker import (
    Detection,
    FrameResult,
    MemoryBank,
    Track,
    TrackedBox,
    TrackerParams,
    init_bank,
    run_sequence,
    step,
    tracked_boxes,
)

__version__ = "0.1.0"

__all__ = [
    "Assignment",
    "BBox",
    "CELL_ABSENT",
    "CELL_CORRECT",
    "CELL_FAILURE",
    "CROSS_PLANT_FLEXIBLE",
    "CropRef",
    "Detection",
    "FrameResult",
    "GtAnnotation",
    "INTRA_PLANT_FULL_CYCLE",
    "INTRA_PLANT_TEMPORAL_WINDOW",
    "LeafAccuracyMatrix",
    "LeafModel",
    "MatchTable",
    "MemoryBank",
    "MetricReport",
    "Raster",
    "SamplingStrategy",
    "ScenarioConfig",
    "Track",
    "TrackedBox",
    "TrackerParams",
    "TripletSpec",
    "ass_a",
    "baseline_iou_tracker",
    "cosine_similarity",
    "cost_from_similarity",
    "crop_and_resize",
    "daily_accuracy",
    "det_a",
    "evaluate",
    "evaluate_sequences",
    "format_report",
    "format_report_machine",
    "gate_assignment",
    "generate",
    "hota",
    "hungarian",
    "id_switches",
    "idf1",
    "init_bank",
    "iou",
    "iou_matrix",
    "leaf_accuracy_matrix",
    "logistic_area",
    "match_frames",
    "merge_match_tables",
    "mota",
    "normalize",
    "read_detections",
    "read_gt",
    "read_ppm",
    "read_results",
    "read_scenario_config",
    "read_tracker_params",
    "read_triplets",
    "read_truth_map",
    "report_from_table",
    "run_sequence",
    "sample_triplets",
    "similarity_matrix",
    "step",
    "tracked_boxes",
    "triplet_margin_loss",
    "write_detections",
    "write_gt",
    "write_leaf_matrix_csv",
    "write_ppm",
    "write_results",
    "write_triplets",
    "write_truth_map",
]
