"""Text formats: round-trips, validation messages, byte determinism."""

import numpy as np
import pytest

from frond import (
    BBox,
    CropRef,
    Detection,
    GtAnnotation,
    Raster,
    ScenarioConfig,
    TrackedBox,
    TrackerParams,
    TripletSpec,
    leaf_accuracy_matrix,
    read_detections,
    read_gt,
    read_ppm,
    read_results,
    read_scenario_config,
    read_tracker_params,
    read_triplets,
    read_truth_map,
    run_sequence,
    write_detections,
    write_gt,
    write_leaf_matrix_csv,
    write_ppm,
    write_results,
    write_triplets,
    write_truth_map,
)


def sample_frames(rng, n_frames=3, per_frame=2, dim=6):
    frames = {}
    for f in range(1, n_frames + 1):
        frames[f] = [
            Detection(
                BBox(*rng.uniform(1.0, 40.0, size=2), *rng.uniform(3.0, 30.0, size=2)),
                float(rng.uniform(0.0, 1.0)),
                rng.normal(size=dim),
            )
            for _ in range(per_frame)
        ]
    return frames


class TestDetectionsFile:
    def test_round_trip_is_exact(self, tmp_path):
        rng = np.random.default_rng(3)
        frames = sample_frames(rng)
        path = tmp_path / "det.txt"
        write_detections(frames, path)
        loaded = read_detections(path)
        assert sorted(loaded) == sorted(frames)
        for f in frames:
            assert len(loaded[f]) == len(frames[f])
            for a, b in zip(frames[f], loaded[f]):
                assert a.box == b.box
                assert a.confidence == b.confidence
                assert np.array_equal(a.embedding, b.embedding)

    def test_header_and_raw_track_column(self, tmp_path):
        path = tmp_path / "det.txt"
        write_detections({1: [Detection(BBox(0, 0, 5, 5), 0.5, np.ones(4))]}, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "#dim=4"
        assert lines[1].split(",")[1] == "-1"

    def test_embeddings_normalized_on_load(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("#dim=2\n1,-1,0.0,0.0,5.0,5.0,0.9,3.0,4.0\n")
        loaded = read_detections(path)
        assert loaded[1][0].embedding == pytest.approx([0.6, 0.8], abs=1e-12)

    def test_missing_header(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("1,-1,0.0,0.0,5.0,5.0,0.9,1.0,0.0\n")
        with pytest.raises(ValueError, match=r"det\.txt:1: missing #dim header"):
            read_detections(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("")
        with pytest.raises(ValueError, match="missing #dim header"):
            read_detections(path)

    def test_field_count_names_line(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("#dim=2\n1,-1,0.0,0.0,5.0,5.0,0.9,1.0,0.0\n1,-1,0.0,0.0,5.0\n")
        with pytest.raises(ValueError, match=r"det\.txt:3: expected 9 fields, got 5"):
            read_detections(path)

    def test_malformed_float_names_line_and_token(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("#dim=2\n1,-1,0.0,zero,5.0,5.0,0.9,1.0,0.0\n")
        with pytest.raises(ValueError, match=r"det\.txt:2: malformed y: 'zero'"):
            read_detections(path)

    def test_non_finite_rejected(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("#dim=2\n1,-1,0.0,0.0,5.0,5.0,nan,1.0,0.0\n")
        with pytest.raises(ValueError, match="non-finite confidence"):
            read_detections(path)

    def test_decreasing_frames_rejected(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text(
            "#dim=2\n2,-1,0.0,0.0,5.0,5.0,0.9,1.0,0.0\n1,-1,0.0,0.0,5.0,5.0,0.9,1.0,0.0\n"
        )
        with pytest.raises(ValueError, match=r"det\.txt:3: frames must be non-decreasing"):
            read_detections(path)

    def test_frame_zero_rejected(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("#dim=2\n0,-1,0.0,0.0,5.0,5.0,0.9,1.0,0.0\n")
        with pytest.raises(ValueError, match="frame indices start at 1"):
            read_detections(path)

    def test_bad_confidence_wrapped_with_line(self, tmp_path):
        path = tmp_path / "det.txt"
        path.write_text("#dim=2\n1,-1,0.0,0.0,5.0,5.0,1.4,1.0,0.0\n")
        with pytest.raises(ValueError, match=r"det\.txt:2: "):
            read_detections(path)

    def test_write_rejects_mixed_dims(self, tmp_path):
        frames = {
            1: [Detection(BBox(0, 0, 5, 5), 0.5, np.ones(4))],
            2: [Detection(BBox(0, 0, 5, 5), 0.5, np.ones(8))],
        }
        with pytest.raises(ValueError, match="mixed embedding dimensions"):
            write_detections(frames, tmp_path / "det.txt")

    def test_write_rejects_empty(self, tmp_path):
        with pytest.raises(ValueError, match="empty detection sequence"):
            write_detections({}, tmp_path / "det.txt")


class TestGtFile:
    def test_round_trip_and_sorting(self, tmp_path):
        rows = [
            GtAnnotation(2, 1, BBox(1.5, 2.25, 8.0, 9.0)),
            GtAnnotation(1, 2, BBox(0.1, 0.2, 3.0, 4.0)),
            GtAnnotation(1, 1, BBox(5.0, 6.0, 7.0, 8.0)),
        ]
        path = tmp_path / "gt.txt"
        write_gt(rows, path)
        loaded = read_gt(path)
        assert loaded == sorted(rows, key=lambda r: (r.frame, r.leaf_id))

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("1,1,0.0,0.0,5.0,5.0\n1,1,9.0,9.0,5.0,5.0\n")
        with pytest.raises(ValueError, match=r"gt\.txt:2: duplicate \(frame, leaf_id\)"):
            read_gt(path)

    def test_field_count(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("1,1,0.0,0.0,5.0\n")
        with pytest.raises(ValueError, match="expected 6 fields, got 5"):
            read_gt(path)

    def test_leaf_id_zero_rejected_with_line(self, tmp_path):
        path = tmp_path / "gt.txt"
        path.write_text("1,0,0.0,0.0,5.0,5.0\n")
        with pytest.raises(ValueError, match=r"gt\.txt:1: "):
            read_gt(path)


class TestResultsFile:
    def test_round_trip(self, tmp_path):
        rows = [
            TrackedBox(1, 2, BBox(0.25, 0.5, 10.0, 12.0)),
            TrackedBox(1, 1, BBox(30.0, 0.5, 10.0, 12.0)),
            TrackedBox(2, 1, BBox(30.5, 0.75, 10.0, 12.0)),
        ]
        path = tmp_path / "res.txt"
        write_results(rows, path)
        assert read_results(path) == sorted(rows, key=lambda r: (r.frame, r.track_id))

    def test_confidence_column_is_literal_one(self, tmp_path):
        path = tmp_path / "res.txt"
        write_results([TrackedBox(1, 1, BBox(0, 0, 5, 5))], path)
        assert path.read_text() == "1,1,0.0,0.0,5.0,5.0,1.0\n"

    def test_accepts_frame_results(self, tmp_path):
        e = np.zeros(4)
        e[0] = 1.0
        frames = {
            1: [Detection(BBox(0, 0, 10, 10), 1.0, e)],
            2: [Detection(BBox(1, 0, 10, 10), 1.0, e)],
        }
        results = run_sequence(frames, TrackerParams())
        path_a = tmp_path / "a.txt"
        path_b = tmp_path / "b.txt"
        write_results(results, path_a)
        write_results(
            [TrackedBox(1, 1, BBox(0, 0, 10, 10)), TrackedBox(2, 1, BBox(1, 0, 10, 10))],
            path_b,
        )
        assert path_a.read_bytes() == path_b.read_bytes()

    def test_track_id_zero_rejected(self, tmp_path):
        path = tmp_path / "res.txt"
        path.write_text("1,0,0.0,0.0,5.0,5.0,1.0\n")
        with pytest.raises(ValueError, match="track ids start at 1"):
            read_results(path)

    def test_duplicate_rejected(self, tmp_path):
        path = tmp_path / "res.txt"
        path.write_text("1,1,0.0,0.0,5.0,5.0,1.0\n1,1,9.0,9.0,5.0,5.0,1.0\n")
        with pytest.raises(ValueError, match="duplicate"):
            read_results(path)


class TestTruthMapFile:
    def test_round_trip(self, tmp_path):
        mapping = {(1, 0): 3, (1, 1): 1, (4, 0): 2}
        path = tmp_path / "map.txt"
        write_truth_map(mapping, path)
        assert read_truth_map(path) == mapping
        assert path.read_text() == "1,0,3\n1,1,1\n4,0,2\n"

    def test_field_count(self, tmp_path):
        path = tmp_path / "map.txt"
        path.write_text("1,0\n")
        with pytest.raises(ValueError, match="expected 3 fields"):
            read_truth_map(path)


class TestTripletsFile:
    def test_round_trip(self, tmp_path):
        rows = [
            TripletSpec(
                anchor=CropRef(0, 2, 5),
                positive=CropRef(0, 2, 9),
                negative=CropRef(1, 4, 5),
            ),
            TripletSpec(
                anchor=CropRef(2, 1, 3),
                positive=CropRef(2, 1, 2),
                negative=CropRef(2, 7, 3),
            ),
        ]
        path = tmp_path / "tri.txt"
        write_triplets(rows, path)
        assert read_triplets(path) == rows
        assert path.read_text().splitlines()[0] == "0,2,5,9,1,4,5"

    def test_constraint_violation_names_line(self, tmp_path):
        path = tmp_path / "tri.txt"
        path.write_text("0,2,5,5,1,4,5\n")
        with pytest.raises(ValueError, match=r"tri\.txt:1: "):
            read_triplets(path)

    def test_same_leaf_negative_rejected(self, tmp_path):
        path = tmp_path / "tri.txt"
        path.write_text("0,2,5,9,0,2,3\n")
        with pytest.raises(ValueError, match=r"tri\.txt:1: "):
            read_triplets(path)


class TestTrackerParamsFile:
    def test_defaults_from_empty_file(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text("")
        assert read_tracker_params(path) == TrackerParams()

    def test_overrides_comments_and_blanks(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text(
            "# tracker settings\n\ntau_s = 0.55\nalpha=0.9\nema_mode = mean\n"
        )
        params = read_tracker_params(path)
        assert params == TrackerParams(tau_s=0.55, alpha=0.9, ema_mode="mean")

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text("tau_x=1\n")
        with pytest.raises(ValueError, match="unknown config key: tau_x"):
            read_tracker_params(path)

    def test_malformed_value_names_key(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text("alpha=fast\n")
        with pytest.raises(ValueError, match="malformed value for alpha: 'fast'"):
            read_tracker_params(path)

    def test_duplicate_key(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text("alpha=0.5\nalpha=0.6\n")
        with pytest.raises(ValueError, match="duplicate key 'alpha'"):
            read_tracker_params(path)

    def test_missing_equals(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text("alpha 0.5\n")
        with pytest.raises(ValueError, match="expected key=value"):
            read_tracker_params(path)

    def test_semantic_error_carries_path(self, tmp_path):
        path = tmp_path / "params.cfg"
        path.write_text("alpha=1.5\n")
        with pytest.raises(ValueError, match=r"params\.cfg: "):
            read_tracker_params(path)


class TestScenarioConfigFile:
    def test_full_parse(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text(
            "n_frames=31\n"
            "n_leaves=8\n"
            "frame_width=256\n"
            "frame_height=256\n"
            "miss_prob=0.05\n"
            "fp_rate=0.4\n"
            "box_jitter_std=1.5\n"
            "conf_lo=0.6\n"
            "conf_hi=0.95\n"
            "embedding_dim=64\n"
            "embedding_noise_std=0.07\n"
            "latent_similarity=0.2\n"
            "rotation_events=16:1.5708,24:-0.3\n"
            "occlusion_windows=1:5:8,2:10:12\n"
            "seed=11\n"
        )
        cfg = read_scenario_config(path)
        assert cfg == ScenarioConfig(
            n_frames=31,
            n_leaves=8,
            frame_width=256,
            frame_height=256,
            miss_prob=0.05,
            fp_rate=0.4,
            box_jitter_std=1.5,
            conf_lo=0.6,
            conf_hi=0.95,
            embedding_dim=64,
            embedding_noise_std=0.07,
            latent_similarity=0.2,
            rotation_events=((16, 1.5708), (24, -0.3)),
            occlusion_windows=((1, 5, 8), (2, 10, 12)),
            seed=11,
        )

    def test_minimal(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text("n_frames=5\nn_leaves=2\n")
        cfg = read_scenario_config(path)
        assert (cfg.n_frames, cfg.n_leaves, cfg.embedding_dim) == (5, 2, 128)

    def test_missing_required(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text("n_frames=5\n")
        with pytest.raises(ValueError, match="missing required key: n_leaves"):
            read_scenario_config(path)

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text("n_frames=5\nn_leaves=2\nwind_speed=3\n")
        with pytest.raises(ValueError, match="unknown config key: wind_speed"):
            read_scenario_config(path)

    def test_malformed_rotation_event(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text("n_frames=5\nn_leaves=2\nrotation_events=16\n")
        with pytest.raises(ValueError, match="malformed value for rotation_events"):
            read_scenario_config(path)

    def test_malformed_occlusion_window(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text("n_frames=5\nn_leaves=2\nocclusion_windows=1:2\n")
        with pytest.raises(ValueError, match="malformed value for occlusion_windows"):
            read_scenario_config(path)

    def test_semantic_error_carries_path(self, tmp_path):
        path = tmp_path / "scene.cfg"
        path.write_text("n_frames=0\nn_leaves=2\n")
        with pytest.raises(ValueError, match=r"scene\.cfg: "):
            read_scenario_config(path)


class TestPpm:
    def test_round_trip_exact_on_eighth_levels(self, tmp_path):
        rng = np.random.default_rng(17)
        levels = rng.integers(0, 256, size=(4, 5, 3))
        raster = Raster(levels / 255.0)
        path = tmp_path / "img.ppm"
        write_ppm(raster, path)
        loaded = read_ppm(path)
        assert np.array_equal(loaded.data, raster.data)
        assert path.read_text().splitlines()[:3] == ["P3", "5 4", "255"]

    def test_comments_ignored(self, tmp_path):
        path = tmp_path / "img.ppm"
        path.write_text("P3 # plain\n# full-line comment\n1 1\n255\n10 20 30\n")
        loaded = read_ppm(path)
        assert loaded.data[0, 0] == pytest.approx([10 / 255, 20 / 255, 30 / 255], abs=0)

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "img.ppm"
        path.write_text("P6\n1 1\n255\n0 0 0\n")
        with pytest.raises(ValueError, match="not a plain PPM"):
            read_ppm(path)

    def test_truncated_samples(self, tmp_path):
        path = tmp_path / "img.ppm"
        path.write_text("P3\n2 1\n255\n0 0 0\n")
        with pytest.raises(ValueError, match="expected 6 samples, got 3"):
            read_ppm(path)

    def test_out_of_range_sample(self, tmp_path):
        path = tmp_path / "img.ppm"
        path.write_text("P3\n1 1\n255\n0 0 300\n")
        with pytest.raises(ValueError, match="sample out of range"):
            read_ppm(path)


class TestLeafMatrixCsv:
    def test_exact_text(self, tmp_path):
        gt = [
            GtAnnotation(1, 1, BBox(0, 0, 10, 10)),
            GtAnnotation(2, 1, BBox(0, 0, 10, 10)),
            GtAnnotation(1, 2, BBox(100, 0, 10, 10)),
        ]
        pred = [
            TrackedBox(1, 1, BBox(0, 0, 10, 10)),
            TrackedBox(2, 1, BBox(0, 2, 10, 10)),
            TrackedBox(1, 2, BBox(100, 0, 10, 10)),
        ]
        path = tmp_path / "matrix.csv"
        write_leaf_matrix_csv(leaf_accuracy_matrix(gt, pred), path)
        assert path.read_text() == "leaf_id,1,2\n1,1,0\n2,1,\n"


class TestWriteDiscipline:
    def test_byte_determinism_and_line_endings(self, tmp_path):
        rng = np.random.default_rng(29)
        frames = sample_frames(rng)
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        write_detections(frames, a)
        write_detections(frames, b)
        data = a.read_bytes()
        assert data == b.read_bytes()
        assert b"\r" not in data
        assert data.endswith(b"\n")

    def test_floats_use_shortest_repr(self, tmp_path):
        path = tmp_path / "gt.txt"
        write_gt([GtAnnotation(1, 1, BBox(0.1, 0.25, 10.0, 7.5))], path)
        assert path.read_text() == "1,1,0.1,0.25,10.0,7.5\n"
