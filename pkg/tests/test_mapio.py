"""On-disk formats: 16-bit PGM maps, CSV grids, manifests, metrics
tables, and the radar SVG. Everything here must be byte-deterministic.
"""

from __future__ import annotations

import math
import struct

import numpy as np
import pytest

from conftest import random_map
from gazekit import (
    CurationManifest,
    FixationMap,
    FramePair,
    MANIFEST_HEADER,
    MEAN_ROW_ID,
    METRICS_HEADER,
    RADAR_AXES,
    GazeMap,
    is_map_file,
    load_fixations,
    load_grid,
    load_map,
    manifest_rows,
    read_manifest_rows,
    read_metrics_table,
    render_radar,
    save_fixations,
    save_map,
    write_manifest,
    write_manifest_rows,
    write_metrics_table,
)


def make_pair(video, anchor, target, peak=1.5, pair_kl=2.5):
    return FramePair(
        video_id=video,
        anchor=anchor,
        target=target,
        delta=target - anchor,
        anchor_peak_kl=peak,
        pair_kl=pair_kl,
    )


class TestPGM16:
    @pytest.mark.parametrize("side", [4, 16, 64])
    def test_round_trip_within_one_quantum(self, tmp_path, rng, side):
        original = random_map(rng, side, side)
        path = tmp_path / "m.pgm"
        save_map(path, original)
        loaded = load_map(path)
        assert np.abs(loaded.values - original.values).max() <= 1.0 / 65535.0

    def test_point_mass_survives_exactly(self, tmp_path):
        v = np.zeros((5, 5))
        v[2, 3] = 1.0
        path = tmp_path / "d.pgm"
        save_map(path, GazeMap(v))
        np.testing.assert_array_equal(load_map(path).values, v)

    def test_written_header_and_scaling(self, tmp_path, rng):
        gaze = random_map(rng, 3, 7)
        path = tmp_path / "m.pgm"
        save_map(path, gaze)
        data = path.read_bytes()
        assert data.startswith(b"P5\n7 3\n65535\n")
        raster = np.frombuffer(data[len(b"P5\n7 3\n65535\n") :], dtype=">u2")
        assert raster.shape == (21,)
        assert raster.max() == 65535  # the peak cell is always full scale

    def test_header_comments_and_whitespace(self, tmp_path):
        samples = struct.pack(">4H", 1, 2, 3, 65280)
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5 # magic\n# full comment line\n2\t2 # dims\r\n65535\n" + samples)
        np.testing.assert_array_equal(load_grid(path), [[1.0, 2.0], [3.0, 65280.0]])

    def test_samples_are_big_endian(self, tmp_path):
        path = tmp_path / "e.pgm"
        path.write_bytes(b"P5\n2 1\n65535\n" + bytes([0x00, 0x01, 0xFF, 0x00]))
        np.testing.assert_array_equal(load_grid(path), [[1.0, 65280.0]])

    def test_rejects_other_pgm_flavors(self, tmp_path):
        bad_magic = tmp_path / "a.pgm"
        bad_magic.write_bytes(b"P2\n2 1\n65535\n1 2\n")
        with pytest.raises(ValueError, match="magic"):
            load_grid(bad_magic)
        eight_bit = tmp_path / "b.pgm"
        eight_bit.write_bytes(b"P5\n2 1\n255\n" + bytes([1, 2]))
        with pytest.raises(ValueError, match="maxval"):
            load_grid(eight_bit)

    def test_rejects_truncated_raster(self, tmp_path):
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n2 2\n65535\n" + bytes([0, 1, 0, 2]))
        with pytest.raises(ValueError, match="raster"):
            load_grid(path)

    def test_suffix_dispatch(self):
        assert is_map_file("x/y/map.pgm")
        assert is_map_file("MAP.CSV")
        assert not is_map_file("frame.png")


class TestCSVGrid:
    def test_round_trip_is_exact(self, tmp_path, rng):
        original = random_map(rng, 6, 9)
        path = tmp_path / "m.csv"
        save_map(path, original)
        np.testing.assert_array_equal(load_map(path).values, original.values)

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "g.csv"
        path.write_text("0.25,0.25\n\n0.25,0.25\n\n")
        np.testing.assert_array_equal(load_map(path).values, np.full((2, 2), 0.25))

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "r.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError, match="ragged"):
            load_grid(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("\n\n")
        with pytest.raises(ValueError, match="no rows"):
            load_grid(path)

    def test_fixation_threshold_rule(self, tmp_path):
        path = tmp_path / "f.csv"
        path.write_text("0.0,0.4\n0.6,1.0\n")
        fix = load_fixations(path)
        np.testing.assert_array_equal(fix.fixated, [[False, False], [True, True]])

    def test_fixation_round_trip(self, tmp_path, rng):
        fix = FixationMap(rng.uniform(size=(5, 5)) > 0.7)
        path = tmp_path / "f.csv"
        save_fixations(path, fix)
        np.testing.assert_array_equal(load_fixations(path).fixated, fix.fixated)


class TestManifestIO:
    def test_round_trip(self, tmp_path):
        manifest = CurationManifest(
            pairs=(make_pair("va", 9, 12), make_pair("vb", 30, 41, peak=0.75, pair_kl=1.25)),
            video_counts=(("va", 1), ("vb", 1)),
        )
        path = tmp_path / "pairs.csv"
        write_manifest(path, manifest)
        header, rows = read_manifest_rows(path)
        assert tuple(header) == MANIFEST_HEADER
        assert [r["video_id"] for r in rows] == ["va", "vb"]
        assert rows[0]["anchor"] == "9" and rows[0]["target"] == "12"
        assert rows[0]["delta"] == "3"
        assert rows[1]["pair_kl"] == "1.25"
        assert all(r["caption"] == "" for r in rows)

    def test_frame_paths_fill_the_path_columns(self):
        manifest = CurationManifest(pairs=(make_pair("v", 1, 4),), video_counts=(("v", 1),))
        paths = {"v": [f"v/f{i}.pgm" for i in range(6)]}
        rows = manifest_rows(manifest, frame_paths=paths)
        assert rows[0]["anchor_map_path"] == "v/f1.pgm"
        assert rows[0]["target_map_path"] == "v/f4.pgm"

    def test_extra_columns_append_after_the_base_header(self, tmp_path):
        rows = manifest_rows(
            CurationManifest(pairs=(make_pair("v", 1, 4),), video_counts=(("v", 1),))
        )
        rows[0]["decision"] = "accept"
        path = tmp_path / "reviewed.csv"
        write_manifest_rows(path, rows, extra_columns=("decision",))
        header, back = read_manifest_rows(path)
        assert tuple(header) == MANIFEST_HEADER + ("decision",)
        assert back[0]["decision"] == "accept"

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            read_manifest_rows(path)

    def test_lf_only_bytes(self, tmp_path):
        path = tmp_path / "pairs.csv"
        write_manifest(
            path,
            CurationManifest(pairs=(make_pair("v", 1, 4),), video_counts=(("v", 1),)),
        )
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.endswith(b"\n")


class TestMetricsTable:
    def test_mean_row_and_formatting(self, tmp_path):
        path = tmp_path / "metrics.csv"
        write_metrics_table(
            path,
            [
                ("f0", {"cc": 1.0, "kl": 0.25, "sim": 0.5, "auc_j": 1.0, "auc_b": 0.75, "nss": 2.0}),
                ("f1", {"cc": 0.5, "kl": 0.75, "sim": 1.0, "auc_j": 0.5, "auc_b": 0.25, "nss": 1.0}),
            ],
        )
        rows, mean = read_metrics_table(path)
        assert [r["id"] for r in rows] == ["f0", "f1"]
        assert mean["id"] == MEAN_ROW_ID
        assert mean["cc"] == 0.75 and mean["kl"] == 0.5 and mean["nss"] == 1.5

    def test_error_cells_are_passed_through_and_skipped_in_means(self, tmp_path):
        path = tmp_path / "metrics.csv"
        write_metrics_table(
            path,
            [
                ("f0", {"cc": 1.0, "kl": 0.5, "sim": 1.0, "auc_j": "skipped", "auc_b": "skipped", "nss": "ZeroVariance"}),
                ("f1", {"cc": 0.0, "kl": 1.5, "sim": 0.0, "auc_j": "skipped", "auc_b": "skipped", "nss": "skipped"}),
            ],
        )
        rows, mean = read_metrics_table(path)
        assert rows[0]["nss"] == "ZeroVariance"
        assert mean["cc"] == 0.5
        assert mean["auc_j"] == "NA"  # no finite value in the column

    def test_nine_significant_digits(self, tmp_path):
        path = tmp_path / "metrics.csv"
        value = 1.0 / 3.0
        write_metrics_table(
            path,
            [("f0", {"cc": value, "kl": value, "sim": value, "auc_j": value, "auc_b": value, "nss": value})],
        )
        text = path.read_text()
        assert "0.333333333," in text
        assert "0.3333333333" not in text

    def test_missing_mean_row_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text(",".join(METRICS_HEADER) + "\nf0,1,0,1,1,1,1\n")
        with pytest.raises(ValueError, match="mean"):
            read_metrics_table(path)

    def test_deterministic_bytes(self, tmp_path):
        rows = [("f0", {"cc": 0.1, "kl": 0.2, "sim": 0.3, "auc_j": 0.4, "auc_b": 0.5, "nss": 0.6})]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_metrics_table(a, rows)
        write_metrics_table(b, rows)
        assert a.read_bytes() == b.read_bytes()


def radar_means(**columns):
    """Expand {column: [per-model values]} into per-model dicts."""
    n = len(next(iter(columns.values())))
    return [{col: values[i] for col, values in columns.items()} for i in range(n)]


class TestRadar:
    BASE = dict(cc=[0.2, 0.8], sim=[0.3, 0.9], nss=[1.0, 2.0],
                auc_j=[0.6, 0.9], auc_b=[0.55, 0.85], kl=[1.2, 0.4])

    def test_dominating_model_hits_the_rim(self):
        svg, degenerate = render_radar(["weak", "strong"], radar_means(**self.BASE))
        assert degenerate == []
        radius = 190.0
        cx, cy = 260.0, 270.0
        # Axis 0 (CC) points straight up; the strong model is at the rim
        # and the weak one at the center on every axis, KL included.
        assert f'points="{cx:.17g},{cy:.17g}' in svg  # weak polygon collapses to the center
        assert f"{cx:.17g},{(cy - radius):.17g}" in svg  # strong polygon on top of the CC axis

    def test_vertex_radii_match_hand_normalization(self):
        columns = dict(cc=[0.2, 0.5, 0.8], sim=[0.1, 0.9, 0.5], nss=[1.0, 3.0, 2.0],
                       auc_j=[0.5, 0.7, 0.9], auc_b=[0.5, 0.6, 0.7], kl=[2.0, 1.0, 0.5])
        svg, _ = render_radar(["m0", "m1", "m2"], radar_means(**columns))
        for axis_index, (_, column, invert) in enumerate(RADAR_AXES):
            values = columns[column]
            lo, hi = min(values), max(values)
            for model_value in values:
                unit = (model_value - lo) / (hi - lo)
                if invert:
                    unit = 1.0 - unit
                angle = -0.5 * math.pi + axis_index * math.pi / 3.0
                x = 260.0 + unit * 190.0 * math.cos(angle)
                y = 270.0 + unit * 190.0 * math.sin(angle)
                assert f"{x:.17g},{y:.17g}" in svg

    def test_degenerate_axis_falls_back_to_half_radius(self):
        columns = dict(self.BASE)
        columns["nss"] = [1.5, 1.5]
        svg, degenerate = render_radar(["a", "b"], radar_means(**columns))
        assert degenerate == ["NSS"]
        # NSS is axis 2: unit 0.5 for both models.
        angle = -0.5 * math.pi + 2 * math.pi / 3.0
        x = 260.0 + 0.5 * 190.0 * math.cos(angle)
        y = 270.0 + 0.5 * 190.0 * math.sin(angle)
        model_polygons = [line for line in svg.splitlines() if "fill-opacity" in line]
        assert len(model_polygons) == 2
        assert all(f"{x:.17g},{y:.17g}" in line for line in model_polygons)

    def test_needs_two_models(self):
        with pytest.raises(ValueError):
            render_radar(["only"], radar_means(**{k: [v[0]] for k, v in self.BASE.items()}))

    def test_deterministic_text(self):
        args = (["a", "b"], radar_means(**self.BASE))
        assert render_radar(*args) == render_radar(*args)
