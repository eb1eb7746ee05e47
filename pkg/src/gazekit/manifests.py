"""CSV schemas: the curation manifest and the per-frame metrics table.

Both files are RFC-style CSV with a header row, LF line endings, no
trailing delimiter, and fields quoted only when needed. Divergence and
metric values are printed with 9 significant digits. Writers are
deterministic: the same data always produces the same bytes.
"""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path

from .curation import CurationManifest

__all__ = [
    "MANIFEST_HEADER",
    "METRICS_HEADER",
    "MEAN_ROW_ID",
    "manifest_rows",
    "write_manifest_rows",
    "read_manifest_rows",
    "write_manifest",
    "write_metrics_table",
    "read_metrics_table",
]

MANIFEST_HEADER = (
    "video_id",
    "anchor",
    "target",
    "delta",
    "anchor_peak_kl",
    "pair_kl",
    "anchor_map_path",
    "target_map_path",
    "caption",
)

METRICS_HEADER = ("id", "cc", "kl", "sim", "auc_j", "auc_b", "nss")

#: id of the aggregate row appended to every metrics table.
MEAN_ROW_ID = "mean"


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _write_csv(path, header, rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    Path(path).write_text(buf.getvalue(), encoding="utf-8", newline="")


def manifest_rows(manifest: CurationManifest, frame_paths=None) -> list[dict]:
    """Flatten a curation result into manifest row dicts.

    ``frame_paths`` optionally maps video_id to that video's ordered
    frame file paths, filling the anchor and target path columns.
    Captions start empty; review adds them later.
    """
    rows = []
    for pair in manifest.pairs:
        paths = (frame_paths or {}).get(pair.video_id)
        rows.append(
            {
                "video_id": pair.video_id,
                "anchor": str(pair.anchor),
                "target": str(pair.target),
                "delta": str(pair.delta),
                "anchor_peak_kl": _fmt(pair.anchor_peak_kl),
                "pair_kl": _fmt(pair.pair_kl),
                "anchor_map_path": str(paths[pair.anchor]) if paths else "",
                "target_map_path": str(paths[pair.target]) if paths else "",
                "caption": "",
            }
        )
    return rows


def write_manifest_rows(path, rows, extra_columns=()) -> None:
    """Write manifest row dicts, optionally with appended extra columns."""
    header = MANIFEST_HEADER + tuple(extra_columns)
    _write_csv(path, header, [[row.get(col, "") for col in header] for row in rows])


def read_manifest_rows(path) -> tuple[list[str], list[dict]]:
    """Read a manifest (or reviewed manifest); returns (header, row dicts)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty manifest file") from None
        if tuple(header[: len(MANIFEST_HEADER)]) != MANIFEST_HEADER:
            raise ValueError(f"{path}: unexpected manifest header {header}")
        rows = [dict(zip(header, row)) for row in reader]
    return header, rows


def write_manifest(path, manifest: CurationManifest, frame_paths=None) -> None:
    """Write a curation result as a manifest CSV."""
    write_manifest_rows(path, manifest_rows(manifest, frame_paths))


def write_metrics_table(path, rows) -> None:
    """Write per-frame metric rows plus the aggregate mean row.

    ``rows`` is a sequence of (id, cells) where cells maps metric names
    to floats or error labels. The final row, id "mean", averages the
    finite values per column; a column with none gets "NA".
    """
    out = []
    sums = {name: 0.0 for name in METRICS_HEADER[1:]}
    counts = {name: 0 for name in METRICS_HEADER[1:]}
    for row_id, cells in rows:
        line = [row_id]
        for name in METRICS_HEADER[1:]:
            value = cells.get(name)
            if isinstance(value, float) and math.isfinite(value):
                line.append(_fmt(value))
                sums[name] += value
                counts[name] += 1
            else:
                line.append("" if value is None else str(value))
        out.append(line)
    mean_line = [MEAN_ROW_ID]
    for name in METRICS_HEADER[1:]:
        mean_line.append(_fmt(sums[name] / counts[name]) if counts[name] else "NA")
    out.append(mean_line)
    _write_csv(path, METRICS_HEADER, out)


def read_metrics_table(path) -> tuple[list[dict], dict]:
    """Read a metrics table; returns (frame rows, mean row) as cell dicts.

    Numeric cells come back as floats, everything else as the original
    string.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != METRICS_HEADER:
            raise ValueError(f"{path}: unexpected metrics header {header}")
        parsed = []
        for row in reader:
            cells = {"id": row[0]}
            for name, cell in zip(METRICS_HEADER[1:], row[1:]):
                try:
                    cells[name] = float(cell)
                except ValueError:
                    cells[name] = cell
            parsed.append(cells)
    if not parsed or parsed[-1]["id"] != MEAN_ROW_ID:
        raise ValueError(f"{path}: missing mean row")
    return parsed[:-1], parsed[-1]
