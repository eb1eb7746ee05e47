"""Generate a synthetic gaze-map corpus for exercising the pipeline.

Each video is a wandering attention blob: a discretized Gaussian whose
center drifts by a small random step each frame and teleports at a few
jump frames. The jumps create the sharp frame-to-frame divergence that
pair curation looks for, so the output is a realistic end-to-end input:

    python scripts/make_synthetic_corpus.py --out corpus/
    gazekit curate corpus/ --out pairs.csv

Output layout is one subdirectory per video holding zero-padded frame
files, ready for the curate command. Fully deterministic for a given
seed and flag set.
"""

from __future__ import annotations

import argparse
from pathlib import Path

import numpy as np

from gazekit import GazeMap, save_map


def blob_values(grid: int, center: tuple[float, float], width: float) -> np.ndarray:
    rows = np.arange(grid)[:, None]
    cols = np.arange(grid)[None, :]
    d2 = (rows - center[0]) ** 2 + (cols - center[1]) ** 2
    values = np.exp(-d2 / (2.0 * width * width)) + 1e-4
    return values / values.sum()


def synth_video(rng: np.random.Generator, grid: int, frames: int, jumps: int, width: float):
    jump_frames = set()
    if jumps > 0 and frames > 10:
        # Keep jumps away from the ends so each spike has room for a
        # target window after it.
        jump_frames = set(rng.choice(np.arange(5, frames - 25), size=jumps, replace=False))
    center = rng.uniform(grid * 0.2, grid * 0.8, size=2)
    for frame in range(frames):
        if frame in jump_frames:
            center = rng.uniform(grid * 0.1, grid * 0.9, size=2)
        else:
            center = np.clip(center + rng.normal(0.0, 0.15, size=2), 0.0, grid - 1.0)
        yield GazeMap(blob_values(grid, (center[0], center[1]), width))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", required=True, help="corpus root directory to create")
    parser.add_argument("--videos", type=int, default=8)
    parser.add_argument("--frames-min", type=int, default=50)
    parser.add_argument("--frames-max", type=int, default=120)
    parser.add_argument("--grid", type=int, default=24, help="map side length")
    parser.add_argument("--jumps", type=int, default=3, help="attention jumps per video")
    parser.add_argument("--width", type=float, default=2.0, help="blob standard deviation, cells")
    parser.add_argument("--format", choices=("pgm", "csv"), default="pgm")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if args.frames_min > args.frames_max:
        parser.error("--frames-min must not exceed --frames-max")

    root = Path(args.out)
    rng = np.random.default_rng(args.seed)
    for index in range(args.videos):
        video_id = f"video_{index:03d}"
        frames = int(rng.integers(args.frames_min, args.frames_max + 1))
        vdir = root / video_id
        vdir.mkdir(parents=True, exist_ok=True)
        for frame, gaze in enumerate(
            synth_video(rng, args.grid, frames, args.jumps, args.width)
        ):
            save_map(vdir / f"frame_{frame:04d}.{args.format}", gaze)
        print(f"{video_id}: {frames} frames")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
