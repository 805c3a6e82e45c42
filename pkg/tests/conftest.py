from __future__ import annotations

import math

import numpy as np
import pytest

from aclrisk import pose_ingest as pi


def make_frame(index: int, points: dict[int, tuple[float, float]],
               confidence: float = 1.0) -> pi.SkeletonFrame:
    """Frame with the listed keypoints set; everything else is missing."""
    kp = np.zeros((pi.N_KEYPOINTS, 3))
    missing = np.ones(pi.N_KEYPOINTS, dtype=bool)
    for i, (x, y) in points.items():
        kp[i] = (x, y, confidence)
        missing[i] = False
    return pi.SkeletonFrame(frame_index=index, keypoints=kp, missing=missing)


def make_series(view: str, frames, fps: float = 30.0) -> pi.KeypointSeries:
    return pi.KeypointSeries(view=view, frames=list(frames), fps=fps)


def upright_sagittal_points(x: float = 300.0) -> dict[int, tuple[float, float]]:
    """Straight standing pose seen from the side: one vertical chain."""
    return {
        pi.NECK: (x, 120.0),
        pi.MID_HIP: (x, 300.0),
        pi.R_HIP: (x, 300.0),
        pi.R_KNEE: (x, 450.0),
        pi.R_ANKLE: (x, 600.0),
    }


def upright_frontal_points(
    ankle_width: float = 110.0,
    knee_width: float = 110.0,
    shoulder_width: float = 110.0,
    cx: float = 300.0,
) -> dict[int, tuple[float, float]]:
    """Standing pose seen from the front; widths in pixels."""
    return {
        pi.NECK: (cx, 120.0),
        pi.R_SHOULDER: (cx - shoulder_width / 2, 140.0),
        pi.L_SHOULDER: (cx + shoulder_width / 2, 140.0),
        pi.MID_HIP: (cx, 300.0),
        pi.R_HIP: (cx - knee_width / 2, 300.0),
        pi.L_HIP: (cx + knee_width / 2, 300.0),
        pi.R_KNEE: (cx - knee_width / 2, 450.0),
        pi.L_KNEE: (cx + knee_width / 2, 450.0),
        pi.R_ANKLE: (cx - ankle_width / 2, 600.0),
        pi.L_ANKLE: (cx + ankle_width / 2, 600.0),
    }


def transform_series(series: pi.KeypointSeries, scale: float = 1.0,
                     angle_rad: float = 0.0,
                     offset: tuple[float, float] = (0.0, 0.0)) -> pi.KeypointSeries:
    """Scale, rotate about the origin, then translate every detected keypoint."""
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    rot = np.array([[c, -s], [s, c]])
    frames = []
    for frame in series.frames:
        out = frame.copy()
        present = ~out.missing
        xy = out.keypoints[present, :2]
        out.keypoints[present, :2] = (scale * xy) @ rot.T + np.asarray(offset)
        frames.append(out)
    return pi.KeypointSeries(view=series.view, frames=frames, fps=series.fps)


def series_equal(a: pi.KeypointSeries, b: pi.KeypointSeries) -> bool:
    if a.view != b.view or len(a.frames) != len(b.frames):
        return False
    for fa, fb in zip(a.frames, b.frames):
        if fa.frame_index != fb.frame_index:
            return False
        if not np.array_equal(fa.keypoints, fb.keypoints):
            return False
        if not np.array_equal(fa.missing, fb.missing):
            return False
    return True


@pytest.fixture
def frontal_standing_series() -> pi.KeypointSeries:
    points = upright_frontal_points()
    return make_series(pi.FRONTAL, [make_frame(i, points) for i in range(5)])
