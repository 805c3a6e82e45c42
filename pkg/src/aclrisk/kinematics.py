"""Kinematic feature extraction from preprocessed keypoint series.

Sagittal view (default right side, ``side="left"`` mirrors the indices):

* thigh vector  = hip - knee
* shank vector  = ankle - knee
* trunk vector  = mid-hip - neck (points down the torso)

``p1`` is the peak cosine between thigh and shank (the complement of the
knee flexion angle: full extension gives -1, deeper flexion moves toward
+1) and ``p2`` the peak cosine between thigh and trunk vector.

Frontal view:

* ``s1`` ankle-to-ankle distance, ``s2`` knee-to-knee, ``s3`` shoulder width
* ``s4`` mean cosine between the trunk-down vector and the two thigh-up
  vectors; an upright stance gives -1, lateral lean moves toward +1
* ``d1 = max |s1 - s2|``, ``d2 = max |s1 - s3|`` (pixels)

All maxima are taken over an analysis window: the whole series by
default, or a landing window anchored at the detected touchdown frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pose_ingest as pi
from .errors import DegenerateVector, WindowEmpty

DEGENERACY_EPSILON = 1e-9  # pixels; vectors shorter than this are a data fault

WINDOW_FULL = "full"
WINDOW_LANDING = "landing"
DEFAULT_LANDING_DURATION_S = 1.0
DEFAULT_FPS = 30.0


def cosine_between(u, v, epsilon: float = DEGENERACY_EPSILON) -> float:
    """Cosine of the angle between two 2D vectors, clamped to [-1, 1]."""
    ux, uy = float(u[0]), float(u[1])
    vx, vy = float(v[0]), float(v[1])
    nu = math.hypot(ux, uy)
    nv = math.hypot(vx, vy)
    if nu < epsilon or nv < epsilon:
        raise DegenerateVector(f"vector norm below {epsilon} (|u|={nu:g}, |v|={nv:g})")
    c = (ux * vx + uy * vy) / (nu * nv)
    return min(1.0, max(-1.0, c))


@dataclass
class SagittalFeatures:
    p1: float
    p2: float
    p1_trace: np.ndarray
    p2_trace: np.ndarray
    frame_indices: list[int]


@dataclass
class FrontalFeatures:
    d1: float
    d2: float
    s4_peak: float
    s1_trace: np.ndarray
    s2_trace: np.ndarray
    s3_trace: np.ndarray
    s4_trace: np.ndarray
    frame_indices: list[int]


def _window_slice(series: pi.KeypointSeries, window: tuple[int, int] | None) -> list[pi.SkeletonFrame]:
    if window is None:
        frames = series.frames
    else:
        start, end = window
        frames = series.frames[start:end + 1]
    if not frames:
        raise WindowEmpty("analysis window contains no frames")
    return frames


def _cos_series(a: np.ndarray, b: np.ndarray, frames: list[pi.SkeletonFrame],
                epsilon: float, what: str) -> np.ndarray:
    """Rowwise clamped cosine between (n,2) vector stacks a and b."""
    na = np.linalg.norm(a, axis=1)
    nb = np.linalg.norm(b, axis=1)
    bad = (na < epsilon) | (nb < epsilon)
    if bad.any():
        i = int(np.argmax(bad))
        raise DegenerateVector(
            f"{what}: zero-length vector at frame {frames[i].frame_index}")
    return np.clip((a * b).sum(axis=1) / (na * nb), -1.0, 1.0)


def extract_sagittal(
    series: pi.KeypointSeries,
    window: tuple[int, int] | None = None,
    side: str = "right",
    epsilon: float = DEGENERACY_EPSILON,
) -> SagittalFeatures:
    """Per-frame knee/hip flexion cosines and their window maxima."""
    frames = _window_slice(series, window)
    if side == "left":
        hip, knee, ankle = pi.L_HIP, pi.L_KNEE, pi.L_ANKLE
    else:
        hip, knee, ankle = pi.R_HIP, pi.R_KNEE, pi.R_ANKLE
    kp = np.stack([f.keypoints[:, :2] for f in frames])
    thigh = kp[:, hip] - kp[:, knee]
    shank = kp[:, ankle] - kp[:, knee]
    trunk = kp[:, pi.MID_HIP] - kp[:, pi.NECK]
    p1_trace = _cos_series(thigh, shank, frames, epsilon, "thigh/shank")
    p2_trace = _cos_series(thigh, trunk, frames, epsilon, "thigh/trunk")
    return SagittalFeatures(
        p1=float(p1_trace.max()),
        p2=float(p2_trace.max()),
        p1_trace=p1_trace,
        p2_trace=p2_trace,
        frame_indices=[f.frame_index for f in frames],
    )


def extract_frontal(
    series: pi.KeypointSeries,
    window: tuple[int, int] | None = None,
    epsilon: float = DEGENERACY_EPSILON,
) -> FrontalFeatures:
    """Stance-width distances and trunk/thigh alignment cosine per frame."""
    frames = _window_slice(series, window)
    kp = np.stack([f.keypoints[:, :2] for f in frames])
    s1 = np.linalg.norm(kp[:, pi.L_ANKLE] - kp[:, pi.R_ANKLE], axis=1)
    s2 = np.linalg.norm(kp[:, pi.L_KNEE] - kp[:, pi.R_KNEE], axis=1)
    s3 = np.linalg.norm(kp[:, pi.L_SHOULDER] - kp[:, pi.R_SHOULDER], axis=1)
    trunk = kp[:, pi.MID_HIP] - kp[:, pi.NECK]
    thigh_r = kp[:, pi.R_HIP] - kp[:, pi.R_KNEE]
    thigh_l = kp[:, pi.L_HIP] - kp[:, pi.L_KNEE]
    s4 = 0.5 * (_cos_series(trunk, thigh_r, frames, epsilon, "trunk/right thigh")
                + _cos_series(trunk, thigh_l, frames, epsilon, "trunk/left thigh"))
    return FrontalFeatures(
        d1=float(np.abs(s1 - s2).max()),
        d2=float(np.abs(s1 - s3).max()),
        s4_peak=float(s4.max()),
        s1_trace=s1,
        s2_trace=s2,
        s3_trace=s3,
        s4_trace=s4,
        frame_indices=[f.frame_index for f in frames],
    )


def _ankle_height(series: pi.KeypointSeries) -> np.ndarray:
    """Mean y of whichever ankle keypoints are present, per frame (NaN if none)."""
    ys = []
    for frame in series.frames:
        vals = [frame.keypoints[k, 1] for k in (pi.R_ANKLE, pi.L_ANKLE) if not frame.missing[k]]
        ys.append(float(np.mean(vals)) if vals else np.nan)
    return np.array(ys)


def analysis_window(
    series: pi.KeypointSeries,
    mode: str = WINDOW_FULL,
    duration_s: float = DEFAULT_LANDING_DURATION_S,
) -> tuple[int, int]:
    """Frame-position range (inclusive) to analyse.

    ``full`` covers the whole series. ``landing`` starts at the touchdown
    proxy: the downward-to-stationary sign change of ankle vertical
    velocity with the largest preceding downward speed (image y grows
    downward), and extends ``duration_s`` seconds or to the series end.
    """
    n = len(series.frames)
    if n == 0:
        raise WindowEmpty("series is empty")
    if mode == WINDOW_FULL:
        return (0, n - 1)
    if mode != WINDOW_LANDING:
        raise ValueError(f"unknown window mode: {mode!r}")

    y = _ankle_height(series)
    v = np.diff(y)  # positive = moving down
    best_t, best_speed = None, 0.0
    for t in range(1, len(v)):
        if v[t - 1] > 0.0 and v[t] <= 0.0 and v[t - 1] > best_speed:
            best_t, best_speed = t, float(v[t - 1])
    if best_t is None:
        raise WindowEmpty("no touchdown found in ankle trajectory")
    start = best_t  # diff index t is the velocity into frame t+1; frame t is impact
    fps = series.fps if series.fps else DEFAULT_FPS
    end = min(n - 1, start + int(round(duration_s * fps)))
    return (start, end)
