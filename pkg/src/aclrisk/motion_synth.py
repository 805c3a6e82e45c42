"""Synthetic drop-landing generator with analytic ground truth.

Builds noise-free BODY_25 keypoint series for both camera views from a
scripted motion: a rigid vertical drop until ``touchdown_frame``, then
half-cosine ramps of knee flexion, hip flexion and lateral trunk lean
from zero to their scripted peaks over ``ramp_frames`` (about half a
second by default), held at peak afterwards. The skeleton is posed so
that the extracted feature traces have closed forms:

    knee cosine  = -cos(knee_flexion)
    hip cosine   = -cos(hip_flexion)
    alignment    = -cos(lateral_lean)
    d1 = |knee_offset|,  d2 = |ankle_width - shoulder_width|

which the returned ground-truth record reports per frame. Optional
seeded Gaussian jitter turns the exact series into noisy test input;
the ground truth always stays the noise-free analytic values.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pose_ingest as pi
from .errors import InvalidScript

BASE_X = 320.0
GROUND_Y = 620.0
MAX_ANGLE_DEG = 170.0


@dataclass
class MotionScript:
    n_frames: int = 100
    fps: float = 30.0
    peak_knee_flexion_deg: float = 60.0
    peak_hip_flexion_deg: float = 60.0
    peak_lateral_lean_deg: float = 10.0
    stance_ankle_width_px: float = 110.0
    knee_offset_px: float = 0.0      # how much narrower the knees are than the ankles
    shoulder_width_px: float = 110.0
    thigh_length_px: float = 150.0
    shank_length_px: float = 150.0
    trunk_length_px: float = 180.0
    touchdown_frame: int = 30
    ramp_frames: int | None = None   # frames to reach peak flexion; default ~0.5 s
    drop_height_px: float = 80.0
    noise_sigma_px: float = 0.0
    seed: int = 0

    def validate(self) -> None:
        angles = (self.peak_knee_flexion_deg, self.peak_hip_flexion_deg,
                  self.peak_lateral_lean_deg)
        if any(not 0.0 <= a <= MAX_ANGLE_DEG for a in angles):
            raise InvalidScript(f"peak angles must lie in [0, {MAX_ANGLE_DEG}] degrees")
        lengths = (self.thigh_length_px, self.shank_length_px, self.trunk_length_px)
        if any(v <= 0.0 for v in lengths):
            raise InvalidScript("limb lengths must be positive")
        if self.stance_ankle_width_px <= 0.0 or self.shoulder_width_px <= 0.0:
            raise InvalidScript("stance and shoulder widths must be positive")
        if self.knee_offset_px > self.stance_ankle_width_px:
            raise InvalidScript("knee offset cannot exceed the stance width")
        if self.n_frames < 2:
            raise InvalidScript("need at least 2 frames")
        if not 0 <= self.touchdown_frame < self.n_frames:
            raise InvalidScript("touchdown_frame must lie inside the series")
        if self.ramp_frames is not None and self.ramp_frames < 1:
            raise InvalidScript("ramp_frames must be at least 1")
        if self.fps <= 0.0:
            raise InvalidScript("fps must be positive")
        if self.noise_sigma_px < 0.0:
            raise InvalidScript("noise sigma must be nonnegative")
        if self.drop_height_px < 0.0:
            raise InvalidScript("drop height must be nonnegative")

    def as_dict(self) -> dict:
        return dict(self.__dict__)

    @classmethod
    def from_dict(cls, data: dict) -> "MotionScript":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidScript(f"unknown script fields: {sorted(unknown)}")
        try:
            script = cls(**data)
        except TypeError as exc:
            raise InvalidScript(str(exc)) from exc
        script.validate()
        return script


@dataclass
class GroundTruth:
    touchdown_frame: int
    knee_deg: np.ndarray
    hip_deg: np.ndarray
    lean_deg: np.ndarray
    p1_trace: np.ndarray
    p2_trace: np.ndarray
    s4_trace: np.ndarray
    p1: float = field(init=False)
    p2: float = field(init=False)
    s4_peak: float = field(init=False)
    d1: float = 0.0
    d2: float = 0.0

    def __post_init__(self):
        self.p1 = float(self.p1_trace.max())
        self.p2 = float(self.p2_trace.max())
        self.s4_peak = float(self.s4_trace.max())

    def as_dict(self) -> dict:
        return {
            "touchdown_frame": self.touchdown_frame,
            "knee_deg": self.knee_deg.tolist(),
            "hip_deg": self.hip_deg.tolist(),
            "lean_deg": self.lean_deg.tolist(),
            "p1_trace": self.p1_trace.tolist(),
            "p2_trace": self.p2_trace.tolist(),
            "s4_trace": self.s4_trace.tolist(),
            "p1": self.p1,
            "p2": self.p2,
            "s4_peak": self.s4_peak,
            "d1": self.d1,
            "d2": self.d2,
        }


def _rot(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, -s], [s, c]])


def _ramp(script: MotionScript, peak_deg: float) -> np.ndarray:
    """Half-cosine ramp from 0 at touchdown to peak_deg, then held at peak."""
    t = np.arange(script.n_frames, dtype=float)
    available = script.n_frames - 1 - script.touchdown_frame
    if available <= 0:
        return np.zeros(script.n_frames)
    ramp_len = script.ramp_frames
    if ramp_len is None:
        ramp_len = max(1, round(0.5 * script.fps))
    ramp_len = min(ramp_len, available)
    s = np.clip((t - script.touchdown_frame) / ramp_len, 0.0, 1.0)
    return peak_deg * (1.0 - np.cos(math.pi * s)) / 2.0


def _drop_offsets(script: MotionScript) -> np.ndarray:
    """Height above ground per frame: quadratic fall, zero from touchdown on."""
    h = np.zeros(script.n_frames)
    td = script.touchdown_frame
    if td > 0:
        t = np.arange(td, dtype=float)
        h[:td] = script.drop_height_px * (1.0 - (t / td) ** 2)
    return h


def _empty_frame(frame_index: int) -> pi.SkeletonFrame:
    kp = np.zeros((pi.N_KEYPOINTS, 3))
    return pi.SkeletonFrame(frame_index=frame_index, keypoints=kp,
                            missing=np.ones(pi.N_KEYPOINTS, dtype=bool))


def _put(frame: pi.SkeletonFrame, index: int, point: np.ndarray) -> None:
    frame.keypoints[index, 0] = point[0]
    frame.keypoints[index, 1] = point[1]
    frame.keypoints[index, 2] = 1.0
    frame.missing[index] = False


def generate(script: MotionScript) -> tuple[pi.KeypointSeries, pi.KeypointSeries, GroundTruth]:
    """Generate (sagittal series, frontal series, ground truth) for a script."""
    script.validate()
    knee = _ramp(script, script.peak_knee_flexion_deg)
    hip = _ramp(script, script.peak_hip_flexion_deg)
    lean = _ramp(script, script.peak_lateral_lean_deg)
    drop = _drop_offsets(script)
    up = np.array([0.0, -1.0])

    sagittal_frames = []
    frontal_frames = []
    for t in range(script.n_frames):
        knee_rad = math.radians(knee[t])
        hip_rad = math.radians(hip[t])
        lean_rad = math.radians(lean[t])

        # sagittal chain: ankle fixed, shank splits the knee angle
        frame = _empty_frame(t)
        ankle = np.array([BASE_X, GROUND_Y - drop[t]])
        shank_dir = _rot(knee_rad / 2.0) @ up
        knee_pt = ankle + script.shank_length_px * shank_dir
        thigh_dir = _rot(-knee_rad) @ shank_dir
        hip_pt = knee_pt + script.thigh_length_px * thigh_dir
        trunk_dir = _rot(hip_rad) @ thigh_dir
        neck = hip_pt + script.trunk_length_px * trunk_dir
        nose = neck + 0.25 * script.trunk_length_px * trunk_dir
        _put(frame, 0, nose)
        _put(frame, pi.NECK, neck)
        _put(frame, pi.MID_HIP, hip_pt)
        for h_i, k_i, a_i in ((pi.R_HIP, pi.R_KNEE, pi.R_ANKLE),
                              (pi.L_HIP, pi.L_KNEE, pi.L_ANKLE)):
            _put(frame, h_i, hip_pt)
            _put(frame, k_i, knee_pt)
            _put(frame, a_i, ankle)
        sagittal_frames.append(frame)

        # frontal chain: vertical legs, trunk tilted by the lean angle
        frame = _empty_frame(t)
        gy = GROUND_Y - drop[t]
        half_ankle = script.stance_ankle_width_px / 2.0
        half_knee = (script.stance_ankle_width_px - script.knee_offset_px) / 2.0
        ankle_r = np.array([BASE_X - half_ankle, gy])
        ankle_l = np.array([BASE_X + half_ankle, gy])
        knee_r = np.array([BASE_X - half_knee, gy - script.shank_length_px])
        knee_l = np.array([BASE_X + half_knee, gy - script.shank_length_px])
        hip_r = knee_r + script.thigh_length_px * up
        hip_l = knee_l + script.thigh_length_px * up
        mid_hip = (hip_r + hip_l) / 2.0
        trunk_dir = _rot(lean_rad) @ up
        neck = mid_hip + script.trunk_length_px * trunk_dir
        perp = _rot(lean_rad) @ np.array([1.0, 0.0])
        shoulder_r = neck - (script.shoulder_width_px / 2.0) * perp
        shoulder_l = neck + (script.shoulder_width_px / 2.0) * perp
        nose = neck + 0.25 * script.trunk_length_px * trunk_dir
        _put(frame, 0, nose)
        _put(frame, pi.NECK, neck)
        _put(frame, pi.R_SHOULDER, shoulder_r)
        _put(frame, pi.L_SHOULDER, shoulder_l)
        _put(frame, pi.MID_HIP, mid_hip)
        _put(frame, pi.R_HIP, hip_r)
        _put(frame, pi.R_KNEE, knee_r)
        _put(frame, pi.R_ANKLE, ankle_r)
        _put(frame, pi.L_HIP, hip_l)
        _put(frame, pi.L_KNEE, knee_l)
        _put(frame, pi.L_ANKLE, ankle_l)
        frontal_frames.append(frame)

    sagittal = pi.KeypointSeries(view=pi.SAGITTAL, frames=sagittal_frames, fps=script.fps)
    frontal = pi.KeypointSeries(view=pi.FRONTAL, frames=frontal_frames, fps=script.fps)

    knee_rad = np.radians(knee)
    hip_rad = np.radians(hip)
    lean_rad = np.radians(lean)
    truth = GroundTruth(
        touchdown_frame=script.touchdown_frame,
        knee_deg=knee, hip_deg=hip, lean_deg=lean,
        p1_trace=-np.cos(knee_rad),
        p2_trace=-np.cos(hip_rad),
        s4_trace=-np.cos(lean_rad),
        d1=abs(script.knee_offset_px),
        d2=abs(script.stance_ankle_width_px - script.shoulder_width_px),
    )

    if script.noise_sigma_px > 0.0:
        sagittal = perturb(sagittal, script.noise_sigma_px, script.seed)
        frontal = perturb(frontal, script.noise_sigma_px, script.seed + 1)
    return sagittal, frontal, truth


def perturb(series: pi.KeypointSeries, sigma_px: float, seed: int) -> pi.KeypointSeries:
    """Seeded Gaussian jitter on the coordinates of detected keypoints."""
    if sigma_px < 0.0:
        raise InvalidScript("noise sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    frames = []
    for frame in series.frames:
        out = frame.copy()
        if sigma_px > 0.0:
            present = ~out.missing
            jitter = rng.normal(0.0, sigma_px, size=(int(present.sum()), 2))
            out.keypoints[present, :2] += jitter
        frames.append(out)
    return pi.KeypointSeries(view=series.view, frames=frames, fps=series.fps)


def write_ground_truth(truth: GroundTruth, path: str | Path) -> None:
    Path(path).write_text(json.dumps(truth.as_dict(), sort_keys=True, indent=2) + "\n")
