"""Parsing and preprocessing of BODY_25 keypoint time series.

Two on-disk formats are supported:

* per-frame JSON documents in the OpenPose output schema
  (``{"people": [{"pose_keypoints_2d": [75 floats]}]}``), one file per
  frame, frame index taken from the zero-padded digit group in the
  filename;
* a single CSV file with header
  ``frame,kp0_x,kp0_y,kp0_c,...,kp24_x,kp24_y,kp24_c`` (76 columns).

A keypoint stored as the triple (0, 0, 0) means "not detected".
Preprocessing applies a confidence gate (default 0.4), repairs short
interior gaps on the required keypoints by linear interpolation, and
drops leading/trailing frames where a required keypoint is missing.
"""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np

from .errors import (
    AllFramesInvalid,
    AmbiguousPerson,
    EmptySource,
    GapTooLong,
    MalformedDocument,
    NoPersonDetected,
    SeriesParseError,
)

N_KEYPOINTS = 25

# BODY_25 indices used by the feature models.
NECK = 1
R_SHOULDER = 2
L_SHOULDER = 5
MID_HIP = 8
R_HIP, R_KNEE, R_ANKLE = 9, 10, 11
L_HIP, L_KNEE, L_ANKLE = 12, 13, 14

SAGITTAL = "sagittal"
FRONTAL = "frontal"
VIEWS = (SAGITTAL, FRONTAL)

# Person-selection policies for multi-person frames.
POLICY_BEST = "best"      # person with highest mean confidence over detected keypoints
POLICY_STRICT = "strict"  # error if more than one person is present

DEFAULT_CONFIDENCE_THRESHOLD = 0.4
DEFAULT_MAX_GAP = 5

_CSV_HEADER = ["frame"] + [
    f"kp{i}_{axis}" for i in range(N_KEYPOINTS) for axis in ("x", "y", "c")
]


def required_keypoints(view: str, side: str = "right") -> frozenset[int]:
    """Keypoint indices that must be present for the given view's features."""
    if view == SAGITTAL:
        if side == "left":
            return frozenset({NECK, MID_HIP, L_HIP, L_KNEE, L_ANKLE})
        return frozenset({NECK, MID_HIP, R_HIP, R_KNEE, R_ANKLE})
    if view == FRONTAL:
        return frozenset({
            NECK, R_SHOULDER, L_SHOULDER, MID_HIP,
            R_HIP, R_KNEE, R_ANKLE, L_HIP, L_KNEE, L_ANKLE,
        })
    raise ValueError(f"unknown view: {view!r}")


class Keypoint2D(NamedTuple):
    x: float
    y: float
    confidence: float


@dataclass
class SkeletonFrame:
    """One frame of 25 keypoints; ``keypoints`` has shape (25, 3) = x, y, confidence."""

    frame_index: int
    keypoints: np.ndarray
    missing: np.ndarray  # bool, shape (25,)

    def keypoint(self, i: int) -> Keypoint2D:
        x, y, c = self.keypoints[i]
        return Keypoint2D(float(x), float(y), float(c))

    def copy(self) -> "SkeletonFrame":
        return SkeletonFrame(self.frame_index, self.keypoints.copy(), self.missing.copy())


@dataclass
class KeypointSeries:
    view: str
    frames: list[SkeletonFrame]
    fps: float | None = None

    def __post_init__(self):
        idx = [f.frame_index for f in self.frames]
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("frame_index must be strictly increasing")

    def __len__(self) -> int:
        return len(self.frames)

    def coords(self, kp_index: int) -> np.ndarray:
        """(n, 2) array of x, y for one keypoint across all frames."""
        return np.array([f.keypoints[kp_index, :2] for f in self.frames], dtype=float)

    def frame_indices(self) -> list[int]:
        return [f.frame_index for f in self.frames]


@dataclass
class PreprocessStats:
    frames_in: int = 0
    frames_out: int = 0
    frames_dropped_leading: int = 0
    frames_dropped_trailing: int = 0
    values_gated: int = 0
    values_interpolated: int = 0

    def as_dict(self) -> dict:
        return {
            "frames_in": self.frames_in,
            "frames_out": self.frames_out,
            "frames_dropped_leading": self.frames_dropped_leading,
            "frames_dropped_trailing": self.frames_dropped_trailing,
            "values_gated": self.values_gated,
            "values_interpolated": self.values_interpolated,
        }


# -- frame parsing --------------------------------------------------------


def _as_keypoint_array(flat: list, where: str) -> np.ndarray:
    if not isinstance(flat, list) or len(flat) != 3 * N_KEYPOINTS:
        raise MalformedDocument(
            f"{where}: pose_keypoints_2d must hold exactly {3 * N_KEYPOINTS} numbers"
        )
    try:
        arr = np.array(flat, dtype=float).reshape(N_KEYPOINTS, 3)
    except (TypeError, ValueError) as exc:
        raise MalformedDocument(f"{where}: non-numeric keypoint entry ({exc})") from exc
    if not np.all(np.isfinite(arr)):
        raise MalformedDocument(f"{where}: keypoint values must be finite")
    conf = arr[:, 2]
    if np.any(conf < 0.0) or np.any(conf > 1.0):
        raise MalformedDocument(f"{where}: confidence values must lie in [0, 1]")
    return arr


def _frame_from_array(arr: np.ndarray, frame_index: int) -> SkeletonFrame:
    missing = np.all(arr == 0.0, axis=1)
    return SkeletonFrame(frame_index=frame_index, keypoints=arr, missing=missing)


def _person_array(person, where: str) -> np.ndarray:
    if not isinstance(person, dict) or "pose_keypoints_2d" not in person:
        raise MalformedDocument(f"{where}: person object missing 'pose_keypoints_2d'")
    return _as_keypoint_array(person["pose_keypoints_2d"], where)


def _select_person(people: list, policy: str, where: str) -> np.ndarray:
    if not people:
        raise NoPersonDetected(f"{where}: empty people list")
    if len(people) == 1:
        return _person_array(people[0], where)
    if policy == POLICY_STRICT:
        raise AmbiguousPerson(f"{where}: {len(people)} people present under strict policy")
    # highest mean confidence over detected (non-zero-triple) keypoints
    best, best_score = None, -1.0
    for person in people:
        arr = _person_array(person, where)
        detected = ~np.all(arr == 0.0, axis=1)
        score = float(arr[detected, 2].mean()) if detected.any() else 0.0
        if score > best_score:
            best, best_score = arr, score
    return best


def parse_openpose_frame(
    raw: bytes | str,
    policy: str = POLICY_BEST,
    frame_index: int = 0,
    where: str = "frame",
) -> SkeletonFrame:
    """Parse one OpenPose frame document into a SkeletonFrame.

    ``policy`` controls multi-person frames: "best" keeps the person with
    the highest mean confidence, "strict" raises AmbiguousPerson.
    """
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"{where}: invalid JSON ({exc})") from exc
    if not isinstance(doc, dict) or "people" not in doc:
        raise MalformedDocument(f"{where}: missing 'people' key")
    people = doc["people"]
    if not isinstance(people, list):
        raise MalformedDocument(f"{where}: 'people' must be a list")
    arr = _select_person(people, policy, where)
    return _frame_from_array(arr, frame_index)


_DIGITS = re.compile(r"(\d+)")


def frame_index_from_name(name: str, fallback: int) -> int:
    """Frame index from the last digit group in a filename stem."""
    groups = _DIGITS.findall(Path(name).stem)
    return int(groups[-1]) if groups else fallback


# -- series loading -------------------------------------------------------


def load_series(
    source: str | Path,
    view: str,
    policy: str = POLICY_BEST,
    fps: float | None = None,
) -> KeypointSeries:
    """Load a keypoint series from a directory of frame JSONs or one CSV file."""
    if view not in VIEWS:
        raise ValueError(f"unknown view: {view!r}")
    path = Path(source)
    if path.is_dir():
        return _load_series_dir(path, view, policy, fps)
    if path.is_file():
        if path.suffix.lower() == ".csv":
            return read_series_csv(path, view, fps)
        frame = parse_openpose_frame(path.read_bytes(), policy,
                                     frame_index_from_name(path.name, 0), where=path.name)
        return KeypointSeries(view=view, frames=[frame], fps=fps)
    raise EmptySource(f"source not found: {path}")


def _load_series_dir(path: Path, view: str, policy: str, fps: float | None) -> KeypointSeries:
    files = sorted(p for p in path.iterdir() if p.suffix.lower() == ".json")
    if not files:
        raise EmptySource(f"no frame documents in {path}")
    frames: list[SkeletonFrame] = []
    failures: list[tuple[str, Exception]] = []
    for pos, p in enumerate(files):
        try:
            frames.append(parse_openpose_frame(
                p.read_bytes(), policy, frame_index_from_name(p.name, pos), where=p.name))
        except Exception as exc:  # aggregated below with the frame identifier
            failures.append((p.name, exc))
    if failures:
        raise SeriesParseError(failures)
    frames.sort(key=lambda f: f.frame_index)
    return KeypointSeries(view=view, frames=frames, fps=fps)


def read_series_csv(path: str | Path, view: str, fps: float | None = None) -> KeypointSeries:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptySource(f"{path.name}: empty CSV") from None
        if header != _CSV_HEADER:
            raise MalformedDocument(f"{path.name}: unexpected CSV header")
        frames: list[SkeletonFrame] = []
        failures: list[tuple[str, Exception]] = []
        for lineno, row in enumerate(reader, start=2):
            try:
                frames.append(_frame_from_csv_row(row, f"{path.name}:{lineno}"))
            except Exception as exc:
                failures.append((f"{path.name}:{lineno}", exc))
    if failures:
        raise SeriesParseError(failures)
    if not frames:
        raise EmptySource(f"{path.name}: no data rows")
    frames.sort(key=lambda f: f.frame_index)
    return KeypointSeries(view=view, frames=frames, fps=fps)


def _frame_from_csv_row(row: list[str], where: str) -> SkeletonFrame:
    if len(row) != len(_CSV_HEADER):
        raise MalformedDocument(f"{where}: expected {len(_CSV_HEADER)} columns, got {len(row)}")
    try:
        frame_index = int(row[0])
        values = [float(v) for v in row[1:]]
    except ValueError as exc:
        raise MalformedDocument(f"{where}: non-numeric cell ({exc})") from exc
    arr = _as_keypoint_array(values, where)
    return _frame_from_array(arr, frame_index)


def write_series_csv(series: KeypointSeries, path: str | Path) -> None:
    """Serialize a series to the 76-column CSV format (exact float round trip)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_HEADER)
        for frame in series.frames:
            writer.writerow([frame.frame_index] + [repr(float(v)) for v in frame.keypoints.ravel()])


def write_series_openpose(series: KeypointSeries, directory: str | Path,
                          prefix: str = "frame") -> list[Path]:
    """Write one OpenPose-schema JSON document per frame into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for frame in series.frames:
        doc = {"people": [{"pose_keypoints_2d": [float(v) for v in frame.keypoints.ravel()]}]}
        p = directory / f"{prefix}_{frame.frame_index:012d}_keypoints.json"
        p.write_text(json.dumps(doc))
        paths.append(p)
    return paths


# -- preprocessing --------------------------------------------------------


def preprocess(
    series: KeypointSeries,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    max_gap: int = DEFAULT_MAX_GAP,
    required: Iterable[int] | None = None,
) -> KeypointSeries:
    """Confidence-gate, repair, and trim a series. See preprocess_report."""
    cleaned, _ = preprocess_report(series, confidence_threshold, max_gap, required)
    return cleaned


def preprocess_report(
    series: KeypointSeries,
    confidence_threshold: float = DEFAULT_CONFIDENCE_THRESHOLD,
    max_gap: int = DEFAULT_MAX_GAP,
    required: Iterable[int] | None = None,
) -> tuple[KeypointSeries, PreprocessStats]:
    """Preprocess a series and report what was changed.

    Steps, in order:

    1. every keypoint with confidence below ``confidence_threshold`` is
       zeroed and marked missing;
    2. leading/trailing frames where any required keypoint is missing are
       dropped;
    3. interior gaps of at most ``max_gap`` consecutive missing frames on a
       required keypoint are filled by linear interpolation between the
       nearest valid neighbours (confidence = min of the neighbours).

    Raises GapTooLong for interior gaps longer than ``max_gap`` and
    AllFramesInvalid when nothing survives. Non-required keypoints are
    gated but never repaired. The operation is idempotent.
    """
    stats = PreprocessStats(frames_in=len(series.frames))
    if not series.frames:
        raise AllFramesInvalid("input series is empty")
    req = sorted(required_keypoints(series.view) if required is None else set(required))

    frames = [f.copy() for f in series.frames]
    for frame in frames:
        gate = (frame.keypoints[:, 2] < confidence_threshold) & ~frame.missing
        stats.values_gated += int(gate.sum())
        frame.keypoints[gate] = 0.0
        frame.missing |= gate

    valid = np.array([[not f.missing[k] for k in req] for f in frames], dtype=bool)
    all_ok = valid.all(axis=1)
    if not all_ok.any():
        raise AllFramesInvalid("no frame has all required keypoints present")
    first = int(np.argmax(all_ok))
    last = int(len(frames) - 1 - np.argmax(all_ok[::-1]))
    stats.frames_dropped_leading = first
    stats.frames_dropped_trailing = len(frames) - 1 - last
    frames = frames[first:last + 1]
    valid = valid[first:last + 1]

    for col, kp in enumerate(req):
        ok = valid[:, col]
        t = 0
        n = len(frames)
        while t < n:
            if ok[t]:
                t += 1
                continue
            start = t
            while t < n and not ok[t]:
                t += 1
            gap = t - start
            # first/last frames are fully valid, so every gap is interior
            if gap > max_gap:
                raise GapTooLong(
                    f"keypoint {kp} missing for {gap} consecutive frames "
                    f"(frames {frames[start].frame_index}..{frames[t - 1].frame_index}), "
                    f"max_gap={max_gap}"
                )
            left = frames[start - 1].keypoints[kp]
            right = frames[t].keypoints[kp]
            conf = min(float(left[2]), float(right[2]))
            for j in range(start, t):
                r = (j - start + 1) / (gap + 1)
                frame = frames[j]
                frame.keypoints[kp, 0] = left[0] + (right[0] - left[0]) * r
                frame.keypoints[kp, 1] = left[1] + (right[1] - left[1]) * r
                frame.keypoints[kp, 2] = conf
                frame.missing[kp] = False
                stats.values_interpolated += 1

    stats.frames_out = len(frames)
    return KeypointSeries(view=series.view, frames=frames, fps=series.fps), stats
