"""Run configuration: every tunable of the pipeline in one place.

Configs load from a JSON file whose keys mirror the RunConfig field
names, with environment-variable overrides prefixed ``ACLRISK_`` (for CI
use, e.g. ``ACLRISK_CONFIDENCE_THRESHOLD=0.5``). Judgment matrices are
given as row lists; fraction literals like "1/3" are accepted.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import ahp
from .errors import AclRiskError, InvalidMatrix, OrderMismatch
from .scoring import ThresholdConfig

ENV_PREFIX = "ACLRISK_"

WEIGHT_SOURCES = ("sum-method", "geometric", "table5-compat", "explicit")
N_INDICES = 5


class ConfigError(AclRiskError):
    """Configuration file or override is invalid."""


@dataclass
class RunConfig:
    confidence_threshold: float = 0.4
    max_gap: int = 5
    person_policy: str = "best"          # best | strict
    window_mode: str = "full"            # full | landing
    window_duration_s: float = 1.0
    sagittal_side: str = "right"         # right | left (mirrored recordings)
    default_fps: float = 30.0
    thresholds: ThresholdConfig = field(default_factory=ThresholdConfig)
    weight_source: str = "sum-method"
    judgment_matrix: np.ndarray = field(
        default_factory=lambda: ahp.DEFAULT_INDEX_MATRIX.copy())
    weights: list[float] | None = None   # used when weight_source == "explicit"
    criterion_matrix: np.ndarray | None = None
    criterion_groups: list[list[int]] | None = None  # index positions per criterion
    hierarchical: bool = False
    force: bool = False

    def validate(self) -> None:
        if self.weight_source not in WEIGHT_SOURCES:
            raise ConfigError(f"weight_source must be one of {WEIGHT_SOURCES}")
        if self.person_policy not in ("best", "strict"):
            raise ConfigError("person_policy must be 'best' or 'strict'")
        if self.window_mode not in ("full", "landing"):
            raise ConfigError("window_mode must be 'full' or 'landing'")
        if self.sagittal_side not in ("right", "left"):
            raise ConfigError("sagittal_side must be 'right' or 'left'")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ConfigError("confidence_threshold must lie in [0, 1]")
        if self.max_gap < 0:
            raise ConfigError("max_gap must be nonnegative")
        if self.weight_source == "explicit":
            if self.weights is None or len(self.weights) != N_INDICES:
                raise ConfigError(f"explicit weights must have length {N_INDICES}")
            if any(w < 0 for w in self.weights):
                raise ConfigError("explicit weights must be nonnegative")
        violations = ahp.validate(self.judgment_matrix)
        if violations:
            raise InvalidMatrix(violations)
        if self.hierarchical:
            if self.criterion_matrix is None or self.criterion_groups is None:
                raise ConfigError(
                    "hierarchical mode needs criterion_matrix and criterion_groups")
            violations = ahp.validate(self.criterion_matrix)
            if violations:
                raise InvalidMatrix(violations)
            if len(self.criterion_groups) != self.criterion_matrix.shape[0]:
                raise OrderMismatch("one group per criterion row required")

    def as_dict(self) -> dict:
        return {
            "confidence_threshold": self.confidence_threshold,
            "max_gap": self.max_gap,
            "person_policy": self.person_policy,
            "window_mode": self.window_mode,
            "window_duration_s": self.window_duration_s,
            "sagittal_side": self.sagittal_side,
            "default_fps": self.default_fps,
            "thresholds": self.thresholds.as_dict(),
            "weight_source": self.weight_source,
            "judgment_matrix": [[float(v) for v in row] for row in self.judgment_matrix],
            "weights": list(self.weights) if self.weights is not None else None,
            "criterion_matrix": (
                [[float(v) for v in row] for row in self.criterion_matrix]
                if self.criterion_matrix is not None else None),
            "criterion_groups": self.criterion_groups,
            "hierarchical": self.hierarchical,
            "force": self.force,
        }


_SCALAR_FIELDS = {
    "confidence_threshold": float,
    "max_gap": int,
    "person_policy": str,
    "window_mode": str,
    "window_duration_s": float,
    "sagittal_side": str,
    "default_fps": float,
    "weight_source": str,
    "hierarchical": bool,
    "force": bool,
}


def _parse_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, str):
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
    raise ConfigError(f"expected a boolean, got {value!r}")


def config_from_dict(data: dict) -> RunConfig:
    cfg = RunConfig()
    known = set(_SCALAR_FIELDS) | {
        "thresholds", "judgment_matrix", "weights", "criterion_matrix",
        "criterion_groups",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for name, conv in _SCALAR_FIELDS.items():
        if name in data:
            try:
                value = _parse_bool(data[name]) if conv is bool else conv(data[name])
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad value for {name}: {exc}") from exc
            setattr(cfg, name, value)
    if "thresholds" in data:
        try:
            cfg.thresholds = ThresholdConfig(**data["thresholds"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad thresholds section: {exc}") from exc
    if "judgment_matrix" in data:
        cfg.judgment_matrix = ahp.parse_matrix(data["judgment_matrix"])
    if "weights" in data and data["weights"] is not None:
        cfg.weights = [float(v) for v in data["weights"]]
    if "criterion_matrix" in data and data["criterion_matrix"] is not None:
        cfg.criterion_matrix = ahp.parse_matrix(data["criterion_matrix"])
    if "criterion_groups" in data and data["criterion_groups"] is not None:
        cfg.criterion_groups = [[int(i) for i in group]
                                for group in data["criterion_groups"]]
    cfg.validate()
    return cfg


def load_config(path: str | Path | None = None,
                environ: dict | None = None) -> RunConfig:
    """Config from file (optional), then environment overrides, then validation."""
    data: dict = {}
    if path is not None:
        try:
            data = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
    env = os.environ if environ is None else environ
    for name, conv in _SCALAR_FIELDS.items():
        key = ENV_PREFIX + name.upper()
        if key in env:
            data[name] = env[key]
    return config_from_dict(data)
