"""Exception types shared across the package.

Every error raised inside the assessment pipeline carries an optional
``stage`` label ("ingest", "preprocess", "extract", ...) so callers can
tell which step failed without parsing messages.
"""

from __future__ import annotations


class AclRiskError(Exception):
    """Base class for all package errors."""

    def __init__(self, message: str, stage: str | None = None):
        super().__init__(message)
        self.stage = stage

    def __str__(self) -> str:
        base = super().__str__()
        if self.stage:
            return f"[{self.stage}] {base}"
        return base


# -- pose ingestion ------------------------------------------------------

class MalformedDocument(AclRiskError):
    """Keypoint document violates the expected schema."""


class NoPersonDetected(AclRiskError):
    """Frame document contains an empty people list."""


class AmbiguousPerson(AclRiskError):
    """Strict person policy hit a frame with more than one person."""


class EmptySource(AclRiskError):
    """Series source holds no frames."""


class SeriesParseError(AclRiskError):
    """One or more frame documents failed to parse.

    ``failures`` is a list of (frame identifier, error) pairs so every
    offending frame is reported at once.
    """

    def __init__(self, failures: list[tuple[str, Exception]], stage: str | None = None):
        self.failures = failures
        detail = "; ".join(f"{fid}: {err}" for fid, err in failures)
        super().__init__(f"{len(failures)} frame(s) failed to parse: {detail}", stage)


class GapTooLong(AclRiskError):
    """Required keypoint missing for more consecutive interior frames than max_gap."""


class AllFramesInvalid(AclRiskError):
    """No frame survives preprocessing with all required keypoints present."""


# -- kinematics ----------------------------------------------------------

class DegenerateVector(AclRiskError):
    """A joint vector has (near-)zero length, i.e. coincident keypoints."""


class WindowEmpty(AclRiskError):
    """Analysis window selection produced no frames."""


# -- scoring -------------------------------------------------------------

class OutOfRange(AclRiskError):
    """Feature value outside the grader's domain."""


class InvalidGrade(AclRiskError):
    """Grade value is not one of 1, 5, 9."""


# -- AHP -----------------------------------------------------------------

class InvalidMatrix(AclRiskError):
    """Judgment matrix fails structural validation."""

    def __init__(self, violations: list[str], stage: str | None = None):
        self.violations = violations
        super().__init__("; ".join(violations), stage)


class OrderMismatch(AclRiskError):
    """Vector/matrix sizes do not agree."""


class ConsistencyFailure(AclRiskError):
    """Judgment matrix consistency ratio is at or above the 0.1 threshold."""


# -- assessment / synthesis / io ----------------------------------------

class IoFailure(AclRiskError):
    """Filesystem operation failed while emitting outputs."""


class InvalidScript(AclRiskError):
    """Motion script parameters violate their constraints."""
