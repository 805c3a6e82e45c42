"""ACL injury risk scoring from 2D human-keypoint time series.

Pipeline: ingest BODY_25 keypoint series for the sagittal and frontal
camera views, extract five landing-technique features, grade each on a
{1, 5, 9} scale through piecewise thresholds, and aggregate the grades
into a total score with AHP-derived index weights.
"""

from .assessment import assess_batch, assess_trial, emit_report, emit_traces
from .config import RunConfig, load_config
from .errors import AclRiskError

__version__ = "0.1.0"

__all__ = [
    "AclRiskError",
    "RunConfig",
    "assess_batch",
    "assess_trial",
    "emit_report",
    "emit_traces",
    "load_config",
    "__version__",
]
