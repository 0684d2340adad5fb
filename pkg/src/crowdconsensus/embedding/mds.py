"""Metric multidimensional scaling onto the plane.

Classical (Torgerson) scaling gives a deterministic starting layout;
SMACOF majorization then drives raw stress down monotonically. No
randomness is involved, so the same distance matrix always yields the
same picture.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateInput

_MAX_ITERATIONS = 300
_REL_TOLERANCE = 1e-9
_EPS = 1e-12


@dataclass(frozen=True)
class MdsResult:
    positions: np.ndarray
    stress: float
    iterations: int
    # stress after init and after each accepted majorization step
    trace: tuple[float, ...]


def _check_distances(distances: np.ndarray) -> np.ndarray:
    d = np.asarray(distances, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DegenerateInput(f"distance matrix must be square, got shape {d.shape}")
    if d.shape[0] == 0:
        raise DegenerateInput("cannot embed zero points")
    if not np.allclose(d, d.T, atol=1e-8):
        raise DegenerateInput("distance matrix must be symmetric")
    if (d < -1e-12).any():
        raise DegenerateInput("distances must be non-negative")
    if np.abs(np.diag(d)).max(initial=0.0) > 1e-8:
        raise DegenerateInput("distance matrix must have a zero diagonal")
    return np.abs(d)


def _fix_signs(positions: np.ndarray) -> np.ndarray:
    # eigenvectors are sign-ambiguous; orient each axis so the largest
    # magnitude coordinate is positive
    for axis in range(positions.shape[1]):
        column = positions[:, axis]
        if len(column) and column[np.argmax(np.abs(column))] < 0:
            positions[:, axis] = -column
    return positions


def classical_scaling(distances: np.ndarray, n_components: int = 2) -> np.ndarray:
    """Torgerson embedding: double-center squared distances, take the
    top eigenpairs. Negative eigenvalues (non-Euclidean input) clip to 0.
    """
    n = distances.shape[0]
    squared = distances**2
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * centering @ squared @ centering
    eigenvalues, eigenvectors = np.linalg.eigh(b)
    order = np.argsort(eigenvalues)[::-1][:n_components]
    scales = np.sqrt(np.clip(eigenvalues[order], 0.0, None))
    positions = np.zeros((n, n_components))
    positions[:, : len(order)] = eigenvectors[:, order] * scales
    return _fix_signs(positions)


def stress(distances: np.ndarray, positions: np.ndarray) -> float:
    """Raw stress: sum over pairs of squared (target - embedded) error."""
    embedded = np.sqrt(
        np.sum((positions[:, None, :] - positions[None, :, :]) ** 2, axis=2)
    )
    return float(np.sum(np.triu(distances - embedded, k=1) ** 2))


def _guttman_step(distances: np.ndarray, positions: np.ndarray) -> np.ndarray:
    n = distances.shape[0]
    embedded = np.sqrt(
        np.sum((positions[:, None, :] - positions[None, :, :]) ** 2, axis=2)
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(embedded > _EPS, distances / np.where(embedded > _EPS, embedded, 1.0), 0.0)
    b = -ratio
    b[np.arange(n), np.arange(n)] = ratio.sum(axis=1)
    return (b @ positions) / n


def mds(
    distances: np.ndarray,
    max_iterations: int = _MAX_ITERATIONS,
    rel_tolerance: float = _REL_TOLERANCE,
) -> MdsResult:
    """Embed a symmetric distance matrix in 2-D.

    Majorization guarantees non-increasing stress in exact arithmetic;
    if floating point ever nudges it upward the step is reverted and
    iteration stops, so the reported stress never exceeds any
    intermediate value.
    """
    d = _check_distances(distances)
    n = d.shape[0]
    if n < 2:
        raise DegenerateInput(f"need at least 2 points to embed, got {n}")
    if float(d.max()) == 0.0:
        return MdsResult(np.zeros((n, 2)), 0.0, 0, (0.0,))
    positions = classical_scaling(d)
    current = stress(d, positions)
    trace = [current]
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        candidate = _guttman_step(d, positions)
        updated = stress(d, candidate)
        if updated > current:
            iterations -= 1
            break
        positions = candidate
        trace.append(updated)
        if current - updated <= rel_tolerance * max(current, _EPS):
            current = updated
            break
        current = updated
    return MdsResult(positions, current, iterations, tuple(trace))
