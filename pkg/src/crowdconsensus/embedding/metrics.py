"""Pairwise distances behind the projection views.

Workers are compared on categorical profile fields with a weighted
overlap distance; segments on min-max-scaled numeric behaviour
(crowd accuracy, mean response time) with a weighted Euclidean
distance. Weight vectors let one attribute dominate while the rest
stay faintly present instead of vanishing.
"""

from __future__ import annotations

import numpy as np

from ..errors import SchemaMismatch, StatisticsUnavailable, UnknownAxis
from ..model import (
    Answer,
    GroundTruth,
    StudyDataset,
    WORKER_CATEGORICAL_FIELDS,
)

SEGMENT_FEATURE_FIELDS = ("accuracy", "mean_time")

DEFAULT_UNSELECTED_WEIGHT = 0.05


def overlap_distance(a: tuple, b: tuple, weights: np.ndarray) -> float:
    """Weighted fraction of attributes on which two tuples disagree.

    d(A, B) = sum(w_i over i where A_i != B_i) / N for N attributes.
    """
    if not len(a) == len(b) == len(weights):
        raise SchemaMismatch("attribute tuples and weights must share a length")
    mismatch = sum(w for x, y, w in zip(a, b, weights) if x != y)
    return float(mismatch) / len(weights)


def weighted_euclidean(a: np.ndarray, b: np.ndarray, weights: np.ndarray) -> float:
    """sqrt(sum((A_i - B_i)^2 * w_i))."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not a.shape == b.shape == w.shape:
        raise SchemaMismatch("vectors and weights must share a dimension")
    return float(np.sqrt(np.sum((a - b) ** 2 * w)))


def weight_vector(
    field_names: tuple[str, ...],
    weights: dict[str, float] | None,
    unselected_weight: float = DEFAULT_UNSELECTED_WEIGHT,
) -> np.ndarray:
    """Per-attribute weights from a selection mapping.

    No mapping means every attribute weighs 1.0 (the equal-weight
    default). With a mapping, named attributes take their given weight
    and the rest fall to a small residual, so focused clustering still
    lets the other attributes break ties. Unknown names raise
    UnknownAxis so a typo cannot silently fall back to uniform.
    """
    if weights is None:
        return np.ones(len(field_names))
    unknown = [name for name in weights if name not in field_names]
    if unknown:
        raise UnknownAxis(f"unknown attribute(s) {unknown!r}; expected {field_names!r}")
    if not weights:
        raise SchemaMismatch("weight mapping must name at least one attribute")
    if any(w < 0 for w in weights.values()):
        raise SchemaMismatch("weights must be >= 0")
    if all(w == 0 for w in weights.values()) and unselected_weight == 0:
        raise SchemaMismatch("weights must not all be zero")
    return np.array(
        [float(weights.get(name, unselected_weight)) for name in field_names]
    )


def worker_profile_matrix(
    dataset: StudyDataset,
    excluded_workers: frozenset[str] = frozenset(),
) -> tuple[list[str], list[tuple[str, ...]]]:
    """Worker ids plus their categorical profile tuples, id order."""
    workers = sorted(
        (w for w in dataset.workers if w.id not in excluded_workers),
        key=lambda w: w.id,
    )
    rows = [tuple(w.category(f) for f in WORKER_CATEGORICAL_FIELDS) for w in workers]
    return [w.id for w in workers], rows


def worker_distance_matrix(
    dataset: StudyDataset,
    weights_by_field: dict[str, float] | None = None,
    excluded_workers: frozenset[str] = frozenset(),
) -> tuple[list[str], np.ndarray]:
    ids, rows = worker_profile_matrix(dataset, excluded_workers)
    weights = weight_vector(WORKER_CATEGORICAL_FIELDS, weights_by_field)
    n = len(ids)
    distances = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = overlap_distance(rows[i], rows[j], weights)
            distances[i, j] = distances[j, i] = d
    return ids, distances


def segment_feature_matrix(
    dataset: StudyDataset,
    excluded_workers: frozenset[str] = frozenset(),
) -> tuple[list[str], np.ndarray]:
    """Viewed segments as min-max-scaled (accuracy, mean_time) rows.

    Accuracy is the fraction of viewers matching ground truth, so the
    whole matrix needs at least one truth-labelled viewed segment;
    segments without truth or viewers are left out. Columns are scaled
    to [0, 1]; a constant column scales to 0.
    """
    ids = []
    raw = []
    by_segment = dataset.responses_by_segment()
    for segment in dataset.segments:
        if segment.ground_truth is GroundTruth.UNKNOWN:
            continue
        responses = [
            r for r in by_segment[segment.id] if r.worker_id not in excluded_workers
        ]
        if not responses:
            continue
        truth_polyp = segment.ground_truth is GroundTruth.POLYP
        correct = sum((r.answer is Answer.POLYP) == truth_polyp for r in responses)
        ids.append(segment.id)
        raw.append(
            (
                correct / len(responses),
                sum(r.response_time_ms for r in responses) / len(responses),
            )
        )
    if not ids:
        raise StatisticsUnavailable(
            f"dataset {dataset.id!r} has no viewed truth-labelled segments to embed"
        )
    features = np.array(raw, dtype=float)
    lo = features.min(axis=0)
    span = features.max(axis=0) - lo
    span[span == 0.0] = 1.0
    return ids, (features - lo) / span


def segment_distance_matrix(
    dataset: StudyDataset,
    weights_by_field: dict[str, float] | None = None,
    excluded_workers: frozenset[str] = frozenset(),
) -> tuple[list[str], np.ndarray]:
    ids, features = segment_feature_matrix(dataset, excluded_workers)
    weights = weight_vector(SEGMENT_FEATURE_FIELDS, weights_by_field)
    deltas = features[:, None, :] - features[None, :, :]
    return ids, np.sqrt(np.sum(deltas**2 * weights, axis=2))
