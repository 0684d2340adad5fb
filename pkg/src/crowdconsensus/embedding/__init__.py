"""Distance metrics and 2-D projections for workers and segments."""

from .metrics import (
    SEGMENT_FEATURE_FIELDS,
    overlap_distance,
    segment_distance_matrix,
    segment_feature_matrix,
    weight_vector,
    weighted_euclidean,
    worker_distance_matrix,
    worker_profile_matrix,
)
from .mds import mds
from .tsne import tsne
from .layout import Glyph, LayoutResult, build_glyphs, resolve_overlaps

__all__ = [
    "SEGMENT_FEATURE_FIELDS",
    "overlap_distance",
    "segment_distance_matrix",
    "segment_feature_matrix",
    "weight_vector",
    "weighted_euclidean",
    "worker_distance_matrix",
    "worker_profile_matrix",
    "mds",
    "tsne",
    "Glyph",
    "LayoutResult",
    "build_glyphs",
    "resolve_overlaps",
]
