"""Domain types for crowd screening studies.

A study dataset bundles the segments cut from one fly-through recording
batch, the workers who viewed them, their binary judgments, free-form
comments, and the analyst's anomaly annotations. All values are immutable
snapshots: analytics modules never mutate a dataset, they derive from it.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from enum import Enum


class Answer(Enum):
    POLYP = "POLYP"
    POLYP_FREE = "POLYP_FREE"


class Direction(Enum):
    ANTEGRADE = "ANTEGRADE"
    RETROGRADE = "RETROGRADE"


class Orientation(Enum):
    SUPINE = "SUPINE"
    PRONE = "PRONE"


class GroundTruth(Enum):
    POLYP = "POLYP"
    POLYP_FREE = "POLYP_FREE"
    UNKNOWN = "UNKNOWN"


class AnnotationTarget(Enum):
    WORKER = "worker"
    SEGMENT = "segment"


# Empty categorical cells are normalized to this explicit category.
UNSPECIFIED = "unspecified"

# Categorical worker fields, in declaration order. These names double as
# cross-tabulation axes and embedding parameter names.
WORKER_CATEGORICAL_FIELDS = (
    "age_bracket",
    "gender",
    "education_level",
    "medical_expertise",
    "visualization_expertise",
    "reward_tier",
    "location",
)


@dataclass(frozen=True, slots=True)
class SegmentRecord:
    """One video segment in canonical fly-through order."""

    id: str
    dataset_id: str
    ordinal: int
    direction: Direction
    orientation: Orientation
    ground_truth: GroundTruth


@dataclass(frozen=True, slots=True)
class WorkerProfile:
    """Demographics, expertise, and incentive tier for one crowd worker.

    Expertise levels are ordinal 1..5 but participate in similarity
    analyses as categories, like the other profile fields.
    """

    id: str
    age_bracket: str
    gender: str
    education_level: str
    medical_expertise: int
    visualization_expertise: int
    reward_tier: str
    location: str

    def __post_init__(self) -> None:
        for name in ("medical_expertise", "visualization_expertise"):
            level = getattr(self, name)
            if not 1 <= level <= 5:
                raise ValueError(f"{name} must be in 1..5, got {level}")

    def category(self, field_name: str) -> str:
        """Categorical value of a profile field (expertise stringified)."""
        if field_name not in WORKER_CATEGORICAL_FIELDS:
            raise KeyError(field_name)
        return str(getattr(self, field_name))


@dataclass(frozen=True, slots=True)
class CrowdResponse:
    """One worker's judgment on one segment, with response time."""

    worker_id: str
    segment_id: str
    answer: Answer
    response_time_ms: int
    presentation_index: int
    submitted_at: dt.datetime

    def __post_init__(self) -> None:
        if self.response_time_ms <= 0:
            raise ValueError("response_time_ms must be > 0")
        if self.presentation_index < 1:
            raise ValueError("presentation_index must be >= 1")


@dataclass(frozen=True, slots=True)
class WorkerComment:
    """Free-form end-of-task feedback; at most one per worker per dataset."""

    worker_id: str
    dataset_id: str
    text: str


@dataclass(frozen=True, slots=True)
class AnomalyAnnotation:
    """Analyst mark on a worker or segment. The log is append-only; the
    latest annotation per target wins for display."""

    target: AnnotationTarget
    target_id: str
    marked_by: str
    marked_at: dt.datetime
    note: str


@dataclass(frozen=True)
class StudyDataset:
    """A validated study: manifest header plus all member records.

    Segments are stored in canonical ordinal order; responses keep their
    ingestion order; the annotation log keeps append order.
    """

    id: str
    created_on: dt.date
    fov_degrees: int
    flythrough_speed: int
    segments: tuple[SegmentRecord, ...]
    workers: tuple[WorkerProfile, ...]
    responses: tuple[CrowdResponse, ...]
    comments: tuple[WorkerComment, ...] = ()
    annotations: tuple[AnomalyAnnotation, ...] = ()

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("dataset id must be non-empty")
        if self.fov_degrees <= 0 or self.flythrough_speed <= 0:
            raise ValueError("fov_degrees and flythrough_speed must be > 0")
        if not self.segments:
            raise ValueError("a dataset needs at least one segment")
        ordinals = [s.ordinal for s in self.segments]
        if len(set(ordinals)) != len(ordinals):
            raise ValueError("segment ordinals must be unique")
        if list(ordinals) != sorted(ordinals):
            raise ValueError("segments must be in ordinal order")
        seg_ids = {s.id for s in self.segments}
        if len(seg_ids) != len(self.segments):
            raise ValueError("segment ids must be unique")
        worker_ids = {w.id for w in self.workers}
        if len(worker_ids) != len(self.workers):
            raise ValueError("worker ids must be unique")
        seen: set[tuple[str, str]] = set()
        for r in self.responses:
            if r.worker_id not in worker_ids:
                raise ValueError(f"response refers to unknown worker {r.worker_id!r}")
            if r.segment_id not in seg_ids:
                raise ValueError(f"response refers to unknown segment {r.segment_id!r}")
            key = (r.worker_id, r.segment_id)
            if key in seen:
                raise ValueError(f"duplicate response for {key}")
            seen.add(key)

    @property
    def segment_ids(self) -> tuple[str, ...]:
        """Segment ids in canonical ordinal order."""
        return tuple(s.id for s in self.segments)

    @property
    def worker_ids(self) -> frozenset[str]:
        return frozenset(w.id for w in self.workers)

    def segment_by_id(self, segment_id: str) -> SegmentRecord:
        for s in self.segments:
            if s.id == segment_id:
                return s
        raise KeyError(segment_id)

    def worker_by_id(self, worker_id: str) -> WorkerProfile:
        for w in self.workers:
            if w.id == worker_id:
                return w
        raise KeyError(worker_id)

    def truth_map(self) -> dict[str, GroundTruth]:
        return {s.id: s.ground_truth for s in self.segments}

    def has_ground_truth(self) -> bool:
        """True when at least one segment carries a known label."""
        return any(s.ground_truth is not GroundTruth.UNKNOWN for s in self.segments)

    def responses_by_segment(self) -> dict[str, list[CrowdResponse]]:
        by_seg: dict[str, list[CrowdResponse]] = {s.id: [] for s in self.segments}
        for r in self.responses:
            by_seg[r.segment_id].append(r)
        return by_seg

    def responses_by_worker(self) -> dict[str, list[CrowdResponse]]:
        by_worker: dict[str, list[CrowdResponse]] = {w.id: [] for w in self.workers}
        for r in self.responses:
            by_worker[r.worker_id].append(r)
        return by_worker

    def marked_workers(self) -> frozenset[str]:
        """Workers with at least one anomaly annotation."""
        return frozenset(
            a.target_id for a in self.annotations if a.target is AnnotationTarget.WORKER
        )

    def marked_segments(self) -> frozenset[str]:
        return frozenset(
            a.target_id for a in self.annotations if a.target is AnnotationTarget.SEGMENT
        )

    def with_annotations(self, annotations: tuple[AnomalyAnnotation, ...]) -> "StudyDataset":
        """Snapshot with a replaced annotation log (used on append)."""
        return StudyDataset(
            id=self.id,
            created_on=self.created_on,
            fov_degrees=self.fov_degrees,
            flythrough_speed=self.flythrough_speed,
            segments=self.segments,
            workers=self.workers,
            responses=self.responses,
            comments=self.comments,
            annotations=annotations,
        )


def category_vocabularies(
    workers: tuple[WorkerProfile, ...] | list[WorkerProfile],
) -> dict[str, tuple[str, ...]]:
    """Per-field category vocabulary in first-appearance (declaration) order.

    The workers file doubles as the vocabulary declaration for a study:
    stable order makes cross-view category colors and cross-tab output
    deterministic.
    """
    vocab: dict[str, list[str]] = {name: [] for name in WORKER_CATEGORICAL_FIELDS}
    for w in workers:
        for name in WORKER_CATEGORICAL_FIELDS:
            value = w.category(name)
            if value not in vocab[name]:
                vocab[name].append(value)
    return {name: tuple(values) for name, values in vocab.items()}
