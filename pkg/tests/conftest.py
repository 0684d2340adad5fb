"""Shared fixtures: a small hand-built study whose statistics are easy
to verify by hand, and a medium simulated study for integration tests."""

from __future__ import annotations

import datetime as dt

import pytest

from crowdconsensus.model import (
    AnomalyAnnotation,
    AnnotationTarget,
    Answer,
    CrowdResponse,
    Direction,
    GroundTruth,
    Orientation,
    SegmentRecord,
    StudyDataset,
    WorkerComment,
    WorkerProfile,
)
from crowdconsensus.simulate import (
    SimulationSpec,
    WorkerKind,
    WorkerModel,
    simulate,
)

NOON = dt.datetime(2026, 3, 1, 12, 0, tzinfo=dt.timezone.utc)


def _stamp(minutes: int) -> dt.datetime:
    return NOON + dt.timedelta(minutes=minutes)


def make_profile(worker_id: str, **overrides) -> WorkerProfile:
    fields = {
        "age_bracket": "25-34",
        "gender": "female",
        "education_level": "bachelor",
        "medical_expertise": 1,
        "visualization_expertise": 3,
        "reward_tier": "standard",
        "location": "europe",
    }
    fields.update(overrides)
    return WorkerProfile(id=worker_id, **fields)


def make_segment(segment_id: str, dataset_id: str, ordinal: int,
                 truth: GroundTruth) -> SegmentRecord:
    return SegmentRecord(
        id=segment_id,
        dataset_id=dataset_id,
        ordinal=ordinal,
        direction=Direction.ANTEGRADE if ordinal % 2 else Direction.RETROGRADE,
        orientation=Orientation.SUPINE,
        ground_truth=truth,
    )


def _response(worker_id: str, segment_id: str, answer: Answer,
              time_ms: int, index: int) -> CrowdResponse:
    return CrowdResponse(
        worker_id=worker_id,
        segment_id=segment_id,
        answer=answer,
        response_time_ms=time_ms,
        presentation_index=index,
        submitted_at=_stamp(index),
    )


def grid_dataset(votes: dict[str, dict[str, bool]],
                 truth: dict[str, GroundTruth]) -> StudyDataset:
    """Build a study straight from a worker -> segment -> is_polyp grid."""
    segment_ids = sorted(truth)
    segments = tuple(
        make_segment(sid, "GRID", i + 1, truth[sid])
        for i, sid in enumerate(segment_ids)
    )
    workers = tuple(make_profile(wid) for wid in sorted(votes))
    responses = []
    for wid in sorted(votes):
        for index, sid in enumerate(sorted(votes[wid]), start=1):
            answer = Answer.POLYP if votes[wid][sid] else Answer.POLYP_FREE
            responses.append(_response(wid, sid, answer, 1000, index))
    return StudyDataset(
        id="GRID",
        created_on=dt.date(2026, 1, 1),
        fov_degrees=90,
        flythrough_speed=1,
        segments=segments,
        workers=workers,
        responses=tuple(responses),
    )


@pytest.fixture()
def tiny_dataset() -> StudyDataset:
    """3 workers, 4 segments, 8 responses; all margins known by hand.

    Votes (polyp / viewers): S1 2/3, S2 0/2, S3 1/3, S4 1/1.
    Truth: S1 polyp, S2 polyp, S3 polyp-free, S4 unknown.
    At threshold 50: labels P, PF, PF, P -> TP=1 FP=0 TN=1 FN=1.
    Worker totals (ms): W1 6000, W2 8000, W3 2500.
    """
    segments = (
        make_segment("S1", "TINY", 1, GroundTruth.POLYP),
        make_segment("S2", "TINY", 2, GroundTruth.POLYP),
        make_segment("S3", "TINY", 3, GroundTruth.POLYP_FREE),
        make_segment("S4", "TINY", 4, GroundTruth.UNKNOWN),
    )
    workers = (
        make_profile("W1", gender="female", age_bracket="25-34",
                     education_level="bachelor"),
        make_profile("W2", gender="male", age_bracket="25-34",
                     education_level="master", medical_expertise=4),
        make_profile("W3", gender="female", age_bracket="45-54",
                     education_level="bachelor", reward_tier="double"),
    )
    responses = (
        _response("W1", "S1", Answer.POLYP, 1000, 1),
        _response("W1", "S2", Answer.POLYP_FREE, 2000, 2),
        _response("W1", "S3", Answer.POLYP, 3000, 3),
        _response("W2", "S1", Answer.POLYP, 2000, 1),
        _response("W2", "S2", Answer.POLYP_FREE, 4000, 2),
        _response("W2", "S3", Answer.POLYP_FREE, 2000, 3),
        _response("W3", "S1", Answer.POLYP_FREE, 500, 1),
        _response("W3", "S3", Answer.POLYP_FREE, 500, 2),
        _response("W3", "S4", Answer.POLYP, 1500, 3),
    )
    comments = (
        WorkerComment("W1", "TINY", "The video was fast, too fast to judge."),
        WorkerComment("W2", "TINY", "Fast video; difficult!"),
    )
    return StudyDataset(
        id="TINY",
        created_on=dt.date(2026, 3, 1),
        fov_degrees=90,
        flythrough_speed=1,
        segments=segments,
        workers=workers,
        responses=responses,
        comments=comments,
    )


@pytest.fixture()
def marked_tiny(tiny_dataset: StudyDataset) -> StudyDataset:
    """tiny_dataset with W2 and S4 flagged by an analyst."""
    marks = (
        AnomalyAnnotation(AnnotationTarget.WORKER, "W2", "analyst", NOON, "slow"),
        AnomalyAnnotation(AnnotationTarget.SEGMENT, "S4", "analyst", NOON, "odd"),
    )
    return tiny_dataset.with_annotations(marks)


@pytest.fixture(scope="session")
def sim_dataset() -> StudyDataset:
    """Deterministic simulated study: 6 mostly reliable workers."""
    spec = SimulationSpec(
        dataset_id="SIMFIX",
        created_on=dt.date(2026, 4, 2),
        n_segments=30,
        polyp_fraction=0.5,
        views_per_segment=5,
        workers=(
            WorkerModel(kind=WorkerKind.RELIABLE, count=4, p_correct=0.85),
            WorkerModel(kind=WorkerKind.CONSTANT, count=1, answer=Answer.POLYP),
            WorkerModel(kind=WorkerKind.RANDOM_CLICKER, count=1,
                        mean_time_ms=400.0, sd_time_ms=80.0),
        ),
        seed=20260402,
    )
    return simulate(spec)
