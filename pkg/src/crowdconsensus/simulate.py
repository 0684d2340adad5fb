"""Synthetic study generator with known ground truth.

Crowds are mixtures of behavioural archetypes (reliable, coin-flipping,
constant-answer, yes-biased), so analytic expectations like majority
vote accuracy can be checked against what the pipeline measures. All
randomness flows from one seeded generator.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import EvenN, InfeasibleAssignment
from .model import (
    Answer,
    CrowdResponse,
    Direction,
    GroundTruth,
    Orientation,
    SegmentRecord,
    StudyDataset,
    WorkerProfile,
)

MIN_RESPONSE_TIME_MS = 100

_AGE_BRACKETS = ("18-29", "30-44", "45-59", "60+")
_GENDERS = ("female", "male", "nonbinary")
_EDUCATION = ("secondary", "bachelor", "master", "doctorate")
_REWARD_TIERS = ("standard", "bonus")
_LOCATIONS = ("us", "eu", "asia")


class WorkerKind(Enum):
    RELIABLE = "reliable"
    RANDOM_CLICKER = "random_clicker"
    CONSTANT = "constant"
    BIASED = "biased"


@dataclass(frozen=True)
class WorkerModel:
    """How many workers of one archetype to simulate, and their pace.

    reliable needs p_correct, constant needs answer, biased needs p_yes;
    random_clicker takes no behaviour parameter. Per-segment response
    times are normal(mean_time_ms, sd_time_ms) truncated at 100 ms.
    """

    kind: WorkerKind
    count: int
    p_correct: float | None = None
    answer: Answer | None = None
    p_yes: float | None = None
    mean_time_ms: float = 3000.0
    sd_time_ms: float = 1000.0

    def __post_init__(self) -> None:
        if isinstance(self.answer, str):
            object.__setattr__(self, "answer", Answer(self.answer))
        if self.count < 1:
            raise ValueError("count must be >= 1")
        if self.mean_time_ms <= 0 or self.sd_time_ms < 0:
            raise ValueError("time model needs mean > 0 and sd >= 0")
        if self.kind is WorkerKind.RELIABLE:
            if self.p_correct is None or not 0.0 <= self.p_correct <= 1.0:
                raise ValueError("reliable workers need p_correct in [0, 1]")
        elif self.kind is WorkerKind.CONSTANT:
            if self.answer is None:
                raise ValueError("constant workers need an answer")
        elif self.kind is WorkerKind.BIASED:
            if self.p_yes is None or not 0.0 <= self.p_yes <= 1.0:
                raise ValueError("biased workers need p_yes in [0, 1]")


@dataclass(frozen=True)
class SimulationSpec:
    dataset_id: str
    created_on: dt.date
    n_segments: int
    polyp_fraction: float
    views_per_segment: int
    workers: tuple[WorkerModel, ...]
    seed: int = 0
    fov_degrees: int = 90
    flythrough_speed: int = 1

    def __post_init__(self) -> None:
        if self.n_segments < 1:
            raise ValueError("n_segments must be >= 1")
        if not 0.0 <= self.polyp_fraction <= 1.0:
            raise ValueError("polyp_fraction must be in [0, 1]")
        if self.views_per_segment < 1:
            raise ValueError("views_per_segment must be >= 1")
        if not self.workers:
            raise ValueError("at least one worker model is required")

    @property
    def n_workers(self) -> int:
        return sum(m.count for m in self.workers)


def spec_from_json(text: str) -> SimulationSpec:
    """Parse a spec file. Worker entries carry kind, count, the kind's
    behaviour parameter, and optionally mean_time_ms/sd_time_ms."""
    raw = json.loads(text)
    models = []
    for entry in raw["workers"]:
        kwargs = {
            "kind": WorkerKind(entry["kind"]),
            "count": int(entry["count"]),
        }
        if "p_correct" in entry:
            kwargs["p_correct"] = float(entry["p_correct"])
        if "answer" in entry:
            kwargs["answer"] = Answer(entry["answer"])
        if "p_yes" in entry:
            kwargs["p_yes"] = float(entry["p_yes"])
        if "mean_time_ms" in entry:
            kwargs["mean_time_ms"] = float(entry["mean_time_ms"])
        if "sd_time_ms" in entry:
            kwargs["sd_time_ms"] = float(entry["sd_time_ms"])
        models.append(WorkerModel(**kwargs))
    return SimulationSpec(
        dataset_id=raw["dataset_id"],
        created_on=dt.date.fromisoformat(raw["created_on"]),
        n_segments=int(raw["n_segments"]),
        polyp_fraction=float(raw["polyp_fraction"]),
        views_per_segment=int(raw["views_per_segment"]),
        workers=tuple(models),
        seed=int(raw.get("seed", 0)),
        fov_degrees=int(raw.get("fov_degrees", 90)),
        flythrough_speed=int(raw.get("flythrough_speed", 1)),
    )


def spec_to_json(spec: SimulationSpec) -> str:
    models = []
    for model in spec.workers:
        entry: dict = {"kind": model.kind.value, "count": model.count}
        if model.p_correct is not None:
            entry["p_correct"] = model.p_correct
        if model.answer is not None:
            entry["answer"] = model.answer.value
        if model.p_yes is not None:
            entry["p_yes"] = model.p_yes
        entry["mean_time_ms"] = model.mean_time_ms
        entry["sd_time_ms"] = model.sd_time_ms
        models.append(entry)
    return json.dumps(
        {
            "dataset_id": spec.dataset_id,
            "created_on": spec.created_on.isoformat(),
            "n_segments": spec.n_segments,
            "polyp_fraction": spec.polyp_fraction,
            "views_per_segment": spec.views_per_segment,
            "workers": models,
            "seed": spec.seed,
            "fov_degrees": spec.fov_degrees,
            "flythrough_speed": spec.flythrough_speed,
        },
        indent=2,
    )


def _profiles(spec: SimulationSpec) -> tuple[list[WorkerProfile], list[WorkerModel]]:
    profiles = []
    models = []
    index = 0
    for model in spec.workers:
        for _ in range(model.count):
            profiles.append(
                WorkerProfile(
                    id=f"W{index + 1:03d}",
                    age_bracket=_AGE_BRACKETS[index % len(_AGE_BRACKETS)],
                    gender=_GENDERS[index % len(_GENDERS)],
                    education_level=_EDUCATION[index % len(_EDUCATION)],
                    medical_expertise=index % 5 + 1,
                    visualization_expertise=(index + 2) % 5 + 1,
                    reward_tier=_REWARD_TIERS[index % len(_REWARD_TIERS)],
                    location=_LOCATIONS[index % len(_LOCATIONS)],
                )
            )
            models.append(model)
            index += 1
    return profiles, models


def _segments(spec: SimulationSpec, rng: np.random.Generator) -> list[SegmentRecord]:
    n_polyps = round(spec.n_segments * spec.polyp_fraction)
    polyp_rows = set(rng.permutation(spec.n_segments)[:n_polyps].tolist())
    segments = []
    for row in range(spec.n_segments):
        segments.append(
            SegmentRecord(
                id=f"S{row + 1:03d}",
                dataset_id=spec.dataset_id,
                ordinal=row + 1,
                direction=Direction.ANTEGRADE if row % 2 == 0 else Direction.RETROGRADE,
                orientation=Orientation.SUPINE if row % 4 < 2 else Orientation.PRONE,
                ground_truth=(
                    GroundTruth.POLYP if row in polyp_rows else GroundTruth.POLYP_FREE
                ),
            )
        )
    return segments


def _answer(
    model: WorkerModel, truth: GroundTruth, rng: np.random.Generator
) -> Answer:
    if model.kind is WorkerKind.RELIABLE:
        correct = rng.random() < model.p_correct
        truth_answer = (
            Answer.POLYP if truth is GroundTruth.POLYP else Answer.POLYP_FREE
        )
        if correct:
            return truth_answer
        return Answer.POLYP if truth_answer is Answer.POLYP_FREE else Answer.POLYP_FREE
    if model.kind is WorkerKind.RANDOM_CLICKER:
        return Answer.POLYP if rng.random() < 0.5 else Answer.POLYP_FREE
    if model.kind is WorkerKind.CONSTANT:
        return model.answer
    return Answer.POLYP if rng.random() < model.p_yes else Answer.POLYP_FREE


def _response_time(model: WorkerModel, rng: np.random.Generator) -> int:
    sample = rng.normal(model.mean_time_ms, model.sd_time_ms)
    return max(MIN_RESPONSE_TIME_MS, round(sample))


def simulate(spec: SimulationSpec) -> StudyDataset:
    """Generate a full study from archetype mixtures, deterministically.

    Viewers are assigned round-robin so each segment gets exactly
    views_per_segment distinct workers and the load spreads evenly;
    that requires views_per_segment <= total workers.
    """
    if spec.views_per_segment > spec.n_workers:
        raise InfeasibleAssignment(
            f"views_per_segment={spec.views_per_segment} exceeds "
            f"{spec.n_workers} simulated worker(s)"
        )
    rng = np.random.default_rng(spec.seed)
    profiles, models = _profiles(spec)
    segments = _segments(spec, rng)
    base = dt.datetime.combine(
        spec.created_on, dt.time(12, 0), tzinfo=dt.timezone.utc
    )
    n = len(profiles)
    per_worker_index = {p.id: 0 for p in profiles}
    per_worker_clock = {p.id: base for p in profiles}
    responses = []
    cursor = 0
    for segment in segments:
        for _ in range(spec.views_per_segment):
            worker = profiles[cursor % n]
            model = models[cursor % n]
            cursor += 1
            time_ms = _response_time(model, rng)
            per_worker_index[worker.id] += 1
            per_worker_clock[worker.id] += dt.timedelta(milliseconds=time_ms)
            responses.append(
                CrowdResponse(
                    worker_id=worker.id,
                    segment_id=segment.id,
                    answer=_answer(model, segment.ground_truth, rng),
                    response_time_ms=time_ms,
                    presentation_index=per_worker_index[worker.id],
                    submitted_at=per_worker_clock[worker.id],
                )
            )
    return StudyDataset(
        id=spec.dataset_id,
        created_on=spec.created_on,
        fov_degrees=spec.fov_degrees,
        flythrough_speed=spec.flythrough_speed,
        segments=tuple(segments),
        workers=tuple(profiles),
        responses=tuple(responses),
    )


def expected_majority_accuracy(p_correct: float, n_viewers: int) -> float:
    """Probability an odd crowd of independent p-accurate viewers gets a
    segment right by majority vote: sum_{k > n/2} C(n,k) p^k (1-p)^(n-k).
    """
    if n_viewers < 1 or n_viewers % 2 == 0:
        raise EvenN(f"majority vote needs an odd crowd, got {n_viewers}")
    if not 0.0 <= p_correct <= 1.0:
        raise ValueError("p_correct must be in [0, 1]")
    return sum(
        math.comb(n_viewers, k) * p_correct**k * (1.0 - p_correct) ** (n_viewers - k)
        for k in range(n_viewers // 2 + 1, n_viewers + 1)
    )
