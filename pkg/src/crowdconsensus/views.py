"""View-model builders: crowd composition, comments, history, summaries.

These produce plain data ready for serialization; no rendering concerns
live here. Counting invariants (ribbon totals, node sums) are part of
the contract and are what the tests pin down.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from datetime import date

from .consensus import SweepPoint, UserAggregate, sweep, user_aggregates
from .errors import UnknownAxis, UnknownWorker
from .model import (
    Answer,
    GroundTruth,
    StudyDataset,
    WorkerProfile,
    WORKER_CATEGORICAL_FIELDS,
    category_vocabularies,
)
from .stopwords import STOPWORDS

_TOKEN = re.compile(r"[0-9a-z]+")
_MIN_WORD_LENGTH = 3
DEFAULT_TOP_WORDS = 50


@dataclass(frozen=True)
class CategoryNode:
    category: str
    count: int
    children: tuple["CategoryNode", ...]


@dataclass(frozen=True)
class Ribbon:
    source: str
    target: str
    count: int


@dataclass(frozen=True)
class ParallelSets:
    axes: tuple[str, ...]
    total: int
    nodes: tuple[CategoryNode, ...]
    ribbons: tuple[tuple[Ribbon, ...], ...]


def _nested_counts(
    rows: list[tuple[str, ...]],
    vocabularies: dict[str, tuple[str, ...]],
    axes: tuple[str, ...],
    depth: int,
) -> tuple[CategoryNode, ...]:
    if depth == len(axes):
        return ()
    nodes = []
    for category in vocabularies[axes[depth]]:
        subset = [row for row in rows if row[depth] == category]
        if not subset:
            continue
        nodes.append(
            CategoryNode(
                category=category,
                count=len(subset),
                children=_nested_counts(subset, vocabularies, axes, depth + 1),
            )
        )
    return tuple(nodes)


def parallel_sets(
    dataset: StudyDataset,
    axes: tuple[str, ...],
    excluded_workers: frozenset[str] = frozenset(),
) -> ParallelSets:
    """Crowd composition across ordered categorical axes.

    Nodes nest counts axis by axis; ribbons cross-tabulate each adjacent
    axis pair. Category order is first appearance in the worker roster,
    so the picture is stable across calls. Every ribbon layer and every
    node's children sum back to the counts above them.
    """
    if not axes:
        raise UnknownAxis("at least one axis is required")
    unknown = [a for a in axes if a not in WORKER_CATEGORICAL_FIELDS]
    if unknown:
        raise UnknownAxis(
            f"unknown axis(es) {unknown!r}; expected {WORKER_CATEGORICAL_FIELDS!r}"
        )
    if len(set(axes)) != len(axes):
        raise UnknownAxis(f"axes must be distinct, got {axes!r}")
    vocabularies = category_vocabularies(dataset.workers)
    included = [w for w in dataset.workers if w.id not in excluded_workers]
    rows = [tuple(w.category(a) for a in axes) for w in included]
    nodes = _nested_counts(rows, vocabularies, axes, 0)
    ribbons = []
    for left in range(len(axes) - 1):
        layer = []
        for source in vocabularies[axes[left]]:
            for target in vocabularies[axes[left + 1]]:
                count = sum(
                    1 for row in rows if row[left] == source and row[left + 1] == target
                )
                if count:
                    layer.append(Ribbon(source, target, count))
        ribbons.append(tuple(layer))
    return ParallelSets(axes, len(rows), nodes, tuple(ribbons))


@dataclass(frozen=True)
class WordCount:
    word: str
    count: int


def tally_words(texts: list[str]) -> Counter:
    """Casefolded alphanumeric tokens, minus stopwords and short words."""
    counts: Counter = Counter()
    for text in texts:
        for token in _TOKEN.findall(text.casefold()):
            if len(token) >= _MIN_WORD_LENGTH and token not in STOPWORDS:
                counts[token] += 1
    return counts


def word_cloud(
    dataset: StudyDataset,
    top_k: int = DEFAULT_TOP_WORDS,
    excluded_workers: frozenset[str] = frozenset(),
) -> list[WordCount]:
    """Most frequent comment words, count desc then alphabetical."""
    counts = tally_words(
        [c.text for c in dataset.comments if c.worker_id not in excluded_workers]
    )
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return [WordCount(word, count) for word, count in ranked[: max(top_k, 0)]]


def word_index(
    dataset: StudyDataset,
    excluded_workers: frozenset[str] = frozenset(),
) -> dict[str, tuple[str, ...]]:
    """token -> sorted commenting worker ids, same tokenizer as the cloud.

    Lets a word selection highlight the workers behind it without the
    client re-tokenizing anything.
    """
    index: dict[str, set[str]] = {}
    for comment in dataset.comments:
        if comment.worker_id in excluded_workers:
            continue
        for token in _TOKEN.findall(comment.text.casefold()):
            if len(token) >= _MIN_WORD_LENGTH and token not in STOPWORDS:
                index.setdefault(token, set()).add(comment.worker_id)
    return {word: tuple(sorted(ids)) for word, ids in index.items()}


@dataclass(frozen=True)
class TimelineBar:
    dataset_id: str
    created_on: date
    n_workers: int
    n_responses: int
    mean_accuracy: float | None


def timeline(datasets: list[StudyDataset]) -> list[TimelineBar]:
    """One bar per study, oldest first.

    Accuracy is the unweighted mean over workers who judged at least one
    truth-labelled segment, None for studies without ground truth.
    """
    bars = []
    for dataset in sorted(datasets, key=lambda d: (d.created_on, d.id)):
        aggregates = user_aggregates(dataset)
        accuracies = [a.accuracy for a in aggregates if a.accuracy is not None]
        bars.append(
            TimelineBar(
                dataset_id=dataset.id,
                created_on=dataset.created_on,
                n_workers=len(aggregates),
                n_responses=len(dataset.responses),
                mean_accuracy=sum(accuracies) / len(accuracies) if accuracies else None,
            )
        )
    return bars


@dataclass(frozen=True)
class Overview:
    """Unweighted across-worker means of every per-worker aggregate,
    plus a sweep for the SE/SP reference chart."""

    dataset_id: str
    n_workers: int
    n_segments: int
    n_responses: int
    n_comments: int
    mean_polyp_answers: float | None
    mean_polyp_free_answers: float | None
    mean_correct: float | None
    mean_false_positive: float | None
    mean_false_negative: float | None
    mean_accuracy: float | None
    mean_total_time_ms: float | None
    mean_normalized_time: float | None
    sweep: tuple[SweepPoint, ...]


def overview(
    dataset: StudyDataset,
    sweep_step: float = 5.0,
    excluded_workers: frozenset[str] = frozenset(),
    excluded_segments: frozenset[str] = frozenset(),
    time_norm_excluded: frozenset[str] = frozenset(),
) -> Overview:
    aggregates = user_aggregates(dataset, excluded_workers, time_norm_excluded)
    accuracies = [a.accuracy for a in aggregates if a.accuracy is not None]
    n = len(aggregates)

    def mean(values: list[float]) -> float | None:
        return sum(values) / n if n else None

    return Overview(
        dataset_id=dataset.id,
        n_workers=n,
        n_segments=len(dataset.segments),
        n_responses=sum(a.n_responses for a in aggregates),
        n_comments=sum(
            1 for c in dataset.comments if c.worker_id not in excluded_workers
        ),
        mean_polyp_answers=mean([a.n_polyp_answers for a in aggregates]),
        mean_polyp_free_answers=mean([a.n_polyp_free_answers for a in aggregates]),
        mean_correct=mean([a.n_correct for a in aggregates]),
        mean_false_positive=mean([a.n_false_positive for a in aggregates]),
        mean_false_negative=mean([a.n_false_negative for a in aggregates]),
        mean_accuracy=sum(accuracies) / len(accuracies) if accuracies else None,
        mean_total_time_ms=mean([a.total_task_time_ms for a in aggregates]),
        mean_normalized_time=mean([a.normalized_task_time for a in aggregates]),
        sweep=tuple(sweep(dataset, sweep_step, excluded_workers, excluded_segments)),
    )


@dataclass(frozen=True)
class ResponseDetail:
    presentation_index: int
    segment_id: str
    ordinal: int
    answer: Answer
    response_time_ms: int
    correct: bool | None
    running_accuracy: float | None


@dataclass(frozen=True)
class WorkerDetails:
    profile: WorkerProfile
    aggregate: UserAggregate | None
    responses: tuple[ResponseDetail, ...]
    comment: str | None


def worker_details(dataset: StudyDataset, worker_id: str) -> WorkerDetails:
    """One worker's profile, tallies, and response-by-response history.

    Running accuracy is cumulative over truth-labelled segments in the
    order the worker saw them; it stays None until the first judged
    response. Responses on unknown-truth segments have correct=None and
    carry the accuracy forward unchanged.
    """
    try:
        profile = dataset.worker_by_id(worker_id)
    except KeyError:
        raise UnknownWorker(f"unknown worker {worker_id!r}") from None
    segments = {s.id: s for s in dataset.segments}
    truth = dataset.truth_map()
    ordered = sorted(
        dataset.responses_by_worker().get(worker_id, ()),
        key=lambda r: r.presentation_index,
    )
    judged = correct_count = 0
    details = []
    for response in ordered:
        segment_truth = truth[response.segment_id]
        if segment_truth is GroundTruth.UNKNOWN:
            correct = None
        else:
            correct = (response.answer is Answer.POLYP) == (
                segment_truth is GroundTruth.POLYP
            )
            judged += 1
            correct_count += correct
        details.append(
            ResponseDetail(
                presentation_index=response.presentation_index,
                segment_id=response.segment_id,
                ordinal=segments[response.segment_id].ordinal,
                answer=response.answer,
                response_time_ms=response.response_time_ms,
                correct=correct,
                running_accuracy=correct_count / judged if judged else None,
            )
        )
    aggregate = next(
        (a for a in user_aggregates(dataset) if a.worker_id == worker_id), None
    )
    comment = next((c.text for c in dataset.comments if c.worker_id == worker_id), None)
    return WorkerDetails(profile, aggregate, tuple(details), comment)
