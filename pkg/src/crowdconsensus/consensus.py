"""Consensus computation over crowd responses.

Everything here is a pure function of an immutable dataset snapshot plus
explicit exclusion sets, so thresholds can be evaluated in parallel and
repeated calls are deterministic.

Vote ratios are per-segment and viewers-only: a segment seen by 3 workers
and one seen by 30 are classified on the same [0,1] scale. Threshold
comparison is >=, evaluated as an exact integer cross-multiplication so
ratio/percent rounding can never flip a boundary case.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import StatisticsUnavailable
from .model import Answer, GroundTruth, StudyDataset

# Cell elements (response mode)
POLYP = "polyp"
POLYP_FREE = "polyp_free"
ABSENT = "absent"
# Cell elements (statistics mode)
CORRECT = "correct"
FALSE_POSITIVE = "false_positive"
FALSE_NEGATIVE = "false_negative"


class Label(Enum):
    POLYP = "polyp"
    POLYP_FREE = "polyp_free"
    UNVIEWED = "unviewed"


class MatrixMode(Enum):
    RESPONSE = "response"
    STATISTICS = "statistics"


class SortKey(Enum):
    TIME = "time"
    N_POLYPS = "polyps"
    ACCURACY = "accuracy"
    N_FALSE_NEGATIVES = "fn"


@dataclass(frozen=True)
class VoteSummary:
    segment_id: str
    n_viewers: int
    n_polyp_votes: int

    @property
    def polyp_ratio(self) -> float:
        return self.n_polyp_votes / self.n_viewers


@dataclass(frozen=True)
class VoteResult:
    summaries: tuple[VoteSummary, ...]
    unviewed: tuple[str, ...]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def sensitivity(self) -> float | None:
        """TP / (TP + FN); None when there are no true-polyp segments."""
        denom = self.tp + self.fn
        return self.tp / denom if denom else None

    @property
    def specificity(self) -> float | None:
        """TN / (FP + TN); None when there are no polyp-free segments."""
        denom = self.fp + self.tn
        return self.tn / denom if denom else None


@dataclass(frozen=True)
class ConsensusReport:
    threshold: float
    labels: dict[str, Label]
    confusion: ConfusionCounts
    sensitivity: float | None
    specificity: float | None

    @property
    def n_polyp_labels(self) -> int:
        return sum(1 for v in self.labels.values() if v is Label.POLYP)


@dataclass(frozen=True)
class SweepPoint:
    threshold: float
    sensitivity: float | None
    specificity: float | None
    n_polyp_labels: int


@dataclass(frozen=True)
class UserAggregate:
    worker_id: str
    n_polyp_answers: int
    n_polyp_free_answers: int
    n_correct: int
    n_false_positive: int
    n_false_negative: int
    total_task_time_ms: int
    normalized_task_time: float

    @property
    def n_responses(self) -> int:
        return self.n_polyp_answers + self.n_polyp_free_answers

    @property
    def accuracy(self) -> float | None:
        """Correct fraction over truth-labelled responses; None without truth."""
        judged = self.n_correct + self.n_false_positive + self.n_false_negative
        return self.n_correct / judged if judged else None


@dataclass(frozen=True)
class SegmentAggregate:
    segment_id: str
    n_polyp_votes: int
    n_polyp_free_votes: int
    n_correct: int | None
    n_false_positive: int | None
    n_false_negative: int | None
    mean_response_time_ms: float
    normalized_time: float

    @property
    def n_viewers(self) -> int:
        return self.n_polyp_votes + self.n_polyp_free_votes


@dataclass(frozen=True)
class CellView:
    worker_id: str
    segment_id: str
    element: str
    relative_time: float


@dataclass(frozen=True)
class MatrixColumn:
    segment_id: str
    ordinal: int
    direction: str


@dataclass(frozen=True)
class MatrixRow:
    worker_id: str
    cells: tuple[CellView, ...]
    aggregate: UserAggregate


@dataclass(frozen=True)
class ConsensusMatrix:
    mode: MatrixMode
    sort: SortKey
    columns: tuple[MatrixColumn, ...]
    rows: tuple[MatrixRow, ...]
    segment_margins: dict[str, SegmentAggregate]


def _validate_threshold(threshold: float) -> None:
    if not 0.0 <= threshold <= 100.0:
        raise ValueError(f"threshold must be in [0, 100], got {threshold}")


def _count_votes(
    dataset: StudyDataset, excluded_workers: frozenset[str]
) -> dict[str, tuple[int, int]]:
    """segment_id -> (n_polyp_votes, n_viewers), excluded workers removed."""
    votes = {s.id: (0, 0) for s in dataset.segments}
    for r in dataset.responses:
        if r.worker_id in excluded_workers:
            continue
        polyp, viewers = votes[r.segment_id]
        votes[r.segment_id] = (polyp + (r.answer is Answer.POLYP), viewers + 1)
    return votes


def _meets_threshold(n_polyp: int, n_viewers: int, threshold: float) -> bool:
    # exact: n_polyp / n_viewers >= threshold / 100
    return n_polyp * 100.0 >= threshold * n_viewers


def vote_summaries(
    dataset: StudyDataset, excluded_workers: frozenset[str] = frozenset()
) -> VoteResult:
    """Per-segment vote counts in ordinal order; unviewed listed apart."""
    votes = _count_votes(dataset, excluded_workers)
    summaries = []
    unviewed = []
    for segment in dataset.segments:
        n_polyp, n_viewers = votes[segment.id]
        if n_viewers == 0:
            unviewed.append(segment.id)
        else:
            summaries.append(VoteSummary(segment.id, n_viewers, n_polyp))
    return VoteResult(tuple(summaries), tuple(unviewed))


def _report_from_votes(
    dataset: StudyDataset,
    votes: dict[str, tuple[int, int]],
    threshold: float,
    excluded_segments: frozenset[str],
) -> ConsensusReport:
    labels: dict[str, Label] = {}
    tp = fp = tn = fn = 0
    for segment in dataset.segments:
        n_polyp, n_viewers = votes[segment.id]
        if n_viewers == 0:
            labels[segment.id] = Label.UNVIEWED
            continue
        label = (
            Label.POLYP
            if _meets_threshold(n_polyp, n_viewers, threshold)
            else Label.POLYP_FREE
        )
        labels[segment.id] = label
        if segment.id in excluded_segments:
            continue
        if segment.ground_truth is GroundTruth.POLYP:
            if label is Label.POLYP:
                tp += 1
            else:
                fn += 1
        elif segment.ground_truth is GroundTruth.POLYP_FREE:
            if label is Label.POLYP:
                fp += 1
            else:
                tn += 1
    confusion = ConfusionCounts(tp, fp, tn, fn)
    return ConsensusReport(
        threshold=threshold,
        labels=labels,
        confusion=confusion,
        sensitivity=confusion.sensitivity,
        specificity=confusion.specificity,
    )


def classify(
    dataset: StudyDataset,
    threshold: float,
    excluded_workers: frozenset[str] = frozenset(),
    excluded_segments: frozenset[str] = frozenset(),
) -> ConsensusReport:
    """Label every segment at the given consensus threshold (percent).

    A viewed segment is polyp when its polyp-vote ratio meets the
    threshold; unviewed segments are labelled unviewed and never enter
    the confusion counts, nor do analyst-excluded segments or segments
    without known truth.
    """
    _validate_threshold(threshold)
    votes = _count_votes(dataset, excluded_workers)
    return _report_from_votes(dataset, votes, threshold, excluded_segments)


def sweep(
    dataset: StudyDataset,
    step_percent: float,
    excluded_workers: frozenset[str] = frozenset(),
    excluded_segments: frozenset[str] = frozenset(),
) -> list[SweepPoint]:
    """Reports at thresholds 0, step, 2*step, ..., 100.

    Votes are counted once; each row is exactly what classify() returns
    at that threshold.
    """
    if step_percent <= 0:
        raise ValueError(f"step_percent must be > 0, got {step_percent}")
    votes = _count_votes(dataset, excluded_workers)
    thresholds = [0.0]
    k = 1
    while True:
        t = k * step_percent
        if t >= 100.0 - 1e-9:
            break
        thresholds.append(t)
        k += 1
    thresholds.append(100.0)
    points = []
    for t in thresholds:
        report = _report_from_votes(dataset, votes, t, excluded_segments)
        points.append(
            SweepPoint(t, report.sensitivity, report.specificity, report.n_polyp_labels)
        )
    return points


def _na(value: float | None) -> str:
    return "NA" if value is None else repr(value)


def sweep_csv(points: list[SweepPoint]) -> str:
    """CSV export: threshold,sensitivity,specificity,n_polyp_labels."""
    lines = ["threshold,sensitivity,specificity,n_polyp_labels"]
    for p in points:
        lines.append(f"{p.threshold!r},{_na(p.sensitivity)},{_na(p.specificity)},{p.n_polyp_labels}")
    return "\n".join(lines) + "\n"


def user_aggregates(
    dataset: StudyDataset,
    excluded_workers: frozenset[str] = frozenset(),
    time_norm_excluded: frozenset[str] = frozenset(),
) -> list[UserAggregate]:
    """Per-worker tallies for workers with at least one response, id order.

    Task time is normalized by the longest total among included workers;
    workers in `time_norm_excluded` (typically analyst-marked outliers)
    still get rows but do not define the maximum, and values are clamped
    to 1.0 so the scale stays (0, 1].
    """
    truth = dataset.truth_map()
    rows = []
    for worker_id, responses in sorted(dataset.responses_by_worker().items()):
        if worker_id in excluded_workers or not responses:
            continue
        n_polyp = sum(1 for r in responses if r.answer is Answer.POLYP)
        correct = false_pos = false_neg = 0
        for r in responses:
            t = truth[r.segment_id]
            if t is GroundTruth.UNKNOWN:
                continue
            answered_polyp = r.answer is Answer.POLYP
            if answered_polyp and t is GroundTruth.POLYP:
                correct += 1
            elif answered_polyp:
                false_pos += 1
            elif t is GroundTruth.POLYP:
                false_neg += 1
            else:
                correct += 1
        rows.append(
            (worker_id, n_polyp, len(responses) - n_polyp, correct, false_pos,
             false_neg, sum(r.response_time_ms for r in responses))
        )
    norm_basis = [r[6] for r in rows if r[0] not in time_norm_excluded]
    max_time = max(norm_basis, default=0) or max((r[6] for r in rows), default=0)
    return [
        UserAggregate(
            worker_id=worker_id,
            n_polyp_answers=n_polyp,
            n_polyp_free_answers=n_free,
            n_correct=correct,
            n_false_positive=false_pos,
            n_false_negative=false_neg,
            total_task_time_ms=total_time,
            normalized_task_time=min(1.0, total_time / max_time) if max_time else 1.0,
        )
        for worker_id, n_polyp, n_free, correct, false_pos, false_neg, total_time in rows
    ]


def segment_aggregates(
    dataset: StudyDataset,
    excluded_workers: frozenset[str] = frozenset(),
    time_norm_excluded: frozenset[str] = frozenset(),
) -> list[SegmentAggregate]:
    """Per-segment tallies for viewed segments, in canonical ordinal order.

    Statistics counts are None on segments without known truth. Mean
    response time is normalized by the slowest segment, with
    `time_norm_excluded` segments kept off the maximum.
    """
    rows = []
    for segment in dataset.segments:
        responses = [
            r
            for r in dataset.responses_by_segment()[segment.id]
            if r.worker_id not in excluded_workers
        ]
        if not responses:
            continue
        n_polyp = sum(1 for r in responses if r.answer is Answer.POLYP)
        if segment.ground_truth is GroundTruth.UNKNOWN:
            correct = false_pos = false_neg = None
        else:
            is_polyp = segment.ground_truth is GroundTruth.POLYP
            n_free = len(responses) - n_polyp
            correct = n_polyp if is_polyp else n_free
            false_pos = 0 if is_polyp else n_polyp
            false_neg = n_free if is_polyp else 0
        mean_time = sum(r.response_time_ms for r in responses) / len(responses)
        rows.append((segment.id, n_polyp, len(responses) - n_polyp,
                     correct, false_pos, false_neg, mean_time))
    norm_basis = [r[6] for r in rows if r[0] not in time_norm_excluded]
    max_time = max(norm_basis, default=0.0) or max((r[6] for r in rows), default=0.0)
    return [
        SegmentAggregate(
            segment_id=segment_id,
            n_polyp_votes=n_polyp,
            n_polyp_free_votes=n_free,
            n_correct=correct,
            n_false_positive=false_pos,
            n_false_negative=false_neg,
            mean_response_time_ms=mean_time,
            normalized_time=min(1.0, mean_time / max_time) if max_time else 1.0,
        )
        for segment_id, n_polyp, n_free, correct, false_pos, false_neg, mean_time in rows
    ]


def _sort_value(aggregate: UserAggregate, sort: SortKey) -> float:
    if sort is SortKey.TIME:
        return float(aggregate.total_task_time_ms)
    if sort is SortKey.N_POLYPS:
        return float(aggregate.n_polyp_answers)
    if sort is SortKey.ACCURACY:
        accuracy = aggregate.accuracy
        return -1.0 if accuracy is None else accuracy
    return float(aggregate.n_false_negative)


def _cell_element(
    response, truth: GroundTruth, mode: MatrixMode
) -> str:
    if mode is MatrixMode.RESPONSE:
        return POLYP if response.answer is Answer.POLYP else POLYP_FREE
    if truth is GroundTruth.UNKNOWN:
        return ABSENT
    answered_polyp = response.answer is Answer.POLYP
    if truth is GroundTruth.POLYP:
        return CORRECT if answered_polyp else FALSE_NEGATIVE
    return FALSE_POSITIVE if answered_polyp else CORRECT


def consensus_matrix(
    dataset: StudyDataset,
    mode: MatrixMode = MatrixMode.RESPONSE,
    sort: SortKey = SortKey.TIME,
    excluded_workers: frozenset[str] = frozenset(),
    time_norm_excluded: frozenset[str] = frozenset(),
) -> ConsensusMatrix:
    """Worker x segment grid with Table-style margins.

    Rows are workers with responses, ordered by the sort key descending
    (ties by worker id ascending); columns follow canonical segment
    ordinals with fly-through direction labels. In-cell relative time
    compares a response against the other viewers of the same segment.
    """
    if mode is MatrixMode.STATISTICS and not dataset.has_ground_truth():
        raise StatisticsUnavailable(
            f"dataset {dataset.id!r} has no ground truth; statistics mode needs it"
        )
    user_rows = user_aggregates(dataset, excluded_workers, time_norm_excluded)
    segment_rows = segment_aggregates(dataset, excluded_workers)
    truth = dataset.truth_map()

    by_worker = {agg.worker_id: agg for agg in user_rows}
    responses: dict[tuple[str, str], object] = {}
    max_time_per_segment: dict[str, int] = {}
    for r in dataset.responses:
        if r.worker_id in excluded_workers:
            continue
        responses[(r.worker_id, r.segment_id)] = r
        previous = max_time_per_segment.get(r.segment_id, 0)
        max_time_per_segment[r.segment_id] = max(previous, r.response_time_ms)

    columns = tuple(
        MatrixColumn(s.id, s.ordinal, s.direction.value) for s in dataset.segments
    )
    ordered = sorted(
        by_worker.values(), key=lambda a: (-_sort_value(a, sort), a.worker_id)
    )
    rows = []
    for aggregate in ordered:
        cells = []
        for column in columns:
            response = responses.get((aggregate.worker_id, column.segment_id))
            if response is None:
                cells.append(CellView(aggregate.worker_id, column.segment_id, ABSENT, 0.0))
            else:
                cells.append(
                    CellView(
                        aggregate.worker_id,
                        column.segment_id,
                        _cell_element(response, truth[column.segment_id], mode),
                        response.response_time_ms / max_time_per_segment[column.segment_id],
                    )
                )
        rows.append(MatrixRow(aggregate.worker_id, tuple(cells), aggregate))
    return ConsensusMatrix(
        mode=mode,
        sort=sort,
        columns=columns,
        rows=tuple(rows),
        segment_margins={agg.segment_id: agg for agg in segment_rows},
    )
