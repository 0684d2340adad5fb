"""Answer-pattern forensics: signatures, similarity, ambiguity, suspects.

A worker's behaviour is summarized as a signature string over the
canonical segment order (P = polyp, N = polyp-free, U = unanswered), so
duplicate submissions collapse to identical strings and near-duplicates
sit close under Jaro-Winkler similarity.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownWorker
from .model import Answer, StudyDataset

CONSTANT_ANSWER = "constant_answer"
TOO_FAST = "too_fast"

_PREFIX_SCALE = 0.1
_MAX_PREFIX = 4


def jaro(a: str, b: str) -> float:
    """Jaro similarity in [0, 1]; 1.0 iff the strings are equal."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    window = max(len(a), len(b)) // 2 - 1
    matched_a = [False] * len(a)
    matched_b = [False] * len(b)
    matches = 0
    for i, ch in enumerate(a):
        lo = max(0, i - window)
        hi = min(len(b), i + window + 1)
        for j in range(lo, hi):
            if not matched_b[j] and b[j] == ch:
                matched_a[i] = True
                matched_b[j] = True
                matches += 1
                break
    if matches == 0:
        return 0.0
    seq_a = [ch for i, ch in enumerate(a) if matched_a[i]]
    seq_b = [ch for j, ch in enumerate(b) if matched_b[j]]
    transpositions = sum(x != y for x, y in zip(seq_a, seq_b)) / 2
    m = matches
    return (m / len(a) + m / len(b) + (m - transpositions) / m) / 3


def jaro_winkler(a: str, b: str) -> float:
    """Jaro score boosted by the shared prefix (up to 4 chars, scale 0.1)."""
    base = jaro(a, b)
    prefix = 0
    for x, y in zip(a, b):
        if x != y or prefix == _MAX_PREFIX:
            break
        prefix += 1
    return base + prefix * _PREFIX_SCALE * (1.0 - base)


def signature(dataset: StudyDataset, worker_id: str) -> str:
    """P/N/U string over segments in canonical ordinal order."""
    if worker_id not in dataset.worker_ids:
        raise UnknownWorker(f"unknown worker {worker_id!r}")
    answers = {
        r.segment_id: r.answer
        for r in dataset.responses_by_worker().get(worker_id, ())
    }
    chars = []
    for segment in dataset.segments:
        answer = answers.get(segment.id)
        if answer is None:
            chars.append("U")
        else:
            chars.append("P" if answer is Answer.POLYP else "N")
    return "".join(chars)


def signatures(dataset: StudyDataset) -> dict[str, str]:
    return {w.id: signature(dataset, w.id) for w in dataset.workers}


@dataclass(frozen=True)
class SignatureGroup:
    signature: str
    worker_ids: tuple[str, ...]


def exact_signature_groups(dataset: StudyDataset) -> list[SignatureGroup]:
    """Groups of 2+ workers who submitted the identical answer pattern.

    Largest groups first; ties broken by the lexically first member.
    """
    by_signature: dict[str, list[str]] = {}
    for worker_id, sig in signatures(dataset).items():
        by_signature.setdefault(sig, []).append(worker_id)
    groups = [
        SignatureGroup(sig, tuple(sorted(ids)))
        for sig, ids in by_signature.items()
        if len(ids) >= 2
    ]
    groups.sort(key=lambda g: (-len(g.worker_ids), g.worker_ids[0]))
    return groups


@dataclass(frozen=True)
class SimilarityHit:
    worker_id: str
    score: float
    exact_match: bool


def similar_workers(
    dataset: StudyDataset, worker_id: str, k: int = 5
) -> list[SimilarityHit]:
    """Every exact signature match plus the k closest non-exact peers.

    Exact matches always score 1.0 (similarity is 1.0 iff the strings
    are equal, so the flag and the score agree). The combined list is
    ordered by score descending, ties by worker id ascending.
    """
    target = signature(dataset, worker_id)
    exact = []
    inexact = []
    for other in dataset.workers:
        if other.id == worker_id:
            continue
        other_signature = signature(dataset, other.id)
        hit = SimilarityHit(
            other.id,
            jaro_winkler(target, other_signature),
            other_signature == target,
        )
        (exact if hit.exact_match else inexact).append(hit)
    exact.sort(key=lambda h: h.worker_id)
    inexact.sort(key=lambda h: (-h.score, h.worker_id))
    return exact + inexact[: max(k, 0)]


@dataclass(frozen=True)
class AmbiguityScore:
    segment_id: str
    polyp_ratio: float
    ambiguity: float


def ambiguous_segments(
    dataset: StudyDataset,
    min_ambiguity: float = 0.0,
    excluded_workers: frozenset[str] = frozenset(),
) -> list[AmbiguityScore]:
    """Viewed segments whose vote split is at least min_ambiguity wide.

    Ambiguity is 1 - |2r - 1| for polyp ratio r: 1.0 at an even split,
    0.0 at unanimity. Most ambiguous first, ties in canonical order.
    """
    if not 0.0 <= min_ambiguity <= 1.0:
        raise ValueError(f"min_ambiguity must be in [0, 1], got {min_ambiguity}")
    scored = []
    for position, segment in enumerate(dataset.segments):
        responses = [
            r
            for r in dataset.responses_by_segment()[segment.id]
            if r.worker_id not in excluded_workers
        ]
        if not responses:
            continue
        ratio = sum(r.answer is Answer.POLYP for r in responses) / len(responses)
        ambiguity = 1.0 - abs(2.0 * ratio - 1.0)
        if ambiguity >= min_ambiguity:
            scored.append((position, AmbiguityScore(segment.id, ratio, ambiguity)))
    scored.sort(key=lambda item: (-item[1].ambiguity, item[0]))
    return [score for _, score in scored]


@dataclass(frozen=True)
class SuspectFlag:
    worker_id: str
    reasons: tuple[str, ...]


def flag_suspect_workers(
    dataset: StudyDataset,
    min_constant_responses: int = 5,
    min_ms_per_response: int = 1000,
) -> list[SuspectFlag]:
    """Cheap behavioural screens, in worker id order.

    constant_answer: gave one identical answer to min_constant_responses
    or more segments. too_fast: total answering time below
    min_ms_per_response per response, i.e. clicking through.
    """
    flags = []
    for worker_id, responses in sorted(dataset.responses_by_worker().items()):
        if not responses:
            continue
        reasons = []
        answers = {r.answer for r in responses}
        if len(responses) >= min_constant_responses and len(answers) == 1:
            reasons.append(CONSTANT_ANSWER)
        total_ms = sum(r.response_time_ms for r in responses)
        if total_ms < min_ms_per_response * len(responses):
            reasons.append(TOO_FAST)
        if reasons:
            flags.append(SuspectFlag(worker_id, tuple(reasons)))
    return flags
