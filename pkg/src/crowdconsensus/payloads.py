"""Canonical JSON payloads shared by the CLI and the HTTP service.

Both front ends call the same builder and the same serializer, so a
report fetched over HTTP is byte-identical to the one printed by the
command line. Keys are sorted, separators are compact, and NaN is
rejected outright; every float that reaches here is a plain finite
Python float.

Analyst marks have two strengths: a mark always removes its target from
time-normalization maxima (remaining values clamp at 1.0), while the
exclude flag additionally removes marked workers from vote ratios and
aggregates and marked segments from confusion counts.
"""

from __future__ import annotations

import datetime as dt
import json

from . import anomaly, views
from .consensus import (
    MatrixMode,
    SegmentAggregate,
    SortKey,
    SweepPoint,
    UserAggregate,
    classify,
    consensus_matrix,
    sweep,
    vote_summaries,
)
from .embedding import (
    SEGMENT_FEATURE_FIELDS,
    build_glyphs,
    mds,
    resolve_overlaps,
    segment_distance_matrix,
    tsne,
    worker_distance_matrix,
)
from .embedding.layout import LayoutResult
from .errors import IterationBudgetExceeded, UnknownAxis
from .model import (
    AnomalyAnnotation,
    StudyDataset,
    WorkerProfile,
    WORKER_CATEGORICAL_FIELDS,
)

DEFAULT_SIMILAR_K = 5
GLYPH_CHOICES = ("polyps", "accuracy")


def canonical_json(payload) -> str:
    """The one serialization used everywhere a payload leaves the engine."""
    return json.dumps(
        payload, sort_keys=True, separators=(",", ":"), allow_nan=False,
        ensure_ascii=True,
    )


def _date(value: dt.date) -> str:
    return value.isoformat()


def _datetime(value: dt.datetime) -> str:
    return value.isoformat()


def marked_sets(dataset: StudyDataset) -> tuple[frozenset[str], frozenset[str]]:
    return dataset.marked_workers(), dataset.marked_segments()


def _exclusions(
    dataset: StudyDataset, exclude: bool
) -> tuple[frozenset[str], frozenset[str], frozenset[str], frozenset[str]]:
    """(excluded_workers, excluded_segments, norm_excl_workers, norm_excl_segments)."""
    marked_workers, marked_segments = marked_sets(dataset)
    if exclude:
        return marked_workers, marked_segments, marked_workers, marked_segments
    return frozenset(), frozenset(), marked_workers, marked_segments


def profile_payload(profile: WorkerProfile) -> dict:
    return {
        "id": profile.id,
        "age_bracket": profile.age_bracket,
        "gender": profile.gender,
        "education_level": profile.education_level,
        "medical_expertise": profile.medical_expertise,
        "visualization_expertise": profile.visualization_expertise,
        "reward_tier": profile.reward_tier,
        "location": profile.location,
    }


def _aggregate_payload(aggregate: UserAggregate) -> dict:
    return {
        "worker_id": aggregate.worker_id,
        "n_responses": aggregate.n_responses,
        "n_polyp_answers": aggregate.n_polyp_answers,
        "n_polyp_free_answers": aggregate.n_polyp_free_answers,
        "n_correct": aggregate.n_correct,
        "n_false_positive": aggregate.n_false_positive,
        "n_false_negative": aggregate.n_false_negative,
        "accuracy": aggregate.accuracy,
        "total_task_time_ms": aggregate.total_task_time_ms,
        "normalized_task_time": aggregate.normalized_task_time,
    }


def _margin_payload(margin: SegmentAggregate) -> dict:
    return {
        "segment_id": margin.segment_id,
        "n_viewers": margin.n_viewers,
        "n_polyp_votes": margin.n_polyp_votes,
        "n_polyp_free_votes": margin.n_polyp_free_votes,
        "n_correct": margin.n_correct,
        "n_false_positive": margin.n_false_positive,
        "n_false_negative": margin.n_false_negative,
        "mean_response_time_ms": margin.mean_response_time_ms,
        "normalized_time": margin.normalized_time,
    }


def _sweep_points_payload(points: list[SweepPoint]) -> list[dict]:
    return [
        {
            "threshold": p.threshold,
            "sensitivity": p.sensitivity,
            "specificity": p.specificity,
            "n_polyp_labels": p.n_polyp_labels,
        }
        for p in points
    ]


def dataset_summary_payload(dataset: StudyDataset) -> dict:
    return {
        "id": dataset.id,
        "created_on": _date(dataset.created_on),
        "fov_degrees": dataset.fov_degrees,
        "flythrough_speed": dataset.flythrough_speed,
        "n_segments": len(dataset.segments),
        "n_workers": len(dataset.workers),
        "n_responses": len(dataset.responses),
        "n_comments": len(dataset.comments),
        "has_ground_truth": dataset.has_ground_truth(),
        "n_annotations": len(dataset.annotations),
    }


def datasets_payload(datasets: list[StudyDataset]) -> dict:
    ordered = sorted(datasets, key=lambda d: (d.created_on, d.id))
    return {"datasets": [dataset_summary_payload(d) for d in ordered]}


def consensus_payload(
    dataset: StudyDataset,
    threshold: float,
    mode: MatrixMode = MatrixMode.RESPONSE,
    sort: SortKey = SortKey.TIME,
    exclude: bool = False,
) -> dict:
    excl_workers, excl_segments, norm_workers, _ = _exclusions(dataset, exclude)
    report = classify(dataset, threshold, excl_workers, excl_segments)
    matrix = consensus_matrix(dataset, mode, sort, excl_workers, norm_workers)
    votes = vote_summaries(dataset, excl_workers)
    profiles = {w.id: w for w in dataset.workers}
    columns = []
    for column in matrix.columns:
        margin = matrix.segment_margins.get(column.segment_id)
        columns.append(
            {
                "segment_id": column.segment_id,
                "ordinal": column.ordinal,
                "direction": column.direction,
                "label": report.labels[column.segment_id].value,
                "margin": None if margin is None else _margin_payload(margin),
            }
        )
    rows = []
    for row in matrix.rows:
        rows.append(
            {
                "worker_id": row.worker_id,
                "profile": profile_payload(profiles[row.worker_id]),
                "aggregate": _aggregate_payload(row.aggregate),
                "cells": [
                    {
                        "segment_id": cell.segment_id,
                        "element": cell.element,
                        "relative_time": cell.relative_time,
                    }
                    for cell in row.cells
                ],
            }
        )
    return {
        "dataset_id": dataset.id,
        "threshold": threshold,
        "mode": matrix.mode.value,
        "sort": matrix.sort.value,
        "exclude": exclude,
        "labels": {sid: label.value for sid, label in report.labels.items()},
        "confusion": {
            "tp": report.confusion.tp,
            "fp": report.confusion.fp,
            "tn": report.confusion.tn,
            "fn": report.confusion.fn,
        },
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
        "n_polyp_labels": report.n_polyp_labels,
        "votes": [
            {
                "segment_id": v.segment_id,
                "n_viewers": v.n_viewers,
                "n_polyp_votes": v.n_polyp_votes,
                "polyp_ratio": v.polyp_ratio,
            }
            for v in votes.summaries
        ],
        "unviewed": list(votes.unviewed),
        "columns": columns,
        "rows": rows,
    }


def sweep_payload(
    dataset: StudyDataset, step_percent: float, exclude: bool = False
) -> dict:
    excl_workers, excl_segments, _, _ = _exclusions(dataset, exclude)
    points = sweep(dataset, step_percent, excl_workers, excl_segments)
    return {
        "dataset_id": dataset.id,
        "step": step_percent,
        "exclude": exclude,
        "points": _sweep_points_payload(points),
    }


def anomalies_payload(dataset: StudyDataset, exclude: bool = False) -> dict:
    excl_workers, _, _, _ = _exclusions(dataset, exclude)
    marked_workers, marked_segments = marked_sets(dataset)
    return {
        "dataset_id": dataset.id,
        "exclude": exclude,
        "signature_groups": [
            {"signature": g.signature, "worker_ids": list(g.worker_ids)}
            for g in anomaly.exact_signature_groups(dataset)
        ],
        "suspects": [
            {"worker_id": f.worker_id, "reasons": list(f.reasons)}
            for f in anomaly.flag_suspect_workers(dataset)
        ],
        "ambiguous": [
            {
                "segment_id": s.segment_id,
                "polyp_ratio": s.polyp_ratio,
                "ambiguity": s.ambiguity,
            }
            for s in anomaly.ambiguous_segments(
                dataset, excluded_workers=excl_workers
            )
        ],
        "marked_workers": sorted(marked_workers),
        "marked_segments": sorted(marked_segments),
        "annotations": [annotation_payload(a) for a in dataset.annotations],
    }


def annotation_payload(annotation: AnomalyAnnotation) -> dict:
    return {
        "target": annotation.target.value,
        "target_id": annotation.target_id,
        "marked_by": annotation.marked_by,
        "marked_at": _datetime(annotation.marked_at),
        "note": annotation.note,
    }


def similar_payload(
    dataset: StudyDataset, worker_id: str, k: int = DEFAULT_SIMILAR_K
) -> dict:
    signatures = anomaly.signatures(dataset)
    return {
        "dataset_id": dataset.id,
        "worker_id": worker_id,
        "k": k,
        "signature": anomaly.signature(dataset, worker_id),
        "similar": [
            {
                "worker_id": hit.worker_id,
                "score": hit.score,
                "exact_match": hit.exact_match,
                "signature": signatures[hit.worker_id],
            }
            for hit in anomaly.similar_workers(dataset, worker_id, k)
        ],
    }


def ambiguous_payload(
    dataset: StudyDataset, min_ambiguity: float = 0.0, exclude: bool = False
) -> dict:
    excl_workers, _, _, _ = _exclusions(dataset, exclude)
    return {
        "dataset_id": dataset.id,
        "min_ambiguity": min_ambiguity,
        "exclude": exclude,
        "segments": [
            {
                "segment_id": s.segment_id,
                "polyp_ratio": s.polyp_ratio,
                "ambiguity": s.ambiguity,
            }
            for s in anomaly.ambiguous_segments(dataset, min_ambiguity, excl_workers)
        ],
    }


def aggregates_payload(dataset: StudyDataset, exclude: bool = False) -> dict:
    from .consensus import segment_aggregates, user_aggregates

    excl_workers, _, norm_workers, norm_segments = _exclusions(dataset, exclude)
    return {
        "dataset_id": dataset.id,
        "exclude": exclude,
        "workers": [
            _aggregate_payload(a)
            for a in user_aggregates(dataset, excl_workers, norm_workers)
        ],
        "segments": [
            _margin_payload(a)
            for a in segment_aggregates(dataset, excl_workers, norm_segments)
        ],
    }


def _glyph_inputs(
    items: str,
    ids: list[str],
    dataset: StudyDataset,
    glyph: str,
    excluded_workers: frozenset[str],
    norm_excluded_workers: frozenset[str],
) -> tuple[list[float], list[float]]:
    from .consensus import segment_aggregates, user_aggregates

    if items == "workers":
        rows = {
            a.worker_id: a
            for a in user_aggregates(dataset, excluded_workers, norm_excluded_workers)
        }
        values = [
            float(rows[i].n_polyp_answers)
            if glyph == "polyps"
            else (rows[i].accuracy or 0.0)
            for i in ids
        ]
        times = [float(rows[i].total_task_time_ms) for i in ids]
    else:
        rows = {
            a.segment_id: a for a in segment_aggregates(dataset, excluded_workers)
        }
        values = []
        for i in ids:
            row = rows[i]
            if glyph == "polyps":
                values.append(float(row.n_polyp_votes))
            else:
                judged = (
                    (row.n_correct or 0)
                    + (row.n_false_positive or 0)
                    + (row.n_false_negative or 0)
                )
                values.append((row.n_correct or 0) / judged if judged else 0.0)
        times = [rows[i].mean_response_time_ms for i in ids]
    return values, times


def embedding_payload(
    dataset: StudyDataset,
    items: str,
    method: str,
    weights: dict[str, float] | None = None,
    glyph: str = "polyps",
    radius: float = 0.0,
    perplexity: float = 15.0,
    n_iter: int = 1000,
    seed: int = 0,
    exclude: bool = False,
) -> dict:
    """2-D projection of workers or segments with circle glyphs.

    With radius > 0 overlapping glyphs are pushed apart; if the budget
    runs out the best-effort layout is returned with converged=false
    rather than failing the whole view.
    """
    if items not in ("workers", "segments"):
        raise UnknownAxis(f"items must be workers or segments, got {items!r}")
    if method not in ("mds", "tsne"):
        raise UnknownAxis(f"method must be mds or tsne, got {method!r}")
    if glyph not in GLYPH_CHOICES:
        raise UnknownAxis(f"glyph must be one of {GLYPH_CHOICES}, got {glyph!r}")
    excl_workers, _, norm_workers, _ = _exclusions(dataset, exclude)
    if items == "workers":
        ids, distances = worker_distance_matrix(dataset, weights, excl_workers)
        axes = WORKER_CATEGORICAL_FIELDS
    else:
        ids, distances = segment_distance_matrix(dataset, weights, excl_workers)
        axes = SEGMENT_FEATURE_FIELDS
    meta: dict = {}
    if method == "mds":
        result = mds(distances)
        positions = result.positions
        meta["stress"] = result.stress
        meta["mds_iterations"] = result.iterations
    else:
        result = tsne(distances, perplexity=perplexity, n_iter=n_iter, seed=seed)
        positions = result.positions
        meta["kl_divergence"] = result.kl_divergence
        meta["perplexity"] = perplexity
        meta["seed"] = seed
    converged = True
    layout_iterations = 0
    if radius > 0.0 and len(ids) > 1:
        try:
            layout: LayoutResult = resolve_overlaps(positions, radius)
            positions = layout.positions
            layout_iterations = layout.iterations
        except IterationBudgetExceeded as error:
            positions = error.positions
            converged = False
            layout_iterations = len(error.residual_pairs)
    values, times = _glyph_inputs(
        items, ids, dataset, glyph, excl_workers, norm_workers
    )
    glyphs = build_glyphs(ids, positions, values, times)
    return {
        "dataset_id": dataset.id,
        "items": items,
        "method": method,
        "glyph": glyph,
        "weights": weights,
        "available_axes": list(axes),
        "exclude": exclude,
        "radius": radius,
        "layout_converged": converged,
        "layout_iterations": layout_iterations,
        "points": [
            {
                "id": g.item_id,
                "x": g.x,
                "y": g.y,
                "lightness": g.lightness,
                "arc_fraction": g.arc_fraction,
            }
            for g in glyphs
        ],
        **meta,
    }


def embedding_csv(payload: dict) -> str:
    """Layout export: item_id,x,y,lightness,arc_fraction."""
    lines = ["item_id,x,y,lightness,arc_fraction"]
    for point in payload["points"]:
        lines.append(
            f"{point['id']},{point['x']!r},{point['y']!r},"
            f"{point['lightness']!r},{point['arc_fraction']!r}"
        )
    return "\n".join(lines) + "\n"


def _node_payload(node: views.CategoryNode) -> dict:
    return {
        "category": node.category,
        "count": node.count,
        "children": [_node_payload(child) for child in node.children],
    }


def parallel_sets_payload(
    dataset: StudyDataset, axes: tuple[str, ...], exclude: bool = False
) -> dict:
    excl_workers, _, _, _ = _exclusions(dataset, exclude)
    ps = views.parallel_sets(dataset, axes, excl_workers)
    return {
        "dataset_id": dataset.id,
        "axes": list(ps.axes),
        "total": ps.total,
        "exclude": exclude,
        "nodes": [_node_payload(n) for n in ps.nodes],
        "ribbons": [
            [{"source": r.source, "target": r.target, "count": r.count} for r in layer]
            for layer in ps.ribbons
        ],
    }


def word_cloud_payload(
    dataset: StudyDataset, top_k: int = views.DEFAULT_TOP_WORDS, exclude: bool = False
) -> dict:
    excl_workers, _, _, _ = _exclusions(dataset, exclude)
    index = views.word_index(dataset, excl_workers)
    return {
        "dataset_id": dataset.id,
        "top_k": top_k,
        "exclude": exclude,
        "words": [
            {
                "word": w.word,
                "count": w.count,
                "worker_ids": list(index.get(w.word, ())),
            }
            for w in views.word_cloud(dataset, top_k, excl_workers)
        ],
    }


def overview_payload(
    dataset: StudyDataset, sweep_step: float = 5.0, exclude: bool = False
) -> dict:
    excl_workers, excl_segments, norm_workers, _ = _exclusions(dataset, exclude)
    summary = views.overview(
        dataset, sweep_step, excl_workers, excl_segments, norm_workers
    )
    return {
        "dataset_id": summary.dataset_id,
        "n_workers": summary.n_workers,
        "n_segments": summary.n_segments,
        "n_responses": summary.n_responses,
        "n_comments": summary.n_comments,
        "mean_polyp_answers": summary.mean_polyp_answers,
        "mean_polyp_free_answers": summary.mean_polyp_free_answers,
        "mean_correct": summary.mean_correct,
        "mean_false_positive": summary.mean_false_positive,
        "mean_false_negative": summary.mean_false_negative,
        "mean_accuracy": summary.mean_accuracy,
        "mean_total_time_ms": summary.mean_total_time_ms,
        "mean_normalized_time": summary.mean_normalized_time,
        "sweep_step": sweep_step,
        "exclude": exclude,
        "sweep": _sweep_points_payload(list(summary.sweep)),
    }


def report_payload(
    dataset: StudyDataset,
    all_datasets: list[StudyDataset],
    top_k_words: int = views.DEFAULT_TOP_WORDS,
    exclude: bool = False,
) -> dict:
    """Batch report: overview + store timeline + comment word cloud."""
    return {
        "overview": overview_payload(dataset, exclude=exclude),
        "timeline": timeline_payload(all_datasets),
        "wordcloud": word_cloud_payload(dataset, top_k_words, exclude),
    }


def worker_payload(
    dataset: StudyDataset, worker_id: str, k: int = DEFAULT_SIMILAR_K
) -> dict:
    details = views.worker_details(dataset, worker_id)
    return {
        "dataset_id": dataset.id,
        "profile": profile_payload(details.profile),
        "aggregate": (
            None if details.aggregate is None else _aggregate_payload(details.aggregate)
        ),
        "comment": details.comment,
        "signature": anomaly.signature(dataset, worker_id),
        "responses": [
            {
                "presentation_index": r.presentation_index,
                "segment_id": r.segment_id,
                "ordinal": r.ordinal,
                "answer": r.answer.value,
                "response_time_ms": r.response_time_ms,
                "correct": r.correct,
                "running_accuracy": r.running_accuracy,
            }
            for r in details.responses
        ],
        "similar": [
            {"worker_id": s.worker_id, "score": s.score}
            for s in anomaly.similar_workers(dataset, worker_id, k)
        ],
    }


def timeline_payload(datasets: list[StudyDataset]) -> dict:
    """Timeline bars plus per-dataset summaries, both date-ordered."""
    return {
        "bars": [
            {
                "dataset_id": bar.dataset_id,
                "created_on": _date(bar.created_on),
                "n_workers": bar.n_workers,
                "n_responses": bar.n_responses,
                "mean_accuracy": bar.mean_accuracy,
            }
            for bar in views.timeline(datasets)
        ],
        "datasets": datasets_payload(datasets)["datasets"],
    }


def ingest_result_payload(dataset: StudyDataset, warnings: list[dict]) -> dict:
    return {"dataset": dataset_summary_payload(dataset), "warnings": warnings}
