"""HTTP front end over the analytics engine.

Every read endpoint is a pure function of (store snapshot, query
parameters): handlers load an immutable dataset, call the shared
payload builders, and serialize with the one canonical JSON encoder,
so identical requests return byte-identical bodies and always match
the CLI's output. The only writes are dataset ingestion and the
append-only annotation log, which is flushed to disk before the
response acknowledges it.

Errors use one JSON shape {code, message, detail}: 404 for unknown
path ids, 422 for anything invalid, 409 for duplicate ingest.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, File, Query, Request, UploadFile
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import Response
from pydantic import BaseModel

from . import payloads
from .consensus import MatrixMode, SortKey
from .errors import (
    BadPerplexity,
    ConsensusError,
    DegenerateInput,
    IngestError,
    InvalidRange,
    SchemaMismatch,
    StatisticsUnavailable,
    UnknownAxis,
    UnknownDataset,
    UnknownWorker,
)
from .ingest import DatasetManifest, ingest_study, protocol_warnings
from .model import AnnotationTarget, AnomalyAnnotation, StudyDataset
from .store import Store

_SORT_KEYS = {k.value: k for k in SortKey}
_MODES = {m.value: m for m in MatrixMode}
_TRUE = frozenset({"on", "true", "1", "yes"})
_FALSE = frozenset({"off", "false", "0", "no", ""})

_STATUS = {
    UnknownWorker: 404,
    UnknownDataset: 404,
    StatisticsUnavailable: 422,
    UnknownAxis: 422,
    SchemaMismatch: 422,
    BadPerplexity: 422,
    DegenerateInput: 422,
    InvalidRange: 422,
}

_CODES = {
    UnknownWorker: "unknown_worker",
    UnknownDataset: "unknown_dataset",
    StatisticsUnavailable: "statistics_unavailable",
    UnknownAxis: "unknown_axis",
    SchemaMismatch: "schema_mismatch",
    BadPerplexity: "bad_perplexity",
    DegenerateInput: "degenerate_input",
    InvalidRange: "invalid_range",
}


@dataclass(frozen=True)
class SessionState:
    """One analyst's steering state, materialized from the request URL.

    The service itself is stateless: the session lives in the query
    string (mirroring the UI's URL-serializable view state) and the
    exclusion sets always mirror the persisted annotation log.
    """

    session_id: str
    active_dataset: str
    threshold: float
    mode: MatrixMode
    sort: SortKey
    exclude: bool
    excluded_workers: frozenset[str]
    excluded_segments: frozenset[str]

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 100.0:
            raise ValueError(
                f"threshold must be in [0, 100], got {self.threshold}"
            )


def _json(payload, status_code: int = 200) -> Response:
    return Response(
        content=payloads.canonical_json(payload),
        media_type="application/json",
        status_code=status_code,
    )


def _error(code: str, message: str, detail=None, status: int = 422) -> Response:
    return _json({"code": code, "message": message, "detail": detail}, status)


def _parse_exclude(raw: str) -> bool:
    token = raw.strip().lower()
    if token in _TRUE:
        return True
    if token in _FALSE:
        return False
    raise ValueError(f"exclude must be on or off, got {raw!r}")


def _parse_weights(raw: str | None) -> dict[str, float] | None:
    """'param:w,param:w' pairs; a bare name means weight 1.0."""
    if raw is None or not raw.strip():
        return None
    weights: dict[str, float] = {}
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        name, sep, value = part.partition(":")
        weights[name.strip()] = float(value) if sep else 1.0
    return weights or None


def _parse_mode(raw: str) -> MatrixMode:
    if raw not in _MODES:
        raise ValueError(f"mode must be one of {sorted(_MODES)}, got {raw!r}")
    return _MODES[raw]


def _parse_sort(raw: str) -> SortKey:
    if raw not in _SORT_KEYS:
        raise ValueError(f"sort must be one of {sorted(_SORT_KEYS)}, got {raw!r}")
    return _SORT_KEYS[raw]


def _parse_date(raw: str | None, name: str) -> dt.date | None:
    if raw is None or not raw.strip():
        return None
    try:
        return dt.date.fromisoformat(raw.strip())
    except ValueError:
        raise ValueError(f"{name} must be an ISO date, got {raw!r}") from None


class AnnotationRequest(BaseModel):
    target: str
    target_id: str
    note: str = ""
    marked_by: str = "analyst"


def create_app(store: Store | str | Path) -> FastAPI:
    """Build the service over a dataset store directory."""
    if not isinstance(store, Store):
        store = Store(store)

    app = FastAPI(title="crowdconsensus", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _dataset(dataset_id: str) -> StudyDataset:
        try:
            return store.load(dataset_id)
        except KeyError:
            raise UnknownDataset(f"unknown dataset {dataset_id!r}") from None

    @app.exception_handler(ConsensusError)
    def _domain_error(request: Request, exc: ConsensusError) -> Response:
        if isinstance(exc, IngestError):
            return _error(
                "ingest_error",
                str(exc),
                [d.to_dict() for d in exc.diagnostics],
                422,
            )
        return _error(
            _CODES.get(type(exc), "domain_error"),
            str(exc),
            None,
            _STATUS.get(type(exc), 422),
        )

    @app.exception_handler(ValueError)
    def _value_error(request: Request, exc: ValueError) -> Response:
        return _error("validation", str(exc), None, 422)

    @app.exception_handler(RequestValidationError)
    def _request_error(request: Request, exc: RequestValidationError) -> Response:
        detail = [
            {"loc": [str(loc) for loc in e.get("loc", ())], "msg": str(e.get("msg", ""))}
            for e in exc.errors()
        ]
        return _error("validation", "invalid request", detail, 422)

    @app.get("/datasets")
    def list_datasets(
        from_date: str | None = Query(default=None, alias="from"),
        to_date: str | None = Query(default=None, alias="to"),
    ) -> Response:
        lo = _parse_date(from_date, "from")
        hi = _parse_date(to_date, "to")
        if lo is None and hi is None:
            datasets = store.load_all()
        else:
            datasets = store.filter_by_date(
                lo or dt.date.min, hi or dt.date.max
            )
        return _json(payloads.timeline_payload(datasets))

    @app.get("/datasets/{dataset_id}/consensus")
    def consensus(
        dataset_id: str,
        threshold: float = 50.0,
        mode: str = "response",
        sort: str = "time",
        exclude: str = "off",
        session: str = "default",
    ) -> Response:
        dataset = _dataset(dataset_id)
        state = SessionState(
            session_id=session,
            active_dataset=dataset_id,
            threshold=threshold,
            mode=_parse_mode(mode),
            sort=_parse_sort(sort),
            exclude=_parse_exclude(exclude),
            excluded_workers=dataset.marked_workers(),
            excluded_segments=dataset.marked_segments(),
        )
        return _json(
            payloads.consensus_payload(
                dataset, state.threshold, state.mode, state.sort, state.exclude
            )
        )

    @app.get("/datasets/{dataset_id}/sweep")
    def sweep(dataset_id: str, step: float = 5.0, exclude: str = "off") -> Response:
        dataset = _dataset(dataset_id)
        return _json(payloads.sweep_payload(dataset, step, _parse_exclude(exclude)))

    @app.get("/datasets/{dataset_id}/aggregates")
    def aggregates(dataset_id: str, exclude: str = "off") -> Response:
        dataset = _dataset(dataset_id)
        return _json(payloads.aggregates_payload(dataset, _parse_exclude(exclude)))

    @app.get("/datasets/{dataset_id}/similar-workers")
    def similar_workers(dataset_id: str, probe: str, k: int = 5) -> Response:
        dataset = _dataset(dataset_id)
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        return _json(payloads.similar_payload(dataset, probe, k))

    @app.get("/datasets/{dataset_id}/ambiguous-segments")
    def ambiguous_segments(
        dataset_id: str,
        min_ambiguity: float = Query(default=0.0, alias="min"),
        exclude: str = "off",
    ) -> Response:
        dataset = _dataset(dataset_id)
        return _json(
            payloads.ambiguous_payload(dataset, min_ambiguity, _parse_exclude(exclude))
        )

    @app.get("/datasets/{dataset_id}/anomalies")
    def anomalies(dataset_id: str, exclude: str = "off") -> Response:
        dataset = _dataset(dataset_id)
        return _json(payloads.anomalies_payload(dataset, _parse_exclude(exclude)))

    @app.get("/datasets/{dataset_id}/embedding")
    def embedding(
        dataset_id: str,
        items: str = "workers",
        method: str = "mds",
        weights: str | None = None,
        glyph: str = "polyps",
        radius: float = 0.0,
        perplexity: float = 15.0,
        iterations: int = 1000,
        seed: int = 0,
        exclude: str = "off",
    ) -> Response:
        dataset = _dataset(dataset_id)
        return _json(
            payloads.embedding_payload(
                dataset,
                items=items,
                method=method,
                weights=_parse_weights(weights),
                glyph=glyph,
                radius=radius,
                perplexity=perplexity,
                n_iter=iterations,
                seed=seed,
                exclude=_parse_exclude(exclude),
            )
        )

    @app.get("/datasets/{dataset_id}/parallel-sets")
    def parallel_sets(dataset_id: str, axes: str, exclude: str = "off") -> Response:
        dataset = _dataset(dataset_id)
        names = tuple(a.strip() for a in axes.split(",") if a.strip())
        return _json(
            payloads.parallel_sets_payload(dataset, names, _parse_exclude(exclude))
        )

    @app.get("/datasets/{dataset_id}/wordcloud")
    def wordcloud(dataset_id: str, k: int = 50, exclude: str = "off") -> Response:
        dataset = _dataset(dataset_id)
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        return _json(payloads.word_cloud_payload(dataset, k, _parse_exclude(exclude)))

    @app.get("/datasets/{dataset_id}/overview")
    def overview(
        dataset_id: str, step: float = 5.0, exclude: str = "off"
    ) -> Response:
        dataset = _dataset(dataset_id)
        return _json(payloads.overview_payload(dataset, step, _parse_exclude(exclude)))

    @app.get("/datasets/{dataset_id}/workers/{worker_id}/details")
    def worker_details(dataset_id: str, worker_id: str, k: int = 5) -> Response:
        dataset = _dataset(dataset_id)
        return _json(payloads.worker_payload(dataset, worker_id, k))

    @app.get("/datasets/{dataset_id}/annotations")
    def list_annotations(dataset_id: str) -> Response:
        dataset = _dataset(dataset_id)
        return _json(
            {
                "dataset_id": dataset.id,
                "annotations": [
                    payloads.annotation_payload(a) for a in dataset.annotations
                ],
                "marked_workers": sorted(dataset.marked_workers()),
                "marked_segments": sorted(dataset.marked_segments()),
            }
        )

    @app.post("/datasets/{dataset_id}/annotations")
    def add_annotation(dataset_id: str, body: AnnotationRequest) -> Response:
        dataset = _dataset(dataset_id)
        try:
            target = AnnotationTarget(body.target)
        except ValueError:
            raise ValueError(
                f"target must be worker or segment, got {body.target!r}"
            ) from None
        known = (
            dataset.worker_ids
            if target is AnnotationTarget.WORKER
            else frozenset(dataset.segment_ids)
        )
        if body.target_id not in known:
            raise ValueError(
                f"unknown {target.value} {body.target_id!r} in dataset {dataset.id!r}"
            )
        annotation = AnomalyAnnotation(
            target=target,
            target_id=body.target_id,
            marked_by=body.marked_by,
            marked_at=dt.datetime.now(dt.timezone.utc),
            note=body.note,
        )
        # durable before the acknowledging response
        store.append_annotation(dataset_id, annotation)
        updated = _dataset(dataset_id)
        return _json(
            {
                "dataset_id": updated.id,
                "annotation": payloads.annotation_payload(annotation),
                "marked_workers": sorted(updated.marked_workers()),
                "marked_segments": sorted(updated.marked_segments()),
            },
            status_code=201,
        )

    @app.post("/ingest")
    def ingest(
        manifest: UploadFile = File(...),
        responses: UploadFile = File(...),
        workers: UploadFile = File(...),
        segments: UploadFile = File(...),
        comments: UploadFile | None = File(default=None),
    ) -> Response:
        try:
            header = DatasetManifest.from_json(manifest.file.read())
        except (KeyError, ValueError) as exc:
            raise ValueError(f"bad manifest: {exc}") from None
        dataset = ingest_study(
            responses.file.read(),
            workers.file.read(),
            segments.file.read(),
            header,
            None if comments is None else comments.file.read(),
        )
        try:
            store.save(dataset)
        except FileExistsError:
            return _error(
                "duplicate_dataset",
                f"dataset {dataset.id!r} already exists",
                None,
                409,
            )
        warnings = [d.to_dict() for d in protocol_warnings(dataset)]
        return _json(payloads.ingest_result_payload(dataset, warnings), 201)

    return app
