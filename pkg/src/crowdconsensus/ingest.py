"""CSV ingestion for study datasets.

File schemas (UTF-8, header row required, comma separator, RFC-4180
quoting; row numbers in diagnostics are physical line numbers with the
header on line 1):

    responses.csv  worker_id,segment_id,answer,response_time_ms,
                   presentation_index,submitted_at
    workers.csv    worker_id,age_bracket,gender,education_level,
                   medical_expertise,visualization_expertise,reward_tier,location
    segments.csv   segment_id,dataset_id,ordinal,direction,orientation,ground_truth
    comments.csv   worker_id,dataset_id,text

Ingestion is total: every row becomes exactly one record or exactly one
diagnostic. All diagnostics are collected before anything is raised.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
from dataclasses import dataclass
from typing import BinaryIO, Iterable

from .errors import (
    DanglingReference,
    Diagnostic,
    DuplicateResponse,
    IngestError,
    MalformedRow,
)
from .model import (
    Answer,
    AnomalyAnnotation,
    AnnotationTarget,
    CrowdResponse,
    Direction,
    GroundTruth,
    Orientation,
    SegmentRecord,
    StudyDataset,
    UNSPECIFIED,
    WorkerComment,
    WorkerProfile,
)

RESPONSES_HEADER = (
    "worker_id",
    "segment_id",
    "answer",
    "response_time_ms",
    "presentation_index",
    "submitted_at",
)
WORKERS_HEADER = (
    "worker_id",
    "age_bracket",
    "gender",
    "education_level",
    "medical_expertise",
    "visualization_expertise",
    "reward_tier",
    "location",
)
SEGMENTS_HEADER = (
    "segment_id",
    "dataset_id",
    "ordinal",
    "direction",
    "orientation",
    "ground_truth",
)
COMMENTS_HEADER = ("worker_id", "dataset_id", "text")

MALFORMED_ROW = "MALFORMED_ROW"
DANGLING_REFERENCE = "DANGLING_REFERENCE"
DUPLICATE_RESPONSE = "DUPLICATE_RESPONSE"
PROTOCOL_RESPONSE_COUNT = "PROTOCOL_RESPONSE_COUNT"

# The micro-task protocol shows each worker this many segments; deviation
# is a warning, not a validation failure.
EXPECTED_RESPONSES_PER_WORKER = 20

_ERROR_CLASS = {
    MALFORMED_ROW: MalformedRow,
    DANGLING_REFERENCE: DanglingReference,
    DUPLICATE_RESPONSE: DuplicateResponse,
}


@dataclass(frozen=True)
class DatasetManifest:
    """Header fields for one dataset, supplied alongside the CSVs."""

    id: str
    created_on: dt.date
    fov_degrees: int
    flythrough_speed: int

    @classmethod
    def from_json(cls, raw: bytes | str) -> "DatasetManifest":
        doc = json.loads(raw)
        try:
            return cls(
                id=str(doc["dataset_id"]),
                created_on=dt.date.fromisoformat(doc["created_on"]),
                fov_degrees=int(doc["fov_degrees"]),
                flythrough_speed=int(doc["flythrough_speed"]),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise MalformedRow(
                [Diagnostic(MALFORMED_ROW, "manifest", None, f"bad manifest: {exc}")]
            ) from exc

    def to_json(self) -> str:
        return json.dumps(
            {
                "dataset_id": self.id,
                "created_on": self.created_on.isoformat(),
                "fov_degrees": self.fov_degrees,
                "flythrough_speed": self.flythrough_speed,
            },
            sort_keys=True,
        )


def parse_timestamp(text: str) -> dt.datetime:
    """ISO-8601 UTC timestamp; a trailing Z is accepted and normalized."""
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    value = dt.datetime.fromisoformat(text)
    if value.tzinfo is None:
        raise ValueError("timestamp must carry a UTC offset")
    return value.astimezone(dt.timezone.utc)


def _rows(stream: BinaryIO | bytes, file_name: str, header: tuple[str, ...],
          errors: list[Diagnostic]) -> Iterable[tuple[int, list[str]]]:
    """Yield (line_number, row) for each well-shaped data row."""
    if isinstance(stream, bytes):
        stream = io.BytesIO(stream)
    text = io.TextIOWrapper(stream, encoding="utf-8", newline="")
    reader = csv.reader(text)
    try:
        first = next(reader)
    except StopIteration:
        errors.append(Diagnostic(MALFORMED_ROW, file_name, 1, f"{file_name}: missing header row"))
        return
    if tuple(first) != header:
        errors.append(
            Diagnostic(
                MALFORMED_ROW, file_name, 1,
                f"{file_name}: expected header {','.join(header)}, got {','.join(first)}",
            )
        )
        return
    for row in reader:
        line = reader.line_num
        if len(row) != len(header):
            errors.append(
                Diagnostic(
                    MALFORMED_ROW, file_name, line,
                    f"{file_name} row {line}: expected {len(header)} columns, got {len(row)}",
                )
            )
            continue
        yield line, row


def _category(value: str) -> str:
    value = value.strip()
    return value if value else UNSPECIFIED


def _parse_workers(stream, errors: list[Diagnostic]) -> dict[str, WorkerProfile]:
    workers: dict[str, WorkerProfile] = {}
    for line, row in _rows(stream, "workers.csv", WORKERS_HEADER, errors):
        worker_id = row[0].strip()
        if not worker_id:
            errors.append(Diagnostic(MALFORMED_ROW, "workers.csv", line,
                                     f"workers.csv row {line}: empty worker_id"))
            continue
        if worker_id in workers:
            errors.append(Diagnostic(MALFORMED_ROW, "workers.csv", line,
                                     f"workers.csv row {line}: duplicate worker_id {worker_id!r}"))
            continue
        try:
            med = int(row[4])
            vis = int(row[5])
            workers[worker_id] = WorkerProfile(
                id=worker_id,
                age_bracket=_category(row[1]),
                gender=_category(row[2]),
                education_level=_category(row[3]),
                medical_expertise=med,
                visualization_expertise=vis,
                reward_tier=_category(row[6]),
                location=_category(row[7]),
            )
        except ValueError as exc:
            errors.append(Diagnostic(MALFORMED_ROW, "workers.csv", line,
                                     f"workers.csv row {line}: {exc}"))
    return workers


def _parse_segments(stream, dataset_id: str, errors: list[Diagnostic]) -> dict[str, SegmentRecord]:
    segments: dict[str, SegmentRecord] = {}
    ordinals: dict[int, int] = {}
    for line, row in _rows(stream, "segments.csv", SEGMENTS_HEADER, errors):
        segment_id = row[0].strip()
        if not segment_id:
            errors.append(Diagnostic(MALFORMED_ROW, "segments.csv", line,
                                     f"segments.csv row {line}: empty segment_id"))
            continue
        if segment_id in segments:
            errors.append(Diagnostic(MALFORMED_ROW, "segments.csv", line,
                                     f"segments.csv row {line}: duplicate segment_id {segment_id!r}"))
            continue
        if row[1] != dataset_id:
            errors.append(Diagnostic(
                DANGLING_REFERENCE, "segments.csv", line,
                f"segments.csv row {line}: dataset_id {row[1]!r} does not match manifest {dataset_id!r}",
            ))
            continue
        try:
            ordinal = int(row[2])
            record = SegmentRecord(
                id=segment_id,
                dataset_id=dataset_id,
                ordinal=ordinal,
                direction=Direction(row[3]),
                orientation=Orientation(row[4]),
                ground_truth=GroundTruth(row[5]),
            )
        except ValueError as exc:
            errors.append(Diagnostic(MALFORMED_ROW, "segments.csv", line,
                                     f"segments.csv row {line}: {exc}"))
            continue
        if ordinal in ordinals:
            errors.append(Diagnostic(
                MALFORMED_ROW, "segments.csv", line,
                f"segments.csv row {line}: ordinal {ordinal} already used on row {ordinals[ordinal]}",
            ))
            continue
        ordinals[ordinal] = line
        segments[segment_id] = record
    return segments


def _parse_responses(stream, workers: dict[str, WorkerProfile],
                     segments: dict[str, SegmentRecord],
                     errors: list[Diagnostic]) -> list[CrowdResponse]:
    responses: list[CrowdResponse] = []
    seen: dict[tuple[str, str], int] = {}
    for line, row in _rows(stream, "responses.csv", RESPONSES_HEADER, errors):
        worker_id, segment_id = row[0].strip(), row[1].strip()
        try:
            response = CrowdResponse(
                worker_id=worker_id,
                segment_id=segment_id,
                answer=Answer(row[2]),
                response_time_ms=int(row[3]),
                presentation_index=int(row[4]),
                submitted_at=parse_timestamp(row[5]),
            )
        except ValueError as exc:
            errors.append(Diagnostic(MALFORMED_ROW, "responses.csv", line,
                                     f"responses.csv row {line}: {exc}"))
            continue
        if worker_id not in workers:
            errors.append(Diagnostic(DANGLING_REFERENCE, "responses.csv", line,
                                     f"responses.csv row {line}: unknown worker {worker_id!r}"))
            continue
        if segment_id not in segments:
            errors.append(Diagnostic(DANGLING_REFERENCE, "responses.csv", line,
                                     f"responses.csv row {line}: unknown segment {segment_id!r}"))
            continue
        key = (worker_id, segment_id)
        if key in seen:
            errors.append(Diagnostic(
                DUPLICATE_RESPONSE, "responses.csv", line,
                f"responses.csv rows {seen[key]} and {line}: duplicate response for "
                f"worker {worker_id!r} on segment {segment_id!r}",
                rows=(seen[key], line),
            ))
            continue
        seen[key] = line
        responses.append(response)
    return responses


def _parse_comments(stream, dataset_id: str, workers: dict[str, WorkerProfile],
                    errors: list[Diagnostic]) -> list[WorkerComment]:
    comments: list[WorkerComment] = []
    seen: dict[str, int] = {}
    for line, row in _rows(stream, "comments.csv", COMMENTS_HEADER, errors):
        worker_id = row[0].strip()
        if worker_id not in workers:
            errors.append(Diagnostic(DANGLING_REFERENCE, "comments.csv", line,
                                     f"comments.csv row {line}: unknown worker {worker_id!r}"))
            continue
        if row[1] != dataset_id:
            errors.append(Diagnostic(
                DANGLING_REFERENCE, "comments.csv", line,
                f"comments.csv row {line}: dataset_id {row[1]!r} does not match manifest {dataset_id!r}",
            ))
            continue
        if worker_id in seen:
            errors.append(Diagnostic(
                MALFORMED_ROW, "comments.csv", line,
                f"comments.csv rows {seen[worker_id]} and {line}: more than one comment "
                f"from worker {worker_id!r}",
                rows=(seen[worker_id], line),
            ))
            continue
        seen[worker_id] = line
        comments.append(WorkerComment(worker_id=worker_id, dataset_id=dataset_id, text=row[2]))
    return comments


def _raise_for(errors: list[Diagnostic]) -> None:
    if errors:
        raise _ERROR_CLASS.get(errors[0].code, IngestError)(errors)


def ingest_study(
    responses_file: BinaryIO | bytes,
    workers_file: BinaryIO | bytes,
    segments_file: BinaryIO | bytes,
    manifest: DatasetManifest,
    comments_file: BinaryIO | bytes | None = None,
) -> StudyDataset:
    """Parse and cross-validate the study files into a dataset.

    Raises the exception class of the first diagnostic (MalformedRow,
    DanglingReference, or DuplicateResponse); every collected diagnostic
    rides along on ``.diagnostics``.
    """
    errors: list[Diagnostic] = []
    workers = _parse_workers(workers_file, errors)
    segments = _parse_segments(segments_file, manifest.id, errors)
    responses = _parse_responses(responses_file, workers, segments, errors)
    if comments_file is not None:
        comments = _parse_comments(comments_file, manifest.id, workers, errors)
    else:
        comments = []
    if not segments and not any(e.file == "segments.csv" for e in errors):
        errors.append(Diagnostic(MALFORMED_ROW, "segments.csv", None,
                                 "segments.csv: a dataset needs at least one segment"))
    _raise_for(errors)
    return StudyDataset(
        id=manifest.id,
        created_on=manifest.created_on,
        fov_degrees=manifest.fov_degrees,
        flythrough_speed=manifest.flythrough_speed,
        segments=tuple(sorted(segments.values(), key=lambda s: s.ordinal)),
        workers=tuple(workers.values()),
        responses=tuple(responses),
        comments=tuple(comments),
    )


def protocol_warnings(dataset: StudyDataset,
                      expected: int = EXPECTED_RESPONSES_PER_WORKER) -> list[Diagnostic]:
    """Non-fatal diagnostics for workers who answered != `expected` segments."""
    warnings = []
    for worker_id, rs in sorted(dataset.responses_by_worker().items()):
        if rs and len(rs) != expected:
            warnings.append(Diagnostic(
                PROTOCOL_RESPONSE_COUNT, "responses.csv", None,
                f"worker {worker_id!r} answered {len(rs)} segments, protocol expects {expected}",
            ))
    return warnings


def parse_annotation_line(line: str) -> AnomalyAnnotation:
    doc = json.loads(line)
    return AnomalyAnnotation(
        target=AnnotationTarget(doc["target"]),
        target_id=str(doc["target_id"]),
        marked_by=str(doc["marked_by"]),
        marked_at=parse_timestamp(doc["marked_at"]),
        note=str(doc.get("note", "")),
    )


def annotation_line(annotation: AnomalyAnnotation) -> str:
    return json.dumps(
        {
            "target": annotation.target.value,
            "target_id": annotation.target_id,
            "marked_by": annotation.marked_by,
            "marked_at": annotation.marked_at.isoformat(),
            "note": annotation.note,
        },
        sort_keys=True,
    )
