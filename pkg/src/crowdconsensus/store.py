"""On-disk dataset store.

Layout: one directory per dataset id holding `manifest.json`, the four
CSVs (`responses.csv`, `workers.csv`, `segments.csv`, `comments.csv`),
and `annotations.log` (one JSON object per line, append-only).

Many concurrent readers, one writer: loads parse a snapshot of the files;
saves and annotation appends are serialized behind a lock. Annotation
appends are flushed and fsynced before returning so a service can
acknowledge durability.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import os
import threading
from pathlib import Path

from .errors import InvalidRange
from .ingest import (
    COMMENTS_HEADER,
    DatasetManifest,
    RESPONSES_HEADER,
    SEGMENTS_HEADER,
    WORKERS_HEADER,
    annotation_line,
    ingest_study,
    parse_annotation_line,
)
from .model import AnomalyAnnotation, StudyDataset, UNSPECIFIED

FILE_NAMES = (
    "manifest.json",
    "responses.csv",
    "workers.csv",
    "segments.csv",
    "comments.csv",
    "annotations.log",
)


def _csv_bytes(header: tuple[str, ...], rows: list[list]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf)
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue().encode("utf-8")


def _field(value: str) -> str:
    return "" if value == UNSPECIFIED else value


def serialize_dataset(dataset: StudyDataset) -> dict[str, bytes]:
    """Dataset -> store files, byte-deterministic for a given snapshot."""
    manifest = DatasetManifest(
        id=dataset.id,
        created_on=dataset.created_on,
        fov_degrees=dataset.fov_degrees,
        flythrough_speed=dataset.flythrough_speed,
    )
    responses = [
        [r.worker_id, r.segment_id, r.answer.value, r.response_time_ms,
         r.presentation_index, r.submitted_at.isoformat()]
        for r in dataset.responses
    ]
    workers = [
        [w.id, _field(w.age_bracket), _field(w.gender), _field(w.education_level),
         w.medical_expertise, w.visualization_expertise,
         _field(w.reward_tier), _field(w.location)]
        for w in dataset.workers
    ]
    segments = [
        [s.id, s.dataset_id, s.ordinal, s.direction.value,
         s.orientation.value, s.ground_truth.value]
        for s in dataset.segments
    ]
    comments = [[c.worker_id, c.dataset_id, c.text] for c in dataset.comments]
    log = "".join(annotation_line(a) + "\n" for a in dataset.annotations)
    return {
        "manifest.json": (manifest.to_json() + "\n").encode("utf-8"),
        "responses.csv": _csv_bytes(RESPONSES_HEADER, responses),
        "workers.csv": _csv_bytes(WORKERS_HEADER, workers),
        "segments.csv": _csv_bytes(SEGMENTS_HEADER, segments),
        "comments.csv": _csv_bytes(COMMENTS_HEADER, comments),
        "annotations.log": log.encode("utf-8"),
    }


def parse_dataset_files(files: dict[str, bytes]) -> StudyDataset:
    """Store files -> dataset; inverse of serialize_dataset on valid input."""
    manifest = DatasetManifest.from_json(files["manifest.json"])
    dataset = ingest_study(
        responses_file=files["responses.csv"],
        workers_file=files["workers.csv"],
        segments_file=files["segments.csv"],
        manifest=manifest,
        comments_file=files.get("comments.csv", b"worker_id,dataset_id,text\r\n"),
    )
    log = files.get("annotations.log", b"").decode("utf-8")
    annotations = tuple(
        parse_annotation_line(line) for line in log.splitlines() if line.strip()
    )
    return dataset.with_annotations(annotations)


def round_trip(dataset: StudyDataset) -> StudyDataset:
    """Serialize to the store format and re-parse; identity on valid data."""
    return parse_dataset_files(serialize_dataset(dataset))


class Store:
    """Directory of datasets with serialized writes."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._write_lock = threading.Lock()

    def dataset_ids(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir()
            if p.is_dir() and (p / "manifest.json").exists()
        )

    def __contains__(self, dataset_id: str) -> bool:
        return (self.root / dataset_id / "manifest.json").exists()

    def load(self, dataset_id: str) -> StudyDataset:
        directory = self.root / dataset_id
        if not (directory / "manifest.json").exists():
            raise KeyError(dataset_id)
        files: dict[str, bytes] = {}
        for name in FILE_NAMES:
            path = directory / name
            if path.exists():
                files[name] = path.read_bytes()
        return parse_dataset_files(files)

    def load_all(self) -> list[StudyDataset]:
        return [self.load(dataset_id) for dataset_id in self.dataset_ids()]

    def save(self, dataset: StudyDataset, overwrite: bool = False) -> None:
        with self._write_lock:
            directory = self.root / dataset.id
            if directory.exists() and not overwrite:
                raise FileExistsError(dataset.id)
            directory.mkdir(parents=True, exist_ok=True)
            for name, payload in serialize_dataset(dataset).items():
                (directory / name).write_bytes(payload)

    def append_annotation(self, dataset_id: str, annotation: AnomalyAnnotation) -> None:
        """Durably append one annotation (flush + fsync before returning)."""
        if dataset_id not in self:
            raise KeyError(dataset_id)
        with self._write_lock:
            path = self.root / dataset_id / "annotations.log"
            with open(path, "a", encoding="utf-8") as fh:
                fh.write(annotation_line(annotation) + "\n")
                fh.flush()
                os.fsync(fh.fileno())

    def filter_by_date(self, from_date: dt.date, to_date: dt.date) -> list[StudyDataset]:
        """Datasets with created_on in [from_date, to_date], by date then id."""
        if from_date > to_date:
            raise InvalidRange(f"from {from_date} is after to {to_date}")
        matches = [
            d for d in self.load_all() if from_date <= d.created_on <= to_date
        ]
        matches.sort(key=lambda d: (d.created_on, d.id))
        return matches
