"""Crowd-consensus analytics for binary video-segment judgments.

Turns raw crowd responses (polyp / polyp-free votes on endoscopy
flythrough segments) into consensus labels, screening statistics,
anomaly reports, similarity maps, and summary views, and exposes the
whole pipeline through a CLI and an HTTP service.
"""

from __future__ import annotations

from .consensus import (
    ConfusionCounts,
    ConsensusReport,
    Label,
    MatrixMode,
    SortKey,
    SweepPoint,
    classify,
    sweep,
    vote_summaries,
)
from .errors import ConsensusError, IngestError
from .ingest import DatasetManifest, ingest_study
from .model import Answer, GroundTruth, StudyDataset
from .simulate import SimulationSpec, WorkerKind, WorkerModel, simulate
from .store import Store

__version__ = "1.0.0"

__all__ = [
    "Answer",
    "ConfusionCounts",
    "ConsensusError",
    "ConsensusReport",
    "DatasetManifest",
    "GroundTruth",
    "IngestError",
    "Label",
    "MatrixMode",
    "SimulationSpec",
    "SortKey",
    "Store",
    "StudyDataset",
    "SweepPoint",
    "WorkerKind",
    "WorkerModel",
    "classify",
    "ingest_study",
    "simulate",
    "sweep",
    "vote_summaries",
    "__version__",
]
