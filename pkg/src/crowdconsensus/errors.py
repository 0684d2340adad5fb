"""Exception types shared across the package.

Ingestion errors carry structured diagnostics so callers (CLI, service)
can report row-accurate problems without string parsing.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Diagnostic:
    """One row-level problem found while ingesting a file."""

    code: str
    file: str
    row: int | None
    message: str
    rows: tuple[int, ...] = ()

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "file": self.file,
            "row": self.row,
            "rows": list(self.rows),
            "message": self.message,
        }


class ConsensusError(Exception):
    """Base class for all domain errors."""


class IngestError(ConsensusError):
    """One or more rows failed validation; all diagnostics are attached."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(d.message for d in self.diagnostics[:5])
        extra = "" if len(self.diagnostics) <= 5 else f" (+{len(self.diagnostics) - 5} more)"
        super().__init__(f"{len(self.diagnostics)} ingest error(s): {lines}{extra}")


class MalformedRow(IngestError):
    """Bad column count, unparseable field, or out-of-vocabulary value."""


class DanglingReference(IngestError):
    """A row refers to a worker, segment, or dataset that does not exist."""


class DuplicateResponse(IngestError):
    """Two response rows share the same (worker_id, segment_id) key."""


class InvalidRange(ConsensusError):
    """A from/to pair is reversed."""


class StatisticsUnavailable(ConsensusError):
    """Statistics mode requested but the dataset carries no ground truth."""


class UnknownWorker(ConsensusError):
    """A worker id does not exist in the dataset."""


class UnknownDataset(ConsensusError):
    """A dataset id does not exist in the store."""


class UnknownAxis(ConsensusError):
    """A cross-tabulation axis is not a categorical worker field."""


class SchemaMismatch(ConsensusError):
    """Feature vectors or weights disagree on dimension or kind."""


class DegenerateInput(ConsensusError):
    """Too few items to embed."""


class BadPerplexity(ConsensusError):
    """Perplexity is unreachable for the given number of points."""


class IterationBudgetExceeded(ConsensusError):
    """Overlap removal ran out of iterations; best-effort result attached."""

    def __init__(self, positions, residual_pairs: list[tuple[int, int, float]]):
        self.positions = positions
        self.residual_pairs = residual_pairs
        super().__init__(
            f"{len(residual_pairs)} overlapping pair(s) remain after iteration budget"
        )


class InfeasibleAssignment(ConsensusError):
    """views_per_segment exceeds the number of simulated workers."""


class EvenN(ConsensusError):
    """Majority-vote oracle requires an odd crowd size."""
