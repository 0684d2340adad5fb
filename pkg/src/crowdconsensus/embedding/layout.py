"""Post-projection touches: glyph overlap removal and visual encodings.

Projected points are drawn as equal-radius circles, so near-identical
items stack into unreadable piles. The resolver nudges only the pairs
that actually overlap, a little per iteration, preserving the global
shape of the projection while separating the stacks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import IterationBudgetExceeded

MAX_ITERATIONS = 500
_GAP_SLACK = 1e-6
_GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class LayoutResult:
    positions: np.ndarray
    iterations: int


@dataclass(frozen=True)
class Glyph:
    item_id: str
    x: float
    y: float
    lightness: float
    arc_fraction: float


def overlapping_pairs(
    positions: np.ndarray, radius: float
) -> list[tuple[int, int, float]]:
    """(i, j, distance) for circle pairs closer than 2r, with a small
    slack so converged output is not re-flagged by rounding."""
    positions = np.asarray(positions, dtype=float)
    limit = 2.0 * radius - _GAP_SLACK
    deltas = positions[:, None, :] - positions[None, :, :]
    distances = np.sqrt((deltas**2).sum(axis=2))
    rows, cols = np.nonzero(np.triu(distances < limit, k=1))
    return [
        (int(i), int(j), float(distances[i, j])) for i, j in zip(rows, cols)
    ]


def resolve_overlaps(
    positions: np.ndarray,
    radius: float,
    max_iterations: int = MAX_ITERATIONS,
) -> LayoutResult:
    """Push overlapping circles apart until no pair is closer than 2r.

    Each iteration moves both members of every overlapping pair half the
    missing distance apart along their separating line; coincident
    points get a deterministic pair-dependent direction. Already-valid
    input (including this function's own output) is returned unchanged
    after zero iterations. If the budget runs out the best-effort
    positions and the still-overlapping pairs ride along on the
    exception.
    """
    if radius <= 0:
        raise ValueError(f"radius must be > 0, got {radius}")
    current = np.array(positions, dtype=float)
    for iteration in range(max_iterations + 1):
        pairs = overlapping_pairs(current, radius)
        if not pairs:
            return LayoutResult(current, iteration)
        if iteration == max_iterations:
            raise IterationBudgetExceeded(current, pairs)
        shifts = np.zeros_like(current)
        for i, j, distance in pairs:
            if distance < _GAP_SLACK:
                angle = (i * len(current) + j) * _GOLDEN_ANGLE
                direction = np.array([math.cos(angle), math.sin(angle)])
            else:
                direction = (current[j] - current[i]) / distance
            push = (2.0 * radius - distance) / 2.0
            shifts[i] -= direction * push
            shifts[j] += direction * push
        current = current + shifts
    raise AssertionError("unreachable")


def lightness_fraction(value: float, max_value: float) -> float:
    """Linear value/max encoding in [0, 1]; 0 when the scale is empty."""
    if max_value <= 0:
        return 0.0
    return min(1.0, max(0.0, value / max_value))


def build_glyphs(
    item_ids: list[str],
    positions: np.ndarray,
    values: list[float],
    times: list[float],
) -> list[Glyph]:
    """Circle glyphs: fill lightness encodes value/max(value), the arc
    sweep encodes time/max(time)."""
    if not len(item_ids) == len(positions) == len(values) == len(times):
        raise ValueError("glyph inputs must share a length")
    max_value = max(values, default=0.0)
    max_time = max(times, default=0.0)
    return [
        Glyph(
            item_id=item_id,
            x=float(x),
            y=float(y),
            lightness=lightness_fraction(value, max_value),
            arc_fraction=lightness_fraction(time, max_time),
        )
        for item_id, (x, y), value, time in zip(item_ids, positions, values, times)
    ]
