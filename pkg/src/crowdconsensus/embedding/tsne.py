"""t-SNE on a precomputed distance matrix.

Gaussian bandwidths are fit per point by binary search so every
neighbourhood carries the same effective size (the perplexity), the
joint distribution is symmetrized, and a Student-t low-dimensional
kernel is descended with momentum. Seeded generator in, identical
layout out.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadPerplexity

DEFAULT_PERPLEXITY = 15.0
DEFAULT_ITERATIONS = 1000
DEFAULT_LEARNING_RATE = 100.0

_ENTROPY_TOLERANCE = 1e-4
_MAX_BETA_STEPS = 64
_P_FLOOR = 1e-12
_EXAGGERATION = 4.0
_EXAGGERATION_STEPS = 100
_MOMENTUM_EARLY = 0.5
_MOMENTUM_LATE = 0.8
_MOMENTUM_SWITCH = 250
_GAIN_UP = 0.2
_GAIN_DOWN = 0.8
_GAIN_FLOOR = 0.01


@dataclass(frozen=True)
class TsneResult:
    positions: np.ndarray
    kl_divergence: float


def _conditional_row(squared_row: np.ndarray, beta: float) -> tuple[np.ndarray, float]:
    """Probabilities and entropy (bits) of one Gaussian row at precision beta."""
    logits = -squared_row * beta
    logits -= logits.max()
    p = np.exp(logits)
    total = p.sum()
    p /= total
    entropy = float(-np.sum(p * np.log2(np.maximum(p, _P_FLOOR))))
    return p, entropy


def _fit_row(squared_row: np.ndarray, target_entropy: float) -> np.ndarray:
    beta = 1.0
    beta_lo, beta_hi = 0.0, np.inf
    p, entropy = _conditional_row(squared_row, beta)
    for _ in range(_MAX_BETA_STEPS):
        if abs(entropy - target_entropy) < _ENTROPY_TOLERANCE:
            break
        if entropy > target_entropy:
            beta_lo = beta
            beta = beta * 2.0 if beta_hi == np.inf else (beta + beta_hi) / 2.0
        else:
            beta_hi = beta
            beta = (beta + beta_lo) / 2.0
        p, entropy = _conditional_row(squared_row, beta)
    return p


def joint_probabilities(distances: np.ndarray, perplexity: float) -> np.ndarray:
    """Symmetrized neighbour distribution P from a distance matrix.

    Each row's Gaussian precision is tuned until the row entropy matches
    log2(perplexity); P = (P_conditional + P_conditional^T) / (2n).
    """
    d = np.asarray(distances, dtype=float)
    n = d.shape[0]
    if n < 3 or not 1.0 <= perplexity <= n - 1:
        raise BadPerplexity(
            f"perplexity {perplexity} invalid for {n} points; need n >= 3 "
            f"and 1 <= perplexity <= n - 1"
        )
    target = float(np.log2(perplexity))
    squared = d**2
    conditional = np.zeros((n, n))
    others = np.arange(n)
    for i in range(n):
        mask = others != i
        conditional[i, mask] = _fit_row(squared[i, mask], target)
    p = (conditional + conditional.T) / (2.0 * n)
    return np.maximum(p, _P_FLOOR)


def student_t_affinities(positions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Q, kernel) where kernel_ij = 1/(1+||y_i-y_j||^2) and Q is its
    off-diagonal normalization."""
    deltas = positions[:, None, :] - positions[None, :, :]
    kernel = 1.0 / (1.0 + np.sum(deltas**2, axis=2))
    np.fill_diagonal(kernel, 0.0)
    q = kernel / kernel.sum()
    return np.maximum(q, _P_FLOOR), kernel


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    mask = p > _P_FLOOR
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def gradient(p: np.ndarray, positions: np.ndarray) -> np.ndarray:
    """dKL/dY = 4 * sum_j (p_ij - q_ij) (y_i - y_j) / (1 + ||y_i - y_j||^2)."""
    q, kernel = student_t_affinities(positions)
    weights = (p - q) * kernel
    deltas = positions[:, None, :] - positions[None, :, :]
    return 4.0 * np.sum(weights[:, :, None] * deltas, axis=1)


def tsne(
    distances: np.ndarray,
    perplexity: float = DEFAULT_PERPLEXITY,
    n_iter: int = DEFAULT_ITERATIONS,
    learning_rate: float = DEFAULT_LEARNING_RATE,
    seed: int = 0,
) -> TsneResult:
    """Embed a distance matrix in 2-D by t-SNE.

    P is exaggerated fourfold for the first 100 steps to form tight
    clusters early; momentum rises from 0.5 to 0.8 at step 250, and
    per-coordinate gains damp oscillation so small layouts stay stable.
    The layout is recentered each step and is a pure function of
    (distances, perplexity, n_iter, learning_rate, seed).
    """
    p = joint_probabilities(distances, perplexity)
    n = p.shape[0]
    rng = np.random.default_rng(seed)
    positions = rng.standard_normal((n, 2)) * 1e-4
    velocity = np.zeros_like(positions)
    gains = np.ones_like(positions)
    for step in range(n_iter):
        active_p = p * _EXAGGERATION if step < _EXAGGERATION_STEPS else p
        grad = gradient(active_p, positions)
        momentum = _MOMENTUM_EARLY if step < _MOMENTUM_SWITCH else _MOMENTUM_LATE
        same_direction = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_direction, gains * _GAIN_DOWN, gains + _GAIN_UP)
        gains = np.maximum(gains, _GAIN_FLOOR)
        velocity = momentum * velocity - learning_rate * gains * grad
        positions = positions + velocity
        positions = positions - positions.mean(axis=0)
    q, _ = student_t_affinities(positions)
    return TsneResult(positions, kl_divergence(p, q))
