"""Metric scaling: planted planar configurations must be recovered up
to rotation/reflection, and the stress-majorization trace must never
go up."""

from __future__ import annotations

import numpy as np
import pytest

from crowdconsensus.embedding.mds import classical_scaling, mds, stress
from crowdconsensus.errors import DegenerateInput


def pairwise(points: np.ndarray) -> np.ndarray:
    deltas = points[:, None, :] - points[None, :, :]
    return np.sqrt((deltas**2).sum(axis=2))


def planted_points(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-5.0, 5.0, size=(n, 2))


def relative_distance_error(original: np.ndarray, recovered: np.ndarray) -> float:
    target = pairwise(original)
    got = pairwise(recovered)
    mask = ~np.eye(len(original), dtype=bool)
    return float(
        np.sqrt(np.mean(((got[mask] - target[mask]) / target[mask]) ** 2))
    )


class TestClassicalScaling:
    def test_right_triangle_is_exact(self):
        # 3-4-5 triangle embeds exactly in the plane
        d = np.array([[0.0, 3.0, 4.0], [3.0, 0.0, 5.0], [4.0, 5.0, 0.0]])
        positions = classical_scaling(d)
        assert np.allclose(pairwise(positions), d, atol=1e-9)

    def test_unit_square(self):
        s = np.sqrt(2.0)
        d = np.array(
            [
                [0.0, 1.0, s, 1.0],
                [1.0, 0.0, 1.0, s],
                [s, 1.0, 0.0, 1.0],
                [1.0, s, 1.0, 0.0],
            ]
        )
        positions = classical_scaling(d)
        assert np.allclose(pairwise(positions), d, atol=1e-9)

    def test_planted_configuration_recovered(self):
        points = planted_points(20, seed=5)
        recovered = classical_scaling(pairwise(points))
        assert relative_distance_error(points, recovered) < 1e-9

    def test_output_is_deterministic(self):
        d = pairwise(planted_points(10, seed=1))
        a = classical_scaling(d)
        b = classical_scaling(d)
        assert np.array_equal(a, b)


class TestMds:
    def test_planar_input_recovered_to_machine_precision(self):
        points = planted_points(25, seed=11)
        result = mds(pairwise(points))
        assert relative_distance_error(points, result.positions) < 1e-6

    def test_stress_trace_never_increases(self):
        rng = np.random.default_rng(3)
        points = rng.normal(size=(15, 5))  # 5-D input cannot embed exactly
        result = mds(pairwise(points))
        trace = np.array(result.trace)
        assert len(trace) >= 1
        assert np.all(np.diff(trace) <= 1e-12)

    def test_final_stress_matches_positions(self):
        rng = np.random.default_rng(9)
        d = pairwise(rng.normal(size=(10, 4)))
        result = mds(d)
        assert result.stress == pytest.approx(stress(d, result.positions))
        assert result.stress == result.trace[-1]

    def test_improves_on_classical_start_for_nonplanar_input(self):
        rng = np.random.default_rng(17)
        d = pairwise(rng.normal(size=(12, 6)))
        result = mds(d)
        assert result.stress <= stress(d, classical_scaling(d)) + 1e-12

    def test_two_points(self):
        d = np.array([[0.0, 2.0], [2.0, 0.0]])
        result = mds(d)
        assert np.linalg.norm(result.positions[0] - result.positions[1]) == (
            pytest.approx(2.0)
        )

    def test_all_zero_distances(self):
        result = mds(np.zeros((4, 4)))
        assert np.array_equal(result.positions, np.zeros((4, 2)))
        assert result.stress == 0.0

    def test_single_point_rejected(self):
        with pytest.raises(DegenerateInput):
            mds(np.zeros((1, 1)))

    def test_asymmetric_rejected(self):
        d = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(DegenerateInput):
            mds(d)

    def test_negative_rejected(self):
        d = np.array([[0.0, -1.0], [-1.0, 0.0]])
        with pytest.raises(DegenerateInput):
            mds(d)

    def test_nonzero_diagonal_rejected(self):
        d = np.array([[1.0, 1.0], [1.0, 0.0]])
        with pytest.raises(DegenerateInput):
            mds(d)

    def test_non_square_rejected(self):
        with pytest.raises(DegenerateInput):
            mds(np.zeros((2, 3)))
