"""Tests for the shifted BiCG solver."""

import logging
import math
from unittest.mock import patch

import numpy as np
import pytest

from feast_power.errors import Breakdown, DimMismatch, InvalidNode
from feast_power.linalg import SparseSymMatrix
from feast_power.models import Shift, SolverConfig
from feast_power.shifted import (
    _BlockOutcome,
    bicg_shifted,
    condition_bound,
    solve_shifted_block,
    solve_shifted_systems,
)


def tridiagonal(n: int) -> SparseSymMatrix:
    dense = np.diag(np.linspace(1.0, 10.0, n))
    dense += np.diag(np.full(n - 1, 0.3), 1) + np.diag(np.full(n - 1, 0.3), -1)
    return SparseSymMatrix.from_dense(dense)


def shifted_dense(matrix: SparseSymMatrix, z: complex) -> np.ndarray:
    return z * np.eye(matrix.n) - matrix.toarray()


class TestBicgShifted:
    """Tests for bicg_shifted."""

    @pytest.mark.smoke
    def test_solves_complex_shifted_system(self) -> None:
        """Solution matches a dense solve and the recomputed residual is below tol."""
        matrix = tridiagonal(40)
        z = complex(5.0, 2.0)
        b = np.random.default_rng(0).standard_normal(40)
        x, stats = bicg_shifted(matrix, z, b, tol=1e-12)
        expected = np.linalg.solve(shifted_dense(matrix, z), b)
        np.testing.assert_allclose(x, expected, rtol=1e-9, atol=1e-11)
        assert stats.converged is True
        assert stats.final_relres < 1e-12
        assert 0 < stats.iterations <= 5 * matrix.n

    def test_accepts_shift_model(self) -> None:
        """A Shift model and the equivalent complex number give the same answer."""
        matrix = tridiagonal(20)
        b = np.ones(20)
        x_shift, _ = bicg_shifted(matrix, Shift(re=3.0, im=1.0), b)
        x_complex, _ = bicg_shifted(matrix, complex(3.0, 1.0), b)
        np.testing.assert_array_equal(x_shift, x_complex)

    def test_zero_rhs(self) -> None:
        """b = 0 returns x = 0 after zero iterations."""
        x, stats = bicg_shifted(tridiagonal(10), complex(1.0, 1.0), np.zeros(10))
        np.testing.assert_array_equal(x, np.zeros(10))
        assert stats.iterations == 0
        assert stats.converged is True

    def test_jacobi_preconditioner(self) -> None:
        """Jacobi preconditioning converges to the same solution."""
        matrix = tridiagonal(30)
        z = complex(4.0, 0.5)
        b = np.random.default_rng(1).standard_normal(30)
        x, stats = bicg_shifted(matrix, z, b, tol=1e-12, preconditioner="jacobi")
        expected = np.linalg.solve(shifted_dense(matrix, z), b)
        np.testing.assert_allclose(x, expected, rtol=1e-9, atol=1e-11)
        assert stats.converged is True

    def test_iteration_cap_returns_best_iterate(self) -> None:
        """Hitting max_iter reports non-convergence with the recomputed residual."""
        matrix = tridiagonal(50)
        z = complex(5.0, 0.01)
        b = np.random.default_rng(2).standard_normal(50)
        x, stats = bicg_shifted(matrix, z, b, tol=1e-14, max_iter=2)
        residual = b - shifted_dense(matrix, z) @ x
        assert stats.converged is False
        assert stats.iterations == 2
        assert stats.final_relres == pytest.approx(
            np.linalg.norm(residual) / np.linalg.norm(b)
        )

    def test_wrong_length(self) -> None:
        """Right-hand side of the wrong length raises DimMismatch."""
        with pytest.raises(DimMismatch):
            bicg_shifted(tridiagonal(5), complex(1.0, 1.0), np.ones(6))


class TestSolveShiftedBlock:
    """Tests for solve_shifted_block."""

    def test_columns_match_single_solves(self) -> None:
        """Each column equals the single right-hand-side solve."""
        matrix = tridiagonal(25)
        z = complex(2.0, 1.5)
        rhs = np.random.default_rng(3).standard_normal((25, 4))
        solution, stats = solve_shifted_block(matrix, z, rhs, SolverConfig(tol=1e-12))
        for j in range(4):
            single, _ = bicg_shifted(matrix, z, rhs[:, j], tol=1e-12)
            np.testing.assert_allclose(solution[:, j], single, rtol=1e-12, atol=1e-14)
        assert stats.systems == 4
        assert stats.converged is True

    def test_broken_column_is_retried(self) -> None:
        """A column that breaks down is solved again with a perturbed shadow."""
        matrix = tridiagonal(6)
        first = _BlockOutcome(2, 6)
        first.broken_at[:] = [3, -1]
        first.converged[:] = [False, True]
        first.iterations[:] = [3, 5]
        first.solution[:, 1] = 2.0
        retry = _BlockOutcome(1, 6)
        retry.solution[:, 0] = 1.0
        retry.converged[:] = True
        retry.iterations[:] = 4
        with patch(
            "feast_power.shifted._block_bicg", side_effect=[first, retry]
        ) as mock_bicg:
            solution, stats = solve_shifted_block(
                matrix, complex(1.0, 1.0), np.ones((6, 2))
            )
        assert mock_bicg.call_count == 2
        shadow = mock_bicg.call_args_list[1].args[6]
        assert shadow.shape == (6, 1)
        np.testing.assert_array_equal(solution[:, 0], np.ones(6))
        np.testing.assert_array_equal(solution[:, 1], np.full(6, 2.0))
        assert stats.converged is True
        assert stats.iterations == 7

    def test_repeated_breakdown_raises(self) -> None:
        """A second breakdown of the same column raises Breakdown."""
        matrix = tridiagonal(6)
        first = _BlockOutcome(1, 6)
        first.broken_at[:] = 2
        retry = _BlockOutcome(1, 6)
        retry.broken_at[:] = 1
        with (
            patch("feast_power.shifted._block_bicg", side_effect=[first, retry]),
            pytest.raises(Breakdown) as exc_info,
        ):
            solve_shifted_block(matrix, complex(1.0, 1.0), np.ones((6, 1)))
        assert exc_info.value.iteration == 1

    def test_non_convergence_warns(self, caplog: pytest.LogCaptureFixture) -> None:
        """An iteration cap below need logs a warning and returns the best iterate."""
        matrix = tridiagonal(40)
        rhs = np.random.default_rng(4).standard_normal((40, 2))
        with caplog.at_level(logging.WARNING, logger="feast_power.shifted"):
            solution, stats = solve_shifted_block(
                matrix, complex(5.0, 0.01), rhs, SolverConfig(tol=1e-14, max_iter=2)
            )
        assert stats.converged is False
        assert np.all(np.isfinite(solution))
        assert "did not converge" in caplog.text

    def test_block_shape_checked(self) -> None:
        """A block with the wrong row count raises DimMismatch."""
        with pytest.raises(DimMismatch):
            solve_shifted_block(tridiagonal(5), complex(1.0, 1.0), np.ones((4, 2)))

    def test_conjugate_shift_gives_conjugate_solution(self) -> None:
        """Solving with conj(z) on a real block returns the conjugate solution."""
        matrix = SparseSymMatrix.from_dense(np.diag(np.arange(1.0, 11.0)))
        rhs = np.random.default_rng(6).standard_normal((10, 3))
        for z in (complex(5.5, 2.0), complex(0.3, 0.7), complex(9.9, 0.05)):
            upper, _ = solve_shifted_block(matrix, z, rhs)
            lower, _ = solve_shifted_block(matrix, z.conjugate(), rhs)
            np.testing.assert_allclose(lower, upper.conj(), rtol=0.0, atol=1e-12)


class TestSolveShiftedSystems:
    """Tests for solve_shifted_systems."""

    def test_matches_separate_block_solves(self) -> None:
        """Stacking the shifts gives the same blocks as one solve per shift."""
        matrix = tridiagonal(30)
        rhs = np.random.default_rng(7).standard_normal((30, 3))
        poles = [complex(2.0, 1.0), complex(5.0, 0.4), Shift(re=8.0, im=2.5)]
        config = SolverConfig(tol=1e-12)
        solved = solve_shifted_systems(matrix, poles, rhs, config)
        assert len(solved) == 3
        for pole, (solution, stats) in zip(poles, solved, strict=True):
            expected, expected_stats = solve_shifted_block(matrix, pole, rhs, config)
            np.testing.assert_allclose(solution, expected, rtol=1e-10, atol=1e-12)
            assert stats.systems == 3
            assert stats.converged is True
            assert stats.iterations == expected_stats.iterations

    def test_jacobi_per_shift(self) -> None:
        """Jacobi scaling uses each column's own shift."""
        matrix = tridiagonal(20)
        rhs = np.ones((20, 1))
        poles = [complex(3.0, 0.5), complex(7.0, 1.0)]
        config = SolverConfig(tol=1e-12, preconditioner="jacobi")
        solved = solve_shifted_systems(matrix, poles, rhs, config)
        for pole, (solution, _) in zip(poles, solved, strict=True):
            expected = np.linalg.solve(shifted_dense(matrix, pole), rhs)
            np.testing.assert_allclose(solution, expected, rtol=1e-9, atol=1e-11)

    def test_no_shifts(self) -> None:
        """An empty shift list solves nothing."""
        assert solve_shifted_systems(tridiagonal(5), [], np.ones((5, 2))) == []

    def test_block_shape_checked(self) -> None:
        """A block with the wrong row count raises DimMismatch."""
        with pytest.raises(DimMismatch):
            solve_shifted_systems(tridiagonal(5), [complex(1.0, 1.0)], np.ones(5))


class TestConditionBound:
    """Tests for condition_bound."""

    def test_formula(self) -> None:
        """1 + 2 delta / (r sin(pi t))."""
        assert condition_bound(2.0, 1.0, 0.5) == pytest.approx(5.0)
        assert condition_bound(0.0, 3.0, 0.1) == 1.0

    def test_bound_holds_for_random_diagonal_matrices(self) -> None:
        """cond_2(z I - A) stays below the bound on 100 random cases with r <= delta."""
        rng = np.random.default_rng(5)
        violations = 0
        for _ in range(100):
            delta = rng.uniform(0.1, 10.0)
            radius = rng.uniform(0.01, 1.0) * delta
            node = rng.uniform(0.01, 0.99)
            eigenvalues = rng.uniform(-delta, delta, size=20)
            eigenvalues[0] = delta
            z = radius * complex(math.cos(math.pi * node), math.sin(math.pi * node))
            distances = np.abs(z - eigenvalues)
            exact = distances.max() / distances.min()
            if exact > condition_bound(delta, radius, node) * (1.0 + 1e-12):
                violations += 1
        assert violations == 0

    @pytest.mark.parametrize("node", [0.0, 1.0, -0.2, 1.5])
    def test_invalid_node(self, node: float) -> None:
        """Nodes outside (0, 1) raise InvalidNode."""
        with pytest.raises(InvalidNode):
            condition_bound(1.0, 1.0, node)

    def test_invalid_delta_or_radius(self) -> None:
        """Negative delta or non-positive radius raise ValueError."""
        with pytest.raises(ValueError):
            condition_bound(-1.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            condition_bound(1.0, 0.0, 0.5)

    def test_monotone_in_delta_radius_and_node(self) -> None:
        """The bound grows with delta and shrinks with r and with sin(pi t)."""
        deltas = np.linspace(0.0, 5.0, 11)
        radii = np.linspace(0.1, 4.0, 11)
        nodes = np.linspace(0.05, 0.5, 10)
        for radius in radii:
            for node in nodes:
                bounds = [condition_bound(d, radius, node) for d in deltas]
                assert np.all(np.diff(bounds) > 0.0)
        for delta in deltas[1:]:
            for node in nodes:
                bounds = [condition_bound(delta, r, node) for r in radii]
                assert np.all(np.diff(bounds) < 0.0)
            for radius in radii:
                bounds = [condition_bound(delta, radius, t) for t in nodes]
                assert np.all(np.diff(bounds) < 0.0)
