"""Tests for rational filters and their application to blocks."""

import numpy as np
import pytest

from feast_power.errors import CirclesDoNotCover, DimMismatch, EmptyInterval
from feast_power.filters import (
    apply_contours,
    apply_filter,
    apply_filter_pair,
    filter_contrast,
    filter_response,
    filter_scan,
    make_pair_contours,
    make_single_contour,
    scalar_filter,
    scalar_filter_pair,
    shifts,
)
from feast_power.linalg import SparseSymMatrix, gauss_legendre
from feast_power.matrices import diagonal
from feast_power.models import Contour, IntervalSpec, SolverConfig


def unit_circle(q: int = 8) -> Contour:
    return Contour(center=0.0, radius=1.0, rule=gauss_legendre(q))


class TestContours:
    """Tests for contour construction and shifts."""

    def test_single_contour(self) -> None:
        """Circle centered at the midpoint with half-width radius."""
        contour = make_single_contour(2.0, 6.0, gauss_legendre(4))
        assert contour.center == 4.0
        assert contour.radius == 2.0
        assert contour.footprint == (2.0, 6.0)

    def test_single_contour_empty_interval(self) -> None:
        """a >= b raises EmptyInterval."""
        with pytest.raises(EmptyInterval):
            make_single_contour(1.0, 1.0, gauss_legendre(4))

    def test_pair_contours_overlap_is_interval(self) -> None:
        """Left circle centered at b - r, right at a + r."""
        left, right = make_pair_contours(
            IntervalSpec(a=11.8, b=12.0, radius=5.0), gauss_legendre(8)
        )
        assert left.center == pytest.approx(7.0)
        assert right.center == pytest.approx(16.8)
        assert left.footprint[1] == pytest.approx(12.0)
        assert right.footprint[0] == pytest.approx(11.8)

    def test_pair_contours_radius_too_small(self) -> None:
        """2r < b - a raises CirclesDoNotCover."""
        with pytest.raises(CirclesDoNotCover):
            make_pair_contours(
                IntervalSpec(a=0.0, b=4.0, radius=1.5), gauss_legendre(8)
            )

    def test_pair_contours_empty_interval(self) -> None:
        """a >= b raises EmptyInterval."""
        with pytest.raises(EmptyInterval):
            make_pair_contours(
                IntervalSpec(a=2.0, b=1.0, radius=1.0), gauss_legendre(8)
            )

    def test_shifts_on_upper_semicircle(self) -> None:
        """Every pole sits on the circle with positive imaginary part."""
        contour = Contour(center=3.0, radius=2.0, rule=gauss_legendre(8))
        poles = shifts(contour)
        assert len(poles) == 8
        for pole in poles:
            assert pole.im > 0.0
            assert abs(pole.value - 3.0) == pytest.approx(2.0)


class TestScalarFilter:
    """Tests for scalar_filter and its pair composition."""

    def test_center_value_is_one(self) -> None:
        """h(c) = 1 for any rule."""
        for q in (1, 4, 8, 64):
            assert scalar_filter(0.0, unit_circle(q)) == pytest.approx(1.0, abs=1e-14)

    def test_symmetric_about_center(self) -> None:
        """h(c + d) = h(c - d)."""
        contour = unit_circle()
        for d in (0.3, 0.9, 1.7, 4.0):
            assert scalar_filter(d, contour) == pytest.approx(
                scalar_filter(-d, contour), abs=1e-14
            )

    def test_q8_filter_fidelity_against_q64(self) -> None:
        """|h - 1| <= 2e-3 within 0.5r and |h| <= 0.05 beyond 3r, q=64 as reference."""
        grid = np.linspace(-6.0, 6.0, 200)
        coarse = filter_response(unit_circle(8), grid)
        fine = filter_response(unit_circle(64), grid)
        inside = np.abs(grid) <= 0.5
        outside = np.abs(grid) >= 3.0
        assert np.all(np.abs(fine[inside] - 1.0) <= 1e-8)
        assert np.all(np.abs(fine[outside]) <= 1e-8)
        assert np.all(np.abs(coarse[inside] - 1.0) <= 2e-3)
        assert np.all(np.abs(coarse[outside]) <= 0.05)

    def test_response_matches_scalar(self) -> None:
        """Vectorized response equals pointwise evaluation."""
        contour = Contour(center=1.5, radius=0.7, rule=gauss_legendre(6))
        grid = np.array([-1.0, 1.2, 1.5, 2.4, 5.0])
        expected = [scalar_filter(lam, contour) for lam in grid]
        np.testing.assert_allclose(filter_response(contour, grid), expected, rtol=1e-15)

    def test_pair_is_product(self) -> None:
        """Composed response is h_R * h_L."""
        left, right = make_pair_contours(
            IntervalSpec(a=0.0, b=1.0, radius=2.0), gauss_legendre(8)
        )
        for lam in (-3.0, 0.5, 0.99, 1.5):
            assert scalar_filter_pair(lam, left, right) == pytest.approx(
                scalar_filter(lam, left) * scalar_filter(lam, right)
            )

    def test_pair_separates_interval(self) -> None:
        """The pair is near 1 inside (a, b) and small beyond the far circle edges."""
        left, right = make_pair_contours(
            IntervalSpec(a=0.0, b=1.0, radius=2.0), gauss_legendre(8)
        )
        assert scalar_filter_pair(0.5, left, right) == pytest.approx(1.0, abs=5e-2)
        assert abs(scalar_filter_pair(9.0, left, right)) < 1e-2
        assert abs(scalar_filter_pair(-8.0, left, right)) < 1e-2

    def test_contrast(self) -> None:
        """Contrast exceeds one for a well separated pair."""
        left, right = make_pair_contours(
            IntervalSpec(a=0.0, b=1.0, radius=0.5), gauss_legendre(8)
        )
        assert filter_contrast((left, right), 0.0, 1.0) > 1.0


class TestFilterScan:
    """Tests for filter_scan."""

    def test_single_circle_columns(self) -> None:
        """One circle gives lambda and h, h(0) near 1 and small at +-5."""
        frame = filter_scan([unit_circle()], np.linspace(-5.0, 5.0, 201))
        assert list(frame.columns) == ["lambda", "h"]
        assert frame.loc[100, "h"] == pytest.approx(1.0, abs=1e-12)
        assert abs(frame.loc[0, "h"]) <= 0.05
        assert abs(frame.loc[200, "h"]) <= 0.05

    def test_pair_columns(self) -> None:
        """A pair adds h_left and h_right and h is their product."""
        contours = make_pair_contours(
            IntervalSpec(a=0.0, b=1.0, radius=1.0), gauss_legendre(8)
        )
        frame = filter_scan(contours, np.linspace(-2.0, 3.0, 11))
        assert list(frame.columns) == ["lambda", "h", "h_left", "h_right"]
        np.testing.assert_allclose(frame["h"], frame["h_left"] * frame["h_right"])

    def test_rejects_three_contours(self) -> None:
        """More than two contours raise ValueError."""
        with pytest.raises(ValueError):
            filter_scan([unit_circle()] * 3, [0.0])


class TestApplyFilter:
    """Tests for applying filters to blocks."""

    @pytest.mark.smoke
    def test_diagonal_matrix_scales_by_response(self) -> None:
        """On a diagonal matrix, filtering e_i gives h(lambda_i) e_i."""
        eigenvalues = np.linspace(-3.0, 3.0, 11)
        matrix = diagonal(eigenvalues)
        contour = unit_circle()
        filtered, stats = apply_filter(
            matrix, np.eye(11), contour, SolverConfig(tol=1e-12)
        )
        np.testing.assert_allclose(
            filtered, np.diag(filter_response(contour, eigenvalues)), atol=1e-11
        )
        assert stats.systems == 11 * 8

    def test_two_circle_algebra(self) -> None:
        """Composed filter equals the product of single-circle responses entrywise."""
        eigenvalues = np.linspace(0.0, 10.0, 12)
        matrix = diagonal(eigenvalues)
        left, right = make_pair_contours(
            IntervalSpec(a=4.0, b=6.0, radius=3.0), gauss_legendre(8)
        )
        tol = 1e-10
        filtered, _ = apply_filter_pair(
            matrix, np.eye(12), left, right, SolverConfig(tol=tol)
        )
        expected = filter_response(left, eigenvalues) * filter_response(
            right, eigenvalues
        )
        np.testing.assert_allclose(np.diag(filtered), expected, atol=10 * tol)
        np.testing.assert_allclose(
            filtered - np.diag(np.diag(filtered)), 0.0, atol=10 * tol
        )

    def test_parallel_matches_stacked(self) -> None:
        """Thread dispatch is repeatable and agrees with the stacked solve."""
        eigenvalues = np.linspace(0.0, 5.0, 30)
        off = np.full(29, 0.1)
        dense = np.diag(eigenvalues) + np.diag(off, 1) + np.diag(off, -1)
        matrix = SparseSymMatrix.from_dense(dense)
        block = np.random.default_rng(0).standard_normal((30, 4))
        contour = Contour(center=2.5, radius=1.0, rule=gauss_legendre(8))
        stacked, stacked_stats = apply_filter(
            matrix, block, contour, SolverConfig(parallel=False)
        )
        threaded = SolverConfig(parallel=True, threads=4)
        first, first_stats = apply_filter(matrix, block, contour, threaded)
        second, _ = apply_filter(matrix, block, contour, threaded)
        np.testing.assert_array_equal(first, second)
        np.testing.assert_allclose(stacked, first, rtol=0.0, atol=1e-9)
        assert stacked_stats.systems == first_stats.systems == 4 * 8

    def test_zero_block_filters_to_zero(self) -> None:
        """Y = 0 gives Z = 0 without inner iterations."""
        matrix = diagonal([1.0, 2.0, 3.0])
        contour = make_single_contour(1.5, 2.5, gauss_legendre(8))
        filtered, stats = apply_filter(matrix, np.zeros((3, 2)), contour)
        np.testing.assert_array_equal(filtered, np.zeros((3, 2)))
        assert stats.iterations == 0
        assert stats.converged is True

    def test_circle_without_eigenvalues_damps_block(self) -> None:
        """A circle over (10, 12) shrinks a block of diag(1, 2, 3) by 100x."""
        matrix = diagonal([1.0, 2.0, 3.0])
        contour = make_single_contour(10.0, 12.0, gauss_legendre(8))
        block = np.random.default_rng(8).standard_normal((3, 4))
        filtered, _ = apply_filter(matrix, block, contour)
        assert np.abs(filtered).max() <= 1e-2 * np.abs(block).max()

    def test_eigenvector_at_center_is_fixed(self) -> None:
        """Filtering an eigenvector at the circle center returns it, repeatedly."""
        eigenvalues = np.linspace(0.0, 5.0, 25)
        off = np.full(24, 0.2)
        dense = np.diag(eigenvalues) + np.diag(off, 1) + np.diag(off, -1)
        matrix = SparseSymMatrix.from_dense(dense)
        values, vectors = np.linalg.eigh(dense)
        vector = vectors[:, [12]]
        contour = Contour(center=values[12], radius=0.05, rule=gauss_legendre(8))
        config = SolverConfig(tol=1e-12)
        once, _ = apply_filter(matrix, vector, contour, config)
        twice, _ = apply_filter(matrix, once, contour, config)
        np.testing.assert_allclose(once, vector, atol=1e-8)
        np.testing.assert_allclose(twice, once, atol=1e-8)

    def test_apply_contours_dispatch(self) -> None:
        """One contour filters once, two compose, three are rejected."""
        matrix = diagonal(np.arange(1.0, 7.0))
        block = np.eye(6)[:, :2]
        contour = Contour(center=2.0, radius=1.5, rule=gauss_legendre(4))
        once, _ = apply_contours(matrix, block, [contour])
        direct, _ = apply_filter(matrix, block, contour)
        np.testing.assert_array_equal(once, direct)
        twice, _ = apply_contours(matrix, block, [contour, contour])
        composed, _ = apply_filter_pair(matrix, block, contour, contour)
        np.testing.assert_array_equal(twice, composed)
        with pytest.raises(ValueError):
            apply_contours(matrix, block, [contour] * 3)

    def test_block_shape_checked(self) -> None:
        """A block with the wrong row count raises DimMismatch."""
        with pytest.raises(DimMismatch):
            apply_filter(diagonal([1.0, 2.0]), np.ones((3, 1)), unit_circle())
