"""Rational filters: quadrature-approximated spectral projectors over circles."""

import logging
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike, NDArray

from feast_power.errors import CirclesDoNotCover, DimMismatch, EmptyInterval, NonFinite
from feast_power.linalg import Block, SparseSymMatrix
from feast_power.models import (
    Contour,
    IntervalSpec,
    QuadratureRule,
    Shift,
    SolverConfig,
    SolveStats,
)
from feast_power.shifted import (
    ComplexBlock,
    solve_shifted_block,
    solve_shifted_systems,
)

logger = logging.getLogger(__name__)


def make_single_contour(a: float, b: float, rule: QuadratureRule) -> Contour:
    """Circle centered at (a + b) / 2 with radius (b - a) / 2.

    Raises:
        EmptyInterval: If a >= b.
    """
    if a >= b:
        msg = f"Interval ({a}, {b}) is empty"
        raise EmptyInterval(msg)
    return Contour(center=(a + b) / 2.0, radius=(b - a) / 2.0, rule=rule)


def make_pair_contours(
    interval: IntervalSpec, rule: QuadratureRule
) -> tuple[Contour, Contour]:
    """Left and right circles of equal radius whose real-axis overlap is (a, b).

    The left circle is centered at b - r and the right one at a + r.

    Raises:
        EmptyInterval: If a >= b.
        CirclesDoNotCover: If 2r < b - a.
    """
    if interval.a >= interval.b:
        msg = f"Interval ({interval.a}, {interval.b}) is empty"
        raise EmptyInterval(msg)
    if 2.0 * interval.radius < interval.width:
        msg = (
            f"Radius {interval.radius} is below half the interval width "
            f"{interval.width / 2.0}"
        )
        raise CirclesDoNotCover(msg)
    left = Contour(
        center=interval.b - interval.radius, radius=interval.radius, rule=rule
    )
    right = Contour(
        center=interval.a + interval.radius, radius=interval.radius, rule=rule
    )
    return left, right


def shifts(contour: Contour) -> list[Shift]:
    """Quadrature poles z_k = c + r * exp(i * pi * t_k) on the upper semicircle."""
    poles = contour.center + contour.radius * np.exp(
        1j * np.pi * np.asarray(contour.rule.nodes)
    )
    return [Shift(re=float(z.real), im=float(z.imag)) for z in poles]


def filter_response(contour: Contour, grid: ArrayLike) -> NDArray[np.float64]:
    """Scalar filter h evaluated on an array of real points."""
    lam = np.asarray(grid, dtype=np.float64)
    phases = np.exp(1j * np.pi * np.asarray(contour.rule.nodes))
    poles = contour.center + contour.radius * phases
    weights = np.asarray(contour.rule.weights)
    terms = weights * (phases / (poles - lam[..., None])).real
    return contour.radius * terms.sum(axis=-1)


def scalar_filter(lam: float, contour: Contour) -> float:
    """h(lam) = r * sum_k w_k * Re{exp(i pi t_k) / (z_k - lam)}.

    Equals 1 at the center for every rule and decays outside the circle.
    """
    return float(filter_response(contour, [lam])[0])


def scalar_filter_pair(lam: float, left: Contour, right: Contour) -> float:
    """Composed two-circle response h_R(lam) * h_L(lam)."""
    return scalar_filter(lam, right) * scalar_filter(lam, left)


def filter_contrast(contours: Sequence[Contour], a: float, b: float) -> float:
    """Response at the interval midpoint over the response at b + (b - a) / 2.

    Larger values mean the filter separates (a, b) from its right
    neighbourhood more sharply; inf when the outside response vanishes.
    """
    mid = (a + b) / 2.0
    outside = b + (b - a) / 2.0
    inner = float(np.prod([scalar_filter(mid, c) for c in contours]))
    outer = abs(float(np.prod([scalar_filter(outside, c) for c in contours])))
    return inner / outer if outer > 0.0 else float("inf")


def filter_scan(contours: Sequence[Contour], grid: ArrayLike) -> pd.DataFrame:
    """Sample the filter response on a grid.

    Args:
        contours: One circle, or the (left, right) pair.
        grid: Real points to evaluate.

    Returns:
        DataFrame with columns lambda and h, plus h_left and h_right for a pair.
    """
    if len(contours) not in (1, 2):
        msg = f"Expected one or two contours, got {len(contours)}"
        raise ValueError(msg)
    lam = np.asarray(grid, dtype=np.float64)
    frame = pd.DataFrame({"lambda": lam})
    if len(contours) == 1:
        frame["h"] = filter_response(contours[0], lam)
        return frame
    left, right = contours
    frame["h_left"] = filter_response(left, lam)
    frame["h_right"] = filter_response(right, lam)
    frame["h"] = frame["h_left"] * frame["h_right"]
    return frame[["lambda", "h", "h_left", "h_right"]]


def _filtered_term(
    matrix: SparseSymMatrix,
    block: Block,
    shift: Shift,
    config: SolverConfig,
    seed: int,
) -> tuple[ComplexBlock, SolveStats]:
    return solve_shifted_block(matrix, shift, block, config, seed=seed)


def apply_filter(
    matrix: SparseSymMatrix,
    block: Block,
    contour: Contour,
    config: SolverConfig | None = None,
) -> tuple[Block, SolveStats]:
    """Z = r * sum_k w_k * Re{exp(i pi t_k) * X_k} with (z_k I - A) X_k = Y.

    By default the q * m shifted systems advance together in one stacked
    BiCG. With ``config.parallel`` each shift is solved on a thread pool
    instead. Terms are always summed in increasing k.

    Args:
        matrix: Real symmetric operator A.
        block: n x m real block Y.
        contour: Circle and quadrature rule.
        config: Inner solver settings.

    Returns:
        Filtered n x m real block and stats aggregated over all m * q systems.

    Raises:
        DimMismatch: If Y does not have n rows.
        NonFinite: If the filtered block is not finite.
    """
    config = config or SolverConfig()
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 2 or block.shape[0] != matrix.n:
        msg = f"Block of shape {block.shape} does not match matrix dimension {matrix.n}"
        raise DimMismatch(msg)
    poles = shifts(contour)
    phases = np.exp(1j * np.pi * np.asarray(contour.rule.nodes))
    if config.parallel and len(poles) > 1:
        workers = config.threads or os.cpu_count() or 1
        jobs = [(matrix, block, pole, config, k) for k, pole in enumerate(poles)]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda job: _filtered_term(*job), jobs))
    else:
        results = solve_shifted_systems(matrix, poles, block, config)

    filtered = np.zeros_like(block)
    for (solution, _), phase, weight in zip(
        results, phases, contour.rule.weights, strict=True
    ):
        filtered += weight * (phase * solution).real
    filtered *= contour.radius
    if not np.all(np.isfinite(filtered)):
        msg = "Filtered block has non-finite entries"
        raise NonFinite(msg)
    stats = SolveStats.aggregate([s for _, s in results])
    logger.debug(
        "Filter c=%.6g r=%.6g: %d systems, max %d BiCG iterations",
        contour.center,
        contour.radius,
        stats.systems,
        stats.iterations,
    )
    return filtered, stats


def apply_filter_pair(
    matrix: SparseSymMatrix,
    block: Block,
    left: Contour,
    right: Contour,
    config: SolverConfig | None = None,
) -> tuple[Block, SolveStats]:
    """Two-circle corrector: filter by the left circle, then by the right one."""
    once, left_stats = apply_filter(matrix, block, left, config)
    twice, right_stats = apply_filter(matrix, once, right, config)
    return twice, SolveStats.aggregate([left_stats, right_stats])


def apply_contours(
    matrix: SparseSymMatrix,
    block: Block,
    contours: Sequence[Contour],
    config: SolverConfig | None = None,
) -> tuple[Block, SolveStats]:
    """Apply a single circle or a (left, right) pair."""
    if len(contours) == 1:
        return apply_filter(matrix, block, contours[0], config)
    if len(contours) == 2:
        return apply_filter_pair(matrix, block, contours[0], contours[1], config)
    msg = f"Expected one or two contours, got {len(contours)}"
    raise ValueError(msg)


__all__ = [
    "apply_contours",
    "apply_filter",
    "apply_filter_pair",
    "filter_contrast",
    "filter_response",
    "filter_scan",
    "make_pair_contours",
    "make_single_contour",
    "scalar_filter",
    "scalar_filter_pair",
    "shifts",
]
