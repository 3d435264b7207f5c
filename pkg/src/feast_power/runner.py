"""Run orchestration: load the matrix, run a driver, write the report."""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager

import numpy as np
from numpy.typing import NDArray

from feast_power.config import Algorithm, RunConfig
from feast_power.diagnostics import (
    MAX_ORACLE_ORDER,
    compute_metrics,
    dense_oracle,
    scale_factor,
)
from feast_power.eigensolvers import (
    f2p,
    feast,
    feast2,
    feast2_baseline,
    feast_baseline,
    psi_simple,
    random_block,
    sweep_interval,
)
from feast_power.errors import FeastPowerError
from feast_power.filters import filter_contrast, filter_scan, make_pair_contours
from feast_power.linalg import SparseSymMatrix, gauss_legendre
from feast_power.matrix_market import read_matrix_market, read_reference
from feast_power.models import Contour, EigResult, RunHistory, RunReport
from feast_power.reports import (
    write_compare_csv,
    write_csv,
    write_report,
    write_scan_csv,
    write_spectrum_csv,
)

logger = logging.getLogger(__name__)

# Filter scans without an explicit grid cover this many radii beyond the circles.
SCAN_MARGIN_RADII = 5.0


@contextmanager
def _timed(report: RunReport, phase: str) -> Iterator[None]:
    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        report.timings[phase] = report.timings.get(phase, 0.0) + elapsed


def _fill_result(report: RunReport, result: EigResult) -> None:
    report.eigenvalues = [float(v) for v in result.values]
    report.residuals = [float(r) for r in result.residuals]


def _fill_history(report: RunReport, history: RunHistory) -> None:
    report.err_hist = list(history.err_hist)
    report.num_ay_hist = list(history.num_ay_hist)


class _Run:
    """State of one run, kept so a failure can still flush a partial report."""

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.report = RunReport(algorithm=config.algorithm.value, config=config.echo())
        self.rule = gauss_legendre(config.q)
        self.solver = config.solver_config()

    def load(self) -> SparseSymMatrix:
        assert self.config.matrix_path is not None  # noqa: S101
        with _timed(self.report, "load"):
            matrix = read_matrix_market(self.config.matrix_path)
        return matrix

    def scale(self, matrix: SparseSymMatrix) -> float:
        with _timed(self.report, "scale_factor"):
            rho = scale_factor(matrix, self.config.scale_seed)
        self.report.scale_factor = rho
        logger.info("Scale factor rho = %.6g", rho)
        return rho

    def reference(self, matrix: SparseSymMatrix) -> NDArray[np.float64] | None:
        """Reference spectrum from file, else the dense oracle for small matrices."""
        if self.config.reference_path is not None:
            return read_reference(self.config.reference_path)
        if matrix.n <= MAX_ORACLE_ORDER:
            with _timed(self.report, "reference"):
                return dense_oracle(matrix)
        return None

    def finish(
        self,
        matrix: SparseSymMatrix,
        result: EigResult,
        history: RunHistory,
        restrict: bool = True,
    ) -> None:
        _fill_result(self.report, result)
        _fill_history(self.report, history)
        interval = None
        if restrict and self.config.a is not None and self.config.b is not None:
            interval = (self.config.a, self.config.b)
        self.report.metrics = compute_metrics(
            result, history, self.reference(matrix), interval
        )
        if self.config.csv_path is not None:
            with _timed(self.report, "report"):
                write_csv(history, self.config.csv_path)

    def solve(self) -> None:
        config = self.config
        matrix = self.load()
        rho = self.scale(matrix)
        block = random_block(matrix.n, config.m or 1, config.seed)

        if config.algorithm is Algorithm.PSI:
            with _timed(self.report, "solve"):
                result = psi_simple(matrix, block, config.max_it, config.tol, rho=rho)
            history = RunHistory(err_hist=[result.max_residual], num_ay_hist=[0])
            self.finish(matrix, result, history, restrict=False)
            return

        assert config.a is not None and config.b is not None  # noqa: S101
        if config.algorithm is Algorithm.FEAST:
            with _timed(self.report, "solve"):
                result, history = feast(
                    matrix,
                    block,
                    config.a,
                    config.b,
                    config.max_it,
                    config.tol,
                    self.solver,
                    self.rule,
                    rho=rho,
                )
        elif config.algorithm is Algorithm.FEAST2:
            with _timed(self.report, "solve"):
                result, history = feast2(
                    matrix,
                    block,
                    config.interval_spec(),
                    config.max_it,
                    config.tol,
                    self.solver,
                    self.rule,
                    rho=rho,
                )
        else:
            with _timed(self.report, "solve"):
                result, history = f2p(
                    matrix,
                    config.f2p_config(),
                    config.interval_spec(),
                    self.solver,
                    self.rule,
                    block=block,
                    rho=rho,
                )
        self.finish(matrix, result, history)

    def compare(self) -> None:
        """FEAST, FEAST2 and f2p from the same block, interval and rho."""
        config = self.config
        matrix = self.load()
        rho = self.scale(matrix)
        block = random_block(matrix.n, config.m or 1, config.seed)
        f2p_config = config.f2p_config()
        interval = config.interval_spec()

        runs: dict[str, tuple[EigResult, RunHistory]] = {}
        with _timed(self.report, "solve"):
            for name, driver in (
                ("feast", feast_baseline), ("feast2", feast2_baseline), ("f2p", f2p)
            ):
                runs[name] = driver(
                    matrix,
                    f2p_config,
                    interval,
                    self.solver,
                    self.rule,
                    block=block,
                    rho=rho,
                )
                logger.info("%s: %d eigenvalues", name, runs[name][0].count)
        self.report.histories = {
            name: list(history.err_hist) for name, (_, history) in runs.items()
        }
        result, history = runs["f2p"]
        _fill_result(self.report, result)
        _fill_history(self.report, history)
        self.report.metrics = compute_metrics(
            result, history, self.reference(matrix), (interval.a, interval.b)
        )
        if config.csv_path is not None:
            with _timed(self.report, "report"):
                write_compare_csv(
                    self.report.histories,
                    config.csv_path,
                    self.report.metrics.eig_in,
                )

    def sweep(self) -> None:
        config = self.config
        matrix = self.load()
        rho = self.scale(matrix)
        interval = config.interval_spec()
        with _timed(self.report, "solve"):
            outcome = sweep_interval(
                matrix,
                interval.a,
                interval.b,
                config.f2p_config(),
                interval.radius,
                self.solver,
                self.rule,
                rho,
            )
        self.report.windows = outcome.windows
        merged = outcome.merged
        _fill_result(self.report, merged)
        history = RunHistory(
            err_hist=[r.max_residual for r in outcome.results],
            num_ay_hist=[0] * len(outcome.results),
        )
        self.report.metrics = compute_metrics(
            merged, history, self.reference(matrix), (interval.a, interval.b)
        )
        if config.csv_path is not None:
            with _timed(self.report, "report"):
                write_spectrum_csv(merged.values, config.csv_path)

    def scan(self) -> None:
        config = self.config
        contours: tuple[Contour, ...]
        if config.center is not None:
            assert config.radius is not None  # noqa: S101
            contours = (
                Contour(center=config.center, radius=config.radius, rule=self.rule),
            )
            low = config.center - SCAN_MARGIN_RADII * config.radius
            high = config.center + SCAN_MARGIN_RADII * config.radius
        else:
            interval = config.interval_spec()
            contours = make_pair_contours(interval, self.rule)
            low = interval.b - (1.0 + SCAN_MARGIN_RADII) * interval.radius
            high = interval.a + (1.0 + SCAN_MARGIN_RADII) * interval.radius
            logger.info(
                "Filter contrast: %.3e",
                filter_contrast(contours, interval.a, interval.b),
            )
        if config.scan_min is not None and config.scan_max is not None:
            low, high = config.scan_min, config.scan_max
        with _timed(self.report, "solve"):
            frame = filter_scan(contours, np.linspace(low, high, config.scan_points))
        self.report.histories = {
            column: frame[column].tolist() for column in frame.columns
        }
        if config.csv_path is not None:
            with _timed(self.report, "report"):
                write_scan_csv(frame, config.csv_path)

    def oracle(self) -> None:
        config = self.config
        matrix = self.load()
        with _timed(self.report, "solve"):
            values = dense_oracle(matrix)
        if config.a is not None and config.b is not None:
            values = values[(values > config.a) & (values < config.b)]
        self.report.eigenvalues = [float(v) for v in values]
        if config.csv_path is not None:
            with _timed(self.report, "report"):
                write_spectrum_csv(values, config.csv_path)


def run(config: RunConfig) -> RunReport:
    """Execute one configured run and write its outputs.

    On failure the partial report, carrying the error message, is still
    written to ``output_path`` before the exception propagates.

    Args:
        config: Validated run configuration.

    Returns:
        The run report.
    """
    state = _Run(config)
    dispatch = {
        Algorithm.FEAST: state.solve,
        Algorithm.FEAST2: state.solve,
        Algorithm.PSI: state.solve,
        Algorithm.F2P: state.solve,
        Algorithm.COMPARE: state.compare,
        Algorithm.SWEEP: state.sweep,
        Algorithm.FILTER_SCAN: state.scan,
        Algorithm.ORACLE: state.oracle,
    }
    logger.info("Running %s", config.algorithm.value)
    try:
        dispatch[config.algorithm]()
    except FeastPowerError as exc:
        state.report.error = f"{type(exc).__name__}: {exc}"
        if config.output_path is not None:
            write_report(state.report, config.output_path)
        raise
    if config.output_path is not None:
        with _timed(state.report, "report"):
            write_report(state.report, config.output_path)
    logger.info(
        "%s finished with %d eigenvalues", config.algorithm.value, state.report.eig_out
    )
    return state.report


__all__ = ["SCAN_MARGIN_RADII", "run"]
