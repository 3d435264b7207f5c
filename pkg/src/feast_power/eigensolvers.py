"""Interval eigensolver drivers.

``feast`` and ``feast2`` iterate spectral projections (one circle with a
generalized Rayleigh-Ritz step, or two circles with QR); ``psi_simple`` is
plain subspace iteration; ``psi_restricted`` runs shifted subspace
iteration restricted to (a, b) with snapshot rollback; ``f2p`` alternates
the two-circle filter with ``psi_restricted``; ``sweep_interval`` slides a
window down the interval to collect all eigenvalues in it.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import NDArray

from feast_power.diagnostics import SENTINEL, scale_factor
from feast_power.errors import (
    DimMismatch,
    EmptyInterval,
    GramFailure,
    IllConditionedGram,
    NonProgress,
    RankDeficient,
)
from feast_power.filters import (
    apply_contours,
    apply_filter,
    apply_filter_pair,
    filter_contrast,
    make_pair_contours,
    make_single_contour,
)
from feast_power.linalg import (
    Block,
    SparseSymMatrix,
    dense_gen_sym_eig,
    dense_sym_eig,
    gauss_legendre,
    qr_orthonormalize,
    refill_orthonormalize,
)
from feast_power.models import (
    Contour,
    EigResult,
    F2PConfig,
    IntervalSpec,
    QuadratureRule,
    RunHistory,
    SolverConfig,
    SweepResult,
    SweepWindow,
)

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE_ORDER = 8
SWEEP_SUBINTERVALS = 10
DEDUP_TOLERANCE = 1e-9
MAX_SWEEP_WINDOWS = 10_000


def random_block(n: int, m: int, seed: int) -> Block:
    """n x m block of iid N(0, 1) entries from numpy's PCG64 generator.

    Raises:
        DimMismatch: If m > n or m < 1.
    """
    if not 1 <= m <= n:
        msg = f"Block width must satisfy 1 <= m <= n, got m={m}, n={n}"
        raise DimMismatch(msg)
    return np.random.default_rng(seed).standard_normal((n, m))


def rayleigh_ritz(
    matrix: SparseSymMatrix, basis: Block
) -> tuple[NDArray[np.float64], Block]:
    """Ritz values (ascending) and Ritz vectors of A on an orthonormal basis."""
    projected = basis.T @ matrix.matmat(basis)
    eig = dense_sym_eig(projected)
    return eig.values, basis @ eig.vectors


def scaled_residuals(
    matrix: SparseSymMatrix,
    values: NDArray[np.float64],
    vectors: Block,
    rho: float,
) -> NDArray[np.float64]:
    """||A x_i - lambda_i x_i|| / (rho ||x_i||) per column."""
    if vectors.shape[1] == 0:
        return np.empty(0)
    residual = matrix.matmat(vectors) - vectors * values
    return np.linalg.norm(residual, axis=0) / (rho * np.linalg.norm(vectors, axis=0))


def normalize_vectors(vectors: Block) -> Block:
    """Scale columns to unit norm with their largest-magnitude entry positive."""
    if vectors.shape[1] == 0:
        return vectors.copy()
    unit = vectors / np.linalg.norm(vectors, axis=0)
    pivots = unit[np.argmax(np.abs(unit), axis=0), np.arange(unit.shape[1])]
    return unit * np.where(pivots < 0.0, -1.0, 1.0)


def _finalize(
    values: NDArray[np.float64],
    vectors: Block,
    residuals: NDArray[np.float64],
    converged: bool,
) -> EigResult:
    """Sort pairs by decreasing value, then by residual, and normalize vectors."""
    order = np.lexsort((residuals, -values))
    return EigResult(
        values=values[order].copy(),
        vectors=normalize_vectors(vectors[:, order]),
        residuals=residuals[order].copy(),
        converged=converged,
    )


def _resolve_rho(matrix: SparseSymMatrix, rho: float | None, scale_seed: int) -> float:
    return scale_factor(matrix, seed=scale_seed) if rho is None else rho


def _check_block(matrix: SparseSymMatrix, block: Block) -> Block:
    block = np.asarray(block, dtype=np.float64)
    if (
        block.ndim != 2
        or block.shape[0] != matrix.n
        or not 1 <= block.shape[1] <= matrix.n
    ):
        msg = f"Block of shape {block.shape} does not fit matrix dimension {matrix.n}"
        raise DimMismatch(msg)
    return block


class _BestKeeper:
    """Tracks the in-interval pairs of the iteration with the smallest max residual."""

    def __init__(self) -> None:
        self.err = math.inf
        self.pairs: tuple[NDArray[np.float64], Block, NDArray[np.float64]] | None = None

    def offer(
        self,
        err: float,
        values: NDArray[np.float64],
        vectors: Block,
        residuals: NDArray[np.float64],
    ) -> None:
        if err != SENTINEL and err < self.err:
            self.err = err
            self.pairs = (values.copy(), vectors.copy(), residuals.copy())

    def result(self, n: int, converged: bool) -> EigResult:
        if self.pairs is None:
            return EigResult.empty(n, converged=converged)
        return _finalize(*self.pairs, converged=converged)


def _projection_step(
    matrix: SparseSymMatrix,
    values: NDArray[np.float64],
    vectors: Block,
    a: float,
    b: float,
    rho: float,
    history: RunHistory,
    keeper: _BestKeeper,
) -> float:
    """Record one Rayleigh-Ritz pass; return the max in-interval residual or -1."""
    residuals = scaled_residuals(matrix, values, vectors, rho)
    inside = (values > a) & (values < b)
    err = float(residuals[inside].max()) if np.any(inside) else SENTINEL
    history.ritz_hist.append([float(v) for v in values])
    history.err_hist.append(err)
    history.num_ay_hist.append(0)
    keeper.offer(err, values[inside], vectors[:, inside], residuals[inside])
    logger.debug(
        "Iteration %d: %d Ritz values in interval, max residual %.3e",
        history.iterations,
        int(inside.sum()),
        err,
    )
    return err


def feast(
    matrix: SparseSymMatrix,
    block: Block,
    a: float,
    b: float,
    max_it: int = 50,
    tol: float = 1e-10,
    solver: SolverConfig | None = None,
    rule: QuadratureRule | None = None,
    rho: float | None = None,
    scale_seed: int = 2024,
) -> tuple[EigResult, RunHistory]:
    """Single-circle FEAST with a generalized Rayleigh-Ritz step.

    Converges only when m is at least the number of eigenvalues in (a, b).
    When the Gram matrix Z^T Z is not numerically positive definite the
    iteration re-orthonormalizes Z and solves the standard projected problem.

    Args:
        matrix: Real symmetric operator A.
        block: n x m starting block.
        a: Left end of the interval.
        b: Right end of the interval.
        max_it: Outer iterations.
        tol: Stop once the max scaled in-interval residual drops below it.
        solver: Inner solver settings.
        rule: Quadrature rule, 8-point Gauss-Legendre by default.
        rho: Residual scale, estimated from A when None.
        scale_seed: Seed of the scale estimate.

    Returns:
        In-interval pairs (best so far with converged=False when max_it runs
        out) and the run history.

    Raises:
        GramFailure: If the Gram matrix stays ill-conditioned after
            re-orthonormalization.
    """
    contour = make_single_contour(
        a, b, rule or gauss_legendre(DEFAULT_QUADRATURE_ORDER)
    )
    current = _check_block(matrix, block)
    rho = _resolve_rho(matrix, rho, scale_seed)
    history = RunHistory()
    keeper = _BestKeeper()

    for iteration in range(1, max_it + 1):
        filtered, stats = apply_filter(matrix, current, contour, solver)
        history.max_inner_iterations = max(
            history.max_inner_iterations, stats.iterations
        )
        try:
            eig = dense_gen_sym_eig(
                filtered.T @ matrix.matmat(filtered), filtered.T @ filtered
            )
            values, vectors = eig.values, filtered @ eig.vectors
        except IllConditionedGram:
            logger.warning(
                "Ill-conditioned Gram matrix at iteration %d, retrying with QR",
                iteration,
            )
            try:
                basis = qr_orthonormalize(filtered)
            except RankDeficient as exc:
                msg = (
                    "Gram matrix ill-conditioned and filtered block rank deficient "
                    f"at iteration {iteration}"
                )
                raise GramFailure(msg) from exc
            values, vectors = rayleigh_ritz(matrix, basis)
        err = _projection_step(matrix, values, vectors, a, b, rho, history, keeper)
        current = vectors
        if err != SENTINEL and err < tol:
            return keeper.result(matrix.n, converged=True), history

    return keeper.result(matrix.n, converged=False), history


def feast2(
    matrix: SparseSymMatrix,
    block: Block,
    interval: IntervalSpec,
    max_it: int = 50,
    tol: float = 1e-10,
    solver: SolverConfig | None = None,
    rule: QuadratureRule | None = None,
    rho: float | None = None,
    scale_seed: int = 2024,
) -> tuple[EigResult, RunHistory]:
    """Two-circle FEAST: filter by the left then the right circle, QR, Rayleigh-Ritz.

    Args:
        matrix: Real symmetric operator A.
        block: n x m starting block.
        interval: Interval and the shared circle radius.
        max_it: Outer iterations.
        tol: Stop once the max scaled in-interval residual drops below it.
        solver: Inner solver settings.
        rule: Quadrature rule, 8-point Gauss-Legendre by default.
        rho: Residual scale, estimated from A when None.
        scale_seed: Seed of the scale estimate.

    Returns:
        In-interval pairs and the run history.

    Raises:
        RankDeficient: If the filtered block loses rank, with the iteration attached.
    """
    left, right = make_pair_contours(
        interval, rule or gauss_legendre(DEFAULT_QUADRATURE_ORDER)
    )
    current = _check_block(matrix, block)
    rho = _resolve_rho(matrix, rho, scale_seed)
    history = RunHistory()
    keeper = _BestKeeper()

    for iteration in range(1, max_it + 1):
        filtered, stats = apply_filter_pair(matrix, current, left, right, solver)
        history.max_inner_iterations = max(
            history.max_inner_iterations, stats.iterations
        )
        try:
            current = qr_orthonormalize(filtered)
        except RankDeficient as exc:
            raise RankDeficient(
                str(exc), column=exc.column, iteration=iteration
            ) from exc
        values, vectors = rayleigh_ritz(matrix, current)
        err = _projection_step(
            matrix, values, vectors, interval.a, interval.b, rho, history, keeper
        )
        if err != SENTINEL and err < tol:
            return keeper.result(matrix.n, converged=True), history

    return keeper.result(matrix.n, converged=False), history


def psi_simple(
    matrix: SparseSymMatrix,
    block: Block,
    max_it: int = 50,
    tol: float = 1e-10,
    rho: float | None = None,
    scale_seed: int = 2024,
) -> EigResult:
    """Plain power subspace iteration for the m dominant (largest magnitude) pairs.

    The result holds the Ritz pairs of the last Rayleigh-Ritz pass, flagged
    converged when every scaled residual is below tol.
    """
    current = qr_orthonormalize(_check_block(matrix, block))
    rho = _resolve_rho(matrix, rho, scale_seed)
    values, vectors = rayleigh_ritz(matrix, current)
    residuals = scaled_residuals(matrix, values, vectors, rho)
    for iteration in range(1, max_it + 1):
        if iteration > 1:
            current = qr_orthonormalize(matrix.matmat(current))
            values, vectors = rayleigh_ritz(matrix, current)
            residuals = scaled_residuals(matrix, values, vectors, rho)
        if float(residuals.max()) < tol:
            return _finalize(values, vectors, residuals, converged=True)
    return _finalize(values, vectors, residuals, converged=False)


def _repaired_basis(block: Block, seed: int) -> Block:
    """Orthonormal basis of block with lost directions refilled at random."""
    basis, refilled = refill_orthonormalize(block, seed)
    if refilled:
        logger.warning(
            "Block lost rank, refilled %d of %d columns with random vectors",
            refilled,
            block.shape[1],
        )
    return basis


class _PsiRun:
    """Outputs of one restricted power-iteration call."""

    def __init__(
        self,
        result: EigResult,
        block: Block,
        iterations: int,
        eigm_hist: list[float],
        first_ritz: list[float],
    ) -> None:
        self.result = result
        self.block = block
        self.iterations = iterations
        self.eigm_hist = eigm_hist
        self.first_ritz = first_ritz


def _restricted_iteration(
    matrix: SparseSymMatrix,
    block: Block,
    a: float,
    b: float,
    rho: float,
    eigm_hist: Sequence[float],
    num_cmp: int,
    num_eigm: int,
    min_eig: float | None,
    max_it: int,
    tol: float,
    seed: int = 0,
) -> _PsiRun:
    n = matrix.n
    a1 = min(max(a, a if min_eig is None else min_eig), b)
    window = list(eigm_hist)
    current = _repaired_basis(_check_block(matrix, block), seed)
    first_ritz: list[float] = []

    count0 = -1
    err0 = SENTINEL
    snapshot: tuple[EigResult, list[float], Block] | None = None
    result = EigResult.empty(n)
    iteration = 0

    for iteration in range(1, max_it + 1):
        values, vectors = rayleigh_ritz(matrix, current)
        if iteration == 1:
            first_ritz = [float(v) for v in values]
        products = matrix.matmat(vectors)
        remaining = values.copy()
        picked: list[int] = []
        errs: list[float] = []
        err, count, count1, eigm = SENTINEL, 0, 0, math.inf

        for _ in range(values.size):
            top = int(np.argmax(remaining))
            lam = float(remaining[top])
            if a < lam < b:
                count1 += 1
                if count1 <= num_cmp:
                    x = vectors[:, top]
                    erri = float(
                        np.linalg.norm(products[:, top] - lam * x)
                        / (rho * np.linalg.norm(x))
                    )
                    if erri < tol:
                        count += 1
                        picked.append(top)
                        errs.append(erri)
                        err = max(err, erri)
                eigm = min(eigm, lam)
            remaining[top] = a - 1.0

        result = EigResult(
            values=values[picked].copy(),
            vectors=vectors[:, picked].copy(),
            residuals=np.asarray(errs, dtype=np.float64),
        )

        rollback = False
        if count == count0:
            if count == 0:
                break
            if err > err0:
                rollback = True
        elif count < count0:
            rollback = True
        if rollback and snapshot is not None:
            result, window, current = snapshot
            iteration -= 1
            logger.debug("Restricted iteration rolled back to iteration %d", iteration)
            break
        if count1 == 0 or max_it == 1:
            break

        snapshot = (result, list(window), current.copy())
        err0, count0 = err, count

        window.append(eigm)
        if len(window) > num_eigm:
            window = window[1:]
        eigm_mean = sum(window) / len(window)
        sigma = (eigm_mean + a1) / 2.0
        shifted = matrix.matmat(current) - sigma * current
        current = _repaired_basis(shifted, seed + iteration)

    return _PsiRun(result, current, iteration, window, first_ritz)


def psi_restricted(
    matrix: SparseSymMatrix,
    block: Block,
    a: float,
    b: float,
    rho: float,
    eigm_hist: Sequence[float] = (),
    num_cmp: int = 1,
    num_eigm: int = 5,
    min_eig: float | None = None,
    max_it: int = 100,
    tol: float = 1e-1,
    seed: int = 0,
) -> tuple[EigResult, Block, int, list[float]]:
    """Shifted subspace iteration for the largest eigenvalues in (a, b).

    Each pass runs Rayleigh-Ritz and greedily extracts Ritz values from the
    top down: the first num_cmp in-interval ones whose scaled residual is
    below tol are accepted. The pass count or the max residual getting
    worse triggers a rollback to the previous snapshot; otherwise the block
    is multiplied by A - sigma I, sigma halfway between the averaged m-th
    in-interval Ritz value and max(a, min_eig), and re-orthonormalized.
    Directions lost to rounding during orthonormalization are refilled with
    seeded random vectors.

    Args:
        matrix: Real symmetric operator A.
        block: n x m block whose span should lie near the target eigenspace.
        a: Left end of the interval.
        b: Right end of the interval.
        rho: Residual scale, positive.
        eigm_hist: Recent m-th in-interval Ritz values carried between calls.
        num_cmp: Pairs tracked.
        num_eigm: Length of the eigm window.
        min_eig: Estimate of the smallest eigenvalue of A, None means a.
        max_it: Passes.
        tol: Acceptance threshold of scaled residuals.
        seed: Seed of the refill vectors.

    Returns:
        Accepted pairs (decreasing), the iteration block, the number of
        passes counted as in the rollback rule, and the updated eigm window.
    """
    if a >= b:
        msg = f"Interval ({a}, {b}) is empty"
        raise EmptyInterval(msg)
    run = _restricted_iteration(
        matrix,
        block,
        a,
        b,
        rho,
        eigm_hist,
        num_cmp,
        num_eigm,
        min_eig,
        max_it,
        tol,
        seed=seed,
    )
    return run.result, run.block, run.iterations, run.eigm_hist


def f2p(
    matrix: SparseSymMatrix,
    config: F2PConfig,
    interval: IntervalSpec,
    solver: SolverConfig | None = None,
    rule: QuadratureRule | None = None,
    block: Block | None = None,
    rho: float | None = None,
    contours: Sequence[Contour] | None = None,
) -> tuple[EigResult, RunHistory]:
    """Alternate the two-circle filter with restricted subspace iteration.

    Every outer iteration filters the block, runs ``psi_restricted`` on it
    and keeps the first num_out accepted pairs if their max residual beats
    the best so far. All max_it outer iterations are always run.

    Args:
        matrix: Real symmetric operator A.
        config: Block sizes, iteration counts and seeds.
        interval: Interval and circle radius.
        solver: Inner solver settings.
        rule: Quadrature rule, 8-point Gauss-Legendre by default.
        block: Starting block, random_block(n, m, config.seed) when None.
        rho: Residual scale, estimated from A when None.
        contours: Overrides the circle pair, e.g. a single circle.

    Returns:
        Best kept pairs (empty when no iteration accepted anything) and the history.
    """
    rule = rule or gauss_legendre(DEFAULT_QUADRATURE_ORDER)
    if contours is None:
        contours = make_pair_contours(interval, rule)
    elif interval.a >= interval.b:
        msg = f"Interval ({interval.a}, {interval.b}) is empty"
        raise EmptyInterval(msg)
    current = (
        random_block(matrix.n, config.m, config.seed)
        if block is None
        else _check_block(matrix, block)
    )
    if current.shape[1] != config.m:
        msg = (
            f"Starting block has {current.shape[1]} columns, "
            f"config expects m={config.m}"
        )
        raise DimMismatch(msg)
    rho = _resolve_rho(matrix, rho, config.scale_seed)
    logger.info(
        "Filter contrast on (%.6g, %.6g): %.3e",
        interval.a,
        interval.b,
        filter_contrast(contours, interval.a, interval.b),
    )

    history = RunHistory()
    err0 = math.inf
    best: EigResult | None = None
    eigm_hist: list[float] = []

    for outer in range(1, config.max_it + 1):
        filtered, stats = apply_contours(matrix, current, contours, solver)
        history.max_inner_iterations = max(
            history.max_inner_iterations, stats.iterations
        )
        run = _restricted_iteration(
            matrix,
            filtered,
            interval.a,
            interval.b,
            rho,
            eigm_hist,
            config.num_cmp,
            config.num_eigm,
            config.min_eig,
            config.sub_max_it,
            config.sub_tol,
            seed=config.seed + outer * (config.sub_max_it + 1),
        )
        current, eigm_hist = run.block, run.eigm_hist
        history.ritz_hist.append(run.first_ritz)
        history.num_ay_hist.append(run.iterations - 1)

        leng = min(config.num_out, run.result.count)
        err = float(run.result.residuals[:leng].max()) if leng > 0 else SENTINEL
        history.err_hist.append(err)
        if err != SENTINEL and err < err0:
            best = run.result.head(leng)
            err0 = err
        logger.debug(
            "Outer iteration %d: %d accepted, max residual %.3e, %d power steps",
            history.iterations,
            run.result.count,
            err,
            run.iterations - 1,
        )

    history.eigm_hist = eigm_hist
    if best is None:
        return EigResult.empty(matrix.n), history
    return _finalize(best.values, best.vectors, best.residuals, converged=True), history


def feast_baseline(
    matrix: SparseSymMatrix,
    config: F2PConfig,
    interval: IntervalSpec,
    solver: SolverConfig | None = None,
    rule: QuadratureRule | None = None,
    block: Block | None = None,
    rho: float | None = None,
) -> tuple[EigResult, RunHistory]:
    """f2p with one circle of radius (b - a) / 2 and a single inner pass."""
    rule = rule or gauss_legendre(DEFAULT_QUADRATURE_ORDER)
    contour = make_single_contour(interval.a, interval.b, rule)
    return f2p(
        matrix,
        config.model_copy(update={"sub_max_it": 1}),
        interval,
        solver,
        rule,
        block,
        rho,
        contours=(contour,),
    )


def feast2_baseline(
    matrix: SparseSymMatrix,
    config: F2PConfig,
    interval: IntervalSpec,
    solver: SolverConfig | None = None,
    rule: QuadratureRule | None = None,
    block: Block | None = None,
    rho: float | None = None,
) -> tuple[EigResult, RunHistory]:
    """f2p with a single inner pass, i.e. no power steps."""
    return f2p(
        matrix,
        config.model_copy(update={"sub_max_it": 1}),
        interval,
        solver,
        rule,
        block,
        rho,
    )


def _next_right_end(
    window_a: float, width: float, values: NDArray[np.float64]
) -> float:
    """Right end of the next sweep window, strictly below the leading value.

    Normally the right end of the tenth of the window holding the smallest
    value. When that is not below the leading value, the midpoint of the two
    smallest values is used instead, or half a tenth below a lone value.
    """
    step = width / SWEEP_SUBINTERVALS
    smallest = float(values[-1])
    index = math.floor((smallest - window_a) / step) + 1
    right = window_a + index * step
    if right < float(values[0]):
        return right
    if len(values) > 1:
        return (smallest + float(values[-2])) / 2.0
    return smallest - step / 2.0


def _merge(results: Sequence[EigResult], n: int, bounds: IntervalSpec) -> EigResult:
    """Union of window results inside the sweep interval.

    Near-equal values collapse to the pair with the smaller residual.
    """
    values: list[float] = []
    residuals: list[float] = []
    vectors: list[NDArray[np.float64]] = []
    for result in results:
        for lam, res, vec in zip(
            result.values, result.residuals, result.vectors.T, strict=True
        ):
            if not bounds.contains(float(lam)):
                continue
            duplicate = next(
                (
                    i
                    for i, known in enumerate(values)
                    if abs(known - lam) <= DEDUP_TOLERANCE * max(1.0, abs(lam))
                ),
                None,
            )
            if duplicate is None:
                values.append(float(lam))
                residuals.append(float(res))
                vectors.append(vec)
            elif res < residuals[duplicate]:
                values[duplicate] = float(lam)
                residuals[duplicate] = float(res)
                vectors[duplicate] = vec
    if not values:
        return EigResult.empty(n)
    return _finalize(
        np.asarray(values),
        np.column_stack(vectors),
        np.asarray(residuals),
        converged=True,
    )


def sweep_interval(
    matrix: SparseSymMatrix,
    a: float,
    b: float,
    config: F2PConfig,
    radius: float,
    solver: SolverConfig | None = None,
    rule: QuadratureRule | None = None,
    rho: float | None = None,
) -> SweepResult:
    """Collect all eigenvalues in (a, b) by sliding an f2p window downwards.

    After a window returns values down to lambda_k, the next window ends at
    the right end of the tenth of the current window containing lambda_k, or
    between lambda_k and lambda_{k-1} when that tenth reaches lambda_1.
    The sweep stops when a window returns nothing above a, when lambda_k is
    at or below a, when a window reaching below a returns fewer than
    num_out values, or when the next right end is at or below a.

    Raises:
        NonProgress: If two consecutive windows return the same leading value.
    """
    if a >= b:
        msg = f"Interval ({a}, {b}) is empty"
        raise EmptyInterval(msg)
    rule = rule or gauss_legendre(DEFAULT_QUADRATURE_ORDER)
    rho = _resolve_rho(matrix, rho, config.scale_seed)
    width = b - a
    window_a, window_b = a, b
    windows: list[SweepWindow] = []
    results: list[EigResult] = []
    previous_lead: float | None = None

    for _ in range(MAX_SWEEP_WINDOWS):
        interval = IntervalSpec(a=window_a, b=window_b, radius=radius)
        result, _history = f2p(matrix, config, interval, solver, rule, rho=rho)
        windows.append(
            SweepWindow(
                a=window_a,
                b=window_b,
                values=[float(v) for v in result.values],
                residuals=[float(r) for r in result.residuals],
            )
        )
        results.append(result)
        logger.info(
            "Sweep window (%.6g, %.6g): %d eigenvalues",
            window_a,
            window_b,
            result.count,
        )
        if result.count == 0 or float(result.values[0]) <= a:
            break
        lead, smallest = float(result.values[0]), float(result.values[-1])
        if previous_lead is not None and lead == previous_lead:
            msg = (
                f"Sweep stalled at window ({window_a}, {window_b}) "
                f"with leading value {lead}"
            )
            raise NonProgress(msg)
        previous_lead = lead
        if smallest <= a or (window_a <= a and result.count < config.num_out):
            break
        window_b = _next_right_end(window_a, window_b - window_a, result.values)
        if window_b <= a:
            break
        window_a = window_b - width
    else:
        msg = f"Sweep exceeded {MAX_SWEEP_WINDOWS} windows"
        raise NonProgress(msg)

    return SweepResult(
        windows=windows,
        results=results,
        merged=_merge(results, matrix.n, IntervalSpec(a=a, b=b, radius=radius)),
    )


__all__ = [
    "feast",
    "feast2",
    "feast2_baseline",
    "feast_baseline",
    "f2p",
    "normalize_vectors",
    "psi_restricted",
    "psi_simple",
    "random_block",
    "rayleigh_ritz",
    "scaled_residuals",
    "sweep_interval",
]
