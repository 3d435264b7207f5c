"""BiCG for the complex shifted systems (zI - A)X = B with real symmetric A.

All complex arithmetic of the package lives here. The block solver runs
independent BiCG recurrences side by side, one per right-hand-side column,
each column with its own shift, step sizes and breakdown state.
"""

import logging
import math
from collections.abc import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from feast_power.errors import Breakdown, DimMismatch, InvalidNode, NonFinite
from feast_power.linalg import SparseSymMatrix
from feast_power.models import Shift, SolverConfig, SolveStats

logger = logging.getLogger(__name__)

BREAKDOWN_THRESHOLD = 1e-300
MAX_ITER_FACTOR = 5
SHADOW_PERTURBATION = 1e-2

ComplexBlock = NDArray[np.complex128]


class _BlockOutcome:
    """Per-column state at the end of a block BiCG run."""

    def __init__(self, columns: int, n: int) -> None:
        self.solution: ComplexBlock = np.zeros((n, columns), dtype=np.complex128)
        self.iterations = np.zeros(columns, dtype=np.int64)
        self.relres = np.zeros(columns)
        self.converged = np.zeros(columns, dtype=bool)
        self.broken_at = np.full(columns, -1, dtype=np.int64)


def _as_complex(value: Shift | complex) -> complex:
    return value.value if isinstance(value, Shift) else complex(value)


def _jacobi_inverse(
    matrix: SparseSymMatrix, z: complex | NDArray[np.complex128], columns: int
) -> ComplexBlock | None:
    """Inverse diagonal of z_j I - A per column, None when an entry vanishes."""
    z_cols = np.broadcast_to(np.asarray(z, dtype=np.complex128), (columns,))
    diagonal = z_cols[None, :] - matrix.diagonal()[:, None]
    if np.any(np.abs(diagonal) < BREAKDOWN_THRESHOLD):
        return None
    return 1.0 / diagonal


def _column_dot(left: ComplexBlock, right: ComplexBlock) -> NDArray[np.complex128]:
    """Column-wise left^H right."""
    return np.einsum("ij,ij->j", left.conj(), right)


def _column_bilinear(
    left: ComplexBlock, right: ComplexBlock
) -> NDArray[np.complex128]:
    """Column-wise left^T right, no conjugation."""
    return np.einsum("ij,ij->j", left, right)


def _block_bicg(
    matrix: SparseSymMatrix,
    z: complex | NDArray[np.complex128],
    rhs: ComplexBlock,
    tol: float,
    max_iter: int,
    precond: ComplexBlock | None,
    shadow: ComplexBlock | None = None,
) -> _BlockOutcome:
    """Run one BiCG recurrence per column of rhs from the zero initial guess.

    Column j solves (z_j I - A)x = rhs[:, j]; z is a scalar or one shift per
    column, and precond holds the inverse diagonal per column when given.
    With the default shadow conj(rhs) the shadow iterates are the exact
    conjugates of the primary ones, so only the primary recurrence is run.
    """
    n, columns = rhs.shape
    outcome = _BlockOutcome(columns, n)
    z_cols = np.broadcast_to(np.asarray(z, dtype=np.complex128), (columns,))
    mirrored = shadow is None

    def select(cols: NDArray[np.intp]) -> NDArray[np.intp] | slice:
        return slice(None) if cols.size == columns else cols

    def apply(block: ComplexBlock, sel: NDArray[np.intp] | slice) -> ComplexBlock:
        return z_cols[sel] * block - matrix.matmat(block)

    def apply_both(
        block: ComplexBlock, shadow_block: ComplexBlock, sel: NDArray[np.intp] | slice
    ) -> tuple[ComplexBlock, ComplexBlock]:
        width = block.shape[1]
        stacked = matrix.matmat(np.hstack([block, shadow_block]))
        shifted = z_cols[sel]
        return (
            shifted * block - stacked[:, :width],
            shifted.conj() * shadow_block - stacked[:, width:],
        )

    def precondition(
        block: ComplexBlock, sel: NDArray[np.intp] | slice, adjoint: bool = False
    ) -> ComplexBlock:
        if precond is None:
            return block.copy()
        scale = precond[:, sel]
        return block * (scale.conj() if adjoint else scale)

    b_norm = np.linalg.norm(rhs, axis=0)
    active = b_norm > 0.0
    outcome.converged[~active] = True
    safe_norm = np.where(active, b_norm, 1.0)
    every = slice(None)

    x = np.zeros_like(rhs)
    residual = rhs.copy()
    direction = precondition(residual, every)
    if mirrored:
        shadow_residual = shadow_direction = residual
        rho = _column_bilinear(residual, direction)
    else:
        shadow_residual = np.array(shadow, dtype=np.complex128)
        shadow_direction = precondition(shadow_residual, every, adjoint=True)
        rho = _column_dot(shadow_residual, direction)

    best_x = x.copy()
    best_relres = np.where(active, 1.0, 0.0)

    def mark_broken(cols: NDArray[np.intp], iteration: int) -> None:
        outcome.broken_at[cols] = iteration
        active[cols] = False

    mark_broken(np.flatnonzero(active & (np.abs(rho) < BREAKDOWN_THRESHOLD)), 0)

    iteration = 0
    while np.any(active) and iteration < max_iter:
        iteration += 1
        cols = np.flatnonzero(active)
        sel = select(cols)
        step = direction[:, sel]
        if mirrored:
            product = apply(step, sel)
            sigma = _column_bilinear(step, product)
        else:
            product, shadow_product = apply_both(step, shadow_direction[:, sel], sel)
            sigma = _column_dot(shadow_direction[:, sel], product)
        stalled = np.abs(sigma) < BREAKDOWN_THRESHOLD
        if np.any(stalled):
            mark_broken(cols[stalled], iteration)
            keep = ~stalled
            cols, product, sigma = cols[keep], product[:, keep], sigma[keep]
            if not mirrored:
                shadow_product = shadow_product[:, keep]
            if cols.size == 0:
                break
            sel = cols

        alpha = rho[sel] / sigma
        x[:, sel] += alpha * direction[:, sel]
        residual[:, sel] -= alpha * product
        if not mirrored:
            shadow_residual[:, sel] -= alpha.conj() * shadow_product
        outcome.iterations[sel] = iteration

        relres = np.linalg.norm(residual[:, sel], axis=0) / safe_norm[sel]
        improved = relres < best_relres[sel]
        if np.any(improved):
            best_x[:, cols[improved]] = x[:, cols[improved]]
            best_relres[cols[improved]] = relres[improved]

        hit = relres < tol
        if np.any(hit):
            hit_cols = cols[hit]
            true_residual = rhs[:, hit_cols] - apply(x[:, hit_cols], hit_cols)
            true_relres = np.linalg.norm(true_residual, axis=0) / safe_norm[hit_cols]
            accepted = true_relres < tol
            done = hit_cols[accepted]
            outcome.converged[done] = True
            active[done] = False
            best_x[:, done] = x[:, done]
            best_relres[done] = true_relres[accepted]
            # Stale recurrence: restart the residual from the true one.
            stale = hit_cols[~accepted]
            residual[:, stale] = true_residual[:, ~accepted]

        cols = np.flatnonzero(active)
        if cols.size == 0:
            break
        sel = select(cols)
        precond_residual = precondition(residual[:, sel], sel)
        if mirrored:
            rho_next = _column_bilinear(residual[:, sel], precond_residual)
        else:
            rho_next = _column_dot(shadow_residual[:, sel], precond_residual)
        vanished = np.abs(rho_next) < BREAKDOWN_THRESHOLD
        beta = rho_next / np.where(vanished, 1.0, rho[sel])
        direction[:, sel] = precond_residual + beta * direction[:, sel]
        if not mirrored:
            precond_shadow = precondition(shadow_residual[:, sel], sel, adjoint=True)
            shadow_direction[:, sel] = (
                precond_shadow + beta.conj() * shadow_direction[:, sel]
            )
        rho[sel] = rho_next
        if np.any(vanished):
            mark_broken(cols[vanished], iteration)

    if not np.all(outcome.converged):
        cols = np.flatnonzero(~outcome.converged)
        recomputed = rhs[:, cols] - apply(best_x[:, cols], cols)
        best_relres[cols] = np.linalg.norm(recomputed, axis=0) / safe_norm[cols]
    outcome.solution = best_x
    outcome.relres = best_relres
    return outcome


def _stats(outcome: _BlockOutcome, cols: NDArray[np.int64]) -> list[SolveStats]:
    return [
        SolveStats(
            iterations=int(outcome.iterations[j]),
            final_relres=float(outcome.relres[j]),
            converged=bool(outcome.converged[j]),
            total_iterations=int(outcome.iterations[j]),
        )
        for j in cols
    ]


def _resolve_max_iter(matrix: SparseSymMatrix, max_iter: int | None) -> int:
    return MAX_ITER_FACTOR * matrix.n if max_iter is None else max_iter


def bicg_shifted(
    matrix: SparseSymMatrix,
    shift: Shift | complex,
    b: ArrayLike,
    tol: float = 1e-10,
    max_iter: int | None = None,
    preconditioner: str = "none",
    shadow: ArrayLike | None = None,
) -> tuple[NDArray[np.complex128], SolveStats]:
    """Solve (zI - A)x = b by BiCG from the zero initial guess.

    Args:
        matrix: Real symmetric operator A.
        shift: Complex shift z.
        b: Right-hand side of length n.
        tol: Relative residual tolerance on the recomputed residual.
        max_iter: Iteration cap, None means 5n.
        preconditioner: "none" or "jacobi".
        shadow: Shadow start vector, defaults to conj(b).

    Returns:
        Solution (best iterate when not converged) and its SolveStats.

    Raises:
        DimMismatch: If len(b) != n.
        Breakdown: If a BiCG inner product vanishes.
    """
    vector = np.asarray(b, dtype=np.complex128)
    if vector.ndim != 1 or vector.shape[0] != matrix.n:
        msg = (
            f"Right-hand side of shape {vector.shape} "
            f"does not match matrix dimension {matrix.n}"
        )
        raise DimMismatch(msg)
    if tol <= 0.0:
        msg = f"Tolerance must be positive, got {tol}"
        raise ValueError(msg)
    z = _as_complex(shift)
    precond = _jacobi_inverse(matrix, z, 1) if preconditioner == "jacobi" else None
    shadow_block = None
    if shadow is not None:
        shadow_block = np.asarray(shadow, dtype=np.complex128).reshape(-1, 1)
    outcome = _block_bicg(
        matrix,
        z,
        vector.reshape(-1, 1),
        tol,
        _resolve_max_iter(matrix, max_iter),
        precond,
        shadow_block,
    )
    if outcome.broken_at[0] >= 0:
        msg = f"BiCG breakdown for shift {z}"
        raise Breakdown(msg, iteration=int(outcome.broken_at[0]))
    (stats,) = _stats(outcome, np.arange(1))
    return outcome.solution[:, 0], stats


def _check_rhs(matrix: SparseSymMatrix, rhs: ArrayLike) -> ComplexBlock:
    block = np.asarray(rhs, dtype=np.complex128)
    if block.ndim != 2 or block.shape[0] != matrix.n:
        msg = (
            f"Right-hand side block of shape {block.shape} "
            f"does not match matrix dimension {matrix.n}"
        )
        raise DimMismatch(msg)
    return block


def _solve_columns(
    matrix: SparseSymMatrix,
    z_cols: NDArray[np.complex128],
    block: ComplexBlock,
    config: SolverConfig,
    seed: int,
) -> _BlockOutcome:
    """Block BiCG over all columns, restarting broken columns once."""
    columns = block.shape[1]
    max_iter = _resolve_max_iter(matrix, config.max_iter)
    precond = None
    if config.preconditioner == "jacobi":
        precond = _jacobi_inverse(matrix, z_cols, columns)
    outcome = _block_bicg(matrix, z_cols, block, config.tol, max_iter, precond)

    broken = np.flatnonzero(outcome.broken_at >= 0)
    if broken.size:
        logger.warning(
            "BiCG breakdown in %d column(s) for shift(s) %s, retrying with new shadow",
            broken.size,
            np.unique(z_cols[broken]),
        )
        rng = np.random.default_rng(seed)
        sub_rhs = block[:, broken]
        noise = rng.standard_normal(sub_rhs.shape) + 1j * rng.standard_normal(
            sub_rhs.shape
        )
        scale = np.linalg.norm(sub_rhs, axis=0) / math.sqrt(matrix.n)
        shadow = sub_rhs.conj() + SHADOW_PERTURBATION * noise * scale
        sub_precond = None if precond is None else precond[:, broken]
        retry = _block_bicg(
            matrix,
            z_cols[broken],
            sub_rhs,
            config.tol,
            max_iter,
            sub_precond,
            shadow,
        )
        if np.any(retry.broken_at >= 0):
            failed = z_cols[broken][retry.broken_at >= 0]
            msg = f"BiCG breakdown persisted after restart for shift {failed[0]}"
            raise Breakdown(msg, iteration=int(retry.broken_at.max()))
        outcome.solution[:, broken] = retry.solution
        outcome.iterations[broken] += retry.iterations
        outcome.relres[broken] = retry.relres
        outcome.converged[broken] = retry.converged
        outcome.broken_at[broken] = -1

    if not np.all(np.isfinite(outcome.solution)):
        msg = "Shifted solve produced non-finite entries"
        raise NonFinite(msg)
    return outcome


def _warn_unconverged(z: complex, stats: SolveStats, max_iter: int) -> None:
    if not stats.converged:
        logger.warning(
            "Inner solve for shift %s did not converge in %d iterations "
            "(relres %.3e), using best iterate",
            z,
            max_iter,
            stats.final_relres,
        )


def solve_shifted_block(
    matrix: SparseSymMatrix,
    shift: Shift | complex,
    rhs: ArrayLike,
    config: SolverConfig | None = None,
    seed: int = 0,
) -> tuple[ComplexBlock, SolveStats]:
    """Solve (zI - A)X = B column by column, restarting broken columns once.

    A column whose recurrence breaks down is solved again from scratch with
    a randomly perturbed shadow vector; a second breakdown is raised.

    Args:
        matrix: Real symmetric operator A.
        shift: Complex shift z.
        rhs: n x k right-hand sides.
        config: Inner solver settings.
        seed: Seed of the shadow perturbation.

    Returns:
        n x k complex solution block and stats aggregated over the k systems.

    Raises:
        Breakdown: If a column breaks down twice.
        NonFinite: If the solution contains NaN or infinite entries.
    """
    config = config or SolverConfig()
    block = _check_rhs(matrix, rhs)
    z = _as_complex(shift)
    z_cols = np.full(block.shape[1], z, dtype=np.complex128)
    outcome = _solve_columns(matrix, z_cols, block, config, seed)
    stats = SolveStats.aggregate(_stats(outcome, np.arange(block.shape[1])))
    _warn_unconverged(z, stats, _resolve_max_iter(matrix, config.max_iter))
    return outcome.solution, stats


def solve_shifted_systems(
    matrix: SparseSymMatrix,
    shifts: Sequence[Shift | complex],
    rhs: ArrayLike,
    config: SolverConfig | None = None,
    seed: int = 0,
) -> list[tuple[ComplexBlock, SolveStats]]:
    """Solve (z_k I - A)X_k = B for every shift in one stacked block BiCG.

    The q * k systems advance together, so each iteration costs one sparse
    product on an n x 2qk block instead of q separate solver loops. Every
    column keeps its own recurrence, so X_k matches solve_shifted_block.

    Args:
        matrix: Real symmetric operator A.
        shifts: Complex shifts z_1..z_q.
        rhs: n x k right-hand sides shared by all shifts.
        config: Inner solver settings.
        seed: Seed of the shadow perturbation.

    Returns:
        One (solution, stats) pair per shift, in the order given.

    Raises:
        Breakdown: If a column breaks down twice.
        NonFinite: If a solution contains NaN or infinite entries.
    """
    config = config or SolverConfig()
    block = _check_rhs(matrix, rhs)
    width = block.shape[1]
    values = [_as_complex(shift) for shift in shifts]
    if not values:
        return []
    z_cols = np.repeat(np.asarray(values, dtype=np.complex128), width)
    outcome = _solve_columns(matrix, z_cols, np.tile(block, len(values)), config, seed)
    max_iter = _resolve_max_iter(matrix, config.max_iter)
    solved = []
    for k, z in enumerate(values):
        cols = np.arange(k * width, (k + 1) * width)
        stats = SolveStats.aggregate(_stats(outcome, cols))
        _warn_unconverged(z, stats, max_iter)
        solved.append((outcome.solution[:, cols], stats))
    return solved


def condition_bound(delta: float, radius: float, node: float) -> float:
    """Upper bound 1 + 2*delta / (r * sin(pi * t)) on cond_2(z_k I - A).

    Args:
        delta: Half-width of the spectrum of A - cI.
        radius: Circle radius r.
        node: Quadrature node t in (0, 1).

    Raises:
        InvalidNode: If the node is outside (0, 1).
    """
    if not 0.0 < node < 1.0:
        msg = f"Quadrature node must lie in (0, 1), got {node}"
        raise InvalidNode(msg)
    if delta < 0.0 or radius <= 0.0:
        msg = f"Expected delta >= 0 and radius > 0, got delta={delta}, radius={radius}"
        raise ValueError(msg)
    return 1.0 + 2.0 * delta / (radius * math.sin(math.pi * node))


__all__ = [
    "BREAKDOWN_THRESHOLD",
    "bicg_shifted",
    "condition_bound",
    "solve_shifted_block",
    "solve_shifted_systems",
]
