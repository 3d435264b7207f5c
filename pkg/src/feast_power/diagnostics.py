"""Scale factor, accuracy metrics and reference spectra."""

import logging
import math
from collections.abc import Sequence

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from feast_power.errors import DimMismatch, DivisionByZeroRef
from feast_power.linalg import SparseSymMatrix
from feast_power.models import EigResult, Metrics, RunHistory, open_interval_mask

logger = logging.getLogger(__name__)

DEFAULT_SCALE_SEED = 2024
MAX_ORACLE_ORDER = 2000
# Marks "undefined" in residual histories and metrics.
SENTINEL = -1.0


def scale_factor(matrix: SparseSymMatrix, seed: int = DEFAULT_SCALE_SEED) -> float:
    """Randomized estimate rho = sqrt((Ay)^T (Ay) / n) of the RMS eigenvalue.

    Args:
        matrix: Real symmetric operator A.
        seed: Seed of the standard-normal test vector y.

    Returns:
        rho, or 1.0 with a warning when the estimate is zero.
    """
    sample = np.random.default_rng(seed).standard_normal(matrix.n)
    image = matrix.matvec(sample)
    rho = math.sqrt(float(image @ image) / matrix.n)
    if rho == 0.0:
        logger.warning("Scale factor estimate is zero, falling back to 1.0")
        return 1.0
    return rho


def tau_r(err_hist: Sequence[float]) -> float:
    """Smallest per-iteration max residual, ignoring -1 entries; -1 if none."""
    defined = [err for err in err_hist if err != SENTINEL]
    return min(defined) if defined else SENTINEL


def tau_lambda(computed: EigResult | ArrayLike, reference: ArrayLike) -> float:
    """Largest relative error max_i |computed_i - reference_i| / |reference_i|.

    Both lists are sorted decreasing and paired by position over the first
    min(len(computed), len(reference)) entries.

    Args:
        computed: Computed eigenvalues or the EigResult holding them.
        reference: Reference eigenvalues inside the same interval.

    Returns:
        The error, or -1 when there is nothing to compare.

    Raises:
        DivisionByZeroRef: If a compared reference value is zero; the
            absolute error is attached to the exception.
    """
    values = computed.values if isinstance(computed, EigResult) else computed
    ours = np.sort(np.asarray(values, dtype=np.float64))[::-1]
    theirs = np.sort(np.asarray(reference, dtype=np.float64))[::-1]
    leng = min(ours.size, theirs.size)
    if leng == 0:
        return SENTINEL
    ours, theirs = ours[:leng], theirs[:leng]
    difference = np.abs(ours - theirs)
    if np.any(theirs == 0.0):
        msg = "Reference eigenvalue is zero, relative error undefined"
        raise DivisionByZeroRef(msg, absolute_error=float(difference.max()))
    return float((difference / np.abs(theirs)).max())


def count_in_interval(reference: ArrayLike, a: float, b: float) -> int:
    """Number of reference eigenvalues strictly inside (a, b)."""
    return int(np.count_nonzero(open_interval_mask(reference, a, b)))


def restrict_reference(reference: ArrayLike, a: float, b: float) -> NDArray[np.float64]:
    """Reference eigenvalues inside (a, b), decreasing."""
    values = np.asarray(reference, dtype=np.float64)
    return np.sort(values[open_interval_mask(values, a, b)])[::-1]


def dense_oracle(matrix: SparseSymMatrix) -> NDArray[np.float64]:
    """Full spectrum of a small matrix by dense LAPACK, decreasing.

    Raises:
        DimMismatch: If n exceeds 2000.
    """
    if matrix.n > MAX_ORACLE_ORDER:
        msg = f"Dense oracle supports n <= {MAX_ORACLE_ORDER}, got {matrix.n}"
        raise DimMismatch(msg)
    values = scipy.linalg.eigvalsh(matrix.toarray(), check_finite=False)
    return values[::-1].copy()


def compute_metrics(
    result: EigResult,
    history: RunHistory,
    reference: ArrayLike | None = None,
    interval: tuple[float, float] | None = None,
) -> Metrics:
    """Assemble the run metrics.

    tau_lambda is evaluated on the kept best result, which is the iterate
    that attains tau_r.

    Args:
        result: Returned eigenpairs.
        history: Run bookkeeping.
        reference: Optional reference spectrum.
        interval: When given, the reference is restricted to (a, b) first and
            eig_in counts what remains.
    """
    metrics = Metrics(
        tau_r=tau_r(history.err_hist),
        iter_max_inner=history.max_inner_iterations,
        num_ay_total=sum(history.num_ay_hist),
        num_eig_out=result.count,
    )
    if reference is None:
        return metrics
    ref = np.asarray(reference, dtype=np.float64)
    if interval is not None:
        metrics.eig_in = count_in_interval(ref, *interval)
        ref = restrict_reference(ref, *interval)
    try:
        metrics.tau_lambda = tau_lambda(result, ref)
    except DivisionByZeroRef as exc:
        logger.warning("%s; reporting absolute error", exc)
        metrics.tau_lambda = exc.absolute_error
        metrics.tau_lambda_absolute = True
    return metrics


__all__ = [
    "DEFAULT_SCALE_SEED",
    "MAX_ORACLE_ORDER",
    "SENTINEL",
    "compute_metrics",
    "count_in_interval",
    "dense_oracle",
    "restrict_reference",
    "scale_factor",
    "tau_lambda",
    "tau_r",
]
