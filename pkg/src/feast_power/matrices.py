"""Bundled synthetic test matrices."""

import numpy as np
import scipy.sparse
from numpy.typing import ArrayLike

from feast_power.linalg import SparseSymMatrix


def diagonal(values: ArrayLike) -> SparseSymMatrix:
    """Diagonal matrix with the given entries, zeros kept on the diagonal."""
    entries = np.asarray(values, dtype=np.float64)
    return SparseSymMatrix(scipy.sparse.diags_array(entries, format="csr"))


def laplacian_1d(n: int) -> SparseSymMatrix:
    """Tridiagonal [-1, 2, -1] Dirichlet Laplacian of order n.

    Its eigenvalues are 2 - 2 cos(k pi / (n + 1)), k = 1..n.
    """
    if n < 1:
        msg = f"Order must be positive, got {n}"
        raise ValueError(msg)
    off = -np.ones(n - 1)
    return SparseSymMatrix(
        scipy.sparse.diags_array(
            [off, np.full(n, 2.0), off], offsets=[-1, 0, 1], format="csr"
        )
    )


def laplacian_1d_spectrum(n: int) -> np.ndarray:
    """Exact eigenvalues of ``laplacian_1d(n)``, decreasing."""
    k = np.arange(n, 0, -1)
    return 2.0 - 2.0 * np.cos(k * np.pi / (n + 1))


def clustered_diagonal(
    cluster: tuple[float, float] = (11.8, 12.0),
    cluster_size: int = 84,
    spectrum: tuple[float, float] = (-0.16, 25.67),
    outside_size: int = 516,
) -> SparseSymMatrix:
    """Diagonal matrix with a dense cluster of eigenvalues inside a wider spectrum.

    ``cluster_size`` values are evenly spaced strictly inside ``cluster``;
    ``outside_size`` values are picked evenly from a grid over ``spectrum``
    with the closed cluster interval removed, so the cluster holds exactly
    ``cluster_size`` eigenvalues.
    """
    low, high = cluster
    if not low < high or not spectrum[0] < low or not high < spectrum[1]:
        msg = f"Cluster {cluster} must lie strictly inside spectrum {spectrum}"
        raise ValueError(msg)
    inside = np.linspace(low, high, cluster_size + 2)[1:-1]
    candidates = np.linspace(spectrum[0], spectrum[1], outside_size + cluster_size + 2)
    outside = candidates[(candidates < low) | (candidates > high)]
    keep = np.round(
        np.linspace(0, outside.size - 1, min(outside_size, outside.size))
    ).astype(int)
    return diagonal(np.concatenate([outside[keep], inside]))


__all__ = ["clustered_diagonal", "diagonal", "laplacian_1d", "laplacian_1d_spectrum"]
