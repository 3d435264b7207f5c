"""Dense and sparse linear-algebra kernels shared by all solvers."""

import numpy as np
import scipy.linalg
import scipy.sparse
from numpy.polynomial import legendre
from numpy.typing import ArrayLike, NDArray

from feast_power.errors import (
    DimMismatch,
    IllConditionedGram,
    InvalidOrder,
    NonFinite,
    NotSymmetric,
    RankDeficient,
)
from feast_power.models import DenseEig, QuadratureRule

# Dense n x m real block of iteration vectors.
Block = NDArray[np.float64]

MAX_QUADRATURE_ORDER = 64
RANK_TOLERANCE = 1e-12
SYMMETRY_TOLERANCE = 1e-12
MAX_DENSE_ORDER = 1024
# Matrices at least this full are multiplied through a dense copy.
DENSE_FILL_RATIO = 0.25
# Gram Cholesky pivots at or below this fraction of the largest are rejected;
# cond(B_hat) grows like the inverse square of that ratio, about 1e16 at 1e-8.
GRAM_PIVOT_RATIO = 1e-8


class SparseSymMatrix:
    """Immutable real symmetric matrix in CSR form with both triangles stored."""

    def __init__(self, matrix: scipy.sparse.sparray | scipy.sparse.spmatrix) -> None:
        """Wrap a square sparse matrix, checking exact symmetry.

        Args:
            matrix: Any scipy sparse matrix holding the full symmetric pattern.

        Raises:
            DimMismatch: If the matrix is not square.
            NotSymmetric: If some stored (i, j, v) has no matching (j, i, v).
        """
        csr = scipy.sparse.csr_array(matrix, dtype=np.float64, copy=True)
        if csr.shape[0] != csr.shape[1]:
            msg = f"Matrix must be square, got shape {csr.shape}"
            raise DimMismatch(msg)
        csr.sum_duplicates()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            msg = "Matrix has non-finite entries"
            raise NonFinite(msg)
        if (csr != csr.T).nnz:
            msg = "Matrix is not symmetric"
            raise NotSymmetric(msg)
        for array in (csr.data, csr.indices, csr.indptr):
            array.flags.writeable = False
        self._csr = csr
        self._dense: NDArray[np.float64] | None = None
        n = csr.shape[0]
        if n <= MAX_DENSE_ORDER and csr.nnz >= DENSE_FILL_RATIO * n * n:
            self._dense = csr.toarray()
            self._dense.flags.writeable = False

    @classmethod
    def from_dense(cls, dense: ArrayLike) -> "SparseSymMatrix":
        """Build from a dense symmetric array, dropping exact zeros."""
        return cls(scipy.sparse.csr_array(np.asarray(dense, dtype=np.float64)))

    @classmethod
    def from_lower_triplets(
        cls,
        n: int,
        rows: ArrayLike,
        cols: ArrayLike,
        values: ArrayLike,
    ) -> "SparseSymMatrix":
        """Build from 0-based triangle entries; mirror off-diagonals, sum duplicates."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        values = np.asarray(values, dtype=np.float64)
        off = rows != cols
        all_rows = np.concatenate([rows, cols[off]])
        all_cols = np.concatenate([cols, rows[off]])
        all_values = np.concatenate([values, values[off]])
        coo = scipy.sparse.coo_array((all_values, (all_rows, all_cols)), shape=(n, n))
        return cls(coo)

    @property
    def n(self) -> int:
        """Dimension."""
        return int(self._csr.shape[0])

    @property
    def nnz(self) -> int:
        """Stored nonzeros, both triangles counted."""
        return int(self._csr.nnz)

    @property
    def row_ptr(self) -> NDArray[np.int32]:
        """CSR row pointers (read-only)."""
        return self._csr.indptr

    @property
    def col_idx(self) -> NDArray[np.int32]:
        """CSR column indices, sorted within each row (read-only)."""
        return self._csr.indices

    @property
    def values(self) -> NDArray[np.float64]:
        """CSR values (read-only)."""
        return self._csr.data

    @property
    def csr(self) -> scipy.sparse.csr_array:
        """Underlying scipy array; callers must not mutate it."""
        return self._csr

    def matvec(self, x: NDArray[np.generic]) -> NDArray[np.generic]:
        """A @ x."""
        return self._csr @ x

    def matmat(self, block: NDArray[np.generic]) -> NDArray[np.generic]:
        """A @ X for a dense block X.

        Complex blocks are multiplied as interleaved real blocks. Small matrices
        filled at least DENSE_FILL_RATIO go through a dense copy.
        """
        operator = self._csr if self._dense is None else self._dense
        if np.iscomplexobj(block):
            interleaved = np.ascontiguousarray(block, dtype=np.complex128)
            product = operator @ interleaved.view(np.float64)
            return np.ascontiguousarray(product).view(np.complex128)
        return operator @ block

    def diagonal(self) -> NDArray[np.float64]:
        """Main diagonal."""
        return self._csr.diagonal()

    def toarray(self) -> NDArray[np.float64]:
        """Dense copy."""
        return self._csr.toarray()

    def __repr__(self) -> str:
        """Short description with size and nonzeros."""
        return f"SparseSymMatrix(n={self.n}, nnz={self.nnz})"


def gauss_legendre(q: int) -> QuadratureRule:
    """Gauss-Legendre rule with q points mapped from [-1, 1] to [0, 1].

    Args:
        q: Number of points, 1 <= q <= 64.

    Returns:
        QuadratureRule with increasing nodes in (0, 1) and weights summing to 1.

    Raises:
        InvalidOrder: If q is outside [1, 64].
    """
    if not 1 <= q <= MAX_QUADRATURE_ORDER:
        msg = f"Quadrature order must be in [1, {MAX_QUADRATURE_ORDER}], got {q}"
        raise InvalidOrder(msg)
    nodes, weights = legendre.leggauss(q)
    return QuadratureRule(
        q=q,
        nodes=tuple(float(t) for t in (nodes + 1.0) / 2.0),
        weights=tuple(float(w) for w in weights / 2.0),
    )


def spmv(matrix: SparseSymMatrix, x: ArrayLike) -> NDArray[np.generic]:
    """Sparse symmetric matrix-vector product.

    Raises:
        DimMismatch: If len(x) != n.
    """
    vector = np.asarray(x)
    if vector.ndim != 1 or vector.shape[0] != matrix.n:
        msg = (
            f"Vector of shape {vector.shape} does not match matrix dimension {matrix.n}"
        )
        raise DimMismatch(msg)
    return matrix.matvec(vector)


def qr_orthonormalize(block: Block) -> Block:
    """Householder QR returning Q with orthonormal columns spanning span(block).

    Columns of Q are signed so that diag(R) is positive, which makes the
    result reproducible and leaves an already orthonormal block unchanged.

    Args:
        block: n x m real block with n >= m.

    Returns:
        n x m orthonormal block.

    Raises:
        DimMismatch: If n < m.
        NonFinite: If the block has NaN or infinite entries.
        RankDeficient: If some |R_ii| <= 1e-12 * max_j |R_jj|.
    """
    block = np.asarray(block, dtype=np.float64)
    if block.ndim != 2 or block.shape[0] < block.shape[1]:
        msg = f"Cannot orthonormalize block of shape {block.shape}, need n >= m"
        raise DimMismatch(msg)
    if not np.all(np.isfinite(block)):
        msg = "Block has non-finite entries"
        raise NonFinite(msg)
    q_factor, r_factor = scipy.linalg.qr(block, mode="economic", check_finite=False)
    diag = np.diag(r_factor)
    magnitude = np.abs(diag)
    largest = float(magnitude.max()) if magnitude.size else 0.0
    deficient = np.flatnonzero(magnitude <= RANK_TOLERANCE * largest)
    if largest == 0.0 or deficient.size:
        column = int(deficient[0]) if deficient.size else 0
        msg = f"Block is numerically rank deficient at column {column}"
        raise RankDeficient(msg, column=column)
    signs = np.where(diag < 0.0, -1.0, 1.0)
    return q_factor * signs


def refill_orthonormalize(block: Block, seed: int) -> tuple[Block, int]:
    """Orthonormalize a block, replacing numerically dependent directions.

    A full-rank block gives the same Q as ``qr_orthonormalize``. Otherwise
    pivoted QR keeps the leading directions whose |R_ii| exceeds the rank
    tolerance, and the missing columns are filled with seeded N(0, 1)
    vectors orthogonalized twice against the kept span.

    Args:
        block: n x m real block with n >= m.
        seed: Seed of the fill vectors.

    Returns:
        n x m orthonormal block and the number of refilled columns.
    """
    try:
        return qr_orthonormalize(block), 0
    except RankDeficient:
        pass
    block = np.asarray(block, dtype=np.float64)
    n, m = block.shape
    q_factor, r_factor, _ = scipy.linalg.qr(
        block, mode="economic", pivoting=True, check_finite=False
    )
    magnitude = np.abs(np.diag(r_factor))
    rank = 0
    if magnitude.size and magnitude[0] > 0.0:
        rank = int(np.count_nonzero(magnitude > RANK_TOLERANCE * magnitude[0]))
    kept = q_factor[:, :rank]
    if rank == m:
        return kept, 0
    fill = np.random.default_rng(seed).standard_normal((n, m - rank))
    for _ in range(2):
        fill -= kept @ (kept.T @ fill)
    return np.hstack([kept, qr_orthonormalize(fill)]), m - rank


def _check_symmetric(matrix: NDArray[np.float64], name: str) -> NDArray[np.float64]:
    """Validate a square symmetric matrix and return its exactly symmetric part."""
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        msg = f"{name} must be square, got shape {matrix.shape}"
        raise DimMismatch(msg)
    if matrix.shape[0] > MAX_DENSE_ORDER:
        msg = f"{name} of order {matrix.shape[0]} exceeds dense limit {MAX_DENSE_ORDER}"
        raise DimMismatch(msg)
    if not np.all(np.isfinite(matrix)):
        msg = f"{name} has non-finite entries"
        raise NonFinite(msg)
    scale = max(float(np.abs(matrix).max(initial=0.0)), np.finfo(np.float64).tiny)
    if float(np.abs(matrix - matrix.T).max(initial=0.0)) > SYMMETRY_TOLERANCE * scale:
        msg = f"{name} is not symmetric"
        raise NotSymmetric(msg)
    return (matrix + matrix.T) / 2.0


def dense_sym_eig(matrix: ArrayLike) -> DenseEig:
    """Full eigendecomposition of a small dense symmetric matrix, eigenvalues ascending.

    Raises:
        NotSymmetric: If the input is asymmetric beyond 1e-12 relative.
    """
    symmetric = _check_symmetric(np.asarray(matrix, dtype=np.float64), "Matrix")
    values, vectors = scipy.linalg.eigh(symmetric, check_finite=False)
    return DenseEig(values=values, vectors=vectors)


def dense_gen_sym_eig(a_hat: ArrayLike, b_hat: ArrayLike) -> DenseEig:
    """Eigenpairs of the symmetric-definite pencil (a_hat, b_hat) by Cholesky reduction.

    With b_hat = L L^T the pencil reduces to the standard problem for
    L^-1 a_hat L^-T; eigenvectors are mapped back by L^-T and come out
    b_hat-orthonormal.

    Args:
        a_hat: Symmetric m x m matrix.
        b_hat: Symmetric positive definite m x m Gram matrix.

    Returns:
        DenseEig with ascending eigenvalues.

    Raises:
        IllConditionedGram: If the Cholesky factorization of b_hat fails.
    """
    a_sym = _check_symmetric(np.asarray(a_hat, dtype=np.float64), "A_hat")
    b_sym = _check_symmetric(np.asarray(b_hat, dtype=np.float64), "B_hat")
    if a_sym.shape != b_sym.shape:
        msg = f"Pencil shapes differ: {a_sym.shape} vs {b_sym.shape}"
        raise DimMismatch(msg)
    try:
        lower = scipy.linalg.cholesky(b_sym, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        msg = "Gram matrix is not numerically positive definite"
        raise IllConditionedGram(msg) from exc
    pivots = np.diag(lower)
    if pivots.size and float(pivots.min()) <= GRAM_PIVOT_RATIO * float(pivots.max()):
        msg = "Gram matrix is too ill-conditioned for Cholesky reduction"
        raise IllConditionedGram(msg)
    half = scipy.linalg.solve_triangular(lower, a_sym, lower=True, check_finite=False)
    reduced = scipy.linalg.solve_triangular(
        lower, half.T, lower=True, check_finite=False
    )
    values, vectors = scipy.linalg.eigh((reduced + reduced.T) / 2.0, check_finite=False)
    vectors = scipy.linalg.solve_triangular(
        lower, vectors, lower=True, trans="T", check_finite=False
    )
    if not np.all(np.isfinite(vectors)):
        msg = "Gram matrix reduction produced non-finite eigenvectors"
        raise IllConditionedGram(msg)
    return DenseEig(values=values, vectors=vectors)


__all__ = [
    "Block",
    "SparseSymMatrix",
    "dense_gen_sym_eig",
    "dense_sym_eig",
    "gauss_legendre",
    "qr_orthonormalize",
    "refill_orthonormalize",
    "spmv",
]
