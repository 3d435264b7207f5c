"""Script to write the bundled synthetic test matrices and their reference spectra."""

from pathlib import Path

import numpy as np

from feast_power.diagnostics import dense_oracle
from feast_power.matrices import clustered_diagonal, diagonal, laplacian_1d
from feast_power.matrix_market import write_matrix_market
from feast_power.reports import write_spectrum_csv


def generate_test_matrices(out_dir: Path) -> list[Path]:
    """Write the bundled test matrices with their reference spectra.

    Args:
        out_dir: Destination directory, created when missing.

    Returns:
        Paths of the written Matrix Market files.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    matrices = {
        "diag100": (
            diagonal(np.arange(1.0, 101.0)), "diag(1, 2, ..., 100), eigenvalues 1..100"
        ),
        "laplacian200": (
            laplacian_1d(200), "tridiagonal [-1, 2, -1] Laplacian, n = 200"
        ),
        "clustered600": (
            clustered_diagonal(), "84 eigenvalues in (11.8, 12.0), n = 600"
        ),
    }
    written = []
    for name, (matrix, comment) in matrices.items():
        path = write_matrix_market(matrix, out_dir / f"{name}.mtx", comment=comment)
        write_spectrum_csv(dense_oracle(matrix), out_dir / f"{name}_eigenvalues.csv")
        print(f"Wrote {path} (n={matrix.n}, nnz={matrix.nnz})")
        written.append(path)
    return written


def main() -> None:
    """Main entry point for CLI."""
    import sys

    out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("data")
    paths = generate_test_matrices(out_dir)
    print(f"✅ Generated {len(paths)} test matrices in {out_dir}")


if __name__ == "__main__":
    main()
