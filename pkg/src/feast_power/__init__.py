"""Contour-integral (FEAST) and power subspace eigensolvers."""

from feast_power.diagnostics import dense_oracle, scale_factor, tau_lambda, tau_r
from feast_power.eigensolvers import (
    f2p,
    feast,
    feast2,
    psi_restricted,
    psi_simple,
    random_block,
    sweep_interval,
)
from feast_power.errors import FeastPowerError
from feast_power.linalg import SparseSymMatrix, gauss_legendre
from feast_power.matrix_market import read_matrix_market
from feast_power.models import (
    EigResult,
    F2PConfig,
    IntervalSpec,
    RunHistory,
    SolverConfig,
)

__version__ = "0.1.0"

__all__ = [
    "EigResult",
    "F2PConfig",
    "FeastPowerError",
    "IntervalSpec",
    "RunHistory",
    "SolverConfig",
    "SparseSymMatrix",
    "__version__",
    "dense_oracle",
    "f2p",
    "feast",
    "feast2",
    "gauss_legendre",
    "psi_restricted",
    "psi_simple",
    "random_block",
    "read_matrix_market",
    "scale_factor",
    "sweep_interval",
    "tau_lambda",
    "tau_r",
]
