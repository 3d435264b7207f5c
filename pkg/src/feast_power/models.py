"""Domain models for contour-integral interior eigensolvers."""

from typing import Any, Literal, Self

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator


def open_interval_mask(values: ArrayLike, a: float, b: float) -> NDArray[np.bool_]:
    """Entrywise a < value < b."""
    array = np.asarray(values, dtype=np.float64)
    return (array > a) & (array < b)


class QuadratureRule(BaseModel):
    """Gauss-Legendre rule on [0, 1]."""

    model_config = ConfigDict(frozen=True)

    q: int = Field(..., ge=1, le=64, description="Number of quadrature points")
    nodes: tuple[float, ...] = Field(..., description="Nodes t_k in (0, 1), increasing")
    weights: tuple[float, ...] = Field(..., description="Positive weights summing to 1")

    @model_validator(mode="after")
    def _check_lengths(self) -> Self:
        if len(self.nodes) != self.q or len(self.weights) != self.q:
            msg = (
                f"Expected {self.q} nodes and weights, "
                f"got {len(self.nodes)} and {len(self.weights)}"
            )
            raise ValueError(msg)
        return self


class DenseEig(BaseModel):
    """Full spectral decomposition of a small dense matrix or pencil."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    values: np.ndarray = Field(..., description="Eigenvalues, ascending")
    vectors: np.ndarray = Field(..., description="Eigenvector columns")


class Shift(BaseModel):
    """Complex shift z = re + i*im of a resolvent system (zI - A)x = b."""

    model_config = ConfigDict(frozen=True)

    re: float = Field(..., description="Real part alpha_k")
    im: float = Field(..., description="Imaginary part beta_k, nonzero")

    @model_validator(mode="after")
    def _check_off_axis(self) -> Self:
        if self.im == 0.0:
            msg = "Shift must lie off the real axis"
            raise ValueError(msg)
        return self

    @property
    def value(self) -> complex:
        """Shift as a Python complex number."""
        return complex(self.re, self.im)

    def conjugate(self) -> "Shift":
        """Mirror image across the real axis."""
        return Shift(re=self.re, im=-self.im)


class SolveStats(BaseModel):
    """Outcome of one (or an aggregate of) shifted linear solves."""

    iterations: int = Field(
        ..., ge=0, description="BiCG iterations (max over aggregated systems)"
    )
    final_relres: float = Field(
        ..., ge=0.0, description="Recomputed ||b - Mx|| / ||b||"
    )
    converged: bool = Field(..., description="All systems reached the tolerance")
    total_iterations: int = Field(
        0, ge=0, description="Sum of iterations over aggregated systems"
    )
    systems: int = Field(1, ge=0, description="Number of systems aggregated")

    @classmethod
    def aggregate(cls, stats: list["SolveStats"]) -> "SolveStats":
        """Combine per-system stats: max iterations, worst residual, all-converged."""
        if not stats:
            return cls(iterations=0, final_relres=0.0, converged=True, systems=0)
        return cls(
            iterations=max(s.iterations for s in stats),
            final_relres=max(s.final_relres for s in stats),
            converged=all(s.converged for s in stats),
            total_iterations=sum(s.total_iterations or s.iterations for s in stats),
            systems=sum(s.systems for s in stats),
        )


class SolverConfig(BaseModel):
    """Settings for the inner shifted-system solves."""

    model_config = ConfigDict(frozen=True)

    tol: float = Field(1e-10, gt=0.0, description="Relative residual tolerance")
    max_iter: int | None = Field(None, ge=1, description="Iteration cap, None means 5n")
    preconditioner: Literal["none", "jacobi"] = Field(
        "none", description="Diagonal preconditioning hook, off by default"
    )
    parallel: bool = Field(
        False, description="Dispatch the q shifted block solves to threads"
    )
    threads: int | None = Field(
        None, ge=1, description="Worker threads, None means CPU count"
    )


class Contour(BaseModel):
    """Circle in the complex plane with a quadrature rule; one rational filter."""

    model_config = ConfigDict(frozen=True)

    center: float = Field(..., description="Center c on the real axis")
    radius: float = Field(..., gt=0.0, description="Radius r")
    rule: QuadratureRule = Field(..., description="Quadrature on the upper semicircle")

    @property
    def footprint(self) -> tuple[float, float]:
        """Real-axis interval enclosed by the circle."""
        return (self.center - self.radius, self.center + self.radius)


class IntervalSpec(BaseModel):
    """Open search interval (a, b) with the shared radius of the two circles."""

    model_config = ConfigDict(frozen=True)

    a: float = Field(..., description="Left endpoint")
    b: float = Field(..., description="Right endpoint")
    radius: float = Field(..., gt=0.0, description="Radius of both circles")

    @property
    def width(self) -> float:
        """Interval length b - a."""
        return self.b - self.a

    def contains(self, value: float) -> bool:
        """Whether value lies strictly inside (a, b)."""
        return bool(open_interval_mask([value], self.a, self.b)[0])


class EigResult(BaseModel):
    """Computed eigenpairs, eigenvalues in decreasing order."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    values: np.ndarray = Field(..., description="Eigenvalues, decreasing")
    vectors: np.ndarray = Field(..., description="Unit-norm eigenvector columns")
    residuals: np.ndarray = Field(
        ..., description="||Ax - lambda x|| / (rho ||x||) per pair"
    )
    converged: bool = Field(True, description="Driver met its stopping rule")

    @model_validator(mode="after")
    def _check_shapes(self) -> Self:
        count = self.values.shape[0]
        if self.residuals.shape[0] != count or self.vectors.shape[1] != count:
            msg = (
                f"Inconsistent result shapes: {count} values, "
                f"{self.residuals.shape[0]} residuals, {self.vectors.shape[1]} vectors"
            )
            raise ValueError(msg)
        return self

    @property
    def count(self) -> int:
        """Number of returned pairs."""
        return int(self.values.shape[0])

    @property
    def max_residual(self) -> float:
        """Largest residual, -1 when empty."""
        return float(self.residuals.max()) if self.count else -1.0

    @classmethod
    def empty(cls, n: int, converged: bool = True) -> "EigResult":
        """Result holding no pairs."""
        return cls(
            values=np.empty(0),
            vectors=np.empty((n, 0)),
            residuals=np.empty(0),
            converged=converged,
        )

    def head(self, count: int) -> "EigResult":
        """First count pairs."""
        return EigResult(
            values=self.values[:count].copy(),
            vectors=self.vectors[:, :count].copy(),
            residuals=self.residuals[:count].copy(),
            converged=self.converged,
        )


class RunHistory(BaseModel):
    """Per-outer-iteration bookkeeping of a driver run."""

    err_hist: list[float] = Field(
        default_factory=list,
        description="Max residual per iteration, -1 when nothing qualified",
    )
    num_ay_hist: list[int] = Field(
        default_factory=list, description="(A - sigma I)Y products per iteration"
    )
    eigm_hist: list[float] = Field(
        default_factory=list,
        description="Window of recent m-th largest in-interval Ritz values",
    )
    ritz_hist: list[list[float]] = Field(
        default_factory=list,
        description="Ritz values of the first Rayleigh-Ritz pass per iteration",
    )
    max_inner_iterations: int = Field(
        0, ge=0, description="Largest BiCG iteration count seen"
    )

    @property
    def iterations(self) -> int:
        """Outer iterations executed."""
        return len(self.err_hist)


class F2PConfig(BaseModel):
    """Inputs of the combined filter / power-iteration driver."""

    model_config = ConfigDict(frozen=True)

    m: int = Field(..., ge=1, description="Block width")
    num_cmp: int = Field(..., ge=1, description="Pairs tracked by the power iteration")
    num_out: int = Field(..., ge=1, description="Pairs returned")
    num_eigm: int = Field(5, ge=1, description="Shift-estimate window length")
    min_eig: float | None = Field(
        None, description="Estimate of the smallest eigenvalue, None means a"
    )
    max_it: int = Field(50, ge=1, description="Outer iterations")
    sub_max_it: int = Field(100, ge=1, description="Inner power iterations")
    sub_tol: float = Field(1e-1, gt=0.0, description="Inner acceptance tolerance")
    seed: int = Field(0, ge=0, description="Seed of the random starting block")
    scale_seed: int = Field(
        2024, ge=0, description="Seed of the scale-factor test vector"
    )

    @model_validator(mode="after")
    def _check_counts(self) -> Self:
        if not self.num_out <= self.num_cmp <= self.m:
            msg = (
                "Expected 1 <= num_out <= num_cmp <= m, got "
                f"num_out={self.num_out}, num_cmp={self.num_cmp}, m={self.m}"
            )
            raise ValueError(msg)
        return self


class Metrics(BaseModel):
    """Accuracy and cost figures of a run."""

    tau_r: float = Field(
        ..., description="Min over iterations of max scaled residual, -1 if undefined"
    )
    tau_lambda: float | None = Field(
        None, description="Max relative eigenvalue error against a reference"
    )
    tau_lambda_absolute: bool = Field(
        False, description="tau_lambda holds an absolute error (zero in reference)"
    )
    iter_max_inner: int = Field(
        0, ge=0, description="Max BiCG iterations over all systems"
    )
    num_ay_total: int = Field(0, ge=0, description="Total (A - sigma I)Y products")
    num_eig_out: int = Field(0, ge=0, description="Number of returned eigenvalues")
    eig_in: int | None = Field(
        None, ge=0, description="Reference eigenvalues strictly inside (a, b)"
    )


class SweepWindow(BaseModel):
    """One window of an interval sweep."""

    a: float = Field(..., description="Window left end")
    b: float = Field(..., description="Window right end")
    values: list[float] = Field(
        default_factory=list, description="Eigenvalues found, decreasing"
    )
    residuals: list[float] = Field(default_factory=list, description="Their residuals")


class SweepResult(BaseModel):
    """Outcome of an interval sweep: per-window results and their deduplicated union."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    windows: list[SweepWindow] = Field(
        default_factory=list, description="Windows in sweep order"
    )
    results: list[EigResult] = Field(
        default_factory=list, description="f2p result per window"
    )
    merged: EigResult = Field(
        ..., description="Union inside (a, b), deduplicated, decreasing"
    )


class RunReport(BaseModel):
    """Self-contained JSON report of one CLI run."""

    algorithm: str = Field(..., description="Driver that produced the report")
    config: dict[str, Any] = Field(
        default_factory=dict, description="Echo of the run configuration"
    )
    metrics: Metrics | None = Field(None, description="Accuracy and cost figures")
    eigenvalues: list[float] = Field(
        default_factory=list, description="Eigenvalues, decreasing"
    )
    residuals: list[float] = Field(default_factory=list, description="Scaled residuals")
    err_hist: list[float] = Field(
        default_factory=list, description="Per-iteration max residual"
    )
    num_ay_hist: list[int] = Field(
        default_factory=list, description="Per-iteration power steps"
    )
    histories: dict[str, list[float]] = Field(
        default_factory=dict, description="err_hist per driver for comparisons"
    )
    windows: list[SweepWindow] = Field(
        default_factory=list, description="Sweep windows"
    )
    scale_factor: float | None = Field(
        None, description="rho used for residual scaling"
    )
    timings: dict[str, float] = Field(
        default_factory=dict, description="Wall seconds per phase"
    )
    error: str | None = Field(None, description="Failure message of a partial report")

    @property
    def eig_out(self) -> int:
        """Number of reported eigenvalues."""
        return len(self.eigenvalues)

    def without_timings(self) -> dict[str, Any]:
        """Report content used for determinism comparisons."""
        return self.model_dump(exclude={"timings"})


__all__ = [
    "Contour",
    "DenseEig",
    "EigResult",
    "F2PConfig",
    "IntervalSpec",
    "Metrics",
    "QuadratureRule",
    "RunHistory",
    "RunReport",
    "Shift",
    "SolveStats",
    "SolverConfig",
    "SweepResult",
    "SweepWindow",
    "open_interval_mask",
]
