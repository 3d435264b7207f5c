"""Run configuration: defaults, environment, key=value config files and CLI overrides.

Precedence, highest first: CLI flags, config file, ``FEAST_POWER_*``
environment variables (``.env`` included), field defaults.
"""

from enum import Enum
from pathlib import Path
from typing import Any, Literal, Self

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from feast_power.errors import ConfigError
from feast_power.models import F2PConfig, IntervalSpec, SolverConfig


class Algorithm(str, Enum):
    """Driver selected for a run."""

    FEAST = "feast"
    FEAST2 = "feast2"
    PSI = "psi"
    F2P = "f2p"
    SWEEP = "sweep"
    COMPARE = "compare"
    FILTER_SCAN = "filter-scan"
    ORACLE = "oracle"


# Source experiments: smallest-eigenvalue estimate and circle radius per matrix.
PRESETS: dict[str, dict[str, float]] = {
    "na5": {"min_eig": -1.0, "radius": 5.0},
    "andrews": {"min_eig": 0.0, "radius": 2.0},
}

NEEDS_MATRIX = {
    Algorithm.FEAST,
    Algorithm.FEAST2,
    Algorithm.PSI,
    Algorithm.F2P,
    Algorithm.SWEEP,
    Algorithm.COMPARE,
    Algorithm.ORACLE,
}
NEEDS_INTERVAL = {
    Algorithm.FEAST,
    Algorithm.FEAST2,
    Algorithm.F2P,
    Algorithm.SWEEP,
    Algorithm.COMPARE,
}
NEEDS_RADIUS = {Algorithm.FEAST2, Algorithm.F2P, Algorithm.SWEEP, Algorithm.COMPARE}
NEEDS_BLOCK = NEEDS_INTERVAL | {Algorithm.PSI}


class RunConfig(BaseSettings):
    """All knobs of one CLI run."""

    model_config = SettingsConfigDict(
        env_prefix="FEAST_POWER_",
        env_file=".env",
        extra="forbid",
        frozen=True,
    )

    algorithm: Algorithm = Field(Algorithm.F2P, description="Driver to run")
    matrix_path: Path | None = Field(None, description="Matrix Market input file")
    reference_path: Path | None = Field(
        None, description="CSV reference spectrum with an 'eigenvalue' column"
    )
    output_path: Path | None = Field(None, description="JSON report destination")
    csv_path: Path | None = Field(
        None, description="CSV destination for histories or scans"
    )
    preset: Literal["na5", "andrews"] | None = Field(
        None, description="Experiment preset filling min_eig and radius"
    )

    a: float | None = Field(None, description="Interval left end")
    b: float | None = Field(None, description="Interval right end")
    radius: float | None = Field(None, gt=0.0, description="Radius of both circles")
    center: float | None = Field(
        None, description="Circle center for a single-circle scan"
    )
    q: int = Field(8, ge=1, le=64, description="Quadrature points per circle")

    m: int | None = Field(None, ge=1, description="Block width")
    num_cmp: int | None = Field(
        None, ge=1, description="Pairs tracked, default floor(m/2)"
    )
    num_out: int | None = Field(
        None, ge=1, description="Pairs returned, default floor(m/2)"
    )
    num_eigm: int = Field(5, ge=1, description="Shift-estimate window length")
    min_eig: float | None = Field(None, description="Smallest-eigenvalue estimate")
    max_it: int = Field(50, ge=1, description="Outer iterations")
    sub_max_it: int = Field(100, ge=1, description="Inner power iterations")
    sub_tol: float = Field(1e-1, gt=0.0, description="Inner acceptance tolerance")
    tol: float = Field(
        1e-10, gt=0.0, description="Stopping tolerance of feast, feast2 and psi"
    )

    inner_tol: float = Field(
        1e-10, gt=0.0, description="BiCG relative residual tolerance"
    )
    inner_max_iter: int | None = Field(
        None, ge=1, description="BiCG iteration cap, default 5n"
    )
    preconditioner: Literal["none", "jacobi"] = Field(
        "none", description="BiCG preconditioner"
    )
    parallel_inner: bool = Field(
        False, description="Solve the q shifted blocks on threads"
    )
    threads: int | None = Field(
        None, ge=1, description="Worker threads, default CPU count"
    )

    seed: int = Field(0, ge=0, description="Seed of the random starting block")
    scale_seed: int = Field(
        2024, ge=0, description="Seed of the scale-factor test vector"
    )

    scan_min: float | None = Field(None, description="Filter scan grid start")
    scan_max: float | None = Field(None, description="Filter scan grid end")
    scan_points: int = Field(200, ge=2, description="Filter scan grid size")

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        "INFO", description="Logging level of the CLI"
    )

    @model_validator(mode="before")
    @classmethod
    def _apply_preset(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("preset"):
            preset = PRESETS.get(str(data["preset"]).lower(), {})
            data = {**preset, **{k: v for k, v in data.items() if v is not None}}
        return data

    @model_validator(mode="after")
    def _check_consistency(self) -> Self:
        algorithm = self.algorithm
        if algorithm in NEEDS_MATRIX and self.matrix_path is None:
            msg = f"{algorithm.value} needs matrix_path"
            raise ValueError(msg)
        if self.matrix_path is not None and not self.matrix_path.is_file():
            msg = f"Matrix file {self.matrix_path} does not exist"
            raise ValueError(msg)
        if self.reference_path is not None and not self.reference_path.is_file():
            msg = f"Reference file {self.reference_path} does not exist"
            raise ValueError(msg)
        if algorithm in NEEDS_INTERVAL and (self.a is None or self.b is None):
            msg = f"{algorithm.value} needs the interval ends a and b"
            raise ValueError(msg)
        if self.a is not None and self.b is not None and self.a >= self.b:
            msg = f"Interval ({self.a}, {self.b}) is empty"
            raise ValueError(msg)
        if algorithm in NEEDS_RADIUS:
            if self.radius is None:
                msg = f"{algorithm.value} needs the circle radius"
                raise ValueError(msg)
            assert self.a is not None and self.b is not None  # noqa: S101
            if 2.0 * self.radius < self.b - self.a:
                msg = f"Radius {self.radius} does not cover ({self.a}, {self.b})"
                raise ValueError(msg)
        if algorithm in NEEDS_BLOCK:
            if self.m is None:
                msg = f"{algorithm.value} needs the block width m"
                raise ValueError(msg)
            if not self.num_out_value <= self.num_cmp_value <= self.m:
                msg = (
                    "Expected num_out <= num_cmp <= m, got "
                    f"num_out={self.num_out_value}, num_cmp={self.num_cmp_value}, "
                    f"m={self.m}"
                )
                raise ValueError(msg)
        if algorithm is Algorithm.FILTER_SCAN:
            single = self.center is not None and self.radius is not None
            pair = self.a is not None and self.b is not None and self.radius is not None
            if not (single or pair):
                msg = "filter-scan needs center and radius, or a, b and radius"
                raise ValueError(msg)
        if (self.scan_min is None) != (self.scan_max is None):
            msg = "scan_min and scan_max must be given together"
            raise ValueError(msg)
        if (
            self.scan_min is not None
            and self.scan_max is not None
            and self.scan_min >= self.scan_max
        ):
            msg = f"Scan grid [{self.scan_min}, {self.scan_max}] is empty"
            raise ValueError(msg)
        return self

    @property
    def num_cmp_value(self) -> int:
        """num_cmp, defaulting to floor(m/2) and at least 1."""
        if self.num_cmp is not None:
            return self.num_cmp
        return max(1, (self.m or 1) // 2)

    @property
    def num_out_value(self) -> int:
        """num_out, defaulting to floor(m/2) and at least 1."""
        if self.num_out is not None:
            return self.num_out
        return max(1, (self.m or 1) // 2)

    def f2p_config(self) -> F2PConfig:
        """Driver settings of the combined algorithm."""
        return F2PConfig(
            m=self.m or 1,
            num_cmp=self.num_cmp_value,
            num_out=self.num_out_value,
            num_eigm=self.num_eigm,
            min_eig=self.min_eig,
            max_it=self.max_it,
            sub_max_it=self.sub_max_it,
            sub_tol=self.sub_tol,
            seed=self.seed,
            scale_seed=self.scale_seed,
        )

    def solver_config(self) -> SolverConfig:
        """Inner shifted-solver settings."""
        return SolverConfig(
            tol=self.inner_tol,
            max_iter=self.inner_max_iter,
            preconditioner=self.preconditioner,
            parallel=self.parallel_inner,
            threads=self.threads,
        )

    def interval_spec(self) -> IntervalSpec:
        """Interval and radius; radius defaults to half the width when unset."""
        if self.a is None or self.b is None:
            msg = "Interval ends are not configured"
            raise ConfigError(msg)
        radius = self.radius if self.radius is not None else (self.b - self.a) / 2.0
        return IntervalSpec(a=self.a, b=self.b, radius=radius)

    def echo(self) -> dict[str, Any]:
        """JSON-friendly dump for the run report."""
        return self.model_dump(mode="json")


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key=value`` file; ``#`` starts a comment, blank lines are skipped.

    Raises:
        ConfigError: If the file is missing, a line has no ``=``, or a key is unknown.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        msg = f"Cannot read config file {path}: {exc}"
        raise ConfigError(msg) from exc
    known = set(RunConfig.model_fields)
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip().replace("-", "_"), value.strip()
        if not sep or not key:
            msg = f"{path}:{number}: expected key=value, got {raw.strip()!r}"
            raise ConfigError(msg)
        if key not in known:
            msg = f"{path}:{number}: unknown key {key!r}"
            raise ConfigError(msg)
        values[key] = value
    return values


def build_run_config(
    overrides: dict[str, Any] | None = None,
    config_file: str | Path | None = None,
) -> RunConfig:
    """Merge config file and CLI overrides over environment and defaults.

    Raises:
        ConfigError: If the merged configuration is invalid.
    """
    merged: dict[str, Any] = load_config_file(config_file) if config_file else {}
    merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**merged)
    except ValidationError as exc:
        msg = f"Invalid configuration: {exc}"
        raise ConfigError(msg) from exc


__all__ = [
    "PRESETS",
    "Algorithm",
    "RunConfig",
    "build_run_config",
    "load_config_file",
]
