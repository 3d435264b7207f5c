"""Script to reproduce the Na5 and Andrews experiment tables.

Needs Na5.mtx or Andrews.mtx from the SuiteSparse Matrix Collection. Both are
beyond the dense oracle, so pass a reference spectrum CSV to get tau_lambda
and the exact count s of eigenvalues inside each interval. Expect minutes to
hours of runtime on a laptop.

Usage:
    python scripts/reproduce_experiments.py compare-half Na5.mtx --reference na5.csv
    python scripts/reproduce_experiments.py all Na5.mtx --out-dir results
"""

import argparse
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import NamedTuple

import pandas as pd

from feast_power.config import build_run_config
from feast_power.diagnostics import SENTINEL
from feast_power.models import RunReport
from feast_power.reports import FLOAT_FORMAT
from feast_power.runner import run

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = (
    "a",
    "b",
    "m",
    "num_cmp",
    "num_out",
    "max_it",
    "s",
    "eig_out",
    "tau_r",
    "tau_lambda",
    "iter",
    "num_ay",
)


class Run(NamedTuple):
    """One row of an experiment table."""

    a: float
    b: float
    m: int
    num_cmp: int
    num_out: int
    max_it: int = 50


class Experiment(NamedTuple):
    """A table of runs sharing a matrix preset and a driver."""

    preset: str
    algorithm: str
    runs: tuple[Run, ...]
    description: str


def _sequence(
    left_ends: Sequence[float],
    b: float,
    m: int,
    num_cmp: int,
    num_out: int,
    max_its: Sequence[int],
) -> tuple[Run, ...]:
    return tuple(
        Run(a, b, m, num_cmp, num_out, max_it) for max_it in max_its for a in left_ends
    )


NA5_LEFT_ENDS = (11.5, 11.6, 11.7, 11.8, 11.9, 11.95, 11.99, 11.995, 11.998, 11.999)
ANDREWS_LEFT_ENDS = (
    17.87, 17.91, 17.93, 17.95, 17.97, 17.99, 17.995, 17.999, 17.9995, 17.9999
)
BLOCK_WIDTHS = (130, 110, 90, 70)

EXPERIMENTS: dict[str, Experiment] = {
    "compare-half": Experiment(
        "na5",
        "compare",
        tuple(Run(11.8, 12.0, m, m // 2, m // 2) for m in BLOCK_WIDTHS),
        "FEAST, FEAST2 and f2p on (11.8, 12) with num_out = m/2",
    ),
    "compare-quarter": Experiment(
        "na5",
        "compare",
        tuple(Run(11.8, 12.0, m, m // 2, m // 4) for m in BLOCK_WIDTHS),
        "FEAST, FEAST2 and f2p on (11.8, 12) with num_out = m/4",
    ),
    "na5-sequence": Experiment(
        "na5",
        "f2p",
        _sequence(NA5_LEFT_ENDS, 12.0, 60, 30, 15, (50, 100)),
        "f2p on shrinking intervals (a, 12), down to one holding no eigenvalue",
    ),
    "na5-ends": Experiment(
        "na5",
        "f2p",
        (
            Run(4.5, 5.0, 60, 30, 30),
            Run(4.6, 5.0, 60, 30, 30),
            Run(19.5, 20.0, 60, 30, 30),
            Run(19.6, 20.0, 60, 30, 30),
        ),
        "f2p near both ends of the spectrum",
    ),
    "na5-sweep": Experiment(
        "na5",
        "sweep",
        (Run(11.7, 12.0, 80, 40, 20),),
        "All eigenvalues of (11.7, 12) by sweeping windows",
    ),
    "andrews-sequence": Experiment(
        "andrews",
        "f2p",
        _sequence(ANDREWS_LEFT_ENDS, 18.0, 80, 40, 20, (100,)),
        "f2p on shrinking intervals (a, 18) of Andrews",
    ),
    "andrews-ends": Experiment(
        "andrews",
        "f2p",
        tuple(
            Run(a, b, m, m // 2, num_out, max_it)
            for max_it in (50, 100)
            for a, b, m, num_out in (
                (4.95, 5.0, 100, 25),
                (17.95, 18.0, 80, 20),
                (30.0, 31.0, 50, 25),
            )
        ),
        "f2p at three spectrum locations of Andrews",
    ),
}


def _summary_row(row: Run, report: RunReport) -> dict[str, float | int]:
    metrics = report.metrics
    summary: dict[str, float | int] = dict(row._asdict())
    summary["eig_out"] = report.eig_out
    if metrics is None:
        summary.update(s=-1, tau_r=SENTINEL, tau_lambda=SENTINEL, iter=0, num_ay=0)
        return summary
    summary["s"] = metrics.eig_in if metrics.eig_in is not None else -1
    summary["tau_r"] = metrics.tau_r
    summary["tau_lambda"] = (
        metrics.tau_lambda if metrics.tau_lambda is not None else SENTINEL
    )
    summary["iter"] = metrics.iter_max_inner
    summary["num_ay"] = metrics.num_ay_total
    return summary


def run_experiment(
    name: str,
    matrix_path: Path,
    out_dir: Path,
    reference_path: Path | None = None,
) -> pd.DataFrame:
    """Run every row of one experiment and write its summary table.

    Each row also leaves a JSON report and the driver's CSV next to the
    summary.

    Args:
        name: Key of ``EXPERIMENTS``.
        matrix_path: Matrix Market file matching the experiment preset.
        out_dir: Destination of reports and tables.
        reference_path: Optional reference spectrum CSV for s and tau_lambda.

    Returns:
        One row per run with the columns of ``SUMMARY_COLUMNS``.
    """
    experiment = EXPERIMENTS[name]
    logger.info("%s: %s", name, experiment.description)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for row in experiment.runs:
        stem = f"{name}_{row.a}_{row.b}_m{row.m}_no{row.num_out}_it{row.max_it}"
        config = build_run_config(
            {
                "algorithm": experiment.algorithm,
                "preset": experiment.preset,
                "matrix_path": matrix_path,
                "reference_path": reference_path,
                "output_path": out_dir / f"{stem}.json",
                "csv_path": out_dir / f"{stem}.csv",
                **row._asdict(),
            }
        )
        summary = _summary_row(row, run(config))
        logger.info(
            "(%s, %s) m=%d: s=%d, %d eigenvalues, tau_r=%.3e",
            row.a,
            row.b,
            row.m,
            summary["s"],
            summary["eig_out"],
            summary["tau_r"],
        )
        rows.append(summary)
    frame = pd.DataFrame(rows, columns=list(SUMMARY_COLUMNS))
    path = out_dir / f"{name}.csv"
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    print(f"Wrote {path} ({len(frame)} runs)")
    return frame


def main(argv: Sequence[str] | None = None) -> None:
    """Main entry point for CLI."""
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("experiment", choices=[*EXPERIMENTS, "all"])
    parser.add_argument("matrix", type=Path, help="Na5.mtx or Andrews.mtx")
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    parser.add_argument("--reference", type=Path, help="Reference spectrum CSV")
    args = parser.parse_args(argv)

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    names = list(EXPERIMENTS) if args.experiment == "all" else [args.experiment]
    if args.experiment == "all":
        preset = "andrews" if "andrews" in args.matrix.stem.lower() else "na5"
        names = [name for name in names if EXPERIMENTS[name].preset == preset]
    for name in names:
        run_experiment(name, args.matrix, args.out_dir, args.reference)
    print(f"✅ Ran {len(names)} experiments on {args.matrix}")


if __name__ == "__main__":
    main()
