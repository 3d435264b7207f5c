"""Tests for the experiment reproduction script."""

from pathlib import Path
from unittest.mock import patch

import pandas as pd
import pytest
from reproduce_experiments import EXPERIMENTS, SUMMARY_COLUMNS, main, run_experiment

from feast_power.config import Algorithm, build_run_config
from feast_power.models import Metrics, RunReport

DIAG100 = Path(__file__).resolve().parents[2] / "data" / "diag100.mtx"


def empty_report() -> RunReport:
    return RunReport(algorithm="f2p", metrics=Metrics(tau_r=-1.0, eig_in=0))


class TestExperimentTables:
    """Tests for the run tables."""

    def test_quarter_runs(self) -> None:
        """num_out is m/4 while num_cmp stays m/2."""
        runs = EXPERIMENTS["compare-quarter"].runs
        assert [row.m for row in runs] == [130, 110, 90, 70]
        assert [row.num_out for row in runs] == [32, 27, 22, 17]
        assert all(row.num_cmp == row.m // 2 for row in runs)

    def test_sequence_reaches_empty_interval(self) -> None:
        """Both max_it settings run the ten intervals down to (11.999, 12)."""
        runs = EXPERIMENTS["na5-sequence"].runs
        assert len(runs) == 20
        assert {row.max_it for row in runs} == {50, 100}
        assert runs[9].a == 11.999
        assert all(row.b == 12.0 for row in runs)

    def test_andrews_tables_use_andrews_preset(self) -> None:
        """Andrews experiments carry their own preset."""
        names = [name for name, e in EXPERIMENTS.items() if e.preset == "andrews"]
        assert names == ["andrews-sequence", "andrews-ends"]
        assert len(EXPERIMENTS["andrews-ends"].runs) == 6

    @pytest.mark.parametrize("name", list(EXPERIMENTS))
    def test_every_row_validates(self, name: str) -> None:
        """Each row builds a valid configuration with its preset radius."""
        experiment = EXPERIMENTS[name]
        for row in experiment.runs:
            config = build_run_config(
                {
                    "algorithm": experiment.algorithm,
                    "preset": experiment.preset,
                    "matrix_path": DIAG100,
                    **row._asdict(),
                }
            )
            assert config.num_out_value == row.num_out


class TestRunExperiment:
    """Tests for run_experiment and main."""

    def test_summary_carries_interval_count(self, tmp_path: Path) -> None:
        """The summary table reports s and -1 for undefined errors."""
        with patch("reproduce_experiments.run", return_value=empty_report()) as mock:
            frame = run_experiment("na5-sweep", DIAG100, tmp_path)
        config = mock.call_args.args[0]
        assert config.algorithm is Algorithm.SWEEP
        assert config.radius == 5.0
        assert config.min_eig == -1.0
        assert list(frame.columns) == list(SUMMARY_COLUMNS)
        written = pd.read_csv(tmp_path / "na5-sweep.csv")
        assert written[["s", "eig_out", "tau_lambda"]].to_dict("records") == [
            {"s": 0, "eig_out": 0, "tau_lambda": -1.0}
        ]

    def test_andrews_preset_fills_radius(self, tmp_path: Path) -> None:
        """Andrews runs use radius 2 and min_eig 0."""
        with patch("reproduce_experiments.run", return_value=empty_report()) as mock:
            frame = run_experiment("andrews-ends", DIAG100, tmp_path)
        assert len(frame) == mock.call_count == 6
        configs = [call.args[0] for call in mock.call_args_list]
        assert {(c.radius, c.min_eig) for c in configs} == {(2.0, 0.0)}

    def test_all_picks_experiments_of_the_matrix(self, tmp_path: Path) -> None:
        """``all`` on Andrews.mtx runs only the Andrews tables."""
        with patch("reproduce_experiments.run_experiment") as mock:
            main(["all", str(tmp_path / "Andrews.mtx"), "--out-dir", str(tmp_path)])
        assert [call.args[0] for call in mock.call_args_list] == [
            "andrews-sequence",
            "andrews-ends",
        ]
