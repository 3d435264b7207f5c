"""Tests for the command-line interface."""

import json
from pathlib import Path
from unittest.mock import patch

import pytest

from feast_power.cli import build_parser, main
from feast_power.errors import Breakdown

DIAG100 = Path(__file__).resolve().parents[2] / "data" / "diag100.mtx"
SOLVE_ARGS = (
    "--a 89.5 --b 100.5 -r 10 --m 12 --num-cmp 6 --num-out 5 --max-it 3".split()
)


@pytest.fixture(autouse=True)
def isolated_cwd(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.chdir(tmp_path)


class TestParser:
    """Tests for argument parsing."""

    def test_solve_defaults_to_f2p(self) -> None:
        """solve without --algorithm leaves the choice to the config."""
        args = build_parser().parse_args(
            ["solve", "--matrix", "m.mtx", "--a", "1", "--b", "2"]
        )
        assert args.command == "solve"
        assert args.algorithm is None
        assert args.a == 1.0
        assert args.parallel_inner is None

    def test_subcommand_required(self) -> None:
        """A missing subcommand is a usage error."""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestMain:
    """Tests for main and its exit codes."""

    def test_solve_prints_report(self, capsys: pytest.CaptureFixture[str]) -> None:
        """Without --output the JSON report goes to stdout."""
        assert main(["solve", "--matrix", str(DIAG100), *SOLVE_ARGS]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["algorithm"] == "f2p"
        assert report["eigenvalues"][0] == pytest.approx(100.0)
        assert len(report["eigenvalues"]) == 5

    def test_solve_writes_output(self, tmp_path: Path) -> None:
        """--output writes the report file."""
        output = tmp_path / "report.json"
        args = ["--algorithm", "feast2", "--matrix", str(DIAG100), *SOLVE_ARGS]
        code = main(["solve", *args, "--output", str(output)])
        assert code == 0
        assert json.loads(output.read_text(encoding="utf-8"))["algorithm"] == "feast2"

    def test_empty_interval_exits_zero(
        self, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """An interval without eigenvalues is a successful run."""
        args = "--a 100.5 --b 101.5 -r 50 --m 4 --max-it 2".split()
        code = main(["solve", "--matrix", str(DIAG100), *args])
        assert code == 0
        assert json.loads(capsys.readouterr().out)["eigenvalues"] == []

    def test_filter_scan(self, tmp_path: Path) -> None:
        """filter-scan runs without a matrix."""
        csv_path = tmp_path / "scan.csv"
        args = "-c 0 -r 1 --scan-points 21".split()
        code = main(["filter-scan", *args, "--csv", str(csv_path)])
        assert code == 0
        assert len(csv_path.read_text(encoding="utf-8").splitlines()) == 22

    def test_config_file(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str]
    ) -> None:
        """Settings can come from a key=value file."""
        config_file = tmp_path / "run.cfg"
        config_file.write_text(
            f"matrix_path={DIAG100}\na=95.5\nb=100.5\n", encoding="utf-8"
        )
        assert main(["oracle", "--config", str(config_file)]) == 0
        assert json.loads(capsys.readouterr().out)["eigenvalues"] == [
            100.0, 99.0, 98.0, 97.0, 96.0
        ]

    def test_invalid_interval_exit_code(self) -> None:
        """An empty interval is a configuration error."""
        args = "--a 5 --b 1 -r 3 --m 2".split()
        assert main(["solve", "--matrix", str(DIAG100), *args]) == 2

    def test_unknown_config_key_exit_code(self, tmp_path: Path) -> None:
        """Config file errors map to exit code 2."""
        config_file = tmp_path / "run.cfg"
        config_file.write_text("wobble=1\n", encoding="utf-8")
        args = ["--matrix", str(DIAG100), "--config", str(config_file)]
        assert main(["oracle", *args]) == 2

    def test_parse_error_exit_code(self, tmp_path: Path) -> None:
        """A malformed matrix file maps to exit code 3."""
        matrix_path = tmp_path / "bad.mtx"
        matrix_path.write_text(
            "%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 1.0\n",
            encoding="utf-8",
        )
        assert main(["oracle", "--matrix", str(matrix_path)]) == 3

    def test_numerical_failure_exit_code(self, tmp_path: Path) -> None:
        """Numerical failures map to exit code 4 and still write the partial report."""
        output = tmp_path / "report.json"
        with patch(
            "feast_power.runner.f2p",
            side_effect=Breakdown("BiCG breakdown", iteration=7),
        ):
            args = ["--matrix", str(DIAG100), *SOLVE_ARGS, "--output", str(output)]
            code = main(["solve", *args])
        assert code == 4
        assert json.loads(output.read_text(encoding="utf-8"))["error"].startswith(
            "Breakdown"
        )

    def test_unwritable_output_exit_code(self, tmp_path: Path) -> None:
        """Output that cannot be written maps to exit code 1."""
        blocker = tmp_path / "blocker"
        blocker.write_text("", encoding="utf-8")
        output = blocker / "report.json"
        code = main(["oracle", "--matrix", str(DIAG100), "--output", str(output)])
        assert code == 1
